import pytest

from creoletag.creole import shipped_grammar


@pytest.fixture(scope="session")
def grammar():
    return shipped_grammar()


@pytest.fixture(scope="session")
def particle_lexemes(grammar):
    """Lexeme ids of everything that is not a content word."""
    content = {"N", "V", "Nprop"}
    return {l.id for l in grammar.lexicon if l.category not in content}
