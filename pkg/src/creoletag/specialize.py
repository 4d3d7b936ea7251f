"""Project the multidialectal grammar onto a single dialect.

Specialization unifies the language feature with one dialect everywhere,
drops the trees and lexeme variants that refuse, and then erases the now
redundant attribute from structures, domains and fusion guards.  What
remains is an ordinary single-language grammar.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace as dc_replace

from . import engine
from .errors import AnchorUnificationFailure, EmptyGrammar, InvalidSpec
from .featstruct import FeatureStruct, Var, erase_attribute
from .grammar import FusionRule, Grammar, Lexeme, Metadata, Variant
from .trees import ElementaryTree, TreeNode


@dataclass
class SpecializationReport:
    dialect: str
    dropped_trees: list = field(default_factory=list)
    dropped_variants: list = field(default_factory=list)  # (lexeme, surface)
    dropped_lexemes: list = field(default_factory=list)
    dropped_rules: int = 0


def _constrain_fs(fs: FeatureStruct, dialect: str):
    """Unify with {lan:{dialect}} and erase lan; None when incompatible."""
    cell = fs.get("lan")
    if isinstance(cell, frozenset) and dialect not in cell:
        return None
    return erase_attribute(fs, "lan")


def _constrain_node(node: TreeNode, dialect: str):
    top = _constrain_fs(node.top, dialect)
    bottom = _constrain_fs(node.bottom, dialect)
    if top is None or bottom is None:
        return None
    children = []
    for child in node.children:
        constrained = _constrain_node(child, dialect)
        if constrained is None:
            return None
        children.append(constrained)
    return TreeNode(label=node.label, kind=node.kind, top=top, bottom=bottom,
                    children=tuple(children))


def specialize(grammar: Grammar, dialect: str) -> Grammar:
    specialized, _ = specialize_with_report(grammar, dialect)
    return specialized


def specialize_with_report(grammar: Grammar, dialect: str):
    """Single-dialect projection plus an audit of everything dropped."""
    if "lan" not in grammar.schema:
        return grammar, SpecializationReport(dialect)
    if dialect not in grammar.schema.full("lan"):
        raise InvalidSpec("unknown dialect %r" % dialect)

    report = SpecializationReport(dialect)

    lexicon = []
    for lexeme in grammar.lexicon:
        variants = []
        for variant in lexeme.variants:
            cell = variant.features.get("lan")
            if isinstance(cell, frozenset) and dialect not in cell:
                report.dropped_variants.append((lexeme.id, variant.surface))
                continue
            variants.append(Variant(surface=variant.surface,
                                    features=erase_attribute(variant.features,
                                                             "lan")))
        if variants:
            lexicon.append(Lexeme(id=lexeme.id, category=lexeme.category,
                                  variants=tuple(variants)))
        else:
            report.dropped_lexemes.append(lexeme.id)

    trees = []
    for tree in grammar.trees:
        root = _constrain_node(tree.root, dialect)
        if root is None:
            report.dropped_trees.append(tree.name)
            continue
        trees.append(ElementaryTree(name=tree.name, klass=tree.klass, root=root))

    domains = tuple(d for d in grammar.domains if d.name != "lan")
    rules = []
    for rule in grammar.fusion_rules:
        if rule.lan is not None and dialect not in rule.lan:
            report.dropped_rules += 1
            continue
        rules.append(FusionRule(pattern=rule.pattern,
                                replacement=rule.replacement, lan=None))

    candidate = Grammar(domains=domains, trees=trees, lexicon=lexicon,
                        fusion_rules=rules,
                        metadata=Metadata(
                            name="%s.%s" % (grammar.metadata.name,
                                            dialect.lower()),
                            version=grammar.metadata.version))

    kept_trees = []
    for tree in candidate.trees:
        if _anchor_fillable(candidate, tree):
            kept_trees.append(tree)
        else:
            report.dropped_trees.append(tree.name)
    if not kept_trees:
        raise EmptyGrammar("no trees survive specialization to %s" % dialect)

    specialized = Grammar(domains=domains, trees=kept_trees, lexicon=lexicon,
                          fusion_rules=rules, metadata=candidate.metadata)
    report.dropped_trees.sort()
    return specialized, report


def _anchor_fillable(grammar: Grammar, tree: ElementaryTree) -> bool:
    label = tree.anchor_label
    if label is None:
        return True
    for lexeme in grammar.lexemes_of_category(label):
        for index in range(len(lexeme.variants)):
            try:
                engine.instantiate(grammar, tree, lexeme.id, index)
                return True
            except AnchorUnificationFailure:
                continue
    return False


def project_language(grammar: Grammar) -> Grammar:
    """Erase the language attribute everywhere without dropping anything.

    Unlike specialize(), every tree and every variant survives; the
    result accepts any structurally well-formed string regardless of
    dialect mixing.  Used by the recognizer's mixed-input path.
    """
    if "lan" not in grammar.schema:
        return grammar

    def strip_node(node):
        return TreeNode(label=node.label, kind=node.kind,
                        top=erase_attribute(node.top, "lan"),
                        bottom=erase_attribute(node.bottom, "lan"),
                        children=tuple(strip_node(c) for c in node.children))

    trees = [ElementaryTree(name=t.name, klass=t.klass, root=strip_node(t.root))
             for t in grammar.trees]
    lexicon = [Lexeme(id=l.id, category=l.category,
                      variants=tuple(Variant(surface=v.surface,
                                             features=erase_attribute(
                                                 v.features, "lan"))
                                     for v in l.variants))
               for l in grammar.lexicon]
    domains = tuple(d for d in grammar.domains if d.name != "lan")
    rules = [FusionRule(pattern=r.pattern, replacement=r.replacement, lan=None)
             for r in grammar.fusion_rules]
    return Grammar(domains=domains, trees=trees, lexicon=lexicon,
                   fusion_rules=rules,
                   metadata=Metadata(name=grammar.metadata.name + ".anylan",
                                     version=grammar.metadata.version))


@dataclass
class EquivalenceReport:
    dialect: str
    mismatches: list = field(default_factory=list)  # (spec, base, specialized)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def equivalence_check(grammar: Grammar, dialect: str, corpus) -> EquivalenceReport:
    """Generate each corpus item through the full grammar restricted to the
    dialect and through the specialized grammar; report token-set diffs."""
    from .errors import NoRealization
    from .generate import generate

    specialized = specialize(grammar, dialect)
    report = EquivalenceReport(dialect)

    def token_sets(g, spec):
        try:
            reals = generate(g, spec)
        except NoRealization:
            return frozenset()
        out = set()
        for real in reals:
            out.add(real.tokens)
            out.update(real.alternatives)
        return frozenset(out)

    for spec in corpus:
        base = token_sets(grammar, dc_replace(spec, lan=frozenset([dialect])))
        mono = token_sets(specialized, dc_replace(spec, lan=None))
        if base != mono:
            report.mismatches.append((spec, sorted(base), sorted(mono)))
    return report
