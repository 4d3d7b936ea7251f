"""Grammar container: domains, elementary trees, lexicon, fusion rules.

A Grammar is canonicalized at construction (domains sorted by name,
trees by name, lexemes by id) so that serialization is deterministic and
a load/serialize round trip is the identity.  Variant order inside a
lexeme is meaningful and preserved as written.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .featstruct import FeatureStruct, Schema, Var
from .trees import ANCHOR, AUXILIARY, FOOT, INITIAL, SUBST, ElementaryTree


@dataclass(frozen=True)
class Variant:
    """One surface realization of a lexeme with its features.

    An empty surface is a zero form: it anchors a tree but contributes
    no token to the frontier.
    """

    surface: str
    features: FeatureStruct


@dataclass(frozen=True)
class Lexeme:
    id: str
    category: str
    variants: tuple[Variant, ...]

    def lan_coverage(self) -> frozenset:
        out = frozenset()
        for variant in self.variants:
            cell = variant.features.get("lan")
            if isinstance(cell, frozenset):
                out |= cell
        return out


@dataclass(frozen=True)
class FusionRule:
    """Surface contraction of adjacent particles (te + ap > tap).

    `lan` is the language guard: the rule fires only for realizations
    whose language set it covers.  None means unconditional (the guard
    was erased by specialization).
    """

    pattern: tuple[str, ...]
    replacement: tuple[str, ...]
    lan: Optional[frozenset] = None


@dataclass(frozen=True)
class Metadata:
    name: str = "grammar"
    version: str = "1"


class Grammar:
    """Immutable after construction; safe to share between tasks."""

    def __init__(self, domains, trees, lexicon, fusion_rules=(), metadata=None):
        self.domains = tuple(sorted(domains, key=lambda d: d.name))
        self.trees = tuple(sorted(trees, key=lambda t: t.name))
        self.lexicon = tuple(sorted(lexicon, key=lambda l: l.id))
        self.fusion_rules = tuple(fusion_rules)
        self.metadata = metadata or Metadata()
        self.schema = Schema(self.domains)
        self._trees_by_name = {t.name: t for t in self.trees}
        self._lexemes_by_id = {l.id: l for l in self.lexicon}

    def tree(self, name: str) -> ElementaryTree:
        return self._trees_by_name[name]

    def has_tree(self, name: str) -> bool:
        return name in self._trees_by_name

    def lexeme(self, lid: str) -> Lexeme:
        return self._lexemes_by_id[lid]

    def has_lexeme(self, lid: str) -> bool:
        return lid in self._lexemes_by_id

    def lexemes_of_category(self, category: str):
        return [l for l in self.lexicon if l.category == category]

    def initial_trees(self):
        return [t for t in self.trees if t.klass == INITIAL]

    def auxiliary_trees(self):
        return [t for t in self.trees if t.klass == AUXILIARY]

    def __eq__(self, other):
        return (isinstance(other, Grammar)
                and self.domains == other.domains
                and self.trees == other.trees
                and self.lexicon == other.lexicon
                and self.fusion_rules == other.fusion_rules
                and self.metadata == other.metadata)

    def __repr__(self):
        return "Grammar(%s: %d trees, %d lexemes)" % (
            self.metadata.name, len(self.trees), len(self.lexicon))


def validate(grammar: Grammar) -> list[str]:
    """Static well-formedness check; returns findings (empty = valid)."""
    findings = []

    seen = set()
    for tree in grammar.trees:
        if tree.name in seen:
            findings.append("duplicate tree name %r" % tree.name)
        seen.add(tree.name)
    seen = set()
    for lexeme in grammar.lexicon:
        if lexeme.id in seen:
            findings.append("duplicate lexeme id %r" % lexeme.id)
        seen.add(lexeme.id)

    for tree in grammar.trees:
        feet = [(a, n) for a, n in tree.nodes() if n.kind == FOOT]
        anchors = [(a, n) for a, n in tree.nodes() if n.kind == ANCHOR]
        if tree.klass == INITIAL and feet:
            findings.append("initial tree %r has a foot node" % tree.name)
        if tree.klass == AUXILIARY:
            if len(feet) != 1:
                findings.append("auxiliary tree %r has %d foot nodes"
                                % (tree.name, len(feet)))
            elif feet[0][1].label != tree.root.label:
                findings.append("foot/root mismatch in tree %r (%s vs %s)"
                                % (tree.name, feet[0][1].label, tree.root.label))
        if len(anchors) > 1:
            findings.append("tree %r has more than one anchor" % tree.name)
        for address, node in tree.nodes():
            for fs in (node.top, node.bottom):
                findings.extend(_check_fs(grammar, fs,
                                          "tree %r node %s" % (tree.name, address or ("root",))))

    for lexeme in grammar.lexicon:
        for i, variant in enumerate(lexeme.variants):
            where = "lexeme %s variant %d (%r)" % (lexeme.id, i, variant.surface)
            findings.extend(_check_fs(grammar, variant.features, where))
            if "lan" in grammar.schema:
                cell = variant.features.get("lan")
                if not isinstance(cell, frozenset):
                    findings.append("%s does not bind lan" % where)

    initial_roots = {t.root.label for t in grammar.initial_trees()}
    lexeme_categories = {l.category for l in grammar.lexicon}
    for tree in grammar.trees:
        for address, node in tree.nodes():
            if node.kind == SUBST and node.label not in initial_roots:
                findings.append("no initial tree derives substitution site %r in tree %r"
                                % (node.label, tree.name))
            if node.kind == ANCHOR and node.label not in lexeme_categories:
                findings.append("no lexeme of category %r fills the anchor of tree %r"
                                % (node.label, tree.name))

    if "lan" in grammar.schema:
        lan_domain = grammar.schema.full("lan")
        for rule in grammar.fusion_rules:
            if rule.lan is not None and not rule.lan <= lan_domain:
                findings.append("fusion rule %r uses unknown language codes"
                                % (" ".join(rule.pattern),))
    for rule in grammar.fusion_rules:
        if not rule.pattern or not rule.replacement:
            findings.append("fusion rule with empty pattern or replacement")

    return findings


def _check_fs(grammar: Grammar, fs: FeatureStruct, where: str) -> list[str]:
    findings = []
    for attr, cell in fs.items():
        if attr not in grammar.schema:
            findings.append("%s uses undeclared attribute %r" % (where, attr))
            continue
        if isinstance(cell, Var):
            continue
        extra = cell - grammar.schema.full(attr)
        if extra:
            findings.append("%s binds %r to values outside its domain: %s"
                            % (where, attr, ",".join(sorted(extra))))
    return findings
