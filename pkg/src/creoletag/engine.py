"""Derivation engine: substitution, adjunction, collapse, enumeration.

Adjunction follows the two-plane contract.  When an auxiliary tree is
spliced at a node, the node splits: its top goes to the copy built from
the auxiliary root (unified with the root's top), its bottom to the copy
built from the foot (unified with the foot's bottom), and the subtree
below the node hangs from the foot position.  Nothing checks that a
node's own top and bottom agree until :func:`finalize`, which collapses
every node once and reports the first node that refuses.

Node addresses are Gorn paths (root = (), i-th child appends i).  After
a splice the subtree below the foot keeps its addresses relative to the
foot position.  Adjunction is never allowed at a node that originated
as a foot; the particle stacks of the grammar grow by adjoining at the
fresh root copy instead, so every node hosts at most one auxiliary.

Derived trees are immutable; every operation returns a new tree and
either succeeds or raises without touching its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .errors import (AnchorUnificationFailure, CollapseFailure, LabelMismatch,
                     NotAnAdjunctionSite, NotASubstitutionSite, PendingSite,
                     UnificationFailure)
from .featstruct import Bindings, FeatureStruct, Var, unify
from .grammar import Grammar, Variant
from .trees import ANCHOR, AUXILIARY, FOOT, INITIAL, SUBST

_OP_ORDER = {"instantiate": 0, "substitute": 1, "adjoin": 2}


@dataclass(frozen=True)
class Step:
    """One derivation event, replayable against the same grammar."""

    op: str
    tree: str
    address: tuple = ()
    lexeme: Optional[str] = None
    variant: Optional[int] = None
    nested: Optional[tuple] = None  # history of a pre-built filler

    def key(self):
        base = (_OP_ORDER.get(self.op, 9), self.address, self.tree,
                self.lexeme or "", -1 if self.variant is None else self.variant)
        if self.nested:
            return base + (tuple(s.key() for s in self.nested),)
        return base


@dataclass(frozen=True)
class DNode:
    """A node of a derived tree."""

    label: str
    kind: str
    top: FeatureStruct
    bottom: FeatureStruct
    children: tuple = ()
    surface: Optional[str] = None
    lexeme: Optional[str] = None
    variant: Optional[int] = None
    was_foot: bool = False

    def walk(self, address=()):
        yield address, self
        for i, child in enumerate(self.children):
            yield from child.walk(address + (i,))


@dataclass(frozen=True)
class DerivedTree:
    root: DNode
    klass: str
    env: Bindings
    history: tuple = ()
    next_var: int = 0

    @property
    def pending_sites(self):
        return tuple(addr for addr, node in self.root.walk()
                     if node.kind == SUBST)

    def node_at(self, address) -> DNode:
        node = self.root
        for i in address:
            try:
                node = node.children[i]
            except IndexError:
                raise KeyError("no node at address %r" % (address,)) from None
        return node

    def trace_key(self):
        return tuple(step.key() for step in self.history)


@dataclass(frozen=True)
class FinalizeResult:
    frontier: tuple[str, ...]
    features: FeatureStruct
    lexical: tuple  # (token, lexeme id, variant index) per frontier token


# --- helpers ---------------------------------------------------------------

def _fresh_nodes(node, mapping):
    """Copy an elementary TreeNode into a DNode with variables renamed."""
    return DNode(
        label=node.label,
        kind=node.kind,
        top=node.top.rename(mapping),
        bottom=node.bottom.rename(mapping),
        children=tuple(_fresh_nodes(c, mapping) for c in node.children),
    )


def _shift_fs(fs, offset):
    out = {}
    for attr, cell in fs.items():
        if isinstance(cell, Var) and cell.name.startswith("v"):
            out[attr] = Var("v%d" % (int(cell.name[1:]) + offset))
        else:
            out[attr] = cell
    return FeatureStruct(out)


def _shift_node(node, offset):
    return replace(node,
                   top=_shift_fs(node.top, offset),
                   bottom=_shift_fs(node.bottom, offset),
                   children=tuple(_shift_node(c, offset) for c in node.children))


def _shift_env(env: Bindings, offset) -> Bindings:
    def shift_name(name):
        return "v%d" % (int(name[1:]) + offset) if name.startswith("v") else name

    raw = {}
    for name, value in env._map.items():  # noqa: SLF001 - same-module friend
        raw[shift_name(name)] = shift_name(value) if isinstance(value, str) else value
    return Bindings(raw)


def _shift_tree(derived: DerivedTree, offset: int) -> DerivedTree:
    if offset == 0:
        return derived
    return DerivedTree(root=_shift_node(derived.root, offset),
                       klass=derived.klass,
                       env=_shift_env(derived.env, offset),
                       history=derived.history,
                       next_var=derived.next_var + offset)


def _replace_at(node, address, new_node):
    if not address:
        return new_node
    i = address[0]
    children = list(node.children)
    children[i] = _replace_at(children[i], address[1:], new_node)
    return replace(node, children=tuple(children))


def _merge_env(a: Bindings, b: Bindings) -> Bindings:
    raw = dict(a._map)  # noqa: SLF001
    raw.update(b._map)  # noqa: SLF001
    return Bindings(raw)


# --- operations ------------------------------------------------------------

def instantiate(grammar: Grammar, tree, lexeme_id: Optional[str] = None,
                variant_index: Optional[int] = None,
                variant: Optional[Variant] = None) -> DerivedTree:
    """Make a fresh derived tree from an elementary tree.

    Variables are renamed apart and, when the tree is lexicalized, the
    anchor's bottom is unified with the lexeme variant's features.
    """
    if isinstance(tree, str):
        tree = grammar.tree(tree)
    if variant is None and lexeme_id is not None:
        lexeme = grammar.lexeme(lexeme_id)
        variant = lexeme.variants[variant_index]

    names = sorted(tree.root.variables())
    mapping = {name: Var("v%d" % i) for i, name in enumerate(names)}
    root = _fresh_nodes(tree.root, mapping)
    env = Bindings()
    anchor_addr = tree.anchor_address()

    if variant is not None:
        if anchor_addr is None:
            raise AnchorUnificationFailure(
                "tree %r has no anchor slot for %r" % (tree.name, variant.surface))
        anchor = _node_at(root, anchor_addr)
        if lexeme_id is not None and grammar.lexeme(lexeme_id).category != anchor.label:
            raise AnchorUnificationFailure(
                "lexeme %s is not of category %s" % (lexeme_id, anchor.label))
        unified = unify(anchor.bottom, variant.features, grammar.schema, env)
        if unified is None:
            raise AnchorUnificationFailure(
                "%r does not fit the anchor of %r" % (variant.surface, tree.name))
        bottom, env = unified
        anchored = replace(anchor, bottom=bottom, surface=variant.surface,
                           lexeme=lexeme_id, variant=variant_index)
        root = _replace_at(root, anchor_addr, anchored)
    elif anchor_addr is not None:
        raise AnchorUnificationFailure(
            "tree %r requires a lexeme variant" % tree.name)

    step = Step("instantiate", tree.name, (), lexeme_id, variant_index)
    return DerivedTree(root=root, klass=tree.klass, env=env,
                       history=(step,), next_var=len(names))


def substitute(grammar: Grammar, host: DerivedTree, address,
               filler: DerivedTree) -> DerivedTree:
    """Fill a pending substitution site with a complete initial-derived tree."""
    address = tuple(address)
    try:
        site = host.node_at(address)
    except KeyError:
        raise NotASubstitutionSite("no node at %r" % (address,)) from None
    if site.kind != SUBST:
        raise NotASubstitutionSite("node at %r is not a pending site" % (address,))
    if filler.klass != INITIAL:
        raise NotASubstitutionSite("filler is not initial-derived")
    if filler.pending_sites:
        raise NotASubstitutionSite("filler still has pending sites")
    if filler.root.label != site.label:
        raise NotASubstitutionSite("site %s cannot take a %s filler"
                                   % (site.label, filler.root.label))

    filler = _shift_tree(filler, host.next_var)
    env = _merge_env(host.env, filler.env)
    unified = unify(site.top, filler.root.top, grammar.schema, env)
    if unified is None:
        raise UnificationFailure("substitution at %r: top features clash" % (address,))
    top, env = unified

    new_node = replace(filler.root, top=top)
    root = _replace_at(host.root, address, new_node)
    if len(filler.history) == 1:
        first = filler.history[0]
        step = Step("substitute", first.tree, address, first.lexeme, first.variant)
    else:
        step = Step("substitute", filler.history[0].tree, address,
                    nested=filler.history)
    return DerivedTree(root=root, klass=host.klass, env=env,
                       history=host.history + (step,),
                       next_var=filler.next_var)


def adjoin(grammar: Grammar, host: DerivedTree, address,
           aux: DerivedTree) -> DerivedTree:
    """Splice an auxiliary-derived tree at an internal node."""
    address = tuple(address)
    if aux.klass != AUXILIARY:
        raise NotAnAdjunctionSite("adjoined material must be auxiliary-derived")
    try:
        node = host.node_at(address)
    except KeyError:
        raise NotAnAdjunctionSite("no node at %r" % (address,)) from None
    if node.kind in (ANCHOR, SUBST):
        raise NotAnAdjunctionSite("cannot adjoin at a %s node" % node.kind)
    if node.was_foot or node.kind == FOOT:
        raise NotAnAdjunctionSite("cannot adjoin at a foot node")
    if node.label != aux.root.label:
        raise LabelMismatch("cannot adjoin %s tree at %s node"
                            % (aux.root.label, node.label))

    foot_addr = None
    for a, n in aux.root.walk():
        if n.kind == FOOT:
            foot_addr = a
            break
    if foot_addr is None:
        raise NotAnAdjunctionSite("auxiliary tree lost its foot")

    aux = _shift_tree(aux, host.next_var)
    env = _merge_env(host.env, aux.env)
    foot = aux.node_at(foot_addr)

    unified = unify(node.top, aux.root.top, grammar.schema, env)
    if unified is None:
        raise UnificationFailure("adjunction at %r: top features clash" % (address,))
    new_top, env = unified
    unified = unify(node.bottom, foot.bottom, grammar.schema, env)
    if unified is None:
        raise UnificationFailure("adjunction at %r: bottom/foot features clash"
                                 % (address,))
    low_bottom, env = unified

    # the lower copy keeps the foot's top plane and the host node's children
    lower = DNode(label=node.label, kind="internal", top=foot.top,
                  bottom=low_bottom, children=node.children, was_foot=True)
    spliced = _replace_at(aux.root, foot_addr, lower)
    upper = replace(spliced, top=new_top)
    root = _replace_at(host.root, address, upper)

    if len(aux.history) == 1:
        first = aux.history[0]
        step = Step("adjoin", first.tree, address, first.lexeme, first.variant)
    else:
        step = Step("adjoin", aux.history[0].tree, address, nested=aux.history)
    return DerivedTree(root=root, klass=host.klass, env=env,
                       history=host.history + (step,),
                       next_var=aux.next_var)


def finalize(grammar: Grammar, derived: DerivedTree) -> FinalizeResult:
    """Collapse top against bottom at every node and read the frontier."""
    pending = derived.pending_sites
    if pending:
        raise PendingSite("substitution sites still open at %s"
                          % ", ".join(str(a) for a in pending))

    env = derived.env
    collapsed_root = None
    for address, node in sorted(derived.root.walk()):
        unified = unify(node.top, node.bottom, grammar.schema, env)
        if unified is None:
            raise CollapseFailure(address)
        fs, env = unified
        if address == ():
            collapsed_root = fs

    frontier = []
    lexical = []
    for _, node in derived.root.walk():
        if node.kind == ANCHOR and node.surface:
            frontier.append(node.surface)
            lexical.append((node.surface, node.lexeme, node.variant))
    return FinalizeResult(frontier=tuple(frontier),
                          features=collapsed_root.resolve(env),
                          lexical=tuple(lexical))


def replay(grammar: Grammar, history) -> DerivedTree:
    """Re-execute a derivation trace against the same grammar."""
    derived = None
    for step in history:
        if step.op == "instantiate":
            derived = instantiate(grammar, step.tree, step.lexeme, step.variant)
            continue
        if step.nested is not None:
            part = replay(grammar, step.nested)
        else:
            part = instantiate(grammar, step.tree, step.lexeme, step.variant)
        if step.op == "substitute":
            derived = substitute(grammar, derived, step.address, part)
        elif step.op == "adjoin":
            derived = adjoin(grammar, derived, step.address, part)
        else:
            raise ValueError("unknown trace op %r" % step.op)
    return derived


# --- brute-force enumeration ----------------------------------------------

def _node_at(root, address):
    node = root
    for i in address:
        node = node.children[i]
    return node


def _instantiations(grammar, tree, lexemes=None, surfaces=None):
    """All ways to instantiate one elementary tree, deterministically ordered."""
    anchor_label = tree.anchor_label
    if anchor_label is None:
        try:
            return [instantiate(grammar, tree)]
        except AnchorUnificationFailure:
            return []
    out = []
    for lexeme in grammar.lexemes_of_category(anchor_label):
        if lexemes is not None and lexeme.id not in lexemes:
            continue
        for index, variant in enumerate(lexeme.variants):
            if surfaces is not None and variant.surface and variant.surface not in surfaces:
                continue
            try:
                out.append(instantiate(grammar, tree, lexeme.id, index))
            except AnchorUnificationFailure:
                continue
    return out


def _saturated(grammar, label, budget, lexemes, surfaces, memo):
    """Complete initial-derived trees of a category: every substitution
    site recursively filled with minimal fillers, no adjunctions.  Costs
    count the substitutions spent.  Adjunction is left to the caller,
    which reaches inside the spliced material just as well."""
    key = (label, budget)
    if key in memo:
        return memo[key]
    memo[key] = []  # guards against cyclic site references
    out = []
    for tree in grammar.initial_trees():
        if tree.root.label != label:
            continue
        for inst in _instantiations(grammar, tree, lexemes, surfaces):
            out.extend(_fill_sites(grammar, inst, budget,
                                   lexemes, surfaces, memo))
    memo[key] = out
    return out


def _fill_sites(grammar, derived, budget, lexemes, surfaces, memo):
    sites = derived.pending_sites
    if not sites:
        return [(derived, 0)]
    address = sites[0]
    site = derived.node_at(address)
    results = []
    if budget < 1:
        return results
    for filler, subcost in _saturated(grammar, site.label, budget - 1,
                                      lexemes, surfaces, memo):
        cost = 1 + subcost
        if cost > budget:
            continue
        try:
            nxt = substitute(grammar, derived, address, filler)
        except (UnificationFailure, NotASubstitutionSite):
            continue
        for full, more in _fill_sites(grammar, nxt, budget - cost,
                                      lexemes, surfaces, memo):
            results.append((full, cost + more))
    return results


def enumerate_derivations(grammar: Grammar, goal_label: str,
                          goal_fs: FeatureStruct, max_steps: int,
                          lexemes=None, surfaces=None):
    """Every finalizable derivation within the step bound whose collapsed
    root features unify with the goal.

    The bound counts substitutions plus adjunctions.  `lexemes`
    optionally restricts which lexemes may anchor trees (the semantic
    input selects the content words; pass ids for every lexeme the
    derivation may use).  `surfaces` optionally restricts anchor surfaces
    (zero forms always pass).  Results are deduplicated by (frontier,
    features) keeping the lexicographically least trace, and returned
    sorted by trace.
    """
    memo = {}
    bases = _saturated(grammar, goal_label, max_steps, lexemes, surfaces, memo)
    aux_pool = grammar.auxiliary_trees()
    results = {}

    def consider(derived):
        try:
            final = finalize(grammar, derived)
        except (CollapseFailure, PendingSite):
            return
        if unify(final.features, goal_fs, grammar.schema) is None:
            return
        key = (final.frontier, final.features)
        prior = results.get(key)
        if prior is None or derived.trace_key() < prior[0].trace_key():
            results[key] = (derived, final)

    def explore(derived, steps_left):
        consider(derived)
        if steps_left <= 0:
            return
        for address, node in sorted(derived.root.walk()):
            if node.kind in (ANCHOR, SUBST, FOOT) or node.was_foot:
                continue
            for tree in aux_pool:
                if tree.root.label != node.label:
                    continue
                for aux in _instantiations(grammar, tree, lexemes, surfaces):
                    try:
                        nxt = adjoin(grammar, derived, address, aux)
                    except (UnificationFailure, LabelMismatch,
                            NotAnAdjunctionSite):
                        continue
                    explore(nxt, steps_left - 1)

    for base, cost in bases:
        explore(base, max_steps - cost)

    ordered = sorted(results.values(), key=lambda pair: pair[0].trace_key())
    return [pair[0] for pair in ordered]
