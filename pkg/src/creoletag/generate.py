"""Surface realization from flat semantic specifications.

The generator is a directed realizer: it knows which auxiliary trees
realize which feature (a slot plan), drives the engine through each
candidate plan, keeps the derivations whose collapsed features unify
with the goal, applies the fusion rules and groups the survivors.  The
blind alternative, :func:`creoletag.engine.enumerate_derivations`, stays
an independent route so the two can be compared in tests.

Realizations identical in tokens merge with unioned language sets (the
dialectal continuum made visible); a realization whose language set is
contained in another's is folded into it as a listed alternative (the
optional Guianese imperfective particle and the k'alé/kay doublet).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from . import engine
from .errors import (CollapseFailure, InvalidSpec, LabelMismatch, MissingCell,
                     NoRealization, NotAnAdjunctionSite, NotASubstitutionSite,
                     PendingSite, UnificationFailure)
from .featstruct import EMPTY, FeatureStruct, unify
from .grammar import Grammar

ASPECTS = ("none", "imp", "frq", "prg")
NUMBERS = ("sg", "pl")


@dataclass(frozen=True)
class NPSpec:
    """Determination request for one noun phrase; dem implies spe."""

    lexeme: str
    nbr: str = "sg"
    spe: bool = False
    dem: bool = False
    complement: Optional[str] = None

    def __post_init__(self):
        if self.nbr not in NUMBERS:
            raise InvalidSpec("nbr must be sg or pl, not %r" % (self.nbr,))
        if self.dem and not self.spe:
            object.__setattr__(self, "spe", True)


@dataclass(frozen=True)
class TMA:
    pas: bool = False
    psp: bool = False
    prx: bool = False
    cnd: bool = False
    asp: str = "none"

    def __post_init__(self):
        if self.asp not in ASPECTS:
            raise InvalidSpec("asp must be one of %s" % (ASPECTS,))
        if self.prx and self.psp:
            raise InvalidSpec("prx replaces the plain future; drop psp")
        if self.cnd and (self.pas or self.psp):
            raise InvalidSpec("cnd expands to pas+psp internally; "
                              "do not set them explicitly")


@dataclass(frozen=True)
class SemSpec:
    pred: Optional[str] = None
    args: tuple = ()
    tma: TMA = field(default_factory=TMA)
    lan: Optional[frozenset] = None

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if self.lan is not None:
            object.__setattr__(self, "lan", frozenset(self.lan))
            if not self.lan:
                raise InvalidSpec("lan constraint must not be empty")
        if self.pred is None and len(self.args) != 1:
            raise InvalidSpec("without a predicate, exactly one noun phrase "
                              "must be requested")
        if len(self.args) > 1:
            raise InvalidSpec("the shipped fragment covers at most one argument")


@dataclass(frozen=True)
class Realization:
    tokens: tuple
    lan_set: frozenset
    alternatives: tuple = ()
    trace: tuple = ()
    features: FeatureStruct = EMPTY


def semspec_from_json(data) -> SemSpec:
    """Build a SemSpec from the CLI's JSON document."""
    if not isinstance(data, dict) or not data:
        raise InvalidSpec("semantic input must be a non-empty JSON object")
    known = {"pred", "args", "tma", "lan"}
    unknown = set(data) - known
    if unknown:
        raise InvalidSpec("unknown fields: %s" % ", ".join(sorted(unknown)))
    args = []
    for i, item in enumerate(data.get("args", [])):
        if not isinstance(item, dict) or "lexeme" not in item:
            raise InvalidSpec("args[%d] needs at least a lexeme" % i)
        extra = set(item) - {"lexeme", "nbr", "spe", "dem", "complement"}
        if extra:
            raise InvalidSpec("args[%d] has unknown fields: %s"
                              % (i, ", ".join(sorted(extra))))
        args.append(NPSpec(lexeme=item["lexeme"],
                           nbr=item.get("nbr", "sg"),
                           spe=bool(item.get("spe", False)),
                           dem=bool(item.get("dem", False)),
                           complement=item.get("complement")))
    tma_data = data.get("tma", {})
    if not isinstance(tma_data, dict):
        raise InvalidSpec("tma must be an object")
    tma = TMA(pas=bool(tma_data.get("pas", False)),
              psp=bool(tma_data.get("psp", False)),
              prx=bool(tma_data.get("prx", False)),
              cnd=bool(tma_data.get("cnd", False)),
              asp=tma_data.get("asp", "none"))
    lan = data.get("lan")
    return SemSpec(pred=data.get("pred"), args=tuple(args), tma=tma,
                   lan=frozenset(lan) if lan else None)


# --- fusion -----------------------------------------------------------------

def _fusion_rules_for(lan_set, rules):
    applicable = [r for r in rules if r.lan is None or lan_set <= r.lan]
    applicable.sort(key=lambda r: (-len(r.pattern), r.pattern))
    return applicable


def apply_fusion(tokens, lan_set, rules, anchor_index=None):
    """One left-to-right pass, longest pattern first, once per position.

    Only rules whose language guard covers the whole `lan_set` fire.  No
    match may reach past `anchor_index` (the predicate anchor position),
    so fusion never eats into the predicate or beyond.
    """
    merged = fuse_with_sources(
        [(t, None) for t in tokens], lan_set, rules, anchor_index)
    return [token for token, _ in merged]


def fuse_with_sources(entries, lan_set, rules, anchor_index=None):
    """Like apply_fusion over (token, payload) pairs.

    Payloads are tuples of source units.  A fused window concatenates
    its payloads and every replacement token carries the combined tuple,
    which is how per-token provenance survives fusion.
    """
    applicable = _fusion_rules_for(frozenset(lan_set), rules)
    limit = len(entries) if anchor_index is None else anchor_index
    out = []
    i = 0
    while i < len(entries):
        hit = None
        for rule in applicable:
            width = len(rule.pattern)
            if i + width <= limit and \
                    tuple(t for t, _ in entries[i:i + width]) == rule.pattern:
                hit = rule
                break
        if hit is None:
            out.append(entries[i])
            i += 1
            continue
        window = entries[i:i + len(hit.pattern)]
        payloads = tuple(unit for _, p in window if p is not None for unit in p)
        combined = payloads if payloads else None
        for token in hit.replacement:
            out.append((token, combined))
        i += len(hit.pattern)
    return out


# --- plan-driven derivation building ----------------------------------------

_NP_DEM_SLOTS = (
    (),
    (("aux-Dem-ht", "DEM_HT"),),
    (("aux-Dem-gf", "DEM_GF"),),
)

_NP_CLOSURES = (
    (("aux-Indef-Art", "INDEF"),),
    (("aux-Spec-Art", "ART"),),
    (("aux-Dem-Det-gpmq", "DEM_ART"),),
    (("aux-Plur-ht", "PLUR_YO"),),
    (("aux-Plur-gf", "PLUR_YA"),),
    (("aux-Spec-Art", "ART"), ("aux-Plur-gpmq", "PLUR_SE")),
    (("aux-Dem-Det-gpmq", "DEM_ART"), ("aux-Plur-gpmq", "PLUR_SE")),
)

_TMA_SLOTS = (
    ((), (("aux-Imperfective-general", "IMPF_KA"),),
     (("aux-Imperfective-zero", "IMPF_ZERO"),),
     (("aux-Progressive-ht", "PROG_AP"),),
     (("aux-Imperfective-ht-bound", "PROG_AP"),)),
    ((), (("aux-Prospective", "PROSP"),)),
    ((), (("aux-Past", "PAST"),)),
    ((), (("aux-NearFuture", "PROX"),)),
    ((), (("aux-Conditional-mq", "COND"),)),
)

_DERIVATION_ERRORS = (UnificationFailure, LabelMismatch,
                      NotASubstitutionSite, NotAnAdjunctionSite)


def _apply_op(grammar, states, op, address, tree_name, lexeme_id):
    # a specialized grammar may have dropped the tree or the lexeme
    if not grammar.has_tree(tree_name):
        return []
    if lexeme_id is not None and not grammar.has_lexeme(lexeme_id):
        return []
    tree = grammar.tree(tree_name)
    parts = []
    if lexeme_id is None:
        parts.append(engine.instantiate(grammar, tree))
    else:
        lexeme = grammar.lexeme(lexeme_id)
        for index in range(len(lexeme.variants)):
            try:
                parts.append(engine.instantiate(grammar, tree, lexeme.id, index))
            except _DERIVATION_ERRORS:
                continue
    result = []
    for state in states:
        for part in parts:
            try:
                if op == "subst":
                    result.append(engine.substitute(grammar, state, address, part))
                else:
                    result.append(engine.adjoin(grammar, state, address, part))
            except _DERIVATION_ERRORS:
                continue
    return result


def _run_plan(grammar, base_tree, ops):
    try:
        states = [engine.instantiate(grammar, grammar.tree(base_tree))]
    except _DERIVATION_ERRORS:
        return []
    for op, address, tree_name, lexeme_id in ops:
        states = _apply_op(grammar, states, op, address, tree_name, lexeme_id)
        if not states:
            return []
    return states


def _np_plans(np_spec: NPSpec):
    comp = ((("adjoin", (0,), "aux-N-Comp", np_spec.complement),)
            if np_spec.complement else ())
    noun = (("subst", (0,), "alpha-N", np_spec.lexeme),)
    yield "alpha-NP-promote", noun + comp
    for dem_slot in _NP_DEM_SLOTS:
        for closure in _NP_CLOSURES:
            ops = noun + comp
            for tree_name, lexeme_id in dem_slot + closure:
                ops = ops + (("adjoin", (0,), tree_name, lexeme_id),)
            yield "alpha-NP-full", ops


def _np_derivations(grammar, np_spec: NPSpec):
    if not grammar.has_lexeme(np_spec.lexeme):
        raise InvalidSpec("unknown lexeme %r" % np_spec.lexeme)
    if np_spec.complement and not grammar.has_lexeme(np_spec.complement):
        raise InvalidSpec("unknown complement lexeme %r" % np_spec.complement)
    out = []
    for base, ops in _np_plans(np_spec):
        out.extend(_run_plan(grammar, base, ops))
    return out


def _pred_derivations(grammar, pred: str):
    if not grammar.has_lexeme(pred):
        raise InvalidSpec("unknown lexeme %r" % pred)
    out = []
    lexeme = grammar.lexeme(pred)
    for index in range(len(lexeme.variants)):
        try:
            base = engine.instantiate(grammar, grammar.tree("alpha-Pred"),
                                      pred, index)
        except _DERIVATION_ERRORS:
            continue
        states = [base]
        plans = [()]
        for slot in _TMA_SLOTS:
            plans = [plan + choice for plan in plans for choice in slot]
        for plan in plans:
            current = [s for s in states]
            ok = True
            for tree_name, lexeme_id in plan:
                current = _apply_op(grammar, current, "adjoin", (),
                                    tree_name, lexeme_id)
                if not current:
                    ok = False
                    break
            if ok:
                out.extend(current)
    return out


def _part_matches(grammar, derived, goals):
    try:
        final = engine.finalize(grammar, derived)
    except (CollapseFailure, PendingSite):
        return False
    return any(unify(final.features, goal, grammar.schema) is not None
               for goal in goals)


def _sentence_derivations(grammar, spec: SemSpec):
    """Assemble subject + predicate, keeping only parts that match their
    own goals (the sentence root itself only constrains lan)."""
    np_goal = _np_goal(spec.args[0], spec.lan)
    pred_goals = _pred_goals(grammar, spec.tma, spec.lan)
    nps = [d for d in _np_derivations(grammar, spec.args[0])
           if _part_matches(grammar, d, [np_goal])]
    preds = [d for d in _pred_derivations(grammar, spec.pred)
             if _part_matches(grammar, d, pred_goals)]
    out = []
    for np_der in nps:
        for pred_der in preds:
            try:
                s = engine.instantiate(grammar, grammar.tree("alpha-S"))
                s = engine.substitute(grammar, s, (0,), np_der)
                s = engine.substitute(grammar, s, (1,), pred_der)
            except _DERIVATION_ERRORS:
                continue
            out.append(s)
    return out


# --- goals -------------------------------------------------------------------

_PLUS = frozenset("+")
_MINUS = frozenset("-")


def _np_goal(np_spec: NPSpec, lan):
    goal = {"nbr": frozenset([np_spec.nbr]),
            "spe": _PLUS if np_spec.spe else _MINUS,
            "dem": _PLUS if np_spec.dem else _MINUS}
    if lan:
        goal["lan"] = lan
    return FeatureStruct(goal)


def _tma_values(tma: TMA):
    return {"pas": _PLUS if tma.pas else _MINUS,
            "psp": _PLUS if tma.psp else _MINUS,
            "prx": _PLUS if tma.prx else _MINUS,
            "cnd": _PLUS if tma.cnd else _MINUS,
            "asp": frozenset(["non" if tma.asp == "none" else tma.asp])}


def _dedicated_cnd(grammar):
    """Which dialects own a dedicated conditional tree (True, lans), or
    (False, empty) when the grammar has none."""
    covered = set()
    found = False
    for tree in grammar.auxiliary_trees():
        cell = tree.root.bottom.get("cnd")
        if isinstance(cell, frozenset) and cell == frozenset("+"):
            found = True
            label = tree.anchor_label
            if label:
                for lexeme in grammar.lexemes_of_category(label):
                    covered |= lexeme.lan_coverage()
    return found, frozenset(covered)


def _pred_goals(grammar, tma: TMA, lan):
    """Goal features for a TMA bundle, expanding the conditional.

    A conditional request is realized by a dedicated conditional form
    where the grammar has one and by the past-plus-prospective bundle
    everywhere else; the split is read off the grammar itself.
    """
    full = grammar.schema.full("lan") if "lan" in grammar.schema else None
    lan = lan or full
    goals = []
    if not tma.cnd:
        goal = _tma_values(tma)
        if lan:
            goal["lan"] = lan
        goals.append(FeatureStruct(goal))
        return goals
    direct = _tma_values(tma)
    if lan:
        direct["lan"] = lan
    goals.append(FeatureStruct(direct))
    has_dedicated, covered = _dedicated_cnd(grammar)
    if full is None:
        if has_dedicated:
            return goals
        syncretic_lan = None
    else:
        syncretic_lan = lan - covered
        if not syncretic_lan:
            return goals
    expanded = _tma_values(replace(tma, cnd=False, pas=True, psp=True))
    if syncretic_lan:
        expanded["lan"] = syncretic_lan
    goals.append(FeatureStruct(expanded))
    return goals


def _goal_for(grammar, spec: SemSpec):
    """(category, [goal FS]) for a semantic specification."""
    lan = spec.lan
    if lan is not None:
        if "lan" not in grammar.schema:
            raise InvalidSpec("this grammar has no language attribute left")
        unknown = lan - grammar.schema.full("lan")
        if unknown:
            raise InvalidSpec("unknown language codes: %s"
                              % ",".join(sorted(unknown)))
    if spec.pred is None:
        return "NP", [_np_goal(spec.args[0], lan)]
    if not spec.args:
        return "Pred", _pred_goals(grammar, spec.tma, lan)
    goals = [FeatureStruct({"lan": lan}) if lan else FeatureStruct()]
    return "S", goals


# --- assembling realizations --------------------------------------------------

def _anchor_index(final, pred_id):
    if pred_id is None:
        return None
    for i, (_, lexeme, _) in enumerate(final.lexical):
        if lexeme == pred_id:
            return i
    return None


def realizations_from_finals(grammar, finals, goals, pred_id=None):
    """Filter finalized derivations by goal, fuse, merge and fold.

    `finals` is an iterable of (FinalizeResult, trace) pairs.  Shared by
    the plan-driven generator and the enumeration-based oracle route.
    """
    lan_full = grammar.schema.full("lan") if "lan" in grammar.schema else None
    hits = []
    for final, trace in finals:
        matched_goal = None
        for goal in goals:
            if unify(final.features, goal, grammar.schema) is not None:
                matched_goal = goal
                break
        if matched_goal is None:
            continue
        if lan_full is not None:
            lan = final.features.get("lan", lan_full)
            goal_lan = matched_goal.get("lan")
            if isinstance(goal_lan, frozenset):
                lan = lan & goal_lan
            if not lan:
                continue
        else:
            lan = frozenset()
        anchor = _anchor_index(final, pred_id)
        tokens = tuple(apply_fusion(list(final.frontier), lan,
                                    grammar.fusion_rules, anchor))
        hits.append((tokens, lan, final.features, trace))

    merged = {}
    for tokens, lan, features, trace in hits:
        if tokens in merged:
            old_lan, old_features, old_trace = merged[tokens]
            merged[tokens] = (old_lan | lan, old_features, old_trace)
        else:
            merged[tokens] = (lan, features, trace)

    realizations = []
    for tokens, (lan, features, trace) in merged.items():
        if lan and "lan" in features:
            features = FeatureStruct({**dict(features), "lan": lan})
        realizations.append(Realization(tokens=tokens, lan_set=lan,
                                        trace=trace, features=features))

    realizations.sort(key=lambda r: (-len(r.lan_set), -len(r.tokens), r.tokens))
    kept = []
    for real in realizations:
        host = None
        for candidate in kept:
            if real.lan_set and real.lan_set <= candidate.lan_set:
                host = candidate
                break
        if host is None:
            kept.append(real)
        else:
            kept[kept.index(host)] = replace(
                host, alternatives=host.alternatives + (real.tokens,))

    order = {code: i for i, code in enumerate(
        grammar.schema.domain("lan").values)} if lan_full else {}

    def sort_key(real):
        mask = tuple(sorted(order.get(c, 99) for c in real.lan_set))
        return (mask, real.tokens)

    kept.sort(key=sort_key)
    return kept


def generate(grammar: Grammar, spec: SemSpec):
    """All maximal realizations of a semantic specification, merged and
    deterministically ordered.  Raises NoRealization when nothing derives."""
    category, goals = _goal_for(grammar, spec)
    if category == "NP":
        derivations = _np_derivations(grammar, spec.args[0])
    elif category == "Pred":
        derivations = _pred_derivations(grammar, spec.pred)
    else:
        derivations = _sentence_derivations(grammar, spec)

    finals = []
    for derived in derivations:
        try:
            finals.append((engine.finalize(grammar, derived), derived.history))
        except (CollapseFailure, PendingSite):
            continue

    out = realizations_from_finals(grammar, finals, goals, spec.pred)
    if not out:
        raise NoRealization("nothing derives the requested specification")
    return out


# --- paradigm tables ----------------------------------------------------------

NP_ROWS = (
    ("generic-person", NPSpec("PERSON", nbr="pl")),
    ("sg-indef-person", NPSpec("PERSON", nbr="sg")),
    ("sg-spec-person", NPSpec("PERSON", nbr="sg", spe=True)),
    ("sg-spec-table", NPSpec("TABLE", nbr="sg", spe=True)),
    ("sg-spec-dog", NPSpec("DOG", nbr="sg", spe=True)),
    ("sg-spec-bird", NPSpec("BIRD", nbr="sg", spe=True)),
    ("sg-dem-person", NPSpec("PERSON", nbr="sg", spe=True, dem=True)),
    ("sg-dem-table", NPSpec("TABLE", nbr="sg", spe=True, dem=True)),
    ("pl-indef-person", NPSpec("PERSON", nbr="pl")),
    ("pl-spec-person", NPSpec("PERSON", nbr="pl", spe=True)),
    ("pl-spec-table", NPSpec("TABLE", nbr="pl", spe=True)),
    ("pl-spec-dog", NPSpec("DOG", nbr="pl", spe=True)),
    ("pl-spec-bird", NPSpec("BIRD", nbr="pl", spe=True)),
    ("pl-dem-person", NPSpec("PERSON", nbr="pl", spe=True, dem=True)),
    ("pl-dem-table", NPSpec("TABLE", nbr="pl", spe=True, dem=True)),
)

TMA_ROWS = (
    ("accomplished", TMA()),
    ("unaccomplished-present", TMA(asp="imp")),
    ("frequentative", TMA(asp="frq")),
    ("progressive", TMA(asp="prg")),
    ("near-future", TMA(prx=True)),
    ("future", TMA(psp=True)),
    ("unaccomplished-future", TMA(psp=True, asp="imp")),
    ("accomplished-past", TMA(pas=True)),
    ("unaccomplished-past", TMA(pas=True, asp="imp")),
    ("irrealis", TMA(pas=True, psp=True)),
    ("irrealis-unaccomplished", TMA(pas=True, psp=True, asp="imp")),
    ("conditional", TMA(cnd=True)),
)


def _cell(grammar, spec, row, dialect):
    try:
        reals = generate(grammar, spec)
    except NoRealization:
        raise MissingCell(row, dialect) from None
    if len(reals) != 1:
        raise MissingCell(row, dialect,
                          "ambiguous: " + " | ".join(
                              " ".join(r.tokens) for r in reals))
    real = reals[0]
    cell = " ".join(real.tokens)
    for alt in real.alternatives:
        cell += " / " + " ".join(alt)
    return cell


def table_np(grammar: Grammar):
    """The noun-phrase determination grid, one dialect per column."""
    dialects = grammar.schema.domain("lan").values
    rows = []
    for row_name, np_spec in NP_ROWS:
        cells = []
        for dialect in dialects:
            spec = SemSpec(args=(np_spec,), lan=frozenset([dialect]))
            cells.append(_cell(grammar, spec, row_name, dialect))
        rows.append((row_name, cells))
    return rows


def table_tma(grammar: Grammar):
    """The tense/aspect marking grid for the predicate DANCE."""
    dialects = grammar.schema.domain("lan").values
    rows = []
    for row_name, tma in TMA_ROWS:
        cells = []
        for dialect in dialects:
            spec = SemSpec(pred="DANCE", tma=tma, lan=frozenset([dialect]))
            cells.append(_cell(grammar, spec, row_name, dialect))
        rows.append((row_name, cells))
    return rows


def golden_corpus():
    """All table rows as semantic specifications (unrestricted for lan)."""
    corpus = [SemSpec(args=(np_spec,)) for _, np_spec in NP_ROWS]
    corpus.extend(SemSpec(pred="DANCE", tma=tma) for _, tma in TMA_ROWS)
    return corpus


def format_table(grammar: Grammar, rows) -> str:
    dialects = grammar.schema.domain("lan").values
    lines = ["row\t" + "\t".join(dialects)]
    for row_name, cells in rows:
        lines.append(row_name + "\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"
