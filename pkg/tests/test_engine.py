"""Derivation engine tests: operations, errors, replay, enumeration."""

import pytest

from creoletag import engine
from creoletag.dsl import load_grammar
from creoletag.errors import (AnchorUnificationFailure, CollapseFailure,
                              LabelMismatch, NotAnAdjunctionSite,
                              NotASubstitutionSite, PendingSite,
                              UnificationFailure)
from creoletag.featstruct import FeatureStruct

TOY = """
(grammar toy (version 1))
(domain nbr (sg pl))
(domain mark (+ -))
(tree alpha-root (class initial)
  (node X (kind internal)
    (bottom (mark -))
    (children
      (node Y (kind subst) (top (nbr sg)))
      (node W (kind anchor)))))
(tree alpha-filler-pl (class initial)
  (node Y (kind internal)
    (top (nbr pl))
    (children (node W (kind anchor)))))
(tree alpha-filler-open (class initial)
  (node Y (kind internal)
    (children
      (node Y (kind subst))
      (node W (kind anchor)))))
(tree alpha-clash (class initial)
  (node X (kind internal)
    (top (mark +))
    (bottom (mark -))
    (children (node W (kind anchor)))))
(tree aux-wrap (class aux)
  (node X (kind internal)
    (bottom (mark +))
    (children
      (node W (kind anchor))
      (node X (kind foot)))))
(tree alpha-picky (class initial)
  (node X (kind internal)
    (children (node W (kind anchor) (bottom (nbr sg))))))
(lex WORD (cat W) (variant "w") (variant "wpl" (nbr pl)))
(lex OTHER (cat Y) (variant "y"))
"""


@pytest.fixture(scope="module")
def toy():
    return load_grammar(TOY)


class TestToyOperations:
    def test_substitute_top_clash(self, toy):
        host = engine.instantiate(toy, "alpha-root", "WORD", 0)
        filler = engine.instantiate(toy, "alpha-filler-pl", "WORD", 0)
        with pytest.raises(UnificationFailure):
            engine.substitute(toy, host, (0,), filler)

    def test_substitute_incomplete_filler(self, toy):
        host = engine.instantiate(toy, "alpha-root", "WORD", 0)
        filler = engine.instantiate(toy, "alpha-filler-open", "WORD", 0)
        with pytest.raises(NotASubstitutionSite):
            engine.substitute(toy, host, (0,), filler)

    def test_substitute_wrong_address(self, toy):
        host = engine.instantiate(toy, "alpha-root", "WORD", 0)
        with pytest.raises(NotASubstitutionSite):
            engine.substitute(toy, host, (1,), host)

    def test_adjoin_label_mismatch(self, toy):
        host = engine.instantiate(toy, "alpha-filler-pl", "WORD", 0)
        aux = engine.instantiate(toy, "aux-wrap", "WORD", 0)
        with pytest.raises(LabelMismatch):
            engine.adjoin(toy, host, (), aux)

    def test_adjoin_at_anchor_forbidden(self, toy):
        host = engine.instantiate(toy, "alpha-clash", "WORD", 0)
        aux = engine.instantiate(toy, "aux-wrap", "WORD", 0)
        with pytest.raises(NotAnAdjunctionSite):
            engine.adjoin(toy, host, (0,), aux)

    def test_adjoin_at_foot_copy_forbidden(self, toy):
        host = engine.instantiate(toy, "alpha-clash", "WORD", 0)
        aux = engine.instantiate(toy, "aux-wrap", "WORD", 0)
        once = engine.adjoin(toy, host, (), aux)
        aux2 = engine.instantiate(toy, "aux-wrap", "WORD", 0)
        foot_copy = next(addr for addr, node in once.root.walk()
                         if node.was_foot)
        with pytest.raises(NotAnAdjunctionSite):
            engine.adjoin(toy, once, foot_copy, aux2)

    def test_anchor_feature_clash(self, toy):
        # the anchor slot demands sg but the variant carries pl
        with pytest.raises(AnchorUnificationFailure):
            engine.instantiate(toy, "alpha-picky", "WORD", 1)
        derived = engine.instantiate(toy, "alpha-picky", "WORD", 0)
        assert engine.finalize(toy, derived).frontier == ("w",)

    def test_finalize_pending_site(self, toy):
        host = engine.instantiate(toy, "alpha-root", "WORD", 0)
        with pytest.raises(PendingSite):
            engine.finalize(toy, host)

    def test_finalize_collapse_failure(self, toy):
        derived = engine.instantiate(toy, "alpha-clash", "WORD", 0)
        with pytest.raises(CollapseFailure):
            engine.finalize(toy, derived)

    def test_adjunction_repairs_collapse(self, toy):
        # the aux splits top (mark +) from bottom (mark -): both planes collapse
        derived = engine.instantiate(toy, "alpha-clash", "WORD", 0)
        aux = engine.instantiate(toy, "aux-wrap", "WORD", 0)
        fixed = engine.adjoin(toy, derived, (), aux)
        final = engine.finalize(toy, fixed)
        assert final.frontier == ("w", "w")


class TestShippedOperations:
    def test_instantiate_moun(self, grammar):
        derived = engine.instantiate(grammar, "alpha-N", "PERSON", 0)
        final = engine.finalize(grammar, derived)
        assert final.frontier == ("moun",)
        assert final.features["cns"] == frozenset("+")
        assert final.features["nas"] == frozenset("+")
        assert final.features["lan"] == frozenset({"HT", "GP", "MQ", "GF"})

    def test_instantiate_ht_only_bird(self, grammar):
        derived = engine.instantiate(grammar, "alpha-N", "BIRD", 0)
        final = engine.finalize(grammar, derived)
        assert final.frontier == ("zwazo",)
        assert final.features["lan"] == frozenset({"HT"})

    def test_instantiate_wrong_category(self, grammar):
        with pytest.raises(AnchorUnificationFailure):
            engine.instantiate(grammar, "alpha-N", "DANCE", 0)

    def test_instantiate_language_clash(self):
        # a tree whose anchor slot is pinned to HT rejects a GP-only word
        pinned = load_grammar("""
        (domain lan (HT GP))
        (tree alpha-ht-only (class initial)
          (node N (kind internal)
            (children (node N (kind anchor) (bottom (lan HT))))))
        (lex GP-WORD (cat N) (variant "w" (lan GP)))
        (lex HT-WORD (cat N) (variant "v" (lan HT)))
        """)
        with pytest.raises(AnchorUnificationFailure):
            engine.instantiate(pinned, "alpha-ht-only", "GP-WORD", 0)
        ok = engine.instantiate(pinned, "alpha-ht-only", "HT-WORD", 0)
        assert engine.finalize(pinned, ok).frontier == ("v",)

    def test_bare_moun_features(self, grammar):
        """A bare noun keeps nbr unspecified and spe absent."""
        derived = engine.instantiate(grammar, "alpha-N", "PERSON", 0)
        final = engine.finalize(grammar, derived)
        assert "nbr" not in final.features
        assert "spe" not in final.features

    def test_moun_nan(self, grammar):
        derived = engine.instantiate(grammar, "alpha-N", "PERSON", 0)
        nan_index = self._variant(grammar, "ART", "nan")
        art = engine.instantiate(grammar, "aux-Spec-Art", "ART", nan_index)
        derived = engine.adjoin(grammar, derived, (), art)
        final = engine.finalize(grammar, derived)
        assert final.frontier == ("moun", "nan")
        assert final.features["lan"] == frozenset({"HT"})
        assert final.features["spe"] == frozenset("+")

    def test_se_tab_la_features(self, grammar):
        derived = engine.instantiate(grammar, "alpha-N", "TABLE", 0)
        la_index = self._variant(grammar, "ART", "la")  # shared GP/MQ la
        art = engine.instantiate(grammar, "aux-Spec-Art", "ART", la_index)
        derived = engine.adjoin(grammar, derived, (), art)
        se = engine.instantiate(grammar, "aux-Plur-gpmq", "PLUR_SE", 0)
        derived = engine.adjoin(grammar, derived, (), se)
        final = engine.finalize(grammar, derived)
        assert final.frontier == ("sé", "tab", "la")
        assert final.features["nbr"] == frozenset(["pl"])
        assert final.features["spe"] == frozenset("+")
        assert final.features["lan"] == frozenset({"GP", "MQ"})

    def test_blocked_gpmq_dem_on_ht_dem(self, grammar):
        derived = engine.instantiate(grammar, "alpha-N", "PERSON", 0)
        sa = engine.instantiate(grammar, "aux-Dem-ht", "DEM_HT", 0)
        derived = engine.adjoin(grammar, derived, (), sa)
        lasa = engine.instantiate(grammar, "aux-Dem-Det-gpmq", "DEM_ART", 0)
        with pytest.raises(UnificationFailure):
            engine.adjoin(grammar, derived, (), lasa)

    def test_blocked_general_imperfective_on_haitian(self, grammar):
        derived = engine.instantiate(grammar, "alpha-Pred", "DANCE", 0)  # danse, HT
        ka = engine.instantiate(grammar, "aux-Imperfective-general", "IMPF_KA", 0)
        with pytest.raises(UnificationFailure):
            engine.adjoin(grammar, derived, (), ka)

    def test_moun_sentoma_sa_yo(self, grammar):
        derived = engine.instantiate(grammar, "alpha-N", "PERSON", 0)
        comp = engine.instantiate(grammar, "aux-N-Comp", "SAINT-THOMAS", 0)
        derived = engine.adjoin(grammar, derived, (), comp)
        sa = engine.instantiate(grammar, "aux-Dem-ht", "DEM_HT", 0)
        derived = engine.adjoin(grammar, derived, (), sa)
        yo = engine.instantiate(grammar, "aux-Plur-ht", "PLUR_YO", 0)
        derived = engine.adjoin(grammar, derived, (), yo)
        final = engine.finalize(grammar, derived)
        assert final.frontier == ("moun", "Sentoma", "sa", "yo")
        assert final.features["lan"] == frozenset({"HT"})

    def test_sa_moun_senloran_an(self, grammar):
        """Preposed GF demonstrative threads the right-edge nasality, so
        the article after the nasal place name surfaces as an."""
        derived = engine.instantiate(grammar, "alpha-N", "PERSON", 0)
        comp = engine.instantiate(grammar, "aux-N-Comp", "SAINT-LAURENT", 0)
        derived = engine.adjoin(grammar, derived, (), comp)
        sa = engine.instantiate(grammar, "aux-Dem-gf", "DEM_GF", 0)
        derived = engine.adjoin(grammar, derived, (), sa)
        an_index = self._variant(grammar, "ART", "an")  # shared HT/MQ/GF an
        art = engine.instantiate(grammar, "aux-Spec-Art", "ART", an_index)
        derived = engine.adjoin(grammar, derived, (), art)
        final = engine.finalize(grammar, derived)
        assert final.frontier == ("sa", "moun", "Senloran", "an")
        assert final.features["lan"] == frozenset({"GF"})

    def test_demonstrative_requires_closure(self, grammar):
        """dem implies spe: a bare demonstrative cannot collapse."""
        derived = engine.instantiate(grammar, "alpha-N", "PERSON", 0)
        sa = engine.instantiate(grammar, "aux-Dem-ht", "DEM_HT", 0)
        derived = engine.adjoin(grammar, derived, (), sa)
        with pytest.raises(CollapseFailure):
            engine.finalize(grammar, derived)

    @staticmethod
    def _variant(grammar, lexeme_id, surface):
        for i, variant in enumerate(grammar.lexeme(lexeme_id).variants):
            if variant.surface == surface:
                return i
        raise AssertionError("no %s variant %r" % (lexeme_id, surface))


class TestReplayAndOrder:
    def test_replay_reproduces_frontier(self, grammar):
        derived = engine.instantiate(grammar, "alpha-N", "TABLE", 0)
        art = engine.instantiate(grammar, "aux-Spec-Art", "ART", 0)
        derived = engine.adjoin(grammar, derived, (), art)
        se = engine.instantiate(grammar, "aux-Plur-gpmq", "PLUR_SE", 0)
        derived = engine.adjoin(grammar, derived, (), se)
        replayed = engine.replay(grammar, derived.history)
        assert engine.finalize(grammar, replayed).frontier == \
            engine.finalize(grammar, derived).frontier
        assert engine.finalize(grammar, replayed).features == \
            engine.finalize(grammar, derived).features

    def test_adjunction_order_independence(self, grammar):
        """Adjunctions at distinct addresses commute."""
        s1 = self._sentence(grammar, np_first=True)
        s2 = self._sentence(grammar, np_first=False)
        assert s1.frontier == s2.frontier
        assert s1.features == s2.features

    @staticmethod
    def _sentence(grammar, np_first):
        s = engine.instantiate(grammar, "alpha-S")
        np = engine.instantiate(grammar, "alpha-NP-full")
        noun = engine.instantiate(grammar, "alpha-N", "TABLE", 0)
        np = engine.substitute(grammar, np, (0,), noun)
        pred = engine.instantiate(grammar, "alpha-Pred", "DANCE", 1)  # dansé
        s = engine.substitute(grammar, s, (0,), np)
        s = engine.substitute(grammar, s, (1,), pred)
        art = engine.instantiate(grammar, "aux-Spec-Art", "ART", 0)
        te = engine.instantiate(grammar, "aux-Past", "PAST", 1)  # té
        if np_first:
            s = engine.adjoin(grammar, s, (0, 0), art)
            s = engine.adjoin(grammar, s, (1,), te)
        else:
            s = engine.adjoin(grammar, s, (1,), te)
            s = engine.adjoin(grammar, s, (0, 0), art)
        return engine.finalize(grammar, s)


class TestEnumeration:
    def test_gf_plural_demonstrative_unique(self, grammar, particle_lexemes):
        goal = FeatureStruct({"lan": frozenset(["GF"]),
                              "nbr": frozenset(["pl"]),
                              "spe": frozenset("+"),
                              "dem": frozenset("+")})
        derivations = engine.enumerate_derivations(
            grammar, "NP", goal, 4, lexemes=particle_lexemes | {"PERSON"})
        frontiers = [engine.finalize(grammar, d).frontier for d in derivations]
        assert frontiers == [("sa", "moun", "yan")]

    def test_zero_steps_empty(self, grammar, particle_lexemes):
        goal = FeatureStruct({"lan": frozenset(["HT"])})
        assert engine.enumerate_derivations(
            grammar, "NP", goal, 0,
            lexemes=particle_lexemes | {"PERSON"}) == []

    def test_enumeration_order_deterministic(self, grammar, particle_lexemes):
        goal = FeatureStruct({"spe": frozenset("+")})
        lexemes = particle_lexemes | {"DOG"}
        first = engine.enumerate_derivations(grammar, "NP", goal, 3,
                                             lexemes=lexemes)
        second = engine.enumerate_derivations(grammar, "NP", goal, 3,
                                              lexemes=lexemes)
        assert [d.history for d in first] == [d.history for d in second]
        keys = [d.trace_key() for d in first]
        assert keys == sorted(keys)

    def test_table_noun_frontier_census(self, grammar, particle_lexemes):
        """Frozen regression: every noun-phrase form of 'tab' within four
        derivation steps, across all dialects and determinations."""
        derivations = engine.enumerate_derivations(
            grammar, "NP", FeatureStruct(), 4,
            lexemes=particle_lexemes | {"TABLE"})
        frontiers = sorted({" ".join(engine.finalize(grammar, d).frontier)
                            for d in derivations})
        assert frontiers == [
            "an tab", "on tab", "roun tab",
            "sa tab a", "sa tab ya",
            "sé tab la", "sé tab lasa", "sé tab tala",
            "tab", "tab a", "tab la", "tab lasa",
            "tab sa a", "tab sa yo", "tab tala",
            "tab ya", "tab yo", "yon tab",
        ]
        assert len(frontiers) == 18

    def test_monotonicity_of_language_sets(self, grammar, particle_lexemes):
        """The collapsed root's lan is within every used variant's lan."""
        derivations = engine.enumerate_derivations(
            grammar, "NP", FeatureStruct(), 3,
            lexemes=particle_lexemes | {"DOG"})
        assert derivations
        for derived in derivations:
            final = engine.finalize(grammar, derived)
            root_lan = final.features.get(
                "lan", grammar.schema.full("lan"))
            for _, lexeme, variant in final.lexical:
                variant_lan = grammar.lexeme(lexeme).variants[variant] \
                    .features["lan"]
                assert root_lan <= variant_lan
