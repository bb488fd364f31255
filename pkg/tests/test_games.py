"""Rank-bounded back-and-forth games."""

import random

import pytest

from relalg.games import (
    GameError,
    check_union_compatibility,
    ef_equiv,
    min_distinguishing_rank,
)
from relalg.logic import eval_formula, parse_formula
from relalg.structures import Structure, StructureClass, enumerate_structures, random_structure

LOOP = Structure(("a",), {"f": {("a", "a")}})
CHAIN = Structure(("a", "b"), {"f": {("a", "b")}})


def test_loop_versus_chain_needs_one_round():
    assert ef_equiv(LOOP, (), CHAIN, (), 0)
    assert not ef_equiv(LOOP, (), CHAIN, (), 1)
    assert min_distinguishing_rank(LOOP, CHAIN) == 1


def test_pebbled_positions():
    two = Structure(("a", "b"), {"f": {("a", "a"), ("a", "b")}})
    assert not ef_equiv(two, ("a",), two, ("b",), 0)
    assert ef_equiv(two, ("a",), two, ("a",), 4)
    assert min_distinguishing_rank(two, two, ("a",), ("b",)) == 0
    assert min_distinguishing_rank(two, two) is None


def test_equivalence_is_reflexive():
    rng = random.Random(7)
    for _ in range(15):
        s = random_structure(rng, rng.randint(1, 4), ("f", "g"))
        for rank in range(3):
            assert ef_equiv(s, (), s, (), rank)


def test_winning_persists_at_lower_ranks():
    rng = random.Random(8)
    seen = 0
    for _ in range(40):
        a = random_structure(rng, rng.randint(1, 3), ("f",))
        b = random_structure(rng, rng.randint(1, 3), ("f",))
        for rank in range(3):
            if ef_equiv(a, (), b, (), rank + 1):
                assert ef_equiv(a, (), b, (), rank)
                seen += 1
    assert seen > 0


def test_guards():
    with pytest.raises(GameError):
        ef_equiv(LOOP, (), CHAIN, (), 99)
    with pytest.raises(GameError):
        ef_equiv(LOOP, ("zzz",), CHAIN, ("a",), 1)
    with pytest.raises(GameError):
        ef_equiv(LOOP, ("a",), CHAIN, (), 1)
    mixed = Structure(("a",), {"h": {("a", "a")}})
    with pytest.raises(GameError):
        ef_equiv(LOOP, (), mixed, (), 1)


def test_union_compatibility_sampler():
    report = check_union_compatibility(rank=2, samples=40, size=3, seed=3)
    assert report.premise_hits > 0
    assert report.skipped + report.premise_hits == 40
    assert report.passed
    assert report.violations == []
    doc = report.to_json()
    assert doc["rank"] == 2
    assert doc["premise_hits"] == report.premise_hits
    assert doc["game"] == "first-order rank"


RANK2_SENTENCES = tuple(
    parse_formula(text)
    for text in (
        "exists x . f(x,x)",
        "exists x . (exists y . f(x,y))",
        "forall x . (exists y . f(x,y))",
        "exists x . (forall y . f(x,y))",
        "forall x . (forall y . (f(x,y) -> f(y,x)))",
    )
)


def test_rank_two_equivalence_matches_sentence_verdicts():
    small = list(enumerate_structures(("f",), 2, StructureClass.ALL))
    assert len(small) == 18
    for a in small:
        for b in small:
            if not ef_equiv(a, (), b, (), 2):
                continue
            for phi in RANK2_SENTENCES:
                assert eval_formula(phi, a) == eval_formula(phi, b), (a, b, phi)
