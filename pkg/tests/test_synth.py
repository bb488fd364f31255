"""Word-type enumeration and term synthesis from black-box oracles."""

import random

import pytest

from relalg.checkers import Bounds
from relalg.structures import StructureClass, enumerate_structures, random_structure
from relalg.synth import (
    SynthesisError,
    characteristic_term,
    enumerate_types,
    estimate_radius,
    neighborhood_type,
    realization,
    synthesize_forward,
    synthesize_local_injective,
    type_letters,
    validate_synthesis,
)
from relalg.terms import eval_term, parse_term, term_ops, term_size

PF = StructureClass.PARTIAL_FUNCTIONS
IPF = StructureClass.INJECTIVE_PARTIAL_FUNCTIONS

FORWARD_OPS = {"sym", "compose", "antidom", "inter", "prefunion"}
ORIENTED_OPS = FORWARD_OPS | {"converse", "injunion"}


def brute_force_types(signature, radius, oriented, max_size):
    cls = IPF if oriented else PF
    found = set()
    for s in enumerate_structures(signature, max_size, cls):
        for root in s.domain:
            found.add(neighborhood_type(s, root, radius, oriented))
    return found


def test_letter_order():
    assert type_letters(("g", "f"), False) == (("f", False), ("g", False))
    assert type_letters(("f",), True) == (("f", False), ("f", True))


def test_type_counts_forward():
    assert len(enumerate_types(("f",), 0)) == 1
    assert len(enumerate_types(("f",), 1)) == 3
    assert len(enumerate_types(("f",), 2)) == 6
    assert len(enumerate_types(("f", "g"), 1)) == 10
    assert len(enumerate_types(("f", "g"), 2)) == 888


def test_type_counts_oriented():
    assert len(enumerate_types(("f",), 1, oriented=True)) == 6
    assert len(enumerate_types(("f",), 2, oriented=True)) == 13
    assert len(enumerate_types(("f", "g"), 1, oriented=True)) == 63


def test_enumeration_matches_brute_force_forward():
    # realizations for these parameters never exceed three elements, so
    # sweeping every small structure recovers the full type inventory
    for signature, radius in ((("f",), 1), (("f",), 2), (("f", "g"), 1)):
        enumerated = set(enumerate_types(signature, radius))
        assert enumerated == brute_force_types(signature, radius, False, 3)


def test_enumeration_matches_brute_force_oriented():
    enumerated = set(enumerate_types(("f",), 1, oriented=True))
    assert enumerated == brute_force_types(("f",), 1, True, 3)
    deeper = set(enumerate_types(("f",), 2, oriented=True))
    assert deeper == brute_force_types(("f",), 2, True, 5)


def test_enumeration_budget_guard():
    with pytest.raises(SynthesisError):
        enumerate_types(("f", "g"), 2, oriented=True, budget=500)


def test_realization_round_trips_every_type():
    for oriented in (False, True):
        for t in enumerate_types(("f", "g"), 1, oriented):
            s, root = realization(t)
            assert neighborhood_type(s, root, t.radius, oriented) == t


def test_types_ignore_structure_beyond_the_ball():
    rng = random.Random(40)
    for _ in range(30):
        s = random_structure(rng, rng.randint(2, 5), ("f", "g"), PF)
        root = rng.choice(s.domain)
        t = neighborhood_type(s, root, 1)
        again = neighborhood_type(s, root, 1)
        assert t == again
        big, anchor = realization(t)
        assert neighborhood_type(big, anchor, 1) == t


def test_characteristic_terms_classify_small_structures():
    types = enumerate_types(("f",), 1)
    chis = {t: characteristic_term(t) for t in types}
    for s in enumerate_structures(("f",), 3, PF):
        for x in s.domain:
            mine = neighborhood_type(s, x, 1)
            for t, chi in chis.items():
                member = (x, x) in eval_term(chi, s)
                assert member == (t == mine), (s, x, t)


def test_synthesize_dom():
    oracle = parse_term("dom(f)")
    result = synthesize_forward(oracle, 1)
    assert result.types_considered == 3
    assert result.positive == 2
    assert term_size(result.term) == 26
    assert term_ops(result.term) <= FORWARD_OPS
    report = validate_synthesis(result, oracle, bounds=Bounds(max_size=3, samples=80))
    assert report.equivalent


def test_synthesize_intersection_of_two_letters():
    oracle = parse_term("f & g")
    result = synthesize_forward(oracle, 1)
    assert result.types_considered == 10
    assert result.positive == 2
    assert term_size(result.term) == 67
    report = validate_synthesis(result, oracle, bounds=Bounds(max_size=3, samples=80))
    assert report.equivalent


def test_synthesize_oriented_converse():
    oracle = parse_term("f^")
    result = synthesize_local_injective(oracle, 1)
    assert result.positive == 4
    assert term_ops(result.term) <= ORIENTED_OPS
    report = validate_synthesis(result, oracle, bounds=Bounds(max_size=3, samples=80))
    assert report.equivalent


def test_probes_reject_an_undersized_radius():
    with pytest.raises(SynthesisError) as err:
        synthesize_forward(parse_term("f ; g"), 0)
    assert "not 0-bounded" in str(err.value)
    with pytest.raises(SynthesisError) as err:
        synthesize_forward(parse_term("f ; g"), 1)
    assert "not 1-bounded" in str(err.value)


def test_probes_reject_backward_looking_oracles():
    with pytest.raises(SynthesisError) as err:
        synthesize_forward(parse_term("f^"), 1, symbols=("f",))
    assert "bounded" in str(err.value)
    assert err.value.details


def test_probes_reject_non_functional_oracles():
    def fan_out(s):
        return frozenset(("v00", d) for d in s.domain if "v00" in s.domain)

    with pytest.raises(SynthesisError) as err:
        synthesize_forward(fan_out, 1, symbols=("f",))
    assert "function-preserving" in str(err.value)


def test_callable_oracle_synthesis():
    target = parse_term("~f")

    def oracle(s):
        return eval_term(target, s)

    result = synthesize_forward(oracle, 1, symbols=("f",))
    report = validate_synthesis(result, target, bounds=Bounds(max_size=3, samples=60))
    assert report.equivalent


def test_estimate_radius_walks_upward():
    est = estimate_radius(parse_term("dom(f)"), max_radius=2)
    assert est.radius == 1
    assert [a["radius"] for a in est.attempts] == [0, 1]
    assert est.attempts[0]["outcome"] != "accepted"
    assert est.result is not None


def test_estimate_radius_gives_up_honestly():
    est = estimate_radius(parse_term("ran(f)"), max_radius=2)
    assert est.radius is None
    assert est.failure is not None
    assert "bounded" in est.failure["message"]
    assert len(est.attempts) == 3


def test_synthesis_result_to_json():
    result = synthesize_forward(parse_term("dom(f)"), 1)
    doc = result.to_json()
    assert doc["radius"] == 1
    assert doc["oriented"] is False
    assert doc["symbols"] == ["f"]
    assert parse_term(doc["term"]) == result.term
