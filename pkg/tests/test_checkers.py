"""Bounded property checkers and the operation-by-property matrix."""

from relalg.checkers import (
    EXPECTED_MATRIX,
    MATRIX_COLUMNS,
    Bounds,
    catalogue_matrix,
    check_forward,
    check_function_preserving,
    check_homomorphism_safe,
    check_injective_function_preserving,
    check_local,
    check_subseteq_safe,
    check_total_function_preserving,
    equivalence_report,
    term_for_operation,
    verify_counterexample,
)
from relalg.structures import StructureClass
from relalg.terms import CATALOGUE, expand_injunion, parse_term

LIGHT = Bounds(max_size=2, samples=60, sample_size=5)


def test_bounds_resolution():
    assert Bounds().resolved_size(1) == 4
    assert Bounds().resolved_size(2) == 3
    assert Bounds(max_size=6).resolved_size(2) == 6


def test_function_preservation_verdicts():
    good = check_function_preserving(parse_term("f ; g"), LIGHT, 0)
    assert good.passed and good.counterexample is None
    bad = check_function_preserving(parse_term("f | g"), LIGHT, 0)
    assert not bad.passed
    assert bad.counterexample["kind"] == "invariant"
    assert verify_counterexample(bad)

    assert check_injective_function_preserving(parse_term("f^"), LIGHT, 0).passed
    assert not check_function_preserving(parse_term("f^"), LIGHT, 0).passed
    assert check_total_function_preserving(parse_term("f ; f"), LIGHT, 0).passed
    assert not check_total_function_preserving(parse_term("~f"), LIGHT, 0).passed


def test_homomorphism_safety_verdicts():
    assert check_homomorphism_safe(parse_term("R ; S"), LIGHT, 0).passed
    bad = check_homomorphism_safe(parse_term("-R"), LIGHT, 0)
    assert not bad.passed
    assert bad.counterexample["kind"] == "homomorphism"
    assert verify_counterexample(bad)


def test_subset_safety_verdicts():
    assert check_subseteq_safe(parse_term("-R"), LIGHT, 0).passed
    assert check_subseteq_safe(parse_term("R \\ S"), LIGHT, 0).passed
    bad = check_subseteq_safe(parse_term("~R"), LIGHT, 0)
    assert not bad.passed
    assert bad.counterexample["kind"] == "subset"
    assert verify_counterexample(bad)


def test_forward_and_local_verdicts():
    assert check_forward(parse_term("~g ; f"), LIGHT, 0).passed
    bad = check_forward(parse_term("f^"), LIGHT, 0)
    assert not bad.passed
    assert bad.counterexample["kind"] in ("row-outside-ball", "ball-row-mismatch")
    assert verify_counterexample(bad)
    assert check_local(parse_term("f^"), LIGHT, 0).passed
    assert not check_local(parse_term("ran(f) ; T"), LIGHT, 0).passed


def test_expected_matrix_shape():
    assert set(EXPECTED_MATRIX) == set(CATALOGUE)
    assert MATRIX_COLUMNS == ("homsafe", "subsafe", "fp", "forward")
    noes = sum(1 for row in EXPECTED_MATRIX.values() for v in row if not v)
    assert noes == 14


def test_catalogue_matrix_light_bounds():
    report = catalogue_matrix(Bounds(max_size=2, samples=40, sample_size=4), 0)
    assert report.agrees, report.mismatches
    assert report.mismatches == []
    doc = report.to_json()
    assert set(doc["rows"]) == set(CATALOGUE)
    assert doc["columns"] == list(MATRIX_COLUMNS)
    # every negative cell carries a checkable counterexample
    for op, row in report.verdicts.items():
        for col, verdict in row.items():
            if not verdict.passed:
                assert verify_counterexample(verdict), (op, col)


def test_term_for_operation():
    assert term_for_operation("compose") == parse_term("R ; S")
    assert term_for_operation("dom") == parse_term("dom(R)")
    assert term_for_operation("id") == parse_term("id")


def test_equivalence_report_positive_and_negative():
    t = parse_term("f <# g")
    report = equivalence_report(
        t, expand_injunion(t), ("f", "g"),
        StructureClass.INJECTIVE_PARTIAL_FUNCTIONS, LIGHT, 0,
    )
    assert report.equivalent
    assert report.coverage
    split = equivalence_report(
        parse_term("f"), parse_term("g"), ("f", "g"), StructureClass.ALL, LIGHT, 0
    )
    assert not split.equivalent
    assert split.counterexample is not None
