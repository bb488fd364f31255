"""Positive-existential formulas compile to homomorphism-safe terms."""

import random

import pytest

from relalg.checkers import Bounds
from relalg.logic import parse_formula
from relalg.terms import BASES, print_term, term_ops
from relalg.translate import (
    TranslateError,
    compile_posex,
    random_posex_formula,
    verify_compilation,
)


def compiled(text):
    return print_term(compile_posex(parse_formula(text)))


def test_known_translations():
    assert compiled("exists z . (R(x,z) & S(z,y))") == "R ; S"
    assert compiled("R(x,y) | S(x,y)") == "R | S"
    assert compiled("R(y,x)") == "R^"
    assert compiled("x = y") == "id"


def test_translator_stays_inside_the_safe_basis():
    texts = (
        "exists z. (R(x,z) & S(z,y)) | R(x,y)",
        "R(x,x) & S(x,y)",
        "exists z. R(z,z) & true",
        "exists z. exists z. R(x,y)",
        "S(y,y) & R(x,y) & x = y",
    )
    for text in texts:
        term = compile_posex(parse_formula(text))
        assert term_ops(term) <= BASES["homsafe"], text


def test_rejections_name_the_offending_part():
    with pytest.raises(TranslateError) as err:
        compile_posex(parse_formula("!R(x,y)"))
    assert "!R(x,y)" in str(err.value)
    with pytest.raises(TranslateError) as err:
        compile_posex(parse_formula("R(x,y) -> S(x,y)"))
    assert "->" in str(err.value)
    with pytest.raises(TranslateError) as err:
        compile_posex(parse_formula("forall v. R(x,v)"))
    assert "forall" in str(err.value)
    # free variables other than the pair being defined
    with pytest.raises(TranslateError):
        compile_posex(parse_formula("R(x,z)"))
    # more than three names in play; three nested ones are fine
    compile_posex(parse_formula("exists z. R(x,z) & (exists w. S(z,w))"))
    with pytest.raises(TranslateError) as err:
        compile_posex(
            parse_formula("exists z. R(x,z) & (exists w. S(z,w)) & R(y,y)")
        )
    assert "4 variable names" in str(err.value)


def test_verify_compilation_agrees():
    bounds = Bounds(max_size=3, samples=60, sample_size=6)
    for text in (
        "exists z. R(x,z) & S(z,y)",
        "R(x,y) & x = y",
        "exists z. R(x,z) & R(z,y) & S(x,y)",
    ):
        check = verify_compilation(parse_formula(text), bounds=bounds, seed=1)
        assert check.ok, text


def test_random_formulas_compile_and_verify():
    bounds = Bounds(max_size=2, samples=40, sample_size=5)
    rng = random.Random(202)
    for _ in range(25):
        phi = random_posex_formula(rng, ("R", "S"), max_depth=3)
        check = verify_compilation(phi, bounds=bounds, seed=7)
        assert check.ok, phi
