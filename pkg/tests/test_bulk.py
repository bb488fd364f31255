"""The vectorized evaluator must match the scalar one exactly."""

import random

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from relalg.bulk import (
    MAX_BULK_SIZE,
    bulk_eval_formula,
    bulk_eval_term,
    decode_symbol_masks,
    mask_to_relation,
    masks_to_structure,
    random_symbol_masks,
    structure_to_masks,
)
from relalg.logic import define_relation, parse_formula
from relalg.structures import (
    StructureClass,
    count_structures,
    enumerate_structures,
    is_injective_partial_function,
    is_partial_function,
    is_total_function,
    random_structure,
)
from relalg.terms import CATALOGUE, eval_term, random_term

ALL = StructureClass.ALL
PF = StructureClass.PARTIAL_FUNCTIONS
TF = StructureClass.TOTAL_FUNCTIONS
IPF = StructureClass.INJECTIVE_PARTIAL_FUNCTIONS


def test_mask_round_trip():
    s = random_structure(4, 5, ("f", "g"))
    k, masks = structure_to_masks(s)
    assert k == 5
    assert masks_to_structure(masks, k) == s
    for name, mask in masks.items():
        assert mask_to_relation(mask, k, s.domain) == s.relations[name]


def test_decode_matches_enumeration_order():
    for cls in (ALL, PF, TF, IPF):
        for k in (1, 2, 3):
            total = count_structures(("f", "g"), k, cls)
            indices = np.arange(total, dtype=np.uint64)
            masks = decode_symbol_masks(indices, k, cls, ("f", "g"))
            listed = [
                structure_from_masks_at(masks, k, i) for i in range(total)
            ]
            from relalg.structures import structure_from_index

            for i in range(total):
                assert listed[i] == structure_from_index(("f", "g"), k, cls, i), (
                    cls,
                    k,
                    i,
                )


def structure_from_masks_at(masks, k, i):
    return masks_to_structure({name: int(arr[i]) for name, arr in masks.items()}, k)


def test_random_masks_lie_in_their_class():
    rng = np.random.default_rng(9)
    preds = {
        PF: is_partial_function,
        TF: lambda r: is_total_function(r, tuple(f"e{i}" for i in range(1, 5))),
        IPF: is_injective_partial_function,
    }
    for cls, pred in preds.items():
        masks = random_symbol_masks(rng, 200, 4, cls, ("f",))
        for i in range(200):
            s = structure_from_masks_at(masks, 4, i)
            assert pred(s.relations["f"]), (cls, i)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, MAX_BULK_SIZE))
def test_bulk_term_eval_matches_scalar(seed, k):
    rng = random.Random(seed)
    t = random_term(rng, set(CATALOGUE) | {"injunion"}, ("f", "g"), rng.randint(1, 12))
    np_rng = np.random.default_rng(seed)
    masks = random_symbol_masks(np_rng, 30, k, ALL, ("f", "g"))
    out = bulk_eval_term(t, k, masks)
    for i in (0, 7, 13, 29):
        s = structure_from_masks_at(masks, k, i)
        expected = eval_term(t, s)
        assert mask_to_relation(int(out[i]), k, s.domain) == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_bulk_formula_eval_matches_scalar(seed):
    phi = parse_formula("exists z. (f(x,z) & g(z,y)) | f(y,x)")
    np_rng = np.random.default_rng(seed)
    k = 1 + seed % 4
    masks = random_symbol_masks(np_rng, 20, k, ALL, ("f", "g"))
    out = bulk_eval_formula(phi, k, masks)
    for i in (0, 9, 19):
        s = structure_from_masks_at(masks, k, i)
        expected = define_relation(phi, "x", "y", s, pad_missing=True)
        assert mask_to_relation(int(out[i]), k, s.domain) == expected


def test_bulk_term_eval_exhaustive_size_two():
    # every 2-element structure over one symbol, every catalogue operation
    from relalg.terms import parse_term

    total = count_structures(("R",), 2, ALL)
    masks = decode_symbol_masks(np.arange(total, dtype=np.uint64), 2, ALL, ("R",))
    for text in ("id", "0", "T", "-R", "R^", "dom(R)", "ran(R)", "~R",
                 "R | R", "R & R^", "R \\ R^", "R ; R", "R |> R", "R <+ R^",
                 "R <# R^"):
        t = parse_term(text)
        out = bulk_eval_term(t, 2, masks)
        for i in range(total):
            s = structure_from_masks_at(masks, 2, i)
            assert mask_to_relation(int(out[i]), 2, s.domain) == eval_term(t, s), text
