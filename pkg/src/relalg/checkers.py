"""Bounded semantic checks: safety properties, the catalogue matrix,
and a reusable equivalence engine.

Every verdict here is bounded evidence, never a proof: "pass-bounded" means
no counterexample was found within the stated bounds, "fail" means a
concrete counterexample was found and re-verified before being reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Any

import numpy as np

from . import bulk, logic
from . import terms as tm
from .structures import (
    Structure,
    StructureClass,
    count_structures,
    enumerate_structures,
    homomorphisms,
    induced,
    is_injective_partial_function,
    is_partial_function,
    is_total_function,
    random_structure,
    structure_from_index,
    structure_from_json,
    structure_to_json,
    _reach_depths,
)

_CANON_BALL_LIMIT = 6


@dataclass(frozen=True)
class Bounds:
    """Search effort knobs shared by all checkers.

    max_size None lets each checker pick its default: exhaustive to size 3
    for two-symbol terms and size 4 otherwise.
    """

    max_size: int | None = None
    samples: int = 1000
    sample_size: int = 12
    pair_size: int = 2
    hom_limit: int = 200
    exhaustive_budget: int = 600_000

    def resolved_size(self, symbol_count: int) -> int:
        if self.max_size is not None:
            return self.max_size
        return 4 if symbol_count <= 1 else 3

    def to_json(self) -> dict:
        return {
            "max_size": self.max_size,
            "samples": self.samples,
            "sample_size": self.sample_size,
            "pair_size": self.pair_size,
            "hom_limit": self.hom_limit,
            "exhaustive_budget": self.exhaustive_budget,
        }


@dataclass
class Verdict:
    property: str
    status: str  # "pass-bounded" | "fail"
    counterexample: dict | None
    bounds: dict
    seed: int

    @property
    def passed(self) -> bool:
        return self.status == "pass-bounded"

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "status": self.status,
            "counterexample": self.counterexample,
            "bounds": self.bounds,
            "seed": self.seed,
        }


def _random_sizes(rng: random.Random, bounds: Bounds, cap: int | None = None) -> list[int]:
    top = bounds.sample_size if cap is None else min(bounds.sample_size, cap)
    return [rng.randint(1, max(1, top)) for _ in range(bounds.samples)]


def _symbols_of(term: tm.Term) -> tuple[str, ...]:
    return tm.term_signature(term)


# --- class-invariant properties (fp / tfp / ifp) -------------------------------

def _fp_offence(rel, structure) -> dict | None:
    by_source: dict[str, set[str]] = {}
    for a, b in rel:
        by_source.setdefault(a, set()).add(b)
    for a in sorted(by_source):
        if len(by_source[a]) > 1:
            return {"source": a, "targets": sorted(by_source[a])}
    return None


def _tfp_offence(rel, structure) -> dict | None:
    bad = _fp_offence(rel, structure)
    if bad is not None:
        return bad
    sources = {a for a, _ in rel}
    for x in structure.domain:
        if x not in sources:
            return {"undefined_at": x}
    return None


def _ifp_offence(rel, structure) -> dict | None:
    bad = _fp_offence(rel, structure)
    if bad is not None:
        return bad
    by_target: dict[str, set[str]] = {}
    for a, b in rel:
        by_target.setdefault(b, set()).add(a)
    for b in sorted(by_target):
        if len(by_target[b]) > 1:
            return {"target": b, "sources": sorted(by_target[b])}
    return None


_INVARIANTS = {
    "function-preserving": (StructureClass.PARTIAL_FUNCTIONS, _fp_offence),
    "total-function-preserving": (StructureClass.TOTAL_FUNCTIONS, _tfp_offence),
    "injective-function-preserving": (
        StructureClass.INJECTIVE_PARTIAL_FUNCTIONS,
        _ifp_offence,
    ),
}


def _check_invariant(
    name: str, term: tm.Term, bounds: Bounds, seed: int
) -> Verdict:
    cls, offence = _INVARIANTS[name]
    symbols = _symbols_of(term)
    max_size = bounds.resolved_size(len(symbols))

    def examine(structure: Structure) -> Verdict | None:
        value = tm.eval_term(term, structure)
        bad = offence(value, structure)
        if bad is None:
            return None
        counterexample = {
            "kind": "invariant",
            "term": tm.print_term(term),
            "structure": structure_to_json(structure),
            "offence": bad,
        }
        return Verdict(
            property=name,
            status="fail",
            counterexample=counterexample,
            bounds=bounds.to_json(),
            seed=seed,
        )

    for structure in enumerate_structures(symbols, max_size, cls):
        verdict = examine(structure)
        if verdict is not None and verify_counterexample(verdict):
            return verdict
    rng = random.Random(seed)
    for size in _random_sizes(rng, bounds):
        structure = random_structure(rng, size, symbols, cls)
        verdict = examine(structure)
        if verdict is not None and verify_counterexample(verdict):
            return verdict
    return Verdict(name, "pass-bounded", None, bounds.to_json(), seed)


def check_function_preserving(
    term: tm.Term, bounds: Bounds | None = None, seed: int = 0
) -> Verdict:
    return _check_invariant("function-preserving", term, bounds or Bounds(), seed)


def check_total_function_preserving(
    term: tm.Term, bounds: Bounds | None = None, seed: int = 0
) -> Verdict:
    return _check_invariant("total-function-preserving", term, bounds or Bounds(), seed)


def check_injective_function_preserving(
    term: tm.Term, bounds: Bounds | None = None, seed: int = 0
) -> Verdict:
    return _check_invariant(
        "injective-function-preserving", term, bounds or Bounds(), seed
    )


# --- homomorphism safety --------------------------------------------------------

def check_homomorphism_safe(
    term: tm.Term, bounds: Bounds | None = None, seed: int = 0
) -> Verdict:
    """Images of term pairs under any homomorphism stay in the term's value.

    Exhaustive over all structure pairs up to `pair_size`, then sampled
    random pairs (sizes capped at 6, hom search capped at hom_limit).
    """
    bounds = bounds or Bounds()
    symbols = _symbols_of(term)

    value_cache: dict[Structure, frozenset] = {}

    def value(structure: Structure) -> frozenset:
        got = value_cache.get(structure)
        if got is None:
            got = tm.eval_term(term, structure)
            value_cache[structure] = got
        return got

    def examine(source: Structure, target: Structure) -> Verdict | None:
        sval = value(source)
        if not sval:
            return None
        tval = value(target)
        for h in homomorphisms(source, target, limit=bounds.hom_limit):
            for a, b in sorted(sval):
                if (h[a], h[b]) not in tval:
                    counterexample = {
                        "kind": "homomorphism",
                        "term": tm.print_term(term),
                        "source": structure_to_json(source),
                        "target": structure_to_json(target),
                        "map": h,
                        "pair": [a, b],
                    }
                    return Verdict(
                        "homomorphism-safe",
                        "fail",
                        counterexample,
                        bounds.to_json(),
                        seed,
                    )
        return None

    pool = list(enumerate_structures(symbols, bounds.pair_size, StructureClass.ALL))
    for source in pool:
        for target in pool:
            verdict = examine(source, target)
            if verdict is not None and verify_counterexample(verdict):
                return verdict
    rng = random.Random(seed)
    for _ in range(min(bounds.samples, 200)):
        size_a = rng.randint(1, min(bounds.sample_size, 6))
        size_b = rng.randint(1, min(bounds.sample_size, 6))
        source = random_structure(rng, size_a, symbols, StructureClass.ALL)
        target = random_structure(rng, size_b, symbols, StructureClass.ALL)
        verdict = examine(source, target)
        if verdict is not None and verify_counterexample(verdict):
            return verdict
    return Verdict("homomorphism-safe", "pass-bounded", None, bounds.to_json(), seed)


# --- induced-substructure safety ------------------------------------------------

def _move_bits(masks: np.ndarray, moves: list[tuple[int, int]]) -> np.ndarray:
    out = np.zeros_like(masks)
    one = np.uint64(1)
    for src, dst in moves:
        out |= ((masks >> np.uint64(src)) & one) << np.uint64(dst)
    return out


def _subsafe_exhaustive(
    term: tm.Term,
    symbols: tuple[str, ...],
    max_size: int,
    bounds: Bounds,
    examine,
) -> Verdict | None:
    """Exhaustive phase of the induced-substructure check.

    Vectorised whenever the bulk engine applies; sizes whose census exceeds
    the exhaustive budget are covered up to the budget and left to the
    random phase beyond it.  Any hit is rebuilt and re-checked through the
    scalar route before being reported.
    """
    for size in range(1, max_size + 1):
        total = count_structures(symbols, size, StructureClass.ALL)
        if not symbols or size > bulk.MAX_BULK_SIZE:
            for index in range(min(total, bounds.exhaustive_budget)):
                structure = structure_from_index(
                    symbols, size, StructureClass.ALL, index
                )
                subsets = (
                    c
                    for r in range(size + 1)
                    for c in combinations(structure.domain, r)
                )
                verdict = examine(structure, subsets)
                if verdict is not None and verify_counterexample(verdict):
                    return verdict
            continue

        subsets = [
            c for r in range(1, size) for c in combinations(range(size), r)
        ]
        moves = {
            subset: [
                (i * size + j, i2 * len(subset) + j2)
                for i2, i in enumerate(subset)
                for j2, j in enumerate(subset)
            ]
            for subset in subsets
        }
        budget = min(total, bounds.exhaustive_budget)
        hit: tuple[int, tuple[int, ...]] | None = None
        for start in range(0, budget, _CHUNK):
            stop = min(start + _CHUNK, budget)
            indices = np.arange(start, stop, dtype=np.uint64)
            masks = bulk.decode_symbol_masks(
                indices, size, StructureClass.ALL, symbols
            )
            whole = bulk.bulk_eval_term(term, size, masks)
            pending = np.ones(stop - start, dtype=bool)
            found: list[tuple[int, int]] = []
            for rank, subset in enumerate(subsets):
                mv = moves[subset]
                comp = {
                    name: _move_bits(mask, mv) for name, mask in masks.items()
                }
                part = bulk.bulk_eval_term(term, len(subset), comp)
                back = _move_bits(part, [(d, s) for s, d in mv])
                bad = (back & ~whole) != 0
                fresh = bad & pending
                if fresh.any():
                    for off in np.nonzero(fresh)[0]:
                        found.append((int(off), rank))
                    pending &= ~fresh
            if found:
                off, rank = min(found)
                hit = (start + off, subsets[rank])
                break
        if hit is None:
            continue
        index, positions = hit
        structure = structure_from_index(symbols, size, StructureClass.ALL, index)
        subset = tuple(structure.domain[i] for i in positions)
        verdict = examine(structure, [subset])
        if verdict is None:
            raise AssertionError(
                "bulk and scalar evaluation disagree on an induced substructure"
            )
        if verify_counterexample(verdict):
            return verdict
    return None


def check_subseteq_safe(
    term: tm.Term, bounds: Bounds | None = None, seed: int = 0
) -> Verdict:
    """The term's value on an induced substructure embeds into its value
    on the whole structure."""
    bounds = bounds or Bounds()
    symbols = _symbols_of(term)
    max_size = bounds.resolved_size(len(symbols))

    def examine(structure: Structure, subsets) -> Verdict | None:
        whole = tm.eval_term(term, structure)
        for subset in subsets:
            part = induced(structure, subset)
            for pair in sorted(tm.eval_term(term, part)):
                if pair not in whole:
                    counterexample = {
                        "kind": "subset",
                        "term": tm.print_term(term),
                        "structure": structure_to_json(structure),
                        "subset": sorted(subset),
                        "pair": list(pair),
                    }
                    return Verdict(
                        "subseteq-safe",
                        "fail",
                        counterexample,
                        bounds.to_json(),
                        seed,
                    )
        return None

    verdict = _subsafe_exhaustive(term, symbols, max_size, bounds, examine)
    if verdict is not None:
        return verdict
    rng = random.Random(seed)
    for _ in range(min(bounds.samples, 200)):
        size = rng.randint(1, min(bounds.sample_size, 8))
        structure = random_structure(rng, size, symbols, StructureClass.ALL)
        picked = []
        for _ in range(32):
            r = rng.randint(0, size)
            picked.append(tuple(sorted(rng.sample(structure.domain, r))))
        verdict = examine(structure, set(picked))
        if verdict is not None and verify_counterexample(verdict):
            return verdict
    return Verdict("subseteq-safe", "pass-bounded", None, bounds.to_json(), seed)


# --- forward / local boundedness ------------------------------------------------

def _anchored_ball(structure: Structure, anchor: str, radius: int, mode: str):
    depths = _reach_depths(structure, anchor, radius, mode)
    return induced(structure, depths)


def _anchored_canonical(
    ball: Structure, anchor: str, row: frozenset[str]
) -> tuple | None:
    """Canonical encoding of (ball, anchor) plus the row, or None when the
    ball is too large to canonicalise by brute force."""
    elems = [anchor] + [x for x in ball.domain if x != anchor]
    n = len(elems)
    if n > _CANON_BALL_LIMIT:
        return None
    best = None
    for perm in permutations(range(1, n)):
        position = {anchor: 0}
        for src_idx, dst in zip(range(1, n), perm):
            position[elems[src_idx]] = dst
        encoded = (n,) + tuple(
            tuple(sorted((position[a], position[b]) for a, b in ball.relations[name]))
            for name in ball.signature
        )
        row_encoded = tuple(sorted(position[x] for x in row))
        key = (encoded, row_encoded)
        if best is None or key < best:
            best = key
    return best


def _bounded_rows_check(
    term: tm.Term,
    pool: list[Structure],
    radius: int,
    mode: str,
    bounds: Bounds,
    seed: int,
    name: str,
) -> Verdict | None:
    """One radius attempt: rows must stay inside their balls and agree on
    isomorphic anchored balls.  Returns a failure verdict or None."""
    buckets: dict[tuple, tuple[tuple, Structure, str]] = {}
    for structure in pool:
        value = tm.eval_term(term, structure)
        rows: dict[str, set[str]] = {}
        for a, b in value:
            rows.setdefault(a, set()).add(b)
        for anchor in structure.domain:
            row = frozenset(rows.get(anchor, ()))
            depths = _reach_depths(structure, anchor, radius, mode)
            outside = sorted(row - set(depths))
            if outside:
                counterexample = {
                    "kind": "row-outside-ball",
                    "term": tm.print_term(term),
                    "mode": mode,
                    "structure": structure_to_json(structure),
                    "anchor": anchor,
                    "radius": radius,
                    "element": outside[0],
                }
                return Verdict(name, "fail", counterexample, bounds.to_json(), seed)
            ball = induced(structure, depths)
            canon = _anchored_canonical(ball, anchor, row)
            if canon is None:
                continue
            ball_key, row_key = canon
            seen = buckets.get(ball_key)
            if seen is None:
                buckets[ball_key] = (row_key, structure, anchor)
            elif seen[0] != row_key:
                counterexample = {
                    "kind": "ball-row-mismatch",
                    "term": tm.print_term(term),
                    "mode": mode,
                    "radius": radius,
                    "left": structure_to_json(seen[1]),
                    "left_anchor": seen[2],
                    "right": structure_to_json(structure),
                    "right_anchor": anchor,
                }
                return Verdict(name, "fail", counterexample, bounds.to_json(), seed)
    return None


def _check_bounded(
    term: tm.Term,
    cls: StructureClass,
    mode: str,
    name: str,
    bounds: Bounds,
    seed: int,
    max_radius: int,
) -> Verdict:
    symbols = _symbols_of(term)
    max_size = bounds.resolved_size(len(symbols))
    pool = list(enumerate_structures(symbols, max_size, cls))
    rng = random.Random(seed)
    for size in _random_sizes(rng, bounds):
        pool.append(random_structure(rng, size, symbols, cls))

    last_failure: Verdict | None = None
    for radius in range(max_radius + 1):
        failure = _bounded_rows_check(term, pool, radius, mode, bounds, seed, name)
        if failure is None:
            verdict = Verdict(name, "pass-bounded", None, bounds.to_json(), seed)
            verdict.bounds["radius"] = radius
            verdict.bounds["max_radius"] = max_radius
            return verdict
        if verify_counterexample(failure):
            last_failure = failure
    assert last_failure is not None
    last_failure.bounds["max_radius"] = max_radius
    return last_failure


def check_forward(
    term: tm.Term,
    bounds: Bounds | None = None,
    seed: int = 0,
    max_radius: int = 3,
    cls: StructureClass = StructureClass.PARTIAL_FUNCTIONS,
) -> Verdict:
    """Bounded check that the term's rows are determined by forward balls."""
    return _check_bounded(
        term, cls, "forward", "forward-bounded", bounds or Bounds(), seed, max_radius
    )


def check_local(
    term: tm.Term,
    bounds: Bounds | None = None,
    seed: int = 0,
    max_radius: int = 3,
    cls: StructureClass = StructureClass.INJECTIVE_PARTIAL_FUNCTIONS,
) -> Verdict:
    """Bounded check against balls that follow edges in both directions."""
    return _check_bounded(
        term, cls, "undirected", "local-bounded", bounds or Bounds(), seed, max_radius
    )


# --- the operation-by-property matrix -------------------------------------------

MATRIX_COLUMNS = ("homsafe", "subsafe", "fp", "forward")

# Expected verdicts per catalogue operation, columns as in MATRIX_COLUMNS.
EXPECTED_MATRIX: dict[str, tuple[bool, bool, bool, bool]] = {
    "id": (True, True, True, True),
    "empty": (True, True, True, True),
    "top": (True, True, False, False),
    "complement": (False, True, False, False),
    "converse": (True, True, False, False),
    "dom": (True, True, True, True),
    "ran": (True, True, True, False),
    "antidom": (False, False, True, True),
    "union": (True, True, False, True),
    "inter": (True, True, True, True),
    "diff": (False, True, True, True),
    "compose": (True, True, True, True),
    "semijoin": (True, True, True, True),
    "prefunion": (False, False, True, True),
}


def term_for_operation(op: str) -> tm.Term:
    """The operation applied to generic symbols R (and S)."""
    arity = tm.ARITY.get(op)
    if arity is None or op not in tm.CATALOGUE:
        raise ValueError(f"not a catalogue operation: {op!r}")
    if arity == 0:
        return tm.Term(op)
    if arity == 1:
        return tm.Term(op, (tm.sym("R"),))
    return tm.Term(op, (tm.sym("R"), tm.sym("S")))


_COLUMN_CHECKS = {
    "homsafe": check_homomorphism_safe,
    "subsafe": check_subseteq_safe,
    "fp": check_function_preserving,
    "forward": check_forward,
}


@dataclass
class MatrixReport:
    verdicts: dict[str, dict[str, Verdict]]
    expected: dict[str, tuple[bool, bool, bool, bool]]
    mismatches: list[tuple[str, str]] = field(default_factory=list)

    @property
    def agrees(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "columns": list(MATRIX_COLUMNS),
            "rows": {
                op: {col: v.to_json() for col, v in cols.items()}
                for op, cols in self.verdicts.items()
            },
            "expected": {op: list(row) for op, row in self.expected.items()},
            "mismatches": [list(m) for m in self.mismatches],
            "agrees": self.agrees,
        }


def catalogue_matrix(bounds: Bounds | None = None, seed: int = 0) -> MatrixReport:
    """Check all fourteen operations against all four properties."""
    if bounds is None:
        bounds = Bounds(samples=200, sample_size=6)
    verdicts: dict[str, dict[str, Verdict]] = {}
    mismatches: list[tuple[str, str]] = []
    for op in tm.CATALOGUE:
        term = term_for_operation(op)
        row: dict[str, Verdict] = {}
        for col, expect in zip(MATRIX_COLUMNS, EXPECTED_MATRIX[op]):
            verdict = _COLUMN_CHECKS[col](term, bounds, seed)
            row[col] = verdict
            if verdict.passed != expect:
                mismatches.append((op, col))
        verdicts[op] = row
    return MatrixReport(verdicts, dict(EXPECTED_MATRIX), mismatches)


# --- equivalence engine ----------------------------------------------------------

_CHUNK = 1 << 15


@dataclass
class SizeCoverage:
    size: int
    total: int
    mode: str  # "exhaustive" | "sampled" | "skipped"
    checked: int

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "total": self.total,
            "mode": self.mode,
            "checked": self.checked,
        }


@dataclass
class EquivalenceReport:
    equivalent: bool
    counterexample: Structure | None
    lhs_pairs: list | None
    rhs_pairs: list | None
    coverage: list[SizeCoverage]
    random_checked: int
    seed: int

    def to_json(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "counterexample": (
                structure_to_json(self.counterexample) if self.counterexample else None
            ),
            "lhs_pairs": self.lhs_pairs,
            "rhs_pairs": self.rhs_pairs,
            "coverage": [c.to_json() for c in self.coverage],
            "random_checked": self.random_checked,
            "seed": self.seed,
        }


def _scalar_value(obj, structure: Structure):
    if isinstance(obj, tm.Term):
        return tm.eval_term(obj, structure)
    return logic.define_relation(obj, "x", "y", structure, pad_missing=True)


def _mismatch_report(
    lhs, rhs, structure: Structure, coverage, random_checked, seed
) -> EquivalenceReport:
    lv = _scalar_value(lhs, structure)
    rv = _scalar_value(rhs, structure)
    return EquivalenceReport(
        equivalent=False,
        counterexample=structure,
        lhs_pairs=[list(p) for p in sorted(lv)],
        rhs_pairs=[list(p) for p in sorted(rv)],
        coverage=coverage,
        random_checked=random_checked,
        seed=seed,
    )


def equivalence_report(
    lhs,
    rhs,
    signature,
    cls: StructureClass = StructureClass.ALL,
    bounds: Bounds | None = None,
    seed: int = 0,
) -> EquivalenceReport:
    """Compare two terms (or a term and a formula) over a structure class.

    Exhaustive over each size up to the resolved bound while the cumulative
    evaluation budget lasts; an over-budget size degrades to seeded random
    mask batches with coverage recorded.  A second phase samples random
    structures up to sample_size with plain evaluation.  The first
    counterexample (in enumeration order) is re-verified scalar-side before
    being reported.
    """
    bounds = bounds or Bounds()
    signature = tuple(sorted(signature))
    max_size = bounds.resolved_size(len(signature))
    coverage: list[SizeCoverage] = []
    budget = bounds.exhaustive_budget
    npr = np.random.default_rng(seed)

    def bulk_compare(size, symbol_masks, base_index, exhaustive):
        lmask = bulk.bulk_masks(lhs, size, symbol_masks)
        rmask = bulk.bulk_masks(rhs, size, symbol_masks)
        bad = lmask != rmask
        if not bad.any():
            return None
        first = int(np.argmax(bad))
        if exhaustive:
            structure = structure_from_index(
                signature, size, cls, int(base_index + first)
            )
        else:
            structure = bulk.masks_to_structure(
                {name: int(arr[first]) for name, arr in symbol_masks.items()}, size
            )
        if _scalar_value(lhs, structure) == _scalar_value(rhs, structure):
            raise AssertionError(
                "bulk and scalar evaluation disagree on a counterexample"
            )
        return structure

    for size in range(1, max_size + 1):
        total = count_structures(signature, size, cls)
        if not signature:
            # One bare domain per size; compare directly.
            structure = structure_from_index(signature, size, cls, 0)
            if _scalar_value(lhs, structure) != _scalar_value(rhs, structure):
                coverage.append(SizeCoverage(size, 1, "exhaustive", 1))
                return _mismatch_report(lhs, rhs, structure, coverage, 0, seed)
            coverage.append(SizeCoverage(size, 1, "exhaustive", 1))
        elif size <= bulk.MAX_BULK_SIZE and total <= budget:
            budget -= total
            for start in range(0, total, _CHUNK):
                stop = min(start + _CHUNK, total)
                indices = np.arange(start, stop, dtype=np.uint64)
                masks = bulk.decode_symbol_masks(indices, size, cls, signature)
                found = bulk_compare(size, masks, start, True)
                if found is not None:
                    coverage.append(SizeCoverage(size, total, "exhaustive", stop))
                    return _mismatch_report(lhs, rhs, found, coverage, 0, seed)
            coverage.append(SizeCoverage(size, total, "exhaustive", total))
        elif size <= bulk.MAX_BULK_SIZE and budget > 0:
            n = min(budget, _CHUNK * 2)
            budget -= n
            masks = bulk.random_symbol_masks(npr, n, size, cls, signature)
            found = bulk_compare(size, masks, 0, False)
            if found is not None:
                coverage.append(SizeCoverage(size, total, "sampled", n))
                return _mismatch_report(lhs, rhs, found, coverage, 0, seed)
            coverage.append(SizeCoverage(size, total, "sampled", n))
        else:
            coverage.append(SizeCoverage(size, total, "skipped", 0))

    rng = random.Random(seed)
    random_checked = 0
    for _ in range(bounds.samples):
        size = rng.randint(1, bounds.sample_size)
        structure = random_structure(rng, size, signature, cls)
        random_checked += 1
        if _scalar_value(lhs, structure) != _scalar_value(rhs, structure):
            return _mismatch_report(
                lhs, rhs, structure, coverage, random_checked, seed
            )
    return EquivalenceReport(True, None, None, None, coverage, random_checked, seed)


# --- counterexample re-verification ----------------------------------------------

def verify_counterexample(verdict: Verdict) -> bool:
    """Re-establish a failure verdict from its own payload.

    Every checker calls this before letting a failure out, and tests can
    call it on anything deserialised from a report.
    """
    if verdict.status != "fail" or verdict.counterexample is None:
        return False
    data = verdict.counterexample
    kind = data.get("kind")
    term = tm.parse_term(data["term"]) if "term" in data else None

    if kind == "invariant":
        structure = structure_from_json(data["structure"])
        offence_of = {
            "function-preserving": _fp_offence,
            "total-function-preserving": _tfp_offence,
            "injective-function-preserving": _ifp_offence,
        }[verdict.property]
        return offence_of(tm.eval_term(term, structure), structure) is not None

    if kind == "homomorphism":
        source = structure_from_json(data["source"])
        target = structure_from_json(data["target"])
        h = data["map"]
        a, b = data["pair"]
        from .structures import is_homomorphism

        if not is_homomorphism(source, target, h):
            return False
        if (a, b) not in tm.eval_term(term, source):
            return False
        return (h[a], h[b]) not in tm.eval_term(term, target)

    if kind == "subset":
        structure = structure_from_json(data["structure"])
        part = induced(structure, data["subset"])
        pair = tuple(data["pair"])
        return pair in tm.eval_term(term, part) and pair not in tm.eval_term(
            term, structure
        )

    if kind == "row-outside-ball":
        structure = structure_from_json(data["structure"])
        anchor = data["anchor"]
        depths = _reach_depths(structure, anchor, data["radius"], data["mode"])
        return (anchor, data["element"]) in tm.eval_term(term, structure) and data[
            "element"
        ] not in depths

    if kind == "ball-row-mismatch":
        left = structure_from_json(data["left"])
        right = structure_from_json(data["right"])
        mode = data["mode"]
        radius = data["radius"]

        def anchored_row(structure, anchor):
            value = tm.eval_term(term, structure)
            return frozenset(b for a, b in value if a == anchor)

        la, ra = data["left_anchor"], data["right_anchor"]
        lball = _anchored_ball(left, la, radius, mode)
        rball = _anchored_ball(right, ra, radius, mode)
        lrow = anchored_row(left, la)
        rrow = anchored_row(right, ra)
        if len(lball.domain) != len(rball.domain):
            return False
        lelems = [la] + [x for x in lball.domain if x != la]
        relems = [ra] + [x for x in rball.domain if x != ra]
        n = len(lelems)
        saw_iso = False
        for perm in permutations(range(1, n)):
            mapping = {la: ra}
            for idx, dst in zip(range(1, n), perm):
                mapping[lelems[idx]] = relems[dst]
            ok = all(
                frozenset((mapping[a], mapping[b]) for a, b in lball.relations[nm])
                == rball.relations[nm]
                for nm in lball.signature
            )
            if not ok:
                continue
            saw_iso = True
            if frozenset(mapping[x] for x in lrow) == rrow:
                return False  # some ball isomorphism matches the rows
        return saw_iso

    return False
