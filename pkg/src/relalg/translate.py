"""Compiling positive-existential three-variable formulas into terms.

The output uses only the homomorphism-safe operation set (id, 0, T,
composition, union, intersection, converse).  The compilation invariant:
`compile` applied to a formula with free variables inside a role pair
(u, v) returns a term denoting exactly the pairs (a, b) that satisfy the
formula with u = a, v = b, unused role variables unconstrained.

The crux is an existential over the third variable name w.  The body is
flattened into a disjunction of conjunctions whose conjuncts each fit in
two of the three roles; a conjunction splits into a (u, v) part, a (u, w)
part and a (w, v) part, so the quantifier becomes one composition:

    exists w (g1(u,v) & g2(u,w) & g3(w,v))   ~~>   t1 & (t2 ; t3)
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import terms as tm
from .checkers import Bounds, EquivalenceReport, equivalence_report
from .logic import (
    And,
    Atom,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Truth,
    classify,
    free_vars,
    print_formula,
)
from .structures import StructureClass


class TranslateError(ValueError):
    """The formula falls outside the compilable fragment."""


def _first_offender(phi: Formula) -> Formula | None:
    if isinstance(phi, (Not, Implies, Forall)):
        return phi
    if isinstance(phi, (And, Or)):
        return _first_offender(phi.left) or _first_offender(phi.right)
    if isinstance(phi, Exists):
        return _first_offender(phi.body)
    return None


@dataclass
class GroupedConjunction:
    """One disjunct of an existential body, split by variable support."""

    bound: str
    left_role: str
    right_role: str
    pair_part: list[Formula]  # free within {left_role, right_role}
    out_part: list[Formula]  # free within {left_role, bound}
    in_part: list[Formula]  # free within {bound, right_role}


def group_conjuncts(
    conjuncts: list[Formula], u: str, v: str, w: str
) -> GroupedConjunction:
    """Assign each conjunct to its slot.

    Two-variable supports force the slot; one-variable and closed conjuncts
    follow a fixed convention: {u} and {w} go to the outgoing slot, {v} to
    the incoming slot, sentences to the pair slot.
    """
    grouped = GroupedConjunction(w, u, v, [], [], [])
    for c in conjuncts:
        fv = free_vars(c)
        if not fv or fv == {u, v}:
            grouped.pair_part.append(c)
        elif fv == {u} or fv == {w} or fv == {u, w}:
            grouped.out_part.append(c)
        elif fv == {v} or fv == {w, v}:
            grouped.in_part.append(c)
        else:
            raise TranslateError(
                f"conjunct does not fit two of the three roles: {print_formula(c)}"
            )
    return grouped


def _disjunctive_split(phi: Formula) -> list[list[Formula]]:
    """Disjuncts of conjunct lists; anything with at most two free
    variables stays opaque, so only three-variable connectives unfold."""
    if len(free_vars(phi)) <= 2:
        return [[phi]]
    if isinstance(phi, And):
        return [
            la + lb
            for la in _disjunctive_split(phi.left)
            for lb in _disjunctive_split(phi.right)
        ]
    if isinstance(phi, Or):
        return _disjunctive_split(phi.left) + _disjunctive_split(phi.right)
    raise TranslateError(
        f"cannot split a three-variable subformula: {print_formula(phi)}"
    )


def _conjoin_terms(parts: list[tm.Term]) -> tm.Term:
    if not parts:
        return tm.TOP
    out = parts[0]
    for p in parts[1:]:
        out = tm.inter(out, p)
    return out


def _compile(phi: Formula, u: str, v: str) -> tm.Term:
    if isinstance(phi, Truth):
        return tm.TOP if phi.value else tm.EMPTY
    if isinstance(phi, Eq):
        if {phi.left, phi.right} == {u, v}:
            return tm.ID
        return tm.TOP  # x = x, trivially true, role-padded
    if isinstance(phi, Atom):
        a, b = phi.left, phi.right
        rel = tm.sym(phi.rel)
        if (a, b) == (u, v):
            return rel
        if (a, b) == (v, u):
            return tm.conv(rel)
        if a == b == u:
            return tm.compose(tm.inter(rel, tm.ID), tm.TOP)
        if a == b == v:
            return tm.compose(tm.TOP, tm.inter(rel, tm.ID))
        raise TranslateError(
            f"atom uses a variable outside its roles: {print_formula(phi)}"
        )
    if isinstance(phi, Or):
        return tm.union(_compile(phi.left, u, v), _compile(phi.right, u, v))
    if isinstance(phi, And):
        return tm.inter(_compile(phi.left, u, v), _compile(phi.right, u, v))
    if isinstance(phi, Exists):
        w = phi.var
        if w == u:
            # The first role is requantified; the result ignores it.
            return tm.compose(tm.TOP, _compile(phi.body, u, v))
        if w == v:
            return tm.compose(_compile(phi.body, u, v), tm.TOP)
        parts = []
        for conjuncts in _disjunctive_split(phi.body):
            grouped = group_conjuncts(conjuncts, u, v, w)
            pair_term = _conjoin_terms([_compile(c, u, v) for c in grouped.pair_part])
            out_term = _conjoin_terms([_compile(c, u, w) for c in grouped.out_part])
            in_term = _conjoin_terms([_compile(c, w, v) for c in grouped.in_part])
            parts.append(tm.inter(pair_term, tm.compose(out_term, in_term)))
        disjunction = parts[0]
        for p in parts[1:]:
            disjunction = tm.union(disjunction, p)
        return disjunction
    raise TranslateError(
        f"only positive-existential FO3 is compilable: {print_formula(phi)}"
    )


def compile_posex(phi: Formula) -> tm.Term:
    """Compile a positive-existential FO3 formula with free variables
    within {x, y} into a homomorphism-safe term."""
    info = classify(phi)
    if not info.is_posex:
        offender = _first_offender(phi) or phi
        raise TranslateError(
            f"only positive-existential FO3 is compilable: {print_formula(offender)}"
        )
    if info.variable_count > 3:
        raise TranslateError(
            f"formula uses {info.variable_count} variable names "
            f"({', '.join(sorted(info.variables))}), three are available: "
            f"{print_formula(phi)}"
        )
    if not info.free <= {"x", "y"}:
        raise TranslateError(
            f"free variables must lie within x, y; got {sorted(info.free)}: "
            f"{print_formula(phi)}"
        )
    return tm.simplify_term(_compile(phi, "x", "y"))


@dataclass
class CompilationCheck:
    term: tm.Term
    report: EquivalenceReport

    @property
    def ok(self) -> bool:
        return self.report.equivalent


def verify_compilation(
    phi: Formula,
    term: tm.Term | None = None,
    bounds: Bounds | None = None,
    seed: int = 0,
) -> CompilationCheck:
    """Compile (unless a term is supplied) and compare formula semantics
    against term semantics over the formula's own signature.

    The two sides follow genuinely different evaluation routes, so this is
    a real cross-check rather than the compiler grading itself.
    """
    if term is None:
        term = compile_posex(phi)
    signature = classify(phi).symbols
    report = equivalence_report(
        phi, term, signature, StructureClass.ALL, bounds, seed
    )
    return CompilationCheck(term, report)


def random_posex_formula(
    rng: random.Random, symbols: tuple[str, ...], max_depth: int = 4
) -> Formula:
    """A seeded positive-existential formula over x, y, z with free
    variables within {x, y}."""
    if not symbols:
        raise TranslateError("need at least one relation symbol")

    def gen(depth: int, scope: tuple[str, ...]) -> Formula:
        if depth <= 0:
            roll = rng.random()
            if roll < 0.08:
                return Truth(rng.random() < 0.7)
            if roll < 0.2:
                return Eq(rng.choice(scope), rng.choice(scope))
            return Atom(rng.choice(symbols), rng.choice(scope), rng.choice(scope))
        roll = rng.random()
        if roll < 0.3:
            return And(gen(depth - 1, scope), gen(depth - 1, scope))
        if roll < 0.55:
            return Or(gen(depth - 1, scope), gen(depth - 1, scope))
        if roll < 0.85:
            var = rng.choice(("x", "y", "z"))
            inner_scope = scope if var in scope else scope + (var,)
            return Exists(var, gen(depth - 1, inner_scope))
        return gen(0, scope)

    return gen(max_depth, ("x", "y"))
