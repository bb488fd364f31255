"""First-order formulas over binary-relation signatures.

Syntax (binding from loosest to tightest):

    a -> b            implication, right associative
    a | b             disjunction
    a & b             conjunction
    !a                negation
    exists v. a       quantifiers swallow everything up to the enclosing
    forall v. a       closing parenthesis or the end of the input
    R(x,y)  x=y  true  false  (a)

Formulas are plain immutable trees.  `eval_formula` is the direct Tarskian
truth definition; `define_relation` evaluates a two-free-variable formula
into a concrete relation using assignment-set semantics, which stays
polynomial in the structure instead of exponential in quantifier depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Mapping, Sequence
from itertools import product

from .parsing import TokenStream, tokenize
from .structures import Relation, Structure
from . import terms as tm


class LogicError(ValueError):
    """Malformed formula or an evaluation request it cannot satisfy."""


class Formula:
    """Base class; concrete nodes are the dataclasses below."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    left: str
    right: str


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Truth(Formula):
    value: bool


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


TRUE = Truth(True)
FALSE = Truth(False)


def conjoin(parts: Sequence[Formula]) -> Formula:
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disjoin(parts: Sequence[Formula]) -> Formula:
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Atom):
        return frozenset({phi.left, phi.right})
    if isinstance(phi, Eq):
        return frozenset({phi.left, phi.right})
    if isinstance(phi, Truth):
        return frozenset()
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (And, Or, Implies)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (Exists, Forall)):
        return free_vars(phi.body) - {phi.var}
    raise LogicError(f"not a formula node: {phi!r}")


@dataclass(frozen=True)
class FormulaInfo:
    variables: frozenset[str]
    variable_count: int
    free: frozenset[str]
    symbols: tuple[str, ...]
    is_posex: bool


def classify(phi: Formula) -> FormulaInfo:
    """Variable usage, signature, and positive-existential status."""
    names: set[str] = set()
    symbols: set[str] = set()
    posex = True

    def walk(node: Formula) -> None:
        nonlocal posex
        if isinstance(node, Atom):
            names.update((node.left, node.right))
            symbols.add(node.rel)
        elif isinstance(node, Eq):
            names.update((node.left, node.right))
        elif isinstance(node, Truth):
            pass
        elif isinstance(node, Not):
            posex = False
            walk(node.body)
        elif isinstance(node, Implies):
            posex = False
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (And, Or)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Forall):
            posex = False
            names.add(node.var)
            walk(node.body)
        elif isinstance(node, Exists):
            names.add(node.var)
            walk(node.body)
        else:
            raise LogicError(f"not a formula node: {node!r}")

    walk(phi)
    return FormulaInfo(
        variables=frozenset(names),
        variable_count=len(names),
        free=free_vars(phi),
        symbols=tuple(sorted(symbols)),
        is_posex=posex,
    )


# --- direct evaluation ---------------------------------------------------------

def eval_formula(
    phi: Formula, structure: Structure, assignment: Mapping[str, str] | None = None
) -> bool:
    env = dict(assignment or {})
    for v in free_vars(phi):
        if v not in env:
            raise LogicError(f"free variable {v!r} has no assigned element")

    def ev(node: Formula, env: dict[str, str]) -> bool:
        if isinstance(node, Atom):
            return (env[node.left], env[node.right]) in structure.rel(node.rel)
        if isinstance(node, Eq):
            return env[node.left] == env[node.right]
        if isinstance(node, Truth):
            return node.value
        if isinstance(node, Not):
            return not ev(node.body, env)
        if isinstance(node, And):
            return ev(node.left, env) and ev(node.right, env)
        if isinstance(node, Or):
            return ev(node.left, env) or ev(node.right, env)
        if isinstance(node, Implies):
            return (not ev(node.left, env)) or ev(node.right, env)
        if isinstance(node, Exists):
            return any(ev(node.body, {**env, node.var: d}) for d in structure.domain)
        if isinstance(node, Forall):
            return all(ev(node.body, {**env, node.var: d}) for d in structure.domain)
        raise LogicError(f"not a formula node: {node!r}")

    return ev(phi, env)


# --- assignment-set evaluation --------------------------------------------------

def _all_rows(variables: tuple[str, ...], domain: tuple[str, ...]) -> set[tuple[str, ...]]:
    return set(product(domain, repeat=len(variables)))


def _extend(
    rows: set[tuple[str, ...]],
    variables: tuple[str, ...],
    target: tuple[str, ...],
    domain: tuple[str, ...],
) -> set[tuple[str, ...]]:
    """Re-index rows over `variables` to rows over the superset `target`."""
    if variables == target:
        return rows
    positions = {v: i for i, v in enumerate(variables)}
    fresh = [v for v in target if v not in positions]
    out: set[tuple[str, ...]] = set()
    for row in rows:
        base = {v: row[positions[v]] for v in variables}
        for extra in product(domain, repeat=len(fresh)):
            full = dict(base)
            full.update(zip(fresh, extra))
            out.add(tuple(full[v] for v in target))
    return out


def _rows(phi: Formula, structure: Structure) -> tuple[tuple[str, ...], set[tuple[str, ...]]]:
    """Free variables of phi (sorted) plus the set of satisfying rows."""
    dom = structure.domain

    if isinstance(phi, Atom):
        rel = structure.rel(phi.rel)
        if phi.left == phi.right:
            return (phi.left,), {(a,) for a, b in rel if a == b}
        variables = tuple(sorted((phi.left, phi.right)))
        if variables == (phi.left, phi.right):
            return variables, set(rel)
        return variables, {(b, a) for a, b in rel}
    if isinstance(phi, Eq):
        if phi.left == phi.right:
            return (phi.left,), {(d,) for d in dom}
        variables = tuple(sorted((phi.left, phi.right)))
        return variables, {(d, d) for d in dom}
    if isinstance(phi, Truth):
        return (), ({()} if phi.value else set())
    if isinstance(phi, Not):
        variables, rows = _rows(phi.body, structure)
        return variables, _all_rows(variables, dom) - rows
    if isinstance(phi, (And, Or, Implies)):
        lvars, lrows = _rows(phi.left, structure)
        rvars, rrows = _rows(phi.right, structure)
        variables = tuple(sorted(set(lvars) | set(rvars)))
        lrows = _extend(lrows, lvars, variables, dom)
        rrows = _extend(rrows, rvars, variables, dom)
        if isinstance(phi, And):
            return variables, lrows & rrows
        if isinstance(phi, Or):
            return variables, lrows | rrows
        return variables, (_all_rows(variables, dom) - lrows) | rrows
    if isinstance(phi, Exists):
        bvars, brows = _rows(phi.body, structure)
        if phi.var not in bvars:
            return bvars, (brows if dom else set())
        keep = tuple(v for v in bvars if v != phi.var)
        drop = bvars.index(phi.var)
        return keep, {row[:drop] + row[drop + 1 :] for row in brows}
    if isinstance(phi, Forall):
        bvars, brows = _rows(phi.body, structure)
        if phi.var not in bvars:
            return bvars, (brows if dom else _all_rows(bvars, dom))
        keep = tuple(v for v in bvars if v != phi.var)
        if not dom:
            return keep, ({()} if not keep else set())
        drop = bvars.index(phi.var)
        counts: dict[tuple[str, ...], int] = {}
        for row in brows:
            key = row[:drop] + row[drop + 1 :]
            counts[key] = counts.get(key, 0) + 1
        return keep, {key for key, c in counts.items() if c == len(dom)}
    raise LogicError(f"not a formula node: {phi!r}")


def define_relation(
    phi: Formula,
    x: str,
    y: str,
    structure: Structure,
    pad_missing: bool = False,
) -> Relation:
    """The binary relation {(a, b) : phi holds with x = a, y = b}.

    By default the formula's free variables must be exactly the requested
    pair (or the single variable when x == y); `pad_missing` instead leaves
    an unused requested variable unconstrained.
    """
    fv = free_vars(phi)
    wanted = {x, y}
    if not fv <= wanted:
        raise LogicError(
            f"free variables {sorted(fv)} are not within the requested pair "
            f"({x!r}, {y!r})"
        )
    if fv != wanted and not pad_missing:
        raise LogicError(
            f"free variables {sorted(fv)} do not cover the requested pair "
            f"({x!r}, {y!r}); pass pad_missing=True to allow this"
        )
    variables, rows = _rows(phi, structure)
    if x == y:
        target = (x,)
        rows = _extend(rows, variables, target, structure.domain)
        return frozenset((row[0], row[0]) for row in rows)
    target = tuple(sorted((x, y)))
    rows = _extend(rows, variables, target, structure.domain)
    if target == (x, y):
        return frozenset((a, b) for a, b in rows)
    return frozenset((b, a) for a, b in rows)


# --- terms as three-variable formulas -------------------------------------------

_FO3_VARS = ("x", "y", "z")


def _third(u: str, v: str) -> str:
    for w in _FO3_VARS:
        if w != u and w != v:
            return w
    raise LogicError("no spare variable available")


def _pad(u: str, v: str) -> Formula:
    return And(Eq(u, u), Eq(v, v))


def term_to_fo3(t: tm.Term, x: str = "x", y: str = "y") -> Formula:
    """A three-variable formula equivalent to the term.

    Uses only the variable names x, y, z, rebinding the spare name as
    composition chains demand.  The output is positive-existential exactly
    when the term avoids complement, antidomain, difference and the
    preferential unions.
    """
    if x == y or x not in _FO3_VARS or y not in _FO3_VARS:
        raise LogicError("term_to_fo3 needs two distinct variables among x, y, z")

    def build(node: tm.Term, u: str, v: str) -> Formula:
        op = node.op
        if op == "sym":
            return Atom(node.name or "", u, v)
        if op == "id":
            return Eq(u, v)
        if op == "empty":
            return And(_pad(u, v), FALSE)
        if op == "top":
            return _pad(u, v)
        if op == "complement":
            return Not(build(node.args[0], u, v))
        if op == "converse":
            return build(node.args[0], v, u)
        if op == "dom":
            w = _third(u, v)
            return And(Eq(u, v), Exists(w, build(node.args[0], u, w)))
        if op == "ran":
            w = _third(u, v)
            return And(Eq(u, v), Exists(w, build(node.args[0], w, u)))
        if op == "antidom":
            w = _third(u, v)
            return And(Eq(u, v), Not(Exists(w, build(node.args[0], u, w))))
        if op == "union":
            return Or(build(node.args[0], u, v), build(node.args[1], u, v))
        if op == "inter":
            return And(build(node.args[0], u, v), build(node.args[1], u, v))
        if op == "diff":
            return And(build(node.args[0], u, v), Not(build(node.args[1], u, v)))
        if op == "compose":
            w = _third(u, v)
            return Exists(
                w, And(build(node.args[0], u, w), build(node.args[1], w, v))
            )
        if op == "semijoin":
            w = _third(u, v)
            return And(
                build(node.args[0], u, v),
                Exists(w, build(node.args[1], v, w)),
            )
        if op == "prefunion":
            w = _third(u, v)
            return Or(
                build(node.args[0], u, v),
                And(
                    build(node.args[1], u, v),
                    Not(Exists(w, build(node.args[0], u, w))),
                ),
            )
        if op == "injunion":
            return build(tm.expand_injunion(node), u, v)
        raise LogicError(f"term has no formula translation: {op!r}")

    return build(t, x, y)


# --- concrete syntax -------------------------------------------------------------

_OPERATORS = ("->", "!", "&", "|", "(", ")", ",", "=", ".")
_KEYWORDS = {"true", "false", "exists", "forall"}


def _parse_implies(stream: TokenStream) -> Formula:
    left = _parse_or(stream)
    if stream.match("->"):
        return Implies(left, _parse_implies(stream))
    return left


def _parse_or(stream: TokenStream) -> Formula:
    left = _parse_and(stream)
    while stream.match("|"):
        left = Or(left, _parse_and(stream))
    return left


def _parse_and(stream: TokenStream) -> Formula:
    left = _parse_unary(stream)
    while stream.match("&"):
        left = And(left, _parse_unary(stream))
    return left


def _parse_unary(stream: TokenStream) -> Formula:
    tok = stream.peek()
    if tok.kind == "op" and tok.text == "!":
        stream.advance()
        return Not(_parse_unary(stream))
    if tok.kind == "name" and tok.text in ("exists", "forall"):
        stream.advance()
        var = stream.expect_name("variable name")
        stream.expect(".")
        body = _parse_implies(stream)
        return Exists(var, body) if tok.text == "exists" else Forall(var, body)
    return _parse_atom(stream)


def _parse_atom(stream: TokenStream) -> Formula:
    tok = stream.peek()
    if tok.kind == "op" and tok.text == "(":
        stream.advance()
        inner = _parse_implies(stream)
        stream.expect(")")
        return inner
    if tok.kind == "name":
        if tok.text == "true":
            stream.advance()
            return TRUE
        if tok.text == "false":
            stream.advance()
            return FALSE
        stream.advance()
        nxt = stream.peek()
        if nxt.kind == "op" and nxt.text == "(":
            stream.advance()
            left = stream.expect_name("variable name")
            stream.expect(",")
            right = stream.expect_name("variable name")
            stream.expect(")")
            return Atom(tok.text, left, right)
        if nxt.kind == "op" and nxt.text == "=":
            stream.advance()
            right = stream.expect_name("variable name")
            return Eq(tok.text, right)
        stream.fail(f"expected '(' or '=' after {tok.text!r}")
    stream.fail(
        "expected a formula, found "
        + ("end of input" if tok.kind == "end" else repr(tok.text))
    )


def parse_formula(text: str) -> Formula:
    stream = TokenStream(tokenize(text, _OPERATORS))
    phi = _parse_implies(stream)
    stream.expect_end()
    return phi


def print_formula(phi: Formula) -> str:
    """Render with minimal parentheses; parse_formula inverts it."""

    def prec(node: Formula) -> int:
        if isinstance(node, Implies):
            return 1
        if isinstance(node, Or):
            return 2
        if isinstance(node, And):
            return 3
        if isinstance(node, Not):
            return 4
        return 5

    def wrap(node: Formula, text: str, parent_prec: int, strict: bool) -> str:
        # Quantifiers swallow to the end of the input or enclosing
        # parenthesis, so as a child of any connective they need parens.
        if isinstance(node, (Exists, Forall)):
            return f"({text})"
        p = prec(node)
        if p < parent_prec or (strict and p == parent_prec):
            return f"({text})"
        return text

    def go(node: Formula) -> str:
        if isinstance(node, Atom):
            return f"{node.rel}({node.left},{node.right})"
        if isinstance(node, Eq):
            return f"{node.left}={node.right}"
        if isinstance(node, Truth):
            return "true" if node.value else "false"
        if isinstance(node, Not):
            return "!" + wrap(node.body, go(node.body), 4, False)
        if isinstance(node, And):
            return (
                wrap(node.left, go(node.left), 3, False)
                + " & "
                + wrap(node.right, go(node.right), 3, True)
            )
        if isinstance(node, Or):
            return (
                wrap(node.left, go(node.left), 2, False)
                + " | "
                + wrap(node.right, go(node.right), 2, True)
            )
        if isinstance(node, Implies):
            return (
                wrap(node.left, go(node.left), 1, True)
                + " -> "
                + wrap(node.right, go(node.right), 1, False)
            )
        if isinstance(node, Exists):
            return f"exists {node.var}. {go(node.body)}"
        if isinstance(node, Forall):
            return f"forall {node.var}. {go(node.body)}"
        raise LogicError(f"not a formula node: {node!r}")

    return go(phi)
