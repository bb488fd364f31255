"""Relation-algebra terms: syntax, evaluation, enumeration, closure.

A term is a tree over a fixed operation vocabulary applied to named relation
symbols.  Concrete syntax (binding from loosest to tightest):

    t <+ u   preferential union        t <# u   injective preferential union
    t | u    union
    t \\ u    difference                t & u    intersection
    t ; u    composition               t |> u   semijoin
    ~t       antidomain                -t       complement
    t^       converse (postfix)
    id  0  T  dom(t)  ran(t)  name  (t)

All infix operators associate to the left and the postfix converse binds
tighter than the prefix operators, so ~f^ reads as ~(f^).  The identifiers
``id``, ``T``, ``dom`` and ``ran`` are reserved and cannot name relation
symbols inside term text.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Iterator, Mapping, Sequence
from pathlib import Path

from .parsing import ParseError, TokenStream, tokenize
from .structures import Relation, Structure


class TermError(ValueError):
    """Malformed term or evaluation failure."""


ARITY: dict[str, int] = {
    "sym": 0,
    "id": 0,
    "empty": 0,
    "top": 0,
    "complement": 1,
    "converse": 1,
    "dom": 1,
    "ran": 1,
    "antidom": 1,
    "union": 2,
    "inter": 2,
    "diff": 2,
    "compose": 2,
    "semijoin": 2,
    "prefunion": 2,
    "injunion": 2,
}

# The fourteen catalogued operations, in the order the survey table lists
# them.  The injective preferential union is deliberately absent: it is a
# derived operation and only appears in the injective synthesis basis.
CATALOGUE: tuple[str, ...] = (
    "id",
    "empty",
    "top",
    "complement",
    "converse",
    "dom",
    "ran",
    "antidom",
    "union",
    "inter",
    "diff",
    "compose",
    "semijoin",
    "prefunion",
)

BASES: dict[str, frozenset[str]] = {
    "tra": frozenset({"id", "empty", "complement", "inter", "compose", "converse"}),
    "fa": frozenset(
        {
            "id",
            "empty",
            "dom",
            "ran",
            "antidom",
            "inter",
            "diff",
            "compose",
            "semijoin",
            "prefunion",
        }
    ),
    "homsafe": frozenset({"id", "empty", "top", "compose", "union", "inter", "converse"}),
    "forward": frozenset({"compose", "antidom", "inter", "prefunion"}),
    "injective": frozenset({"compose", "antidom", "inter", "converse", "injunion"}),
}


class Term:
    """Immutable term tree node.

    Structural hashing is precomputed at construction so that deeply nested
    terms (synthesised terms routinely nest hundreds of levels) stay cheap
    to hash and compare.
    """

    __slots__ = ("op", "args", "name", "_hash")

    def __init__(self, op: str, args: Iterable["Term"] = (), name: str | None = None):
        args = tuple(args)
        arity = ARITY.get(op)
        if arity is None:
            raise TermError(f"unknown operation tag {op!r}")
        if len(args) != arity:
            raise TermError(f"operation {op!r} takes {arity} argument(s), got {len(args)}")
        if (op == "sym") != (name is not None):
            raise TermError("exactly the 'sym' operation carries a symbol name")
        for a in args:
            if not isinstance(a, Term):
                raise TermError(f"term arguments must be terms, got {type(a).__name__}")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "name", name)
        object.__setattr__(
            self, "_hash", hash((op, name) + tuple(a._hash for a in args))
        )

    def __setattr__(self, key: str, value: object) -> None:
        raise AttributeError("Term instances are immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if (
                a._hash != b._hash
                or a.op != b.op
                or a.name != b.name
                or len(a.args) != len(b.args)
            ):
                return False
            stack.extend(zip(a.args, b.args))
        return True

    def __repr__(self) -> str:
        return f"Term({print_term(self)!r})"


ID = Term("id")
EMPTY = Term("empty")
TOP = Term("top")


def sym(name: str) -> Term:
    return Term("sym", (), name)


def complement(t: Term) -> Term:
    return Term("complement", (t,))


def conv(t: Term) -> Term:
    return Term("converse", (t,))


def dom(t: Term) -> Term:
    return Term("dom", (t,))


def ran(t: Term) -> Term:
    return Term("ran", (t,))


def antidom(t: Term) -> Term:
    return Term("antidom", (t,))


def union(s: Term, t: Term) -> Term:
    return Term("union", (s, t))


def inter(s: Term, t: Term) -> Term:
    return Term("inter", (s, t))


def diff(s: Term, t: Term) -> Term:
    return Term("diff", (s, t))


def compose(s: Term, t: Term) -> Term:
    return Term("compose", (s, t))


def semijoin(s: Term, t: Term) -> Term:
    return Term("semijoin", (s, t))


def prefunion(s: Term, t: Term) -> Term:
    return Term("prefunion", (s, t))


def injunion(s: Term, t: Term) -> Term:
    return Term("injunion", (s, t))


def iter_nodes(t: Term) -> Iterator[Term]:
    """Every distinct subterm of t, once each, in DFS preorder."""
    seen: set[int] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(reversed(node.args))


def term_size(t: Term) -> int:
    """Number of nodes, counting shared subterms once per occurrence."""
    sizes: dict[int, int] = {}
    for node in _postorder(t):
        sizes[id(node)] = 1 + sum(sizes[id(a)] for a in node.args)
    return sizes[id(t)]


def term_ops(t: Term) -> frozenset[str]:
    return frozenset(node.op for node in iter_nodes(t) if node.op != "sym")


def term_signature(t: Term) -> tuple[str, ...]:
    return tuple(sorted({node.name for node in iter_nodes(t) if node.op == "sym"}))


def uses_only(t: Term, ops: Iterable[str]) -> bool:
    allowed = set(ops) | {"sym"}
    return all(node.op in allowed for node in iter_nodes(t))


def _postorder(t: Term) -> Iterator[Term]:
    """Distinct subterms in bottom-up order, children before parents."""
    seen: set[int] = set()
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            yield node
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for a in node.args:
            stack.append((a, False))


def _rebuild(t: Term, make: "callable") -> Term:
    """Bottom-up structural rewrite; `make(node, new_args)` builds each node."""
    out: dict[int, Term] = {}
    for node in _postorder(t):
        out[id(node)] = make(node, tuple(out[id(a)] for a in node.args))
    return out[id(t)]


def subst_syms(t: Term, mapping: Mapping[str, Term]) -> Term:
    def make(node: Term, args: tuple[Term, ...]) -> Term:
        if node.op == "sym" and node.name in mapping:
            return mapping[node.name]
        if args == node.args:
            return node
        return Term(node.op, args, node.name)

    return _rebuild(t, make)


def expand_injunion(t: Term) -> Term:
    """Rewrite every injective preferential union into its defining term."""

    def make(node: Term, args: tuple[Term, ...]) -> Term:
        if node.op == "injunion":
            a, b = args
            return inter(prefunion(a, b), conv(prefunion(conv(a), conv(b))))
        if args == node.args:
            return node
        return Term(node.op, args, node.name)

    return _rebuild(t, make)


# --- evaluation ---------------------------------------------------------------

def _scalar_apply(
    op: str, name: str | None, args: Sequence[Relation], structure: Structure
) -> Relation:
    dom_elems = structure.domain
    if op == "sym":
        rel = structure.relations.get(name)  # type: ignore[arg-type]
        if rel is None:
            raise TermError(f"unknown relation symbol {name!r}")
        return rel
    if op == "id":
        return frozenset((x, x) for x in dom_elems)
    if op == "empty":
        return frozenset()
    if op == "top":
        return frozenset((x, y) for x in dom_elems for y in dom_elems)
    if op == "complement":
        (r,) = args
        return frozenset(
            (x, y) for x in dom_elems for y in dom_elems if (x, y) not in r
        )
    if op == "converse":
        (r,) = args
        return frozenset((b, a) for a, b in r)
    if op == "dom":
        (r,) = args
        return frozenset((a, a) for a, _ in r)
    if op == "ran":
        (r,) = args
        return frozenset((b, b) for _, b in r)
    if op == "antidom":
        (r,) = args
        sources = {a for a, _ in r}
        return frozenset((x, x) for x in dom_elems if x not in sources)
    r, s = args
    if op == "union":
        return r | s
    if op == "inter":
        return r & s
    if op == "diff":
        return r - s
    if op == "compose":
        by_source: dict[str, set[str]] = {}
        for b, c in s:
            by_source.setdefault(b, set()).add(c)
        return frozenset(
            (a, c) for a, b in r if b in by_source for c in by_source[b]
        )
    if op == "semijoin":
        sources = {a for a, _ in s}
        return frozenset((a, b) for a, b in r if b in sources)
    if op == "prefunion":
        covered = {a for a, _ in r}
        return r | frozenset((a, b) for a, b in s if a not in covered)
    if op == "injunion":
        def pref(u: Relation, v: Relation) -> Relation:
            covered = {a for a, _ in u}
            return u | frozenset((a, b) for a, b in v if a not in covered)

        def flip(u: Relation) -> Relation:
            return frozenset((b, a) for a, b in u)

        r2, s2 = args
        return pref(r2, s2) & flip(pref(flip(r2), flip(s2)))
    raise TermError(f"unknown operation tag {op!r}")


def eval_term(
    t: Term, structure: Structure, memo: dict[Term, Relation] | None = None
) -> Relation:
    """Evaluate t on a structure.

    Iterative, so arbitrarily deep terms evaluate without touching the
    interpreter recursion limit.  A caller-supplied memo is reused across
    calls; it is only valid for a single structure.
    """
    if memo is None:
        memo = {}
    if t in memo:
        return memo[t]
    stack = [t]
    while stack:
        node = stack[-1]
        if node in memo:
            stack.pop()
            continue
        pending = [a for a in node.args if a not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        memo[node] = _scalar_apply(
            node.op, node.name, [memo[a] for a in node.args], structure
        )
    return memo[t]


# --- concrete syntax ----------------------------------------------------------

_OPERATORS = ("<+", "<#", "|>", "\\", "|", "&", ";", "~", "-", "^", "(", ")")

_INFIX: dict[str, tuple[str, int]] = {
    "<+": ("prefunion", 1),
    "<#": ("injunion", 1),
    "|": ("union", 2),
    "\\": ("diff", 3),
    "&": ("inter", 3),
    ";": ("compose", 4),
    "|>": ("semijoin", 4),
}

_RESERVED = {"id", "T", "dom", "ran"}

_PRECEDENCE: dict[str, int] = {
    "prefunion": 1,
    "injunion": 1,
    "union": 2,
    "diff": 3,
    "inter": 3,
    "compose": 4,
    "semijoin": 4,
    "antidom": 5,
    "complement": 5,
    "converse": 6,
    "sym": 7,
    "id": 7,
    "empty": 7,
    "top": 7,
    "dom": 7,
    "ran": 7,
}

_TOKEN_OF: dict[str, str] = {
    "prefunion": "<+",
    "injunion": "<#",
    "union": "|",
    "diff": "\\",
    "inter": "&",
    "compose": ";",
    "semijoin": "|>",
}


def _parse_expr(stream: TokenStream, min_prec: int = 1) -> Term:
    left = _parse_unary(stream)
    while True:
        tok = stream.peek()
        entry = _INFIX.get(tok.text) if tok.kind == "op" else None
        if entry is None or entry[1] < min_prec:
            return left
        stream.advance()
        right = _parse_expr(stream, entry[1] + 1)
        left = Term(entry[0], (left, right))


def _parse_unary(stream: TokenStream) -> Term:
    tok = stream.peek()
    if tok.kind == "op" and tok.text == "~":
        stream.advance()
        return antidom(_parse_unary(stream))
    if tok.kind == "op" and tok.text == "-":
        stream.advance()
        return complement(_parse_unary(stream))
    t = _parse_atom(stream)
    while stream.match("^"):
        t = conv(t)
    return t


def _parse_atom(stream: TokenStream) -> Term:
    tok = stream.peek()
    if tok.kind == "op" and tok.text == "(":
        stream.advance()
        inner = _parse_expr(stream)
        stream.expect(")")
        return inner
    if tok.kind == "int":
        if tok.text == "0":
            stream.advance()
            return EMPTY
        stream.fail(f"unexpected integer {tok.text!r}")
    if tok.kind == "name":
        stream.advance()
        if tok.text == "id":
            return ID
        if tok.text == "T":
            return TOP
        if tok.text in ("dom", "ran"):
            stream.expect("(")
            inner = _parse_expr(stream)
            stream.expect(")")
            return Term(tok.text, (inner,))
        return sym(tok.text)
    stream.fail(
        "expected a term, found "
        + ("end of input" if tok.kind == "end" else repr(tok.text))
    )


def parse_term(text: str) -> Term:
    stream = TokenStream(tokenize(text, _OPERATORS))
    t = _parse_expr(stream)
    stream.expect_end()
    return t


def print_term(t: Term) -> str:
    """Minimal-parenthesis rendering; parse_term(print_term(t)) == t."""
    rendered: dict[int, str] = {}
    for node in _postorder(t):
        p = _PRECEDENCE[node.op]
        if node.op == "sym":
            text = node.name or ""
        elif node.op == "id":
            text = "id"
        elif node.op == "empty":
            text = "0"
        elif node.op == "top":
            text = "T"
        elif node.op in ("dom", "ran"):
            text = f"{node.op}({rendered[id(node.args[0])]})"
        elif node.op == "converse":
            arg = node.args[0]
            body = rendered[id(arg)]
            if _PRECEDENCE[arg.op] < p:
                body = f"({body})"
            text = body + "^"
        elif node.op in ("antidom", "complement"):
            arg = node.args[0]
            body = rendered[id(arg)]
            if _PRECEDENCE[arg.op] < p:
                body = f"({body})"
            text = ("~" if node.op == "antidom" else "-") + body
        else:
            left, right = node.args
            ltext = rendered[id(left)]
            if _PRECEDENCE[left.op] < p:
                ltext = f"({ltext})"
            rtext = rendered[id(right)]
            if _PRECEDENCE[right.op] <= p:
                rtext = f"({rtext})"
            text = f"{ltext} {_TOKEN_OF[node.op]} {rtext}"
        rendered[id(node)] = text
    return rendered[id(t)]


def load_terms(path: str | Path) -> list[Term]:
    """Parse a term file: one term per line, '#' starts a comment."""
    out = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(parse_term(line))
        except ParseError as exc:
            raise ParseError(exc.message, line=lineno, column=exc.column) from None
    return out


# --- rewriting ----------------------------------------------------------------

def simplify_term(t: Term) -> Term:
    """Apply identities valid on every structure, bottom-up, one pass."""

    def make(node: Term, args: tuple[Term, ...]) -> Term:
        op = node.op
        if op == "inter":
            a, b = args
            if a == b:
                return a
            if a == TOP:
                return b
            if b == TOP:
                return a
            if a == EMPTY or b == EMPTY:
                return EMPTY
        elif op == "union":
            a, b = args
            if a == b:
                return a
            if a == EMPTY:
                return b
            if b == EMPTY:
                return a
        elif op == "compose":
            a, b = args
            if a == ID:
                return b
            if b == ID:
                return a
            if a == EMPTY or b == EMPTY:
                return EMPTY
        if args == node.args:
            return node
        return Term(op, args, node.name)

    return _rebuild(t, make)


def normalize_fp(t: Term) -> Term:
    """Trim a term to the graph of a partial function.

    Pairs whose source also reaches somewhere via t;(T \\ id) are dropped,
    which erases exactly the sources related to two or more targets (or to
    a non-loop target alongside a loop).
    """
    return diff(t, compose(t, diff(TOP, ID)))


# --- enumeration and random generation ----------------------------------------

_UNARY_ORDER = ("complement", "converse", "dom", "ran", "antidom")
_BINARY_ORDER = (
    "union",
    "inter",
    "diff",
    "compose",
    "semijoin",
    "prefunion",
    "injunion",
)
_CONSTANT_ORDER = ("id", "empty", "top")


def enumerate_terms(
    basis: Iterable[str], symbols: Sequence[str], max_size: int
) -> list[Term]:
    """All terms of size at most max_size, smallest first, deterministic.

    Within one size: unary applications before binary ones, operations in a
    fixed order, and for binary operations the left size grows last.
    """
    ops = set(basis)
    by_size: list[list[Term]] = [[]]
    leaves = [sym(s) for s in sorted(symbols)]
    leaves += [Term(c) for c in _CONSTANT_ORDER if c in ops]
    by_size.append(leaves)
    for size in range(2, max_size + 1):
        level: list[Term] = []
        for op in _UNARY_ORDER:
            if op in ops:
                level.extend(Term(op, (t,)) for t in by_size[size - 1])
        for op in _BINARY_ORDER:
            if op in ops:
                for left_size in range(1, size - 1):
                    for a in by_size[left_size]:
                        for b in by_size[size - 1 - left_size]:
                            level.append(Term(op, (a, b)))
        by_size.append(level)
    out: list[Term] = []
    for level in by_size[1:]:
        out.extend(level)
    return out


def random_term(
    rng: random.Random, basis: Iterable[str], symbols: Sequence[str], size: int
) -> Term:
    """A pseudo-random term of exactly `size` nodes when the basis allows it."""
    ops = set(basis)
    leaves = [sym(s) for s in sorted(symbols)]
    leaves += [Term(c) for c in _CONSTANT_ORDER if c in ops]
    if not leaves:
        raise TermError("no symbols and no constants to build terms from")
    unary = [op for op in _UNARY_ORDER if op in ops]
    binary = [op for op in _BINARY_ORDER if op in ops]

    def build(n: int) -> Term:
        if n <= 1:
            return rng.choice(leaves)
        choices: list[str] = []
        if unary:
            choices.append("unary")
        if binary and n >= 3:
            choices.append("binary")
        if not choices:
            return rng.choice(leaves)
        if rng.choice(choices) == "unary":
            return Term(rng.choice(unary), (build(n - 1),))
        op = rng.choice(binary)
        left = rng.randrange(1, n - 1)
        return Term(op, (build(left), build(n - 1 - left)))

    return build(size)


# --- semantic closure ---------------------------------------------------------

class ClosureResult:
    """Outcome of a semantic closure run.

    `relations` maps each reachable denotation to the first witnessing term
    found; `order` lists denotations in discovery order; `complete` is False
    when the evaluation budget ran out before the fixpoint was confirmed.
    """

    def __init__(
        self,
        relations: dict[Relation, Term],
        order: list[Relation],
        complete: bool,
        evaluations: int,
    ):
        self.relations = relations
        self.order = order
        self.complete = complete
        self.evaluations = evaluations

    def __len__(self) -> int:
        return len(self.relations)

    def __contains__(self, rel: Relation) -> bool:
        return frozenset(rel) in self.relations


def semantic_closure(
    structure: Structure,
    basis: Iterable[str],
    symbols: Sequence[str] | None = None,
    budget: int = 100_000,
) -> ClosureResult:
    """All relations denotable over the basis from the named generators.

    Works over denotations rather than terms: a term's value is a function
    of its children's values, so iterating every operation over every tuple
    of already-reached denotations until nothing new appears computes the
    full term-definable family.  Terminates because the structure is finite.
    """
    ops = set(basis)
    if symbols is None:
        symbols = structure.signature
    known: dict[Relation, Term] = {}
    order: list[Relation] = []

    def record(rel: Relation, witness: Term) -> None:
        if rel not in known:
            known[rel] = witness
            order.append(rel)

    for name in sorted(symbols):
        record(structure.rel(name), sym(name))
    for c in _CONSTANT_ORDER:
        if c in ops:
            t = Term(c)
            record(eval_term(t, structure), t)

    evaluations = 0
    complete = True
    unary = [op for op in _UNARY_ORDER if op in ops]
    binary = [op for op in _BINARY_ORDER if op in ops]
    while True:
        before = len(known)
        snapshot = list(order)
        stop = False
        for op in unary:
            for rel in snapshot:
                evaluations += 1
                if evaluations > budget:
                    stop = True
                    break
                record(
                    _scalar_apply(op, None, (rel,), structure),
                    Term(op, (known[rel],)),
                )
            if stop:
                break
        if not stop:
            for op in binary:
                for rel_a in snapshot:
                    for rel_b in snapshot:
                        evaluations += 1
                        if evaluations > budget:
                            stop = True
                            break
                        record(
                            _scalar_apply(op, None, (rel_a, rel_b), structure),
                            Term(op, (known[rel_a], known[rel_b])),
                        )
                    if stop:
                        break
                if stop:
                    break
        if stop:
            complete = False
            break
        if len(known) == before:
            break
    return ClosureResult(known, order, complete, evaluations)


def closure_is_closed(
    structure: Structure, relations: Iterable[Relation], basis: Iterable[str]
) -> bool:
    """Check a family of relations is closed under every basis operation."""
    ops = set(basis)
    family = {frozenset(r) for r in relations}
    for c in _CONSTANT_ORDER:
        if c in ops and _scalar_apply(c, None, (), structure) not in family:
            return False
    for op in _UNARY_ORDER:
        if op not in ops:
            continue
        for rel in family:
            if _scalar_apply(op, None, (rel,), structure) not in family:
                return False
    for op in _BINARY_ORDER:
        if op not in ops:
            continue
        for rel_a in family:
            for rel_b in family:
                if _scalar_apply(op, None, (rel_a, rel_b), structure) not in family:
                    return False
    return True
