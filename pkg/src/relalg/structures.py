"""Finite structures over signatures of named binary relations.

Everything downstream evaluates against the `Structure` type defined here:
substructures, homomorphism and isomorphism search, automorphism orbits,
deterministic bounded-exhaustive enumeration, seeded random generation, and
a small JSON file format.
"""

from __future__ import annotations

import json
import random
from collections import deque
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

Pair = tuple[str, str]
Relation = frozenset[Pair]

MODES = ("forward", "undirected")


class StructureError(ValueError):
    """Malformed structure, bad argument, or exceeded search budget."""


def relation(pairs: Iterable[Sequence[str]]) -> Relation:
    """Build a Relation from any iterable of 2-sequences (set semantics)."""
    out: set[Pair] = set()
    for pair in pairs:
        a, b = pair
        out.add((str(a), str(b)))
    return frozenset(out)


def converse(rel: Iterable[Pair]) -> Relation:
    return frozenset((b, a) for a, b in rel)


def is_partial_function(rel: Iterable[Pair]) -> bool:
    seen: dict[str, str] = {}
    for a, b in rel:
        if a in seen and seen[a] != b:
            return False
        seen[a] = b
    return True


def is_total_function(rel: Iterable[Pair], domain: Iterable[str]) -> bool:
    pairs = list(rel)
    if not is_partial_function(pairs):
        return False
    sources = {a for a, _ in pairs}
    return all(x in sources for x in domain)


def is_injective_partial_function(rel: Iterable[Pair]) -> bool:
    pairs = list(rel)
    return is_partial_function(pairs) and is_partial_function(converse(pairs))


class StructureClass(Enum):
    """Classes of structures distinguished by what their relations may be."""

    ALL = "all"
    PARTIAL_FUNCTIONS = "partial-functions"
    TOTAL_FUNCTIONS = "total-functions"
    INJECTIVE_PARTIAL_FUNCTIONS = "injective-partial-functions"

    @classmethod
    def from_name(cls, name: str) -> "StructureClass":
        for member in cls:
            if member.value == name:
                return member
        known = ", ".join(member.value for member in cls)
        raise StructureError(f"unknown structure class {name!r} (known: {known})")

    def contains(self, structure: "Structure") -> bool:
        if self is StructureClass.ALL:
            return True
        for rel in structure.relations.values():
            if self is StructureClass.TOTAL_FUNCTIONS:
                if not is_total_function(rel, structure.domain):
                    return False
            elif self is StructureClass.INJECTIVE_PARTIAL_FUNCTIONS:
                if not is_injective_partial_function(rel):
                    return False
            elif not is_partial_function(rel):
                return False
        return True


@dataclass(frozen=True)
class Structure:
    """A finite domain of opaque string identifiers plus named relations.

    The domain is stored sorted; relation values are frozensets of pairs.
    Instances are immutable and safe to share between workers.
    """

    domain: tuple[str, ...]
    relations: Mapping[str, Relation]

    def __post_init__(self) -> None:
        dom = tuple(sorted({str(x) for x in self.domain}))
        domset = set(dom)
        rels: dict[str, Relation] = {}
        for name in sorted(self.relations, key=str):
            pairs = frozenset((str(a), str(b)) for a, b in self.relations[name])
            for a, b in sorted(pairs):
                if a not in domset or b not in domset:
                    raise StructureError(
                        f"relation {name!r} mentions pair ({a!r}, {b!r}) outside the domain"
                    )
            rels[str(name)] = pairs
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "relations", rels)

    def __hash__(self) -> int:
        return hash((self.domain, tuple(sorted(self.relations.items()))))

    @property
    def signature(self) -> tuple[str, ...]:
        return tuple(self.relations)

    def size(self) -> int:
        return len(self.domain)

    def rel(self, name: str) -> Relation:
        try:
            return self.relations[name]
        except KeyError:
            raise StructureError(f"unknown relation symbol {name!r}") from None


def _require_element(structure: Structure, element: str) -> None:
    if element not in set(structure.domain):
        raise StructureError(f"element not in domain: {element!r}")


def _reach_depths(structure: Structure, root: str, radius: int, mode: str) -> dict[str, int]:
    """Elements within distance `radius` of root, mapped to their depth."""
    if mode not in MODES:
        raise StructureError(f"unknown mode {mode!r} (expected one of {MODES})")
    _require_element(structure, root)
    succ: dict[str, set[str]] = {x: set() for x in structure.domain}
    for rel in structure.relations.values():
        for a, b in rel:
            succ[a].add(b)
            if mode == "undirected":
                succ[b].add(a)
    depths = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        if depths[x] == radius:
            continue
        for y in sorted(succ[x]):
            if y not in depths:
                depths[y] = depths[x] + 1
                queue.append(y)
    return depths


def induced(structure: Structure, elements: Iterable[str]) -> Structure:
    keep = {str(x) for x in elements}
    extra = keep - set(structure.domain)
    if extra:
        raise StructureError(f"element not in domain: {sorted(extra)[0]!r}")
    rels = {
        name: frozenset(p for p in rel if p[0] in keep and p[1] in keep)
        for name, rel in structure.relations.items()
    }
    return Structure(tuple(sorted(keep)), rels)


def ball(structure: Structure, root: str, radius: int, mode: str = "forward") -> Structure:
    if radius < 0:
        raise StructureError("radius must be nonnegative")
    return induced(structure, _reach_depths(structure, root, radius, mode))


def generated_substructure(structure: Structure, root: str, mode: str = "forward") -> Structure:
    return ball(structure, root, len(structure.domain), mode)


def disjoint_union(left: Structure, right: Structure) -> Structure:
    if left.signature != right.signature:
        raise StructureError(
            f"signature mismatch: {left.signature} vs {right.signature}"
        )
    dom = tuple(f"L:{x}" for x in left.domain) + tuple(f"R:{x}" for x in right.domain)
    rels: dict[str, Relation] = {}
    for name in left.signature:
        pairs = {(f"L:{a}", f"L:{b}") for a, b in left.relations[name]}
        pairs |= {(f"R:{a}", f"R:{b}") for a, b in right.relations[name]}
        rels[name] = frozenset(pairs)
    return Structure(dom, rels)


def is_homomorphism(source: Structure, target: Structure, mapping: Mapping[str, str]) -> bool:
    if set(mapping) != set(source.domain):
        return False
    targets = set(target.domain)
    if any(v not in targets for v in mapping.values()):
        return False
    for name, rel in source.relations.items():
        trel = target.relations.get(name, frozenset())
        for a, b in rel:
            if (mapping[a], mapping[b]) not in trel:
                return False
    return True


def homomorphisms(
    source: Structure, target: Structure, limit: int | None = None
) -> list[dict[str, str]]:
    """All homomorphisms source -> target, in deterministic order.

    Elements are assigned in domain order and candidates tried in the
    target's domain order, so truncation by `limit` is reproducible.
    """
    if source.signature != target.signature:
        raise StructureError(
            f"signature mismatch: {source.signature} vs {target.signature}"
        )
    order = list(source.domain)
    index = {v: i for i, v in enumerate(order)}
    # Pairs become checkable once their later endpoint gets assigned.
    by_step: list[list[tuple[str, str, str]]] = [[] for _ in order]
    for name, rel in source.relations.items():
        for a, b in sorted(rel):
            by_step[max(index[a], index[b])].append((name, a, b))
    results: list[dict[str, str]] = []
    assignment: dict[str, str] = {}

    def backtrack(step: int) -> bool:
        if step == len(order):
            results.append(dict(assignment))
            return limit is not None and len(results) >= limit
        v = order[step]
        for c in target.domain:
            assignment[v] = c
            ok = True
            for name, a, b in by_step[step]:
                if (assignment[a], assignment[b]) not in target.relations[name]:
                    ok = False
                    break
            if ok and backtrack(step + 1):
                return True
        del assignment[v]
        return False

    if not order:
        return [{}]
    backtrack(0)
    return results


def _degree_profile(structure: Structure) -> dict[str, tuple]:
    profile: dict[str, list] = {x: [] for x in structure.domain}
    for name in structure.signature:
        rel = structure.relations[name]
        out: dict[str, int] = {}
        inn: dict[str, int] = {}
        loops: dict[str, int] = {}
        for a, b in rel:
            out[a] = out.get(a, 0) + 1
            inn[b] = inn.get(b, 0) + 1
            if a == b:
                loops[a] = loops.get(a, 0) + 1
        for x in structure.domain:
            profile[x].append((out.get(x, 0), inn.get(x, 0), loops.get(x, 0)))
    return {x: tuple(parts) for x, parts in profile.items()}


class _IsoSearch:
    """Backtracking partial-isomorphism extension with functional forcing."""

    def __init__(self, left: Structure, right: Structure, node_budget: int | None = None):
        self.left = left
        self.right = right
        self.profile_left = _degree_profile(left)
        self.profile_right = _degree_profile(right)
        self.node_budget = node_budget
        self.nodes = 0
        # Per-symbol successor/predecessor maps, used for forcing when the
        # relation (or its converse) is functional on both sides.
        self.maps: list[tuple[dict, dict, dict, dict, bool, bool]] = []
        for name in left.signature:
            lrel, rrel = left.relations[name], right.relations[name]
            lsucc: dict[str, set[str]] = {}
            lpred: dict[str, set[str]] = {}
            rsucc: dict[str, set[str]] = {}
            rpred: dict[str, set[str]] = {}
            for a, b in lrel:
                lsucc.setdefault(a, set()).add(b)
                lpred.setdefault(b, set()).add(a)
            for a, b in rrel:
                rsucc.setdefault(a, set()).add(b)
                rpred.setdefault(b, set()).add(a)
            func = is_partial_function(lrel) and is_partial_function(rrel)
            cofunc = is_partial_function(converse(lrel)) and is_partial_function(converse(rrel))
            self.maps.append((lsucc, lpred, rsucc, rpred, func, cofunc))

    def feasible(self) -> bool:
        if len(self.left.domain) != len(self.right.domain):
            return False
        if self.left.signature != self.right.signature:
            return False
        for name in self.left.signature:
            if len(self.left.relations[name]) != len(self.right.relations[name]):
                return False
        return True

    def _consistent(self, fwd: dict[str, str], x: str, y: str) -> bool:
        """Adjacency agreement between x and already-mapped elements."""
        for name in self.left.signature:
            lrel = self.left.relations[name]
            rrel = self.right.relations[name]
            for a, fa in fwd.items():
                if ((x, a) in lrel) != ((y, fa) in rrel):
                    return False
                if ((a, x) in lrel) != ((fa, y) in rrel):
                    return False
            if ((x, x) in lrel) != ((y, y) in rrel):
                return False
        return True

    def _assign(self, fwd: dict, bwd: dict, x: str, y: str) -> bool:
        """Record x -> y plus everything functionality forces; False on clash."""
        queue = [(x, y)]
        while queue:
            a, b = queue.pop()
            if a in fwd:
                if fwd[a] != b:
                    return False
                continue
            if b in bwd:
                return False
            if self.profile_left[a] != self.profile_right[b]:
                return False
            if not self._consistent(fwd, a, b):
                return False
            fwd[a] = b
            bwd[b] = a
            for lsucc, lpred, rsucc, rpred, func, cofunc in self.maps:
                if func and a in lsucc:
                    if b not in rsucc:
                        return False
                    queue.append((next(iter(lsucc[a])), next(iter(rsucc[b]))))
                if cofunc and a in lpred:
                    if b not in rpred:
                        return False
                    queue.append((next(iter(lpred[a])), next(iter(rpred[b]))))
        return True

    def extend(self, seed: Sequence[tuple[str, str]]) -> dict[str, str] | None:
        if not self.feasible():
            return None
        fwd: dict[str, str] = {}
        bwd: dict[str, str] = {}
        for x, y in seed:
            if not self._assign(fwd, bwd, x, y):
                return None
        return self._search(fwd, bwd)

    def _search(self, fwd: dict, bwd: dict) -> dict[str, str] | None:
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise StructureError(
                "isomorphism search exceeded its node budget; "
                "raise node_budget to override"
            )
        pending = [x for x in self.left.domain if x not in fwd]
        if not pending:
            return dict(fwd)
        x = pending[0]
        for y in self.right.domain:
            if y in bwd:
                continue
            child_fwd = dict(fwd)
            child_bwd = dict(bwd)
            if self._assign(child_fwd, child_bwd, x, y):
                found = self._search(child_fwd, child_bwd)
                if found is not None:
                    return found
        return None


def isomorphism(
    left: Structure,
    anchors_left: Sequence[str] = (),
    right: Structure | None = None,
    anchors_right: Sequence[str] = (),
    node_budget: int | None = None,
) -> dict[str, str] | None:
    """A pointed isomorphism mapping anchors pointwise, or None."""
    if right is None:
        raise StructureError("isomorphism requires a right-hand structure")
    if len(anchors_left) != len(anchors_right):
        raise StructureError("anchor tuples must have equal length")
    for a in anchors_left:
        _require_element(left, a)
    for b in anchors_right:
        _require_element(right, b)
    search = _IsoSearch(left, right, node_budget)
    return search.extend(list(zip(anchors_left, anchors_right)))


def automorphism_orbits(
    structure: Structure,
    max_domain: int = 64,
    node_budget: int = 2_000_000,
) -> tuple[tuple[Pair, ...], ...]:
    """Partition of domain pairs into orbits under the automorphism group.

    Generators are collected along a stabilizer chain: for each prefix of
    the domain, one automorphism per reachable image of the next element.
    The union of those transversal sets generates the full group, so orbit
    connectivity under them equals orbit connectivity under the group.
    """
    n = len(structure.domain)
    if n > max_domain:
        raise StructureError(
            f"domain size {n} exceeds the bound {max_domain}; "
            "pass a larger max_domain to override"
        )
    dom = list(structure.domain)
    generators: list[dict[str, str]] = []
    for i, x in enumerate(dom):
        fixed = [(dom[j], dom[j]) for j in range(i)]
        for y in dom:
            if y == x:
                continue
            search = _IsoSearch(structure, structure, node_budget)
            auto = search.extend(fixed + [(x, y)])
            if auto is not None:
                generators.append(auto)

    pairs = [(a, b) for a in dom for b in dom]
    parent: dict[Pair, Pair] = {p: p for p in pairs}

    def find(p: Pair) -> Pair:
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    def union(p: Pair, q: Pair) -> None:
        rp, rq = find(p), find(q)
        if rp != rq:
            parent[rp] = rq

    for g in generators:
        for p in pairs:
            union(p, (g[p[0]], g[p[1]]))

    buckets: dict[Pair, list[Pair]] = {}
    for p in pairs:
        buckets.setdefault(find(p), []).append(p)
    orbits = [tuple(sorted(members)) for members in buckets.values()]
    return tuple(sorted(orbits))


# --- bounded-exhaustive enumeration -----------------------------------------

def _domain_of(size: int) -> tuple[str, ...]:
    return tuple(f"e{i}" for i in range(1, size + 1))


def space_size(size: int, cls: StructureClass) -> int:
    """Number of relations a single symbol can take on a domain of `size`."""
    if cls is StructureClass.ALL:
        return 2 ** (size * size)
    if cls is StructureClass.PARTIAL_FUNCTIONS:
        return (size + 1) ** size
    if cls is StructureClass.TOTAL_FUNCTIONS:
        return size ** size
    return len(injective_codes(size))


def _mask_pairs(mask: int, size: int) -> Relation:
    dom = _domain_of(size)
    pairs = set()
    for i in range(size):
        for j in range(size):
            if mask >> (i * size + j) & 1:
                pairs.add((dom[i], dom[j]))
    return frozenset(pairs)


def _pf_code_pairs(code: int, size: int, base: int) -> Relation:
    """Decode a partial/total-function code; element e1 is least significant.

    With base == size + 1 a digit of 0 means "undefined" and digit d means
    an edge to e_d; with base == size digit d means an edge to e_(d+1).
    """
    dom = _domain_of(size)
    pairs = set()
    for p in range(size):
        digit = code // (base ** p) % base
        if base == size + 1:
            if digit > 0:
                pairs.add((dom[p], dom[digit - 1]))
        else:
            pairs.add((dom[p], dom[digit]))
    return frozenset(pairs)


_INJECTIVE_CODE_CACHE: dict[int, tuple[int, ...]] = {}


def injective_codes(size: int) -> tuple[int, ...]:
    """Partial-function codes whose decoded relation is injective, ascending."""
    cached = _INJECTIVE_CODE_CACHE.get(size)
    if cached is not None:
        return cached
    codes = tuple(
        code
        for code in range((size + 1) ** size)
        if is_injective_partial_function(_pf_code_pairs(code, size, size + 1))
    )
    _INJECTIVE_CODE_CACHE[size] = codes
    return codes


def relation_from_code(code: int, size: int, cls: StructureClass) -> Relation:
    if cls is StructureClass.ALL:
        return _mask_pairs(code, size)
    if cls is StructureClass.PARTIAL_FUNCTIONS:
        return _pf_code_pairs(code, size, size + 1)
    if cls is StructureClass.TOTAL_FUNCTIONS:
        return _pf_code_pairs(code, size, size)
    return _pf_code_pairs(injective_codes(size)[code], size, size + 1)


def structure_from_index(
    signature: Sequence[str], size: int, cls: StructureClass, index: int
) -> Structure:
    """The index-th structure of the given size, first symbol most significant."""
    symbols = sorted(signature)
    per = space_size(size, cls)
    rels: dict[str, Relation] = {}
    for pos, name in enumerate(symbols):
        code = index // per ** (len(symbols) - 1 - pos) % per
        rels[name] = relation_from_code(code, size, cls)
    return Structure(_domain_of(size), rels)


def count_structures(signature: Sequence[str], size: int, cls: StructureClass) -> int:
    return space_size(size, cls) ** len(signature)


def enumerate_structures(
    signature: Sequence[str],
    max_size: int,
    cls: StructureClass = StructureClass.ALL,
    include_empty: bool = False,
) -> Iterator[Structure]:
    """All structures with domain e1..ek for k <= max_size, deterministically.

    Sizes ascend; within a size the first symbol (in sorted order) varies
    slowest. No canonization: isomorphic duplicates are intentional.
    """
    start = 0 if include_empty else 1
    for size in range(start, max_size + 1):
        total = count_structures(signature, size, cls)
        for index in range(total):
            yield structure_from_index(signature, size, cls, index)


def random_structure(
    seed: int | random.Random,
    size: int,
    signature: Sequence[str],
    cls: StructureClass = StructureClass.ALL,
) -> Structure:
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    dom = _domain_of(size)
    rels: dict[str, Relation] = {}
    for name in sorted(signature):
        if cls is StructureClass.ALL:
            mask = rng.getrandbits(size * size) if size else 0
            rels[name] = _mask_pairs(mask, size)
        elif cls is StructureClass.PARTIAL_FUNCTIONS:
            pairs = set()
            for p in range(size):
                digit = rng.randrange(size + 1)
                if digit:
                    pairs.add((dom[p], dom[digit - 1]))
            rels[name] = frozenset(pairs)
        elif cls is StructureClass.TOTAL_FUNCTIONS:
            rels[name] = frozenset((dom[p], dom[rng.randrange(size)]) for p in range(size))
        else:
            targets = list(dom)
            rng.shuffle(targets)
            rels[name] = frozenset(
                (dom[p], targets[p]) for p in range(size) if rng.random() < 0.5
            )
    return Structure(dom, rels)


# --- JSON file format --------------------------------------------------------

def structure_from_json(data: object) -> Structure:
    if not isinstance(data, dict):
        raise StructureError("structure document must be a JSON object")
    unknown = set(data) - {"domain", "relations"}
    if unknown:
        raise StructureError(f"unknown keys in structure document: {sorted(unknown)}")
    domain = data.get("domain", [])
    if not isinstance(domain, list) or not all(isinstance(x, str) for x in domain):
        raise StructureError('"domain" must be a list of strings')
    relations = data.get("relations", {})
    if not isinstance(relations, dict):
        raise StructureError('"relations" must be an object')
    rels: dict[str, Relation] = {}
    for name, pairs in relations.items():
        if not isinstance(pairs, list):
            raise StructureError(f"relation {name!r} must be a list of pairs")
        collected = set()
        for pair in pairs:
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, str) for x in pair)
            ):
                raise StructureError(f"relation {name!r} has a malformed pair: {pair!r}")
            collected.add((pair[0], pair[1]))
        rels[name] = frozenset(collected)
    return Structure(tuple(domain), rels)


def structure_to_json(structure: Structure) -> dict:
    return {
        "domain": list(structure.domain),
        "relations": {
            name: [list(p) for p in sorted(rel)]
            for name, rel in structure.relations.items()
        },
    }


def load_structure(path: str | Path) -> Structure:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"invalid JSON in {path}: {exc}") from None
    return structure_from_json(data)


def dump_structure(structure: Structure, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(structure_to_json(structure), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
