"""Back-and-forth games measuring first-order quantifier rank.

Two pointed structures are rank-r equivalent when the duplicator survives
r rounds of the classical game: every spoiler move on one side has a
response on the other keeping the chosen pairs a partial isomorphism.
Rank-r equivalence coincides with agreement on all first-order sentences
of quantifier rank at most r, which is what the rest of the package needs
it for.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .structures import Structure, disjoint_union, random_structure, structure_to_json


class GameError(ValueError):
    pass


def _pairs_ok(left: Structure, right: Structure, pairs: tuple) -> bool:
    for a, b in pairs:
        for c, d in pairs:
            if (a == c) != (b == d):
                return False
    for name in left.signature:
        lrel = left.relations[name]
        rrel = right.relations[name]
        for a, b in pairs:
            for c, d in pairs:
                if ((a, c) in lrel) != ((b, d) in rrel):
                    return False
    return True


def ef_equiv(
    left: Structure,
    left_tuple: tuple = (),
    right: Structure | None = None,
    right_tuple: tuple = (),
    rank: int = 0,
    *,
    max_domain: int = 64,
    max_rank: int = 4,
) -> bool:
    """Whether the pointed structures agree on all sentences of the rank."""
    if right is None:
        raise GameError("two structures are required")
    if left.signature != right.signature:
        raise GameError("structures must share a signature")
    if len(left_tuple) != len(right_tuple):
        raise GameError("pebble tuples must have equal length")
    if max(left.size(), right.size()) > max_domain:
        raise GameError(f"domain exceeds the game bound of {max_domain}")
    if not 0 <= rank <= max_rank:
        raise GameError(f"rank must lie in 0..{max_rank}")
    ldom = set(left.domain)
    rdom = set(right.domain)
    if any(e not in ldom for e in left_tuple) or any(
        e not in rdom for e in right_tuple
    ):
        raise GameError("pebbled element not in domain")

    memo: dict[tuple, bool] = {}

    def play(pairs: frozenset, r: int) -> bool:
        key = (r, tuple(sorted(pairs)))
        got = memo.get(key)
        if got is not None:
            return got
        ok = _pairs_ok(left, right, tuple(pairs))
        if ok and r > 0:
            for a in left.domain:
                if not any(play(pairs | {(a, b)}, r - 1) for b in right.domain):
                    ok = False
                    break
            if ok:
                for b in right.domain:
                    if not any(play(pairs | {(a, b)}, r - 1) for a in left.domain):
                        ok = False
                        break
        memo[key] = ok
        return ok

    return play(frozenset(zip(left_tuple, right_tuple)), rank)


def min_distinguishing_rank(
    left: Structure,
    right: Structure,
    left_tuple: tuple = (),
    right_tuple: tuple = (),
    max_rank: int = 4,
) -> int | None:
    """Least rank at which the two sides disagree, None if none up to the cap."""
    for rank in range(max_rank + 1):
        if not ef_equiv(
            left, left_tuple, right, right_tuple, rank, max_rank=max_rank
        ):
            return rank
    return None


@dataclass
class UnionCompatReport:
    rank: int
    samples: int
    premise_hits: int
    skipped: int
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "game": "first-order rank",
            "rank": self.rank,
            "samples": self.samples,
            "premise_hits": self.premise_hits,
            "skipped": self.skipped,
            "violations": self.violations,
        }


def check_union_compatibility(
    rank: int = 2,
    samples: int = 100,
    size: int = 4,
    seed: int = 0,
    signature: tuple[str, ...] = ("f",),
) -> UnionCompatReport:
    """Sampled check that rank equivalence survives disjoint unions.

    Draws quadruples (A, B, C, D); whenever A matches B and C matches D at
    the rank, the two disjoint unions must match as well.  Quadruples whose
    premise fails are skipped, not counted against the property.  Half the
    partners are shuffled copies of their mates so the premise actually
    fires; the rest are fresh draws that mostly exercise the skip path.
    """
    rng = random.Random(seed)

    def shuffled_copy(s: Structure) -> Structure:
        names = [f"w{i}" for i in range(len(s.domain))]
        rng.shuffle(names)
        mapping = dict(zip(s.domain, names))
        return Structure(
            sorted(names),
            {
                sym: {(mapping[x], mapping[y]) for x, y in pairs}
                for sym, pairs in s.relations.items()
            },
        )

    def draw() -> Structure:
        sz = rng.randint(1, max(1, size))
        return random_structure(rng.randrange(2**31), sz, signature)

    def partner(s: Structure) -> Structure:
        return shuffled_copy(s) if rng.random() < 0.5 else draw()

    premise_hits = 0
    skipped = 0
    violations: list[dict] = []
    for k in range(samples):
        a = draw()
        b = partner(a)
        c = draw()
        d = partner(c)
        draws = [a, b, c, d]
        if ef_equiv(a, (), b, (), rank, max_rank=rank) and ef_equiv(
            c, (), d, (), rank, max_rank=rank
        ):
            premise_hits += 1
            left = disjoint_union(a, c)
            right = disjoint_union(b, d)
            if not ef_equiv(left, (), right, (), rank, max_rank=rank):
                violations.append(
                    {
                        "index": k,
                        "structures": [structure_to_json(s) for s in draws],
                    }
                )
        else:
            skipped += 1
    return UnionCompatReport(rank, samples, premise_hits, skipped, violations)
