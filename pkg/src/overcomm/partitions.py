"""Integer partitions, their statistics and the two orders on Lambda.

Lambda is the set of partitions with at least two parts. A ``Partition``
with a single part can still be built (the partition of ``x1 x1`` is
``(2,)``), but every Lambda-only operation rejects it.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import NotInLambdaError, ValidationError

__all__ = [
    "Partition",
    "PartitionStats",
    "make_partition",
    "parse_partition",
    "format_partition",
    "stats",
    "union_components",
    "extend",
    "preceq",
    "unlhd",
    "enumerate_lambda",
    "lambda_up_to",
    "down_set",
    "minimal_elements",
    "sort_partitions",
]


@dataclass(frozen=True)
class Partition:
    components: tuple[int, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValidationError("a partition needs at least one component")
        for c in comps:
            if not isinstance(c, int) or isinstance(c, bool) or c < 1:
                raise ValidationError(f"components must be positive integers, got {c!r}")
        if any(a < b for a, b in zip(comps, comps[1:])):
            raise ValidationError(f"components must be non-increasing: {comps}")
        object.__setattr__(self, "components", comps)

    @property
    def total(self) -> int:
        return sum(self.components)

    @property
    def parts(self) -> int:
        return len(self.components)

    @property
    def in_lambda(self) -> bool:
        return self.parts >= 2

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __str__(self):
        return "(" + ",".join(map(str, self.components)) + ")"

    def __repr__(self):
        return f"Partition{self.components!r}"


@dataclass(frozen=True)
class PartitionStats:
    q: int
    r: int
    delta: int
    s: int


def make_partition(components: Iterable[int]) -> Partition:
    """Build a partition from any sequence of positive integers (sorted here)."""
    comps = list(components)
    if not comps:
        raise ValidationError("a partition needs at least one component")
    for c in comps:
        if not isinstance(c, int) or isinstance(c, bool) or c < 1:
            raise ValidationError(f"components must be positive integers, got {c!r}")
    return Partition(tuple(sorted(comps, reverse=True)))


def parse_partition(text: str) -> Partition:
    """Parse ``"2,1,1"`` (whitespace and surrounding parentheses tolerated)."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    pieces = [p.strip() for p in body.split(",")]
    if not pieces or any(p == "" for p in pieces):
        raise ValidationError(f"cannot parse partition {text!r}")
    try:
        values = [int(p) for p in pieces]
    except ValueError:
        raise ValidationError(f"cannot parse partition {text!r}") from None
    return make_partition(values)


def format_partition(lam: Partition) -> str:
    return ",".join(map(str, lam.components))


def _require_lambda(*lams: Partition) -> None:
    for lam in lams:
        if not isinstance(lam, Partition):
            raise ValidationError(f"expected a Partition, got {type(lam).__name__}")
        if not lam.in_lambda:
            raise NotInLambdaError(f"{lam} has a single part and is not in Lambda")


def stats(lam: Partition) -> PartitionStats:
    _require_lambda(lam)
    q = sum(1 for c in lam if c == 1)
    r = sum(c for c in lam if c > 1)
    # n=3 and m=2 follow from lam == (2,1)
    delta = 0 if lam.components == (2, 1) else 1
    return PartitionStats(q=q, r=r, delta=delta, s=max(r - q - delta, 0))


def union_components(lam: Partition, i: int, j: int) -> Partition:
    """Merge the components at 1-based positions ``i < j``."""
    _require_lambda(lam)
    if lam.parts < 3:
        raise ValidationError("union of components needs at least three parts")
    if not (1 <= i < j <= lam.parts):
        raise ValidationError(f"need 1 <= i < j <= {lam.parts}, got i={i}, j={j}")
    comps = list(lam.components)
    merged = comps[i - 1] + comps[j - 1]
    del comps[j - 1]
    del comps[i - 1]
    comps.append(merged)
    return make_partition(comps)


def extend(lam: Partition, k: int) -> Partition:
    """Append ``k`` unit components."""
    if k < 0:
        raise ValidationError(f"k must be non-negative, got {k}")
    return Partition(lam.components + (1,) * k)


def _fits(items: Sequence[int], bins: Sequence[int]) -> bool:
    # items sorted non-increasing; each bin must be filled exactly
    remaining = list(bins)

    def place(idx: int) -> bool:
        if idx == len(items):
            return all(c == 0 for c in remaining)
        item = items[idx]
        tried = set()
        for b, cap in enumerate(remaining):
            if cap < item or cap in tried:
                continue
            tried.add(cap)
            remaining[b] = cap - item
            if place(idx + 1):
                remaining[b] = cap
                return True
            remaining[b] = cap
        return False

    return place(0)


@lru_cache(maxsize=None)
def _preceq_cached(lam: tuple[int, ...], mu: tuple[int, ...]) -> bool:
    k = sum(mu) - sum(lam)
    if k < 0 or len(lam) + k < len(mu):
        return False
    return _fits(lam + (1,) * k, mu)


def preceq(lam: Partition, mu: Partition) -> bool:
    """True iff ``mu`` is obtained from ``lam`` extended by units via unions."""
    _require_lambda(lam, mu)
    return _preceq_cached(lam.components, mu.components)


def unlhd(lam: Partition, nu: Partition) -> bool:
    _require_lambda(lam, nu)
    if lam.parts > nu.parts:
        return False
    return all(a <= b for a, b in zip(lam.components, nu.components))


def _partitions_into(n: int, m: int, cap: int) -> Iterator[tuple[int, ...]]:
    if m == 0:
        if n == 0:
            yield ()
        return
    hi = min(cap, n - (m - 1))
    lo = -(-n // m)  # first part is at least the average
    for first in range(hi, lo - 1, -1):
        for rest in _partitions_into(n - first, m - 1, first):
            yield (first,) + rest


def enumerate_lambda(n: int, m: int) -> list[Partition]:
    """All partitions of ``n`` into ``m`` parts, lexicographically decreasing."""
    if m < 2 or m > n:
        raise ValidationError(f"need 2 <= m <= n, got n={n}, m={m}")
    return [Partition(c) for c in _partitions_into(n, m, n)]


def lambda_up_to(bound: int, low: int = 2) -> list[Partition]:
    """Every partition in Lambda with total in ``[low, bound]``."""
    out = []
    for n in range(max(low, 2), bound + 1):
        for m in range(2, n + 1):
            out.extend(enumerate_lambda(n, m))
    return sort_partitions(out)


def sort_partitions(ps: Iterable[Partition]) -> list[Partition]:
    """Lexicographically decreasing order of component sequences."""
    return sorted(ps, key=lambda p: p.components, reverse=True)


def down_set(lam: Partition) -> frozenset[Partition]:
    _require_lambda(lam)
    return frozenset(nu for nu in lambda_up_to(lam.total) if preceq(nu, lam))


def minimal_elements(ps: Iterable[Partition]) -> frozenset[Partition]:
    items = set(ps)
    _require_lambda(*items)
    return frozenset(
        lam for lam in items
        if not any(mu != lam and preceq(mu, lam) for mu in items)
    )
