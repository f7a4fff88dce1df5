"""Balanced identities and equational deduction by string rewriting.

An identity ``s = t`` rewrites ``w`` into ``w'`` when ``w = a z(s) b`` and
``w' = a z(t) b`` for contexts ``a``, ``b`` (possibly empty) and a
substitution ``z`` sending letters to non-empty words. Systems are used in
both directions.

Rewriting with balanced identities never changes how often each letter
occurs, so everything reachable from ``u`` is an arrangement of ``u``'s
letters. That finite set bounds every search in this module.
"""
from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence

from .errors import UnbalancedError, ValidationError
from .partitions import Partition, _fits, _require_lambda
from .words import (
    Word,
    arrangements,
    canonical_word,
    enumerate_transversal,
    format_word,
    in_transversal,
    make_word,
    parse_word,
    partition_of,
)

__all__ = [
    "Identity",
    "IdentitySystem",
    "Substitution",
    "RewriteStep",
    "DeductionTrace",
    "make_identity",
    "match_full",
    "one_step_rewrites",
    "derivable",
    "component_classes",
    "classes_of",
    "component_of",
    "collapse_system",
    "parse_system",
    "format_system",
    "trace_records",
    "dump_trace",
]


@dataclass(frozen=True)
class Identity:
    lhs: Word
    rhs: Word

    @property
    def trivial(self) -> bool:
        return self.lhs == self.rhs

    @property
    def partition(self) -> Partition:
        return partition_of(self.lhs)

    def __str__(self):
        return f"{format_word(self.lhs)} = {format_word(self.rhs)}"


def make_identity(u: Sequence[int], v: Sequence[int]) -> Identity:
    u, v = make_word(u), make_word(v)
    if Counter(u) != Counter(v):
        raise UnbalancedError(
            f"{format_word(u)} = {format_word(v)} is not balanced")
    return Identity(u, v)


@dataclass(frozen=True)
class IdentitySystem:
    """An ordered, duplicate-free collection of balanced identities."""

    identities: tuple[Identity, ...] = ()

    def __post_init__(self):
        seen = dict.fromkeys(self.identities)
        for ident in seen:
            if Counter(ident.lhs) != Counter(ident.rhs):
                raise UnbalancedError(f"{ident} is not balanced")
        object.__setattr__(self, "identities", tuple(seen))

    @classmethod
    def of(cls, pairs: Iterable[tuple[Sequence[int], Sequence[int]]]) -> "IdentitySystem":
        return cls(tuple(make_identity(u, v) for u, v in pairs))

    def __iter__(self):
        return iter(self.identities)

    def __len__(self):
        return len(self.identities)

    def __or__(self, other: "IdentitySystem") -> "IdentitySystem":
        return IdentitySystem(self.identities + other.identities)

    def __hash__(self):
        # large systems are cache keys; hash once
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash(self.identities)
            object.__setattr__(self, "_hash", h)
            return h


@dataclass(frozen=True)
class Substitution:
    """Letter -> non-empty word. Letters outside the mapping are fixed."""

    items: tuple[tuple[int, Word], ...]

    def __post_init__(self):
        for _, image in self.items:
            if not image:
                raise ValidationError("substitution images must be non-empty")
        object.__setattr__(self, "items", tuple(sorted(self.items)))

    @classmethod
    def from_dict(cls, mapping: dict[int, Sequence[int]]) -> "Substitution":
        return cls(tuple((a, tuple(w)) for a, w in mapping.items()))

    def as_dict(self) -> dict[int, Word]:
        return dict(self.items)

    def apply(self, w: Sequence[int]) -> Word:
        m = dict(self.items)
        out: list[int] = []
        for a in w:
            out.extend(m.get(a, (a,)))
        return tuple(out)


@dataclass(frozen=True)
class RewriteStep:
    identity_index: int
    forward: bool  # True: lhs -> rhs
    left: Word
    right: Word
    substitution: Substitution

    def sides(self, system: IdentitySystem) -> tuple[Word, Word]:
        ident = system.identities[self.identity_index]
        return (ident.lhs, ident.rhs) if self.forward else (ident.rhs, ident.lhs)

    def source(self, system: IdentitySystem) -> Word:
        s, _ = self.sides(system)
        return self.left + self.substitution.apply(s) + self.right

    def target(self, system: IdentitySystem) -> Word:
        _, t = self.sides(system)
        return self.left + self.substitution.apply(t) + self.right


@dataclass(frozen=True)
class DeductionTrace:
    words: tuple[Word, ...]
    steps: tuple[RewriteStep, ...] = field(default=())

    def __len__(self):
        return len(self.steps)

    def replay(self, system: IdentitySystem) -> bool:
        """Rebuild every step from its context and substitution."""
        if len(self.words) != len(self.steps) + 1:
            return False
        return all(
            step.source(system) == a and step.target(system) == b
            for step, a, b in zip(self.steps, self.words, self.words[1:])
        )


def match_full(pattern: Sequence[int], target: Sequence[int]) -> list[Substitution]:
    """Every substitution sending ``pattern`` exactly onto ``target``.

    Backtracks over the cut points of ``target``; a repeated pattern letter
    must receive the same block each time. Results come out in increasing
    order of image lengths, left to right.
    """
    pattern = tuple(pattern)
    target = tuple(target)
    k, n = len(pattern), len(target)
    if k == 0 or k > n:
        return []
    out: list[Substitution] = []
    images: dict[int, Word] = {}

    def min_len(idx: int) -> int:
        return sum(len(images[a]) if a in images else 1 for a in pattern[idx:])

    def go(idx: int, pos: int) -> None:
        if idx == k:
            if pos == n:
                out.append(Substitution(tuple(images.items())))
            return
        a = pattern[idx]
        if a in images:
            img = images[a]
            if target[pos:pos + len(img)] == img:
                go(idx + 1, pos + len(img))
            return
        rest = min_len(idx + 1)
        for length in range(1, n - pos - rest + 1):
            images[a] = target[pos:pos + length]
            go(idx + 1, pos + length)
            del images[a]

    go(0, 0)
    return out


def one_step_rewrites(w: Sequence[int], system: IdentitySystem) -> list[tuple[Word, RewriteStep]]:
    """All words one rewrite away from ``w``, each with the first step found.

    Scan order: identity, then direction (lhs->rhs first), then factor start,
    then factor end, then substitution. Rewrites that give back ``w`` itself
    are dropped.
    """
    w = tuple(w)
    n = len(w)
    found: dict[Word, RewriteStep] = {}
    for idx, ident in enumerate(system.identities):
        if ident.trivial:
            continue
        for forward in (True, False):
            s, t = (ident.lhs, ident.rhs) if forward else (ident.rhs, ident.lhs)
            for i in range(n):
                for j in range(i + len(s), n + 1):
                    for zeta in match_full(s, w[i:j]):
                        new = w[:i] + zeta.apply(t) + w[j:]
                        if new != w and new not in found:
                            found[new] = RewriteStep(idx, forward, w[:i], w[j:], zeta)
    return list(found.items())


def derivable(u: Sequence[int], v: Sequence[int], system: IdentitySystem) -> Optional[DeductionTrace]:
    """Shortest deduction of ``u = v`` from ``system``, or None.

    Breadth-first over arrangements of ``u``'s letters; each frontier is
    expanded in lexicographic order so the returned trace is reproducible.
    """
    u, v = make_word(u), make_word(v)
    counts = Counter(u)
    if counts != Counter(v):
        raise UnbalancedError(f"{format_word(u)} = {format_word(v)} is not balanced")
    if u == v:
        return DeductionTrace((u,))
    parent: dict[Word, Optional[tuple[Word, RewriteStep]]] = {u: None}
    frontier = [u]
    while frontier and v not in parent:
        nxt: list[Word] = []
        for w in sorted(frontier):
            for new, step in one_step_rewrites(w, system):
                if Counter(new) != counts:
                    raise AssertionError("rewrite changed the letter counts")
                if new not in parent:
                    parent[new] = (w, step)
                    nxt.append(new)
        frontier = nxt
    if v not in parent:
        return None
    words, steps = [v], []
    while parent[words[-1]] is not None:
        prev, step = parent[words[-1]]
        words.append(prev)
        steps.append(step)
    return DeductionTrace(tuple(reversed(words)), tuple(reversed(steps)))


# --- fast neighbour generation -------------------------------------------
#
# Identities that already connect a whole transversal W_mu (a "clique") are
# applied wholesale: a factor that is an image z(s) of some s in W_mu can be
# replaced by any rearrangement of its blocks, and adjacent block swaps
# generate all of those. This gives the same connected components as
# rewriting with the individual identities; everything else goes through
# the generic matcher.


@lru_cache(maxsize=None)
def _cuts(length: int, blocks: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        (0,) + c + (length,) for c in combinations(range(1, length), blocks - 1)
    )


@lru_cache(maxsize=None)
def _coarsens(mu: tuple[int, ...], mults: tuple[int, ...]) -> bool:
    # can mu's components be grouped so the group sums are exactly mults?
    return sum(mu) == sum(mults) and _fits(mu, mults)


class _Engine:
    def __init__(self, system: IdentitySystem):
        groups: dict[Partition, list[Identity]] = {}
        residual: list[tuple[Word, Word]] = []
        for ident in system:
            if ident.trivial:
                continue
            lam = ident.partition
            if lam.in_lambda and in_transversal(ident.lhs, lam) and in_transversal(ident.rhs, lam):
                groups.setdefault(lam, []).append(ident)
            else:
                residual.append((ident.lhs, ident.rhs))
        self.cliques: list[tuple[int, ...]] = []
        for lam, ids in groups.items():
            if _spans(lam, ids):
                self.cliques.append(lam.components)
            else:
                residual.extend((i.lhs, i.rhs) for i in ids)
        self.cliques.sort(key=lambda c: (sum(c), c))
        self.residual = residual + [(t, s) for s, t in residual]

        self._swaps: dict[tuple[int, Word], tuple[tuple[int, int, int], ...]] = {}
        # per-transversal verdicts, filled in by the varieties module
        self.memo: dict = {}

    def block_swaps(self, k: int, f: Word) -> tuple[tuple[int, int, int], ...]:
        """Adjacent block pairs ``f[a:b], f[b:c]`` that clique ``k`` may exchange.

        ``f`` qualifies when it splits into ``sum(mu)`` blocks whose repeat
        counts are a coarsening of ``mu``.
        """
        # only the equality pattern of f matters: relabel by first occurrence
        names: dict[int, int] = {}
        f = tuple(names.setdefault(a, len(names)) for a in f)
        key = (k, f)
        hit = self._swaps.get(key)
        if hit is not None:
            return hit
        mu = self.cliques[k]
        size, distinct, length = sum(mu), len(mu), len(f)
        out: set[tuple[int, int, int]] = set()
        cuts = [0]
        counts: dict[Word, int] = {}

        def go(pos: int, left: int) -> None:
            if left == 0:
                mults = tuple(sorted(counts.values(), reverse=True))
                if mults[0] >= mu[0] and _coarsens(mu, mults):
                    for p in range(size - 1):
                        a, b, c = cuts[p], cuts[p + 1], cuts[p + 2]
                        if f[a:b] != f[b:c]:
                            out.add((a, b, c))
                return
            last = length if left == 1 else length - left + 1
            for end in range(last if left == 1 else pos + 1, last + 1):
                blk = f[pos:end]
                if blk not in counts and len(counts) == distinct:
                    continue
                counts[blk] = counts.get(blk, 0) + 1
                cuts.append(end)
                go(end, left - 1)
                cuts.pop()
                if counts[blk] == 1:
                    del counts[blk]
                else:
                    counts[blk] -= 1

        go(0, size)
        hit = self._swaps[key] = tuple(sorted(out))
        return hit

    def neighbours(self, w: Word) -> Iterator[Word]:
        n = len(w)
        done: set[tuple[int, int, int]] = set()
        emitted: set[Word] = set()
        for k, mu in enumerate(self.cliques):
            size, top = sum(mu), mu[0]
            for i in range(n):
                counts: dict[int, int] = {}
                peak = 0
                for j in range(i + 1, n + 1):
                    cnt = counts[w[j - 1]] = counts.get(w[j - 1], 0) + 1
                    peak = max(peak, cnt)
                    # a block repeated g times puts each of its letters g times in f
                    if j - i < size or peak < top:
                        continue
                    for a, b, c in self.block_swaps(k, w[i:j]):
                        a, b, c = a + i, b + i, c + i
                        if (a, b, c) in done:
                            continue
                        done.add((a, b, c))
                        new = w[:a] + w[b:c] + w[a:b] + w[c:]
                        if new != w and new not in emitted:
                            emitted.add(new)
                            yield new
        for s, t in self.residual:
            for i in range(n):
                for j in range(i + len(s), n + 1):
                    for zeta in match_full(s, w[i:j]):
                        new = w[:i] + zeta.apply(t) + w[j:]
                        if new != w:
                            yield new


def _spans(lam: Partition, ids: list[Identity]) -> bool:
    words = enumerate_transversal(lam)
    index = {w: k for k, w in enumerate(words)}
    uf = _UnionFind(len(words))
    for ident in ids:
        uf.union(index[ident.lhs], index[ident.rhs])
    return uf.count == 1


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.count = n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller index wins so roots are the least members
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra
            self.count -= 1


@lru_cache(maxsize=64)
def _engine(system: IdentitySystem) -> _Engine:
    return _Engine(system)


def neighbours(w: Sequence[int], system: IdentitySystem) -> frozenset[Word]:
    """Words one rewrite away from ``w`` (targets only, fast path)."""
    return frozenset(_engine(system).neighbours(tuple(w)))


@lru_cache(maxsize=256)
def _classes(letters: tuple[int, ...], system: IdentitySystem) -> tuple[frozenset[Word], ...]:
    engine = _engine(system)
    words = list(arrangements(letters))
    index = {w: k for k, w in enumerate(words)}
    uf = _UnionFind(len(words))
    for k, w in enumerate(words):
        for new in engine.neighbours(w):
            other = index.get(new)
            if other is None:
                raise AssertionError(
                    f"rewrite left the arrangement class: {format_word(w)} -> {format_word(new)}")
            uf.union(k, other)
    buckets: dict[int, list[Word]] = {}
    for k, w in enumerate(words):
        buckets.setdefault(uf.find(k), []).append(w)
    # words are generated in lexicographic order, so roots order the classes
    return tuple(frozenset(buckets[r]) for r in sorted(buckets))


def classes_of(letters: Sequence[int], system: IdentitySystem) -> list[frozenset[Word]]:
    """Connected components over all arrangements of a multiset of letters."""
    return list(_classes(tuple(sorted(letters)), system))


def component_classes(lam: Partition, system: IdentitySystem) -> list[frozenset[Word]]:
    """Split W_lam into classes of mutually derivable words, least member first."""
    _require_lambda(lam)
    return classes_of(canonical_word(lam), system)


def component_of(w: Sequence[int], system: IdentitySystem, limit: Optional[int] = None) -> frozenset[Word]:
    """Everything derivable from ``w``; cheaper than all classes when the class is small.

    With ``limit`` set, the search stops as soon as that many words are found
    (callers pass the arrangement count to test for a single class).
    """
    engine = _engine(system)
    w = make_word(w)
    seen = {w}
    queue = deque([w])
    while queue and (limit is None or len(seen) < limit):
        for new in engine.neighbours(queue.popleft()):
            if new not in seen:
                seen.add(new)
                queue.append(new)
    return frozenset(seen)


def has_rewrite(w: Sequence[int], system: IdentitySystem) -> bool:
    return next(_engine(system).neighbours(tuple(w)), None) is not None


def collapse_system(lam: Partition) -> IdentitySystem:
    """Star of identities from the canonical word to every other word of W_lam."""
    canon = canonical_word(lam)
    return IdentitySystem(tuple(
        Identity(canon, w) for w in enumerate_transversal(lam) if w != canon))


# --- text formats ---------------------------------------------------------


def parse_system(text: str) -> IdentitySystem:
    """One ``lhs = rhs`` per line; ``#`` starts a comment."""
    identities = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sides = line.split("=")
        if len(sides) != 2:
            raise ValidationError(f"line {lineno}: expected 'lhs = rhs', got {raw!r}")
        try:
            identities.append(make_identity(parse_word(sides[0]), parse_word(sides[1])))
        except ValidationError as exc:
            raise type(exc)(f"line {lineno}: {exc}") from None
    return IdentitySystem(tuple(identities))


def format_system(system: IdentitySystem, style: str = "tokens") -> str:
    return "".join(
        f"{format_word(i.lhs, style)} = {format_word(i.rhs, style)}\n" for i in system)


def trace_records(trace: DeductionTrace, system: IdentitySystem) -> list[dict]:
    records = []
    for step, a, b in zip(trace.steps, trace.words, trace.words[1:]):
        records.append({
            "source": format_word(a),
            "target": format_word(b),
            "identity": step.identity_index,
            "direction": "lr" if step.forward else "rl",
            "left": format_word(step.left),
            "right": format_word(step.right),
            "substitution": {f"x{k}": format_word(img) for k, img in step.substitution.items},
        })
    return records


def dump_trace(trace: DeductionTrace, system: IdentitySystem) -> str:
    """JSON lines, one record per step; keys sorted for byte-stable output."""
    return "".join(
        json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n"
        for r in trace_records(trace, system))
