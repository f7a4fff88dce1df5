"""Words over x1, x2, ... and transversals of Lambda partitions.

A word is a plain tuple of positive letter indices, so ``x1 x1 x2`` is
``(1, 1, 2)``. The empty tuple only ever appears as a rewrite context.
"""
from __future__ import annotations

import re
from collections import Counter
from math import factorial, prod
from typing import Iterable, Iterator, Sequence

from .errors import ValidationError
from .partitions import Partition, _require_lambda, make_partition

Word = tuple[int, ...]

__all__ = [
    "Word",
    "make_word",
    "parse_word",
    "format_word",
    "letter_counts",
    "content",
    "partition_of",
    "canonical_word",
    "arrangements",
    "enumerate_transversal",
    "transversal_size",
    "in_transversal",
    "apply_letter_map",
]

_TOKENS = re.compile(r"\s*(?:x\d+\s*)+")
_TOKEN = re.compile(r"x(\d+)")


def make_word(letters: Iterable[int]) -> Word:
    w = tuple(letters)
    if not w:
        raise ValidationError("words are non-empty")
    for a in w:
        if not isinstance(a, int) or isinstance(a, bool) or a < 1:
            raise ValidationError(f"letter indices must be positive integers, got {a!r}")
    return w


def parse_word(text: str) -> Word:
    """Parse ``"aab"`` (a=x1 ... z=x26) or ``"x1 x1 x2"``."""
    if _TOKENS.fullmatch(text):
        return make_word(int(t) for t in _TOKEN.findall(text))
    body = text.strip()
    if not body or not all("a" <= ch <= "z" for ch in body):
        raise ValidationError(f"cannot parse word {text!r}")
    return make_word(ord(ch) - ord("a") + 1 for ch in body)


def format_word(w: Sequence[int], style: str = "tokens") -> str:
    if style == "compact":
        if any(a > 26 for a in w):
            raise ValidationError("compact form only covers x1..x26")
        return "".join(chr(ord("a") + a - 1) for a in w)
    if style == "tokens":
        return " ".join(f"x{a}" for a in w)
    raise ValueError(f"unknown word style {style!r}")


def letter_counts(w: Sequence[int]) -> dict[int, int]:
    """Occurrence count of every letter of ``w``, keyed by index."""
    return dict(sorted(Counter(w).items()))


def content(w: Sequence[int]) -> frozenset[int]:
    return frozenset(w)


def partition_of(w: Sequence[int]) -> Partition:
    """Occurrence counts sorted non-increasingly; may have a single part."""
    return make_partition(Counter(make_word(w)).values())


def canonical_word(lam: Partition) -> Word:
    _require_lambda(lam)
    return tuple(i for i, c in enumerate(lam, start=1) for _ in range(c))


def arrangements(letters: Sequence[int]) -> Iterator[Word]:
    """Distinct permutations of a multiset of letters, in lexicographic order."""
    a = sorted(letters)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1:] = reversed(a[i + 1:])


def enumerate_transversal(lam: Partition) -> list[Word]:
    return list(arrangements(canonical_word(lam)))


def transversal_size(lam: Partition) -> int:
    return factorial(lam.total) // prod(factorial(c) for c in lam)


def in_transversal(u: Sequence[int], lam: Partition) -> bool:
    counts = Counter(u)
    if set(counts) != set(range(1, lam.parts + 1)):
        return False
    return all(counts[i] == c for i, c in enumerate(lam, start=1))


def apply_letter_map(w: Sequence[int], mapping: dict[int, int]) -> Word:
    """Image of ``w`` under a letter-to-letter endomorphism (identity off ``mapping``)."""
    return tuple(mapping.get(a, a) for a in w)
