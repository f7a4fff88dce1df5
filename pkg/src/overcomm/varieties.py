"""Finite presentations of overcommutative varieties and greedy analysis.

Every variety here is given by a finite identity system, and every verdict
that really quantifies over all transversals is computed only for
partitions whose total stays under a length ``bound``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import ValidationError
from .partitions import (
    Partition,
    _require_lambda,
    enumerate_lambda,
    extend,
    format_partition,
    lambda_up_to,
    minimal_elements,
    parse_partition,
    sort_partitions,
    stats,
)
from .rewrite import (
    IdentitySystem,
    _engine,
    component_classes,
    component_of,
    collapse_system,
    format_system,
    parse_system,
)
from .words import Word, arrangements, canonical_word, transversal_size

__all__ = [
    "VarietyPresentation",
    "Verdict",
    "GreedyReport",
    "DecompositionResult",
    "empty_presentation",
    "w_variety",
    "s_variety",
    "s_variety_truncated",
    "legacy_variety",
    "meet",
    "reduces",
    "collapses",
    "greedy_report",
    "gamma_set",
    "decompose",
    "subset_up_to",
    "dump_presentation",
    "load_presentation",
]


@dataclass(frozen=True)
class VarietyPresentation:
    system: IdentitySystem
    label: str = ""
    declared_collapses: frozenset[Partition] = frozenset()
    bound: Optional[int] = None

    def check_declared(self) -> bool:
        """Every declared transversal really is a single class."""
        return all(collapses(self, lam) for lam in self.declared_collapses)


@dataclass(frozen=True)
class Verdict:
    partition: Partition
    reduces: bool
    collapses: bool


@dataclass(frozen=True)
class GreedyReport:
    bound: int
    verdicts: tuple[Verdict, ...]
    greedy_up_to_bound: bool

    @property
    def witnesses(self) -> list[Partition]:
        """Transversals that are reduced but not collapsed."""
        return [v.partition for v in self.verdicts if v.reduces and not v.collapses]


@dataclass(frozen=True)
class DecompositionResult:
    bound: int
    gamma: frozenset[Partition]
    gamma_prime: frozenset[Partition]
    indeterminate: frozenset[Partition]
    reconstruction_ok: bool
    mismatches: tuple[Partition, ...] = field(default=())


def empty_presentation(label: str = "SEM") -> VarietyPresentation:
    """All semigroups: no identities, nothing reduced."""
    return VarietyPresentation(IdentitySystem(), label)


def w_variety(lam: Partition) -> VarietyPresentation:
    _require_lambda(lam)
    return VarietyPresentation(collapse_system(lam), f"W{lam}", frozenset([lam]))


def s_variety_truncated(lam: Partition, k: int) -> VarietyPresentation:
    s = stats(lam).s
    if not 0 <= k <= s:
        raise ValidationError(f"k must lie in [0, {s}] for {lam}, got {k}")
    parts = [w_variety(extend(lam, i)) for i in range(k + 1)]
    label = f"S{lam}" if k == s else f"S{lam}^{k}"
    return _relabel(meet(parts), label)


def s_variety(lam: Partition, max_length: Optional[int] = None) -> VarietyPresentation:
    """S_lam; with ``max_length``, the W-factors longer than that are left out.

    The cut presentation derives exactly the same identities of length up
    to ``max_length`` as the full one, since rewriting preserves length.
    """
    s = stats(lam).s
    if max_length is None or lam.total + s <= max_length:
        return s_variety_truncated(lam, s)
    k = max_length - lam.total
    if k < 0:
        return VarietyPresentation(IdentitySystem(), f"S{lam} [length <= {max_length}]",
                                   bound=max_length)
    p = s_variety_truncated(lam, k)
    return VarietyPresentation(p.system, f"S{lam} [length <= {max_length}]",
                               p.declared_collapses, max_length)


def meet(ps: Sequence[VarietyPresentation]) -> VarietyPresentation:
    """Intersection of varieties, presented by the union of the systems."""
    ps = list(ps)
    if not ps:
        raise ValidationError("meet of an empty family")
    if len(ps) == 1:
        return ps[0]
    system = IdentitySystem(tuple(i for p in ps for i in p.system))
    declared = frozenset().union(*(p.declared_collapses for p in ps))
    bounds = [p.bound for p in ps if p.bound is not None]
    return VarietyPresentation(
        system,
        " & ".join(p.label for p in ps),
        declared,
        min(bounds) if bounds else None,
    )


def _relabel(p: VarietyPresentation, label: str) -> VarietyPresentation:
    return VarietyPresentation(p.system, label, p.declared_collapses, p.bound)


def _collapse_all(lams: Iterable[Partition], label: str, bound: int) -> VarietyPresentation:
    lams = sort_partitions(set(lams))
    system = IdentitySystem(tuple(i for lam in lams for i in collapse_system(lam)))
    return VarietyPresentation(system, label, frozenset(lams), bound)


def _x_n(n: int, bound: int) -> list[Partition]:
    return lambda_up_to(bound, low=n)


def _x_nm(n: int, m: int, bound: int) -> list[Partition]:
    # X_{n,1} = X_{n+1}; single-letter identities of length n are trivial
    extra = [lam for r in range(2, min(m, n) + 1) for lam in enumerate_lambda(n, r)]
    return _x_n(n + 1, bound) + extra


def legacy_variety(kind: str, n: int, m: Optional[int] = None,
                   lam: Optional[Partition] = None, bound: int = 6) -> VarietyPresentation:
    """Bounded X_n, X_{n,m}, X_{n,m,lam}: identities longer than ``bound`` are left out."""
    if not 2 <= n <= bound:
        raise ValidationError(f"need 2 <= n <= bound, got n={n}, bound={bound}")
    if kind == "Xn":
        return _collapse_all(_x_n(n, bound), f"X_{n} [bound {bound}]", bound)
    if m is None or m < 1:
        raise ValidationError(f"{kind} needs m >= 1")
    if kind == "Xnm":
        return _collapse_all(_x_nm(n, m, bound), f"X_{n},{m} [bound {bound}]", bound)
    if kind == "Xnml":
        if lam is None or not lam.in_lambda or lam.total != n or lam.parts != m:
            raise ValidationError(f"Xnml needs a partition of {n} into {m} parts, got {lam}")
        return _collapse_all(_x_nm(n, m - 1, bound) + [lam],
                             f"X_{n},{m},{lam} [bound {bound}]", bound)
    raise ValidationError(f"unknown legacy family {kind!r}")


def reduces(p: VarietyPresentation, lam: Partition) -> bool:
    """Some two distinct words of W_lam are equal in the variety."""
    _require_lambda(lam)
    engine = _engine(p.system)
    key = ("reduces", lam)
    if key not in engine.memo:
        engine.memo[key] = any(
            next(engine.neighbours(w), None) is not None
            for w in arrangements(canonical_word(lam)))
    return engine.memo[key]


def collapses(p: VarietyPresentation, lam: Partition) -> bool:
    """All words of W_lam are equal in the variety."""
    _require_lambda(lam)
    engine = _engine(p.system)
    key = ("collapses", lam)
    if key not in engine.memo:
        size = transversal_size(lam)
        found = component_of(canonical_word(lam), p.system, limit=size)
        engine.memo[key] = len(found) == size
    return engine.memo[key]


def _check_bound(bound: int) -> None:
    if bound < 2:
        raise ValidationError(f"bound must be at least 2, got {bound}")


def greedy_report(p: VarietyPresentation, bound: int) -> GreedyReport:
    _check_bound(bound)
    verdicts = []
    for lam in lambda_up_to(bound):
        red = reduces(p, lam)
        # |W_lam| >= 2, so collapsing implies reducing
        col = red and collapses(p, lam)
        verdicts.append(Verdict(lam, red, col))
    greedy = all(v.collapses for v in verdicts if v.reduces)
    return GreedyReport(bound, tuple(verdicts), greedy)


def gamma_set(p: VarietyPresentation, bound: int) -> tuple[frozenset[Partition], frozenset[Partition]]:
    """Partitions lam with p inside S_lam, split into certified and indeterminate.

    Membership needs p to collapse lam^0 ... lam^s; when lam^s is longer
    than ``bound`` and every checkable extension collapses, the answer is
    left open.
    """
    _check_bound(bound)
    certified, open_ = set(), set()
    for lam in lambda_up_to(bound):
        s = stats(lam).s
        ok = True
        for i in range(s + 1):
            if lam.total + i > bound:
                break
            if not collapses(p, extend(lam, i)):
                ok = False
                break
        if not ok:
            continue
        if lam.total + s <= bound:
            certified.add(lam)
        else:
            open_.add(lam)
    return frozenset(certified), frozenset(open_)


def _same_classes(p: VarietyPresentation, q: VarietyPresentation, lam: Partition) -> bool:
    # the cheap verdicts settle greedy presentations without listing classes
    pc, qc = collapses(p, lam), collapses(q, lam)
    if pc or qc:
        return pc == qc
    pr, qr = reduces(p, lam), reduces(q, lam)
    if not pr or not qr:
        return pr == qr
    return (set(component_classes(lam, p.system))
            == set(component_classes(lam, q.system)))


def decompose(p: VarietyPresentation, bound: int) -> DecompositionResult:
    _check_bound(bound)
    gamma, indeterminate = gamma_set(p, bound)
    gamma_prime = minimal_elements(gamma)
    if gamma_prime:
        rebuilt = meet([s_variety(lam) for lam in sort_partitions(gamma_prime)])
    else:
        rebuilt = empty_presentation()
    mismatches = tuple(
        lam for lam in lambda_up_to(bound)
        if lam.total + stats(lam).s <= bound and not _same_classes(p, rebuilt, lam)
    )
    return DecompositionResult(bound, gamma, gamma_prime, indeterminate,
                               not mismatches, mismatches)


def _reaches(u: Word, targets: set[Word], system: IdentitySystem) -> bool:
    engine = _engine(system)
    seen = {u}
    frontier = [u]
    missing = set(targets) - seen
    while frontier and missing:
        nxt = []
        for w in frontier:
            for new in engine.neighbours(w):
                if new not in seen:
                    seen.add(new)
                    missing.discard(new)
                    nxt.append(new)
        frontier = nxt
    return not missing


def subset_up_to(p: VarietyPresentation, q: VarietyPresentation, bound: int) -> bool:
    """Is the variety of ``p`` inside that of ``q``, i.e. does p derive q's identities?"""
    _check_bound(bound)
    by_lhs: dict[Word, set[Word]] = {}
    for ident in q.system:
        if len(ident.lhs) > bound:
            raise ValidationError(
                f"{q.label or 'presentation'} has an identity of length {len(ident.lhs)} > {bound}")
        if not ident.trivial:
            by_lhs.setdefault(ident.lhs, set()).add(ident.rhs)
    return all(_reaches(u, vs, p.system) for u, vs in sorted(by_lhs.items()))


# --- file format ------------------------------------------------------------

_HEADER = "#%"


def dump_presentation(p: VarietyPresentation) -> str:
    """Identity-system text preceded by a ``#%`` JSON header line."""
    header = {
        "label": p.label,
        "bound": p.bound,
        "collapses": [format_partition(lam) for lam in sort_partitions(p.declared_collapses)],
    }
    return f"{_HEADER} {json.dumps(header, sort_keys=True)}\n" + format_system(p.system)


def load_presentation(text: str, check: bool = True) -> VarietyPresentation:
    label, bound, declared = "", None, frozenset()
    first = text.lstrip().split("\n", 1)[0]
    if first.startswith(_HEADER):
        try:
            header = json.loads(first[len(_HEADER):])
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad presentation header: {exc}") from None
        label = str(header.get("label", ""))
        bound = header.get("bound")
        declared = frozenset(parse_partition(t) for t in header.get("collapses", []))
    p = VarietyPresentation(parse_system(text), label, declared, bound)
    if check and not p.check_declared():
        raise ValidationError("a declared transversal is not collapsed by the system")
    return p
