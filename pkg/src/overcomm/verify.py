"""Finite instance checks of the order and variety results, grouped in suites.

Each suite returns a list of ``Case`` records; the CLI prints one line per
case and fails if any case fails.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

from .partitions import (
    Partition,
    down_set,
    extend,
    lambda_up_to,
    make_partition,
    preceq,
    stats,
    unlhd,
)
from .rewrite import IdentitySystem, collapse_system, derivable
from .varieties import (
    VarietyPresentation,
    collapses,
    s_variety,
    s_variety_truncated,
    subset_up_to,
    w_variety,
)
from .words import apply_letter_map, canonical_word, partition_of


@dataclass(frozen=True)
class Case:
    name: str
    passed: bool
    detail: str = ""


def union_closure(lam: Partition, k: int = 0) -> frozenset[Partition]:
    """Every partition reachable from ``lam^k`` by repeated unions of two components."""
    start = extend(lam, k).components
    seen = {start}
    stack = [start]
    while stack:
        comps = stack.pop()
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                rest = comps[:i] + comps[i + 1:j] + comps[j + 1:]
                merged = tuple(sorted(rest + (comps[i] + comps[j],), reverse=True))
                if len(merged) >= 2 and merged not in seen:
                    seen.add(merged)
                    stack.append(merged)
    return frozenset(Partition(c) for c in seen)


def brute_down_set(mu: Partition) -> frozenset[Partition]:
    return frozenset(
        lam for lam in lambda_up_to(mu.total)
        if mu in union_closure(lam, mu.total - lam.total)
    )


def order_axioms(bound: int) -> list[Case]:
    universe = lambda_up_to(bound)
    le = {(a, b): preceq(a, b) for a in universe for b in universe}
    refl = [a for a in universe if not le[a, a]]
    anti = [(a, b) for a in universe for b in universe
            if a != b and le[a, b] and le[b, a]]
    trans = [(a, b, c) for a in universe for b in universe if le[a, b]
             for c in universe if le[b, c] and not le[a, c]]
    gaps = [(a, b) for a in universe for b in universe if unlhd(a, b) and not le[a, b]]
    cases = [
        Case(f"reflexive (total <= {bound})", not refl, str(refl[:3])),
        Case(f"antisymmetric (total <= {bound})", not anti, str(anti[:3])),
        Case(f"transitive (total <= {bound})", not trans, str(trans[:3])),
        Case(f"unlhd implies preceq (total <= {bound})", not gaps, str(gaps[:3])),
    ]
    for mu in lambda_up_to(min(bound, 7)):
        got, want = down_set(mu), brute_down_set(mu)
        cases.append(Case(f"down_set{mu}", got == want, "" if got == want else f"{sorted(got ^ want, key=str)}"))
    return cases


def _set_partitions(items: list[int]):
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for blocks in _set_partitions(rest):
        yield [[head]] + blocks
        for i in range(len(blocks)):
            yield blocks[:i] + [[head] + blocks[i]] + blocks[i + 1:]


def poor_xi(bound: int) -> list[Case]:
    # the partition of xi(u) only depends on which letters xi identifies
    cases = []
    for lam in lambda_up_to(bound):
        u = canonical_word(lam)
        bad = []
        for blocks in _set_partitions(sorted(set(u))):
            mapping = {a: block[0] for block in blocks for a in block}
            image = partition_of(apply_letter_map(u, mapping))
            if image.in_lambda and not preceq(lam, image):
                bad.append(image)
        cases.append(Case(f"letter maps on {lam}", not bad, str(bad[:3])))
    return cases


def s_zero_extensions(bound: int) -> list[Case]:
    cases = []
    for lam in lambda_up_to(bound - 1):
        if stats(lam).s != 0:
            continue
        p = w_variety(lam)
        for k in range(1, bound - lam.total + 1):
            ext = extend(lam, k)
            cases.append(Case(f"W{lam} collapses {ext}", collapses(p, ext)))
    return cases


def prop_optimum(bound: int) -> list[Case]:
    x2yz, x2zy = (1, 1, 2, 3), (1, 1, 3, 2)
    trace = derivable(x2yz, x2zy, collapse_system(make_partition([2, 1])))
    cases = [Case("W(2,1) does not derive x1x1x2x3 = x1x1x3x2", trace is None)]
    for lam in lambda_up_to(bound):
        s = stats(lam).s
        # S^k with k >= bound - total only matters for transversals past the bound
        for k in range(min(s, bound - lam.total)):
            p = s_variety_truncated(lam, k)
            for i in range(k + 1, s + 1):
                if lam.total + i > bound:
                    break
                ext = extend(lam, i)
                cases.append(Case(f"S{lam}^{k} does not collapse {ext}", not collapses(p, ext)))
    return cases


def cor_s_in_w(bound: int) -> list[Case]:
    cases = []
    for lam in lambda_up_to(bound):
        if lam.total + stats(lam).s > bound:
            continue
        p = s_variety(lam)
        for k in range(0, bound - lam.total + 1):
            q = w_variety(extend(lam, k))
            cases.append(Case(f"S{lam} inside W{extend(lam, k)}", subset_up_to(p, q, bound)))
    return cases


def cor_s_in_s(bound: int) -> list[Case]:
    universe = [lam for lam in lambda_up_to(bound) if lam.total + stats(lam).s <= bound]
    svars = {lam: s_variety(lam) for lam in universe}
    cases = []
    for lam, mu in product(universe, repeat=2):
        inside = subset_up_to(svars[lam], svars[mu], bound)
        want = preceq(lam, mu)
        cases.append(Case(f"S{lam} inside S{mu} == {want}", inside == want))
    return cases


def cor_representation(bound: int) -> list[Case]:
    cases = []
    for lam in lambda_up_to(bound):
        s = stats(lam).s
        if lam.total + s > bound:
            continue
        for drop in range(s + 1):
            kept = [i for i in range(s + 1) if i != drop]
            system = IdentitySystem(tuple(
                ident for i in kept for ident in collapse_system(extend(lam, i))))
            p = VarietyPresentation(system, f"S{lam} without W{extend(lam, drop)}")
            cases.append(Case(f"{p.label} misses {extend(lam, drop)}",
                              not collapses(p, extend(lam, drop))))
    return cases


SUITES: dict[str, Callable[[int], list[Case]]] = {
    "order-axioms": order_axioms,
    "poor-xi": poor_xi,
    "s-zero-lemma": s_zero_extensions,
    "prop-optimum": prop_optimum,
    "cor-s-in-w": cor_s_in_w,
    "cor-s-in-s": cor_s_in_s,
    "cor-representation": cor_representation,
}


def run_suite(name: str, bound: int) -> list[Case]:
    try:
        suite = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return suite(bound)
