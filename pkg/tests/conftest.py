"""Shared test helpers: independent oracles written against plain Python sets.

The oracles here deliberately avoid the library's bitset/numpy machinery so
that agreement between the two is meaningful evidence, not a tautology.
"""

from __future__ import annotations

import itertools
import random

import pytest

from ekrf.setcore import Family, GroundParams, enumerate_ksets
from ekrf.conditions import ConditionSpec, Variant, threshold


def members_as_sets(family: Family) -> list[set[int]]:
    return [set(ks.elements) for ks in family]


def oracle_pair_sum(sets: list[set[int]], indices) -> int:
    return sum(
        len(sets[a] & sets[b]) for a, b in itertools.combinations(indices, 2)
    )


def oracle_min_pairsum(family: Family, ell: int):
    """Exhaustive minimum over all ell-member tuples, plus the lex-least argmin."""
    sets = members_as_sets(family)
    best = None
    best_tuple = None
    for combo in itertools.combinations(range(len(sets)), ell):
        value = oracle_pair_sum(sets, combo)
        if best is None or value < best:
            best, best_tuple = value, combo
    return best, best_tuple


def oracle_feasible(sets: list[set[int]], indices, ell: int, thr: int) -> bool:
    if len(indices) < ell:
        return True
    return all(
        oracle_pair_sum(sets, combo) >= thr
        for combo in itertools.combinations(indices, ell)
    )


def oracle_max_family(family: Family, spec: ConditionSpec):
    """Complete enumeration of feasible subfamilies (DFS over the power set with
    sound feasibility pruning: supersets of an infeasible set are infeasible).
    Returns (max size, lexicographically least maximum witness)."""
    sets = members_as_sets(family)
    thr = threshold(spec)
    ell = 2 if spec.variant is Variant.PAIRWISE_T else spec.ell
    m = len(sets)
    best: list[int] = []

    def extension_ok(chosen: list[int], c: int) -> bool:
        if thr <= 0:
            return True
        if len(chosen) < ell - 1:
            return True
        return all(
            oracle_pair_sum(sets, sub + (c,)) >= thr
            for sub in itertools.combinations(chosen, ell - 1)
        )

    def rec(chosen: list[int], start: int) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        for c in range(start, m):
            if extension_ok(chosen, c):
                rec(chosen + [c], c + 1)

    rec([], 0)
    return len(best), tuple(best)


def random_family(rng: random.Random, n: int, k: int, m: int) -> Family:
    universe = list(itertools.combinations(range(1, n + 1), k))
    picks = rng.sample(universe, m)
    return Family.from_element_lists(n, k, picks)


def dpll(clauses) -> bool:
    """Miniature DPLL on DIMACS-style clause lists; enough to check tiny CNFs."""

    def unit_prop(cls):
        while True:
            if any(len(c) == 0 for c in cls):
                return None
            units = [c[0] for c in cls if len(c) == 1]
            if not units:
                return cls
            lit = units[0]
            nxt = []
            for c in cls:
                if lit in c:
                    continue
                nxt.append([x for x in c if x != -lit])
            cls = nxt

    def solve(cls):
        cls = unit_prop(cls)
        if cls is None:
            return False
        if not cls:
            return True
        v = abs(cls[0][0])
        return solve(cls + [[v]]) or solve(cls + [[-v]])

    return solve([list(c) for c in clauses])


def parse_dimacs(text: str):
    clauses = []
    nvars = nclauses = None
    for line in text.splitlines():
        if line.startswith("c") or not line.strip():
            continue
        if line.startswith("p "):
            _, _, nv, nc = line.split()
            nvars, nclauses = int(nv), int(nc)
            continue
        lits = [int(x) for x in line.split()]
        assert lits[-1] == 0, f"clause line missing terminator: {line!r}"
        clauses.append(lits[:-1])
    assert nvars is not None and nclauses == len(clauses)
    return nvars, clauses


def all_ksets_meeting(n: int, k: int, hitting: set[int]) -> Family:
    members = [
        combo
        for combo in itertools.combinations(range(1, n + 1), k)
        if hitting & set(combo)
    ]
    return Family.from_element_lists(n, k, members)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0x5EED)
