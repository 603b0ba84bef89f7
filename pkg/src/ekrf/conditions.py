"""Pair-sum conditions over ell-tuples of family members, certified exactly.

A condition asks that every ell distinct members F_1, ..., F_ell satisfy

    sum_{i<j} |F_i ∩ F_j|  >=  threshold(variant, t, ell, slack)

with the per-variant thresholds:

    EQ2        C(ell-1,2) + 1                      (t = 1 only)
    EQ3        C(ell,2)(t-1) + C(ell-1,2) + 1
    EQ4        C(ell,2)(t-1) + C(ell-1,2)          (ell >= 3)
    EQ10       C(ell-1,2) - s                      (t = 1, 2s+1 <= ell)
    PAIRWISE_T every pair intersects in >= t elements (ell = 2 semantics)

Everything is exact and deterministic: checks either certify the condition or
return the minimising violation with a lexicographically-least witness.

The exact searches rest on one identity: for members of a k-uniform family,
sum_{i<j} |F_i ∩ F_j| = sum_e C(m_e, 2) where m_e counts how many tuple
members contain element e.  Distributing the ell*k element slots as evenly as
the ground set allows ("water-filling") therefore lower-bounds every tuple,
and the same fill applied to a partially chosen tuple is an admissible
completion bound for branch-and-bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._bitops import element_index_arrays, weight_matrix
from .setcore import Family, ParameterError, binomial, intersection_size

DEFAULT_EXHAUSTIVE_CAP = 10**7

_BIG = np.int64(1 << 40)


class Variant(str, Enum):
    """Which pair-sum threshold a ConditionSpec asks for."""

    EQ2 = "eq2"
    EQ3 = "eq3"
    EQ4 = "eq4"
    EQ10 = "eq10"
    PAIRWISE_T = "pairwise"


@dataclass(frozen=True)
class ConditionSpec:
    """Parameters (t, ell, variant, slack) of one pair-sum condition."""

    t: int
    ell: int
    variant: Variant
    slack: int = 0

    def __post_init__(self):
        if self.t < 1:
            raise ParameterError(f"t must be >= 1, got {self.t}")
        if self.ell < 2:
            raise ParameterError(f"ell must be >= 2, got {self.ell}")
        if self.slack < 0:
            raise ParameterError(f"slack must be >= 0, got {self.slack}")
        v = self.variant
        if v is not Variant.EQ10 and self.slack != 0:
            raise ParameterError(f"slack is only meaningful for EQ10, got {v.value}")
        if v in (Variant.EQ2, Variant.EQ10) and self.t != 1:
            raise ParameterError(f"{v.value} requires t = 1, got t={self.t}")
        if v is Variant.EQ4 and self.ell < 3:
            raise ParameterError(f"eq4 requires ell >= 3, got ell={self.ell}")
        if v is Variant.EQ10 and 2 * self.slack + 1 > self.ell:
            raise ParameterError(
                f"eq10 requires 2*slack+1 <= ell, got slack={self.slack} ell={self.ell}"
            )
        if v is Variant.PAIRWISE_T and self.ell != 2:
            raise ParameterError(f"pairwise uses ell = 2 semantics, got ell={self.ell}")


def threshold(spec: ConditionSpec) -> int:
    """Right-hand side the pair-sum of every ell-tuple must reach."""
    t, ell, s = spec.t, spec.ell, spec.slack
    if spec.variant is Variant.EQ2:
        return binomial(ell - 1, 2) + 1
    if spec.variant is Variant.EQ3:
        return binomial(ell, 2) * (t - 1) + binomial(ell - 1, 2) + 1
    if spec.variant is Variant.EQ4:
        return binomial(ell, 2) * (t - 1) + binomial(ell - 1, 2)
    if spec.variant is Variant.EQ10:
        return binomial(ell - 1, 2) - s
    return t  # PAIRWISE_T: per-pair threshold


@dataclass(frozen=True)
class Violation:
    """An ell-tuple (member indices) whose pair-sum misses the threshold."""

    indices: tuple[int, ...]
    pair_sum: int
    threshold: int


@dataclass(frozen=True)
class CheckResult:
    """Outcome of check_condition.

    ``min_pairsum`` is filled only when the exact minimum was computed (always
    true for violations and for exact=True runs); otherwise ``lower_bound``
    carries the proven bound that certified the family.
    """

    ok: bool
    threshold: int
    min_pairsum: int | None
    witness: tuple[int, ...] | None
    exact: bool
    lower_bound: int | None
    reason: str
    violation: Violation | None = None


def pair_sum(family: Family, indices: tuple[int, ...] | list[int]) -> int:
    """Sum of pairwise intersection sizes over the given distinct members."""
    idx = list(indices)
    if len(idx) < 2:
        raise ParameterError(f"need at least 2 indices, got {len(idx)}")
    if len(set(idx)) != len(idx):
        raise ParameterError(f"indices must be distinct, got {indices}")
    for i in idx:
        if not (0 <= i < len(family)):
            raise ParameterError(f"index {i} out of range for family of {len(family)}")
    total = 0
    for a, b in itertools.combinations(idx, 2):
        total += intersection_size(family[a], family[b])
    return total


def pigeonhole_bound(n: int, k: int, ell: int) -> int:
    """Least possible pair-sum of any ell distinct k-sets in [n].

    ell*k element slots land on n elements (at most ell per element); the
    evenest spread minimises sum_e C(m_e, 2).  Zero once ell*k <= n.
    """
    slots = ell * k
    if slots <= n:
        return 0
    base, extra = divmod(slots, n)
    # extra elements at multiplicity base+1, the rest at base
    return extra * binomial(base + 1, 2) + (n - extra) * binomial(base, 2)


# ---------------------------------------------------------------------------
# exact minimum-pair-sum search
# ---------------------------------------------------------------------------


class _TupleSearch:
    """Exact search over q-subsets of m weighted items.

    Subset value: p0 + sum_i base_cross[i] + sum_{i<j} W[i,j].  The virtual
    prefix (p0 / base_cross / counts0) lets the family-growing solver reuse
    the same machinery for "minimum over tuples through fixed members".

    Modes:
      minimize(ub)          exact min restricted to value <= ub, with the
                            lexicographically-least witness; None if empty.
      minimize(ub, stop_at_first=True)
                            stop at the first qualifying subset found (a
                            deterministic one, not necessarily the lex-least);
                            None when no subset has value <= ub.
      enumerate_below(limit, cap)
                            every subset with value <= limit, lex order.
      exhaustive_min()      plain enumeration, no pruning (dispatch target
                            for small C(m, q)).

    Candidates are explored in index order throughout, which is what makes
    "first recorded" coincide with "lexicographically least".
    """

    def __init__(
        self,
        W: np.ndarray,
        elem_idx: list[np.ndarray],
        n: int,
        k: int,
        q: int,
        *,
        p0: int = 0,
        base_cross: np.ndarray | None = None,
        counts0: np.ndarray | None = None,
    ):
        self.W = W
        self.m = W.shape[0]
        self.elem_idx = elem_idx
        self.n = n
        self.k = k
        self.q = q
        self.p0 = p0
        if base_cross is None:
            base_cross = np.zeros(self.m, dtype=np.int64)
        self.base_cross = base_cross.astype(np.int64)
        if counts0 is None:
            counts0 = np.zeros(n, dtype=np.int64)
        self.counts0 = counts0.astype(np.int64)
        self._edge_prefix: list[int] | None = None

    # -- bounds ------------------------------------------------------------

    def _edge_lb(self, edges: int) -> int:
        """Sum of the `edges` globally smallest pair weights (admissible)."""
        if edges <= 0:
            return 0
        if self._edge_prefix is None:
            need = binomial(self.q, 2)
            take = min(2 * need, self.m * (self.m - 1))
            if take <= 0:
                self._edge_prefix = [0]
            else:
                # row-chunked scan for the smallest off-diagonal entries;
                # the matrix is symmetric, so each edge shows up twice
                running = np.full(take, _BIG, dtype=np.int64)
                chunk = max(1, min(self.m, (1 << 22) // self.m))
                for r0 in range(0, self.m, chunk):
                    r1 = min(self.m, r0 + chunk)
                    block = self.W[r0:r1].astype(np.int64)
                    rows = np.arange(r0, r1)
                    block[rows - r0, rows] = _BIG
                    merged = np.concatenate([running, block.ravel()])
                    running = np.partition(merged, take - 1)[:take]
                small = np.sort(running)
                acc, run = [0], 0
                for j in range(need):
                    if 2 * j + 1 < len(small):
                        run += int(small[2 * j])
                    acc.append(run)
                self._edge_prefix = acc
        pre = self._edge_prefix
        return pre[min(edges, len(pre) - 1)]

    def _waterfill(self, counts: np.ndarray, r: int) -> int:
        """Min extra sum_e C(m_e,2) from adding r more k-sets to `counts`."""
        if r <= 0:
            return 0
        slots = r * self.k
        marg = (counts[:, None] + np.arange(r, dtype=np.int64)[None, :]).ravel()
        if slots >= marg.size:
            return int(marg.sum())
        return int(np.partition(marg, slots - 1)[:slots].sum())

    # -- shared state ------------------------------------------------------

    def _limit(self) -> int:
        return self.best if self.witness is None else self.best - 1

    def _record(self, value: int, tup: list[int]):
        if value < self.best or (value == self.best and self.witness is None):
            self.best = value
            self.witness = tuple(tup)
            if self.stop_first:
                self.done = True

    # -- minimize ----------------------------------------------------------

    def minimize(
        self, ub: int, *, stop_at_first: bool = False
    ) -> tuple[int, tuple[int, ...]] | None:
        """Exact minimum over q-subsets with value <= ub; None when none."""
        if self.q > self.m:
            raise ParameterError(f"cannot pick {self.q} of {self.m} items")
        self.best = ub
        self.witness: tuple[int, ...] | None = None
        self.stop_first = stop_at_first
        self.done = False
        self.collect: list[tuple[int, ...]] | None = None
        self.collect_cap = 0

        if self.q == 0:
            return (self.p0, ()) if self.p0 <= ub else None
        cand = np.arange(self.m, dtype=np.int64)
        cross = self.base_cross.copy()
        if self.q == 1:
            vals = self.p0 + cross
            j = int(np.argmin(vals))
            v = int(vals[j])
            return (v, (j,)) if v <= ub else None
        counts = self.counts0.copy()
        self._dfs([], self.p0, counts, cand, cross)
        if self.witness is None:
            return None
        return self.best, self.witness

    def enumerate_below(self, limit: int, cap: int) -> list[tuple[int, ...]]:
        """All q-subsets with value <= limit, in lexicographic order."""
        from .setcore import CapExceeded

        if self.q > self.m:
            return []
        self.best = limit
        self.witness = None
        self.stop_first = False
        self.done = False
        self.collect = []
        self.collect_cap = cap
        self._cap_error = CapExceeded
        if self.q == 0:
            return [()] if self.p0 <= limit else []
        cand = np.arange(self.m, dtype=np.int64)
        cross = self.base_cross.copy()
        if self.q == 1:
            vals = self.p0 + cross
            out = [(int(j),) for j in np.nonzero(vals <= limit)[0]]
            if len(out) > cap:
                raise CapExceeded(f"{len(out)} tuples exceed cap {cap}")
            return out
        counts = self.counts0.copy()
        self._dfs([], self.p0, counts, cand, cross)
        return self.collect

    def _emit(self, tup: list[int]):
        self.collect.append(tuple(tup))
        if len(self.collect) > self.collect_cap:
            raise self._cap_error(
                f"more than {self.collect_cap} qualifying tuples; raise the cap"
            )

    def _dfs(
        self,
        chosen: list[int],
        p: int,
        counts: np.ndarray,
        cand: np.ndarray,
        cross: np.ndarray,
    ):
        if self.done:
            return
        q_rem = self.q - len(chosen)
        if q_rem == 2:
            self._base(chosen, p, cand, cross)
            return
        limit = self._limit()
        edge_next = binomial(q_rem - 1, 2)
        for pos in range(len(cand) - q_rem + 1):
            if self.done:
                return
            limit = self._limit()
            c = int(cand[pos])
            p2 = p + int(cross[pos])
            if p2 + self._edge_lb(edge_next) > limit:
                continue
            eidx = self.elem_idx[c]
            counts[eidx] += 1
            if p2 + self._waterfill(counts, q_rem - 1) > limit:
                counts[eidx] -= 1
                continue
            rest = cand[pos + 1 :]
            rcross = cross[pos + 1 :] + self.W[c, rest].astype(np.int64)
            keep = p2 + rcross + self._edge_lb(binomial(q_rem - 2, 2)) <= limit
            self._dfs(chosen + [c], p2, counts, rest[keep], rcross[keep])
            counts[eidx] -= 1

    def _base(self, chosen: list[int], p: int, cand: np.ndarray, cross: np.ndarray):
        """Closing two slots: vectorised scan of the candidate submatrix."""
        limit = self._limit()
        budget = limit - p
        if budget < 0 or len(cand) < 2:
            return
        if len(cand) > 2:
            smallest = int(np.partition(cross, 0)[0])
            keep = cross + smallest <= budget
            sub_idx = cand[keep]
            sub_cross = cross[keep]
        else:
            sub_idx, sub_cross = cand, cross
        ms = len(sub_idx)
        if ms < 2:
            return
        col = np.arange(ms)
        chunk = max(1, min(ms, (1 << 22) // ms))
        for r0 in range(0, ms, chunk):
            if self.done:
                return
            limit = self._limit()
            budget = limit - p
            r1 = min(ms, r0 + chunk)
            block = self.W[sub_idx[r0:r1]][:, sub_idx].astype(np.int64)
            block += sub_cross[r0:r1, None] + sub_cross[None, :]
            block[col[None, :] <= np.arange(r0, r1)[:, None]] = _BIG
            if self.collect is not None:
                for li, j in np.argwhere(block <= budget):
                    self._emit(chosen + [int(sub_idx[r0 + li]), int(sub_idx[j])])
                continue
            bmin = int(block.min()) if block.size else int(_BIG)
            if bmin > budget:
                continue
            li, j = np.argwhere(block == bmin)[0]
            self._record(p + bmin, chosen + [int(sub_idx[r0 + li]), int(sub_idx[j])])

    # -- exhaustive twin ----------------------------------------------------

    def exhaustive_min(self) -> tuple[int, tuple[int, ...]]:
        """Exact minimum by plain enumeration (no pruning), lex witness."""
        if self.q > self.m:
            raise ParameterError(f"cannot pick {self.q} of {self.m} items")
        best: int | None = None
        witness: tuple[int, ...] | None = None
        col = None

        def rec(chosen: list[int], p: int, cand: np.ndarray, cross: np.ndarray):
            nonlocal best, witness
            q_rem = self.q - len(chosen)
            if q_rem == 1:
                vals = p + cross
                j = int(np.argmin(vals))
                v = int(vals[j])
                if best is None or v < best:
                    best, witness = v, tuple(chosen + [int(cand[j])])
                return
            if q_rem == 2:
                ms = len(cand)
                if ms < 2:
                    return
                block = self.W[cand][:, cand].astype(np.int64)
                block += cross[:, None] + cross[None, :]
                block[np.triu(np.ones((ms, ms), dtype=bool)).T] = _BIG
                v = int(block.min())
                if best is None or v + p < best:
                    i, j = np.argwhere(block == v)[0]
                    best, witness = v + p, tuple(chosen + [int(cand[i]), int(cand[j])])
                return
            for pos in range(len(cand) - q_rem + 1):
                c = int(cand[pos])
                rest = cand[pos + 1 :]
                rcross = cross[pos + 1 :] + self.W[c, rest].astype(np.int64)
                rec(chosen + [c], p + int(cross[pos]), rest, rcross)

        if self.q == 0:
            return self.p0, ()
        rec([], self.p0, np.arange(self.m, dtype=np.int64), self.base_cross.copy())
        assert best is not None and witness is not None
        return best, witness


def _tuple_value(W: np.ndarray, idx: list[int]) -> int:
    total = 0
    for a, b in itertools.combinations(idx, 2):
        total += int(W[a, b])
    return total


def _seed_upper_bound(W: np.ndarray, ell: int) -> int:
    """Value of two cheap heuristic tuples; any achievable value works."""
    m = W.shape[0]
    rowsums = W.sum(axis=1, dtype=np.int64)
    by_rowsum = sorted(np.argsort(rowsums, kind="stable")[:ell].tolist())
    v1 = _tuple_value(W, by_rowsum)
    # greedy growth from the globally lightest pair
    best_pair, best_w = (0, 1), None
    for i in range(m - 1):
        row = W[i, i + 1 :]
        j = int(np.argmin(row))
        w = int(row[j])
        if best_w is None or w < best_w:
            best_w, best_pair = w, (i, i + 1 + j)
    S = list(best_pair)
    cross = W[S[0]].astype(np.int64) + W[S[1]].astype(np.int64)
    while len(S) < ell:
        cross_masked = cross.copy()
        cross_masked[S] = _BIG
        c = int(np.argmin(cross_masked))
        S.append(c)
        cross += W[c].astype(np.int64)
    v2 = _tuple_value(W, sorted(S))
    return min(v1, v2)


def min_pairsum(
    family: Family, ell: int, *, exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP
) -> tuple[int, tuple[int, ...]]:
    """Exact minimum pair-sum over all ell-subsets of the family.

    Returns (value, witness) with the lexicographically least witness among
    all minimisers.  Dispatch: plain enumeration while C(m, ell) stays within
    ``exhaustive_cap``, branch-and-bound beyond it.
    """
    m = len(family)
    if ell < 2:
        raise ParameterError(f"ell must be >= 2, got {ell}")
    if m < ell:
        raise ParameterError(f"family has {m} members, fewer than ell={ell}")
    W = weight_matrix(family)
    elem_idx = element_index_arrays(family)
    n, k = family.params.n, family.params.k
    if m == ell:
        idx = list(range(m))
        return _tuple_value(W, idx), tuple(idx)
    search = _TupleSearch(W, elem_idx, n, k, ell)
    if binomial(m, ell) <= exhaustive_cap:
        return search.exhaustive_min()
    res = search.minimize(_seed_upper_bound(W, ell))
    assert res is not None  # the seed value is achieved by an actual tuple
    return res


def check_condition(
    family: Family,
    spec: ConditionSpec,
    *,
    exact: bool = False,
    exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP,
) -> CheckResult:
    """Certify the condition or return the minimising Violation.

    Default mode proves/refutes "min pair-sum >= threshold" (the pigeonhole
    bound may settle it without search); pass exact=True to force the exact
    minimum even when the family is certified.  Violations always carry the
    exact minimum and its lexicographically least witness.
    """
    thr = threshold(spec)
    m = len(family)
    ell = 2 if spec.variant is Variant.PAIRWISE_T else spec.ell

    if m < ell:
        return CheckResult(
            ok=True, threshold=thr, min_pairsum=None, witness=None, exact=False,
            lower_bound=None, reason=f"vacuous: {m} member(s), fewer than ell={ell}",
        )
    if thr <= 0 and not exact:
        return CheckResult(
            ok=True, threshold=thr, min_pairsum=None, witness=None, exact=False,
            lower_bound=0, reason="pair-sums are nonnegative, threshold is not positive",
        )
    if exact or spec.variant is Variant.PAIRWISE_T:
        value, witness = min_pairsum(family, ell, exhaustive_cap=exhaustive_cap)
        if value >= thr:
            return CheckResult(
                ok=True, threshold=thr, min_pairsum=value, witness=witness,
                exact=True, lower_bound=value, reason="exact minimum computed",
            )
        viol = Violation(indices=witness, pair_sum=value, threshold=thr)
        return CheckResult(
            ok=False, threshold=thr, min_pairsum=value, witness=witness,
            exact=True, lower_bound=value, reason="minimising tuple falls short",
            violation=viol,
        )

    n, k = family.params.n, family.params.k
    plb = pigeonhole_bound(n, k, ell)
    if plb >= thr:
        return CheckResult(
            ok=True, threshold=thr, min_pairsum=None, witness=None, exact=False,
            lower_bound=plb,
            reason=f"pigeonhole: any {ell} k-sets in [{n}] have pair-sum >= {plb}",
        )
    W = weight_matrix(family)
    search = _TupleSearch(W, element_index_arrays(family), n, k, ell)
    res = search.minimize(thr - 1)
    if res is None:
        return CheckResult(
            ok=True, threshold=thr, min_pairsum=None, witness=None, exact=False,
            lower_bound=thr, reason="branch-and-bound found no tuple below threshold",
        )
    value, witness = res
    viol = Violation(indices=witness, pair_sum=value, threshold=thr)
    return CheckResult(
        ok=False, threshold=thr, min_pairsum=value, witness=witness, exact=True,
        lower_bound=value, reason="minimising tuple falls short", violation=viol,
    )
