"""Exact maximum-family search and exporters to LP / DIMACS formats.

The solver walks candidates (all k-sets of [n], lexicographic) with an
include/exclude branch-and-bound.  The running invariant: every remaining
candidate is individually compatible with the chosen prefix — adding it
creates no ell-tuple below threshold.  Including a candidate c therefore only
has to re-test tuples through BOTH c and each survivor d, which keeps the
filter incremental.  Heredity (subfamilies of feasible families are feasible)
makes this sufficient.

For pairwise-style conditions (PAIRWISE_T, or any variant at ell = 2) the
condition degenerates to a conflict graph and the solver runs exact maximum
independent set instead (clique on the compatibility graph with a greedy
clique-cover bound).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from ._bitops import element_index_arrays, weight_matrix
from .conditions import (
    ConditionSpec,
    Variant,
    _TupleSearch,
    check_condition,
    pigeonhole_bound,
    threshold,
)
from .setcore import (
    DEFAULT_ENUM_CAP,
    Family,
    GroundParams,
    KSet,
    ParameterError,
    enumerate_ksets,
)

DEFAULT_TUPLE_CAP = 10**6


@dataclass(frozen=True)
class SearchOptions:
    """Knobs for max_family.  time_limit/node_cap of 0 mean unlimited."""

    time_limit: float = 0.0
    incumbent: Family | None = None
    node_cap: int = 0
    symmetry: str = "none"  # "none" | "element-order"
    exhaustive_threshold: int = 24
    exhaustive: bool = False
    enum_cap: int = DEFAULT_ENUM_CAP

    def __post_init__(self):
        if self.symmetry not in ("none", "element-order"):
            raise ParameterError(
                f"symmetry must be 'none' or 'element-order', got {self.symmetry!r}"
            )
        if self.time_limit < 0 or self.node_cap < 0:
            raise ParameterError("time_limit and node_cap must be >= 0")


@dataclass(frozen=True)
class SearchResult:
    best: Family
    size: int
    optimal: bool
    nodes: int
    elapsed: float
    bound: int


# ---------------------------------------------------------------------------
# incremental feasibility (public pruning kernel)
# ---------------------------------------------------------------------------


class SearchState:
    """Chosen members plus their pairwise-intersection matrix, grown one
    member at a time; the solver's pruning kernel and a public building block
    for custom searches."""

    def __init__(self, params: GroundParams, spec: ConditionSpec):
        self.params = params
        self.spec = spec
        self.threshold = threshold(spec)
        self.ell = 2 if spec.variant is Variant.PAIRWISE_T else spec.ell
        self.chosen: list[KSet] = []
        self._w: list[list[int]] = []  # pairwise intersection sizes

    def _cross(self, candidate: KSet) -> list[int]:
        return [(candidate.mask & ks.mask).bit_count() for ks in self.chosen]

    def feasible(self, candidate: KSet) -> bool:
        """True iff no ell-tuple made of the candidate plus ell-1 chosen
        members has pair-sum below the threshold."""
        if candidate.n != self.params.n or len(candidate) != self.params.k:
            raise ParameterError("candidate does not match the ground parameters")
        thr = self.threshold
        if thr <= 0:
            return True
        q = self.ell - 1
        if len(self.chosen) < q:
            return True
        cross = self._cross(candidate)
        if q == 1:
            return min(cross) >= thr
        # min over (ell-1)-subsets S of chosen of pair_sum(S) + sum cross[S],
        # i.e. a restricted min-tuple search with the candidate as a virtual
        # prefix; stop as soon as anything dips below thr
        m = len(self.chosen)
        W = np.zeros((m, m), dtype=np.int16)
        for i in range(m):
            row = self._w[i]
            for j in range(i):
                W[i, j] = W[j, i] = row[j]
        counts0 = np.zeros(self.params.n, dtype=np.int64)
        for e in candidate.elements:
            counts0[e - 1] = 1
        elem_idx = [
            np.fromiter((e - 1 for e in ks.elements), dtype=np.int64)
            for ks in self.chosen
        ]
        engine = _TupleSearch(
            W, elem_idx, self.params.n, self.params.k, q,
            base_cross=np.array(cross, dtype=np.int64), counts0=counts0,
        )
        return engine.minimize(thr - 1, stop_at_first=True) is None

    def add(self, member: KSet):
        cross = self._cross(member)
        self._w.append(cross)
        self.chosen.append(member)


def incremental_feasible(state: SearchState, candidate: KSet) -> bool:
    """True iff every ell-tuple containing the candidate and ell-1 chosen
    members meets the threshold (earlier tuples hold by heredity)."""
    return state.feasible(candidate)


# ---------------------------------------------------------------------------
# max_family
# ---------------------------------------------------------------------------


class _Deadline:
    def __init__(self, time_limit: float, node_cap: int):
        self.t0 = time.monotonic()
        self.deadline = self.t0 + time_limit if time_limit > 0 else None
        self.node_cap = node_cap
        self.nodes = 0
        self.hit = False

    def tick(self) -> bool:
        """Count a node; returns True when a cap has been hit."""
        self.nodes += 1
        if self.node_cap and self.nodes >= self.node_cap:
            self.hit = True
        elif self.deadline is not None and self.nodes % 256 == 0:
            if time.monotonic() > self.deadline:
                self.hit = True
        return self.hit

    def elapsed(self) -> float:
        return time.monotonic() - self.t0


def _universe(params: GroundParams, cap: int) -> Family:
    members = list(enumerate_ksets(params, cap))
    return Family(params, tuple(members))


def _pairwise_threshold(spec: ConditionSpec) -> int | None:
    """The per-pair intersection bound when the condition degenerates to one
    (PAIRWISE_T always; the ell-variants exactly when ell = 2)."""
    if spec.variant is Variant.PAIRWISE_T or spec.ell == 2:
        return threshold(spec)
    return None


def _mis_search(
    W: np.ndarray, need_thr: int, dl: _Deadline, start_best: list[int], symmetry: str
) -> tuple[list[int], bool, int]:
    """Exact max independent set of the conflict graph (pairs with
    intersection < need_thr), as max clique on the compatibility graph.
    Returns (best indices, completed, open_bound)."""
    m = W.shape[0]
    compat = W >= need_thr
    np.fill_diagonal(compat, False)
    packed = np.packbits(compat, axis=1, bitorder="little")
    adj = [int.from_bytes(row.tobytes(), "little") for row in packed]
    full = (1 << m) - 1

    best = list(start_best)
    best_size = len(best)
    completed = True
    open_bound = 0

    def color_bound(cand: int) -> int:
        colors = 0
        rest = cand
        while rest:
            colors += 1
            avail = rest
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                rest &= ~low
                avail &= ~adj[v] & ~low
        return colors

    def dfs(chosen: list[int], cand: int):
        nonlocal best, best_size, completed, open_bound
        if dl.tick():
            completed = False
            open_bound = max(open_bound, len(chosen) + cand.bit_count())
            return
        if len(chosen) > best_size:
            best, best_size = list(chosen), len(chosen)
        rest = cand
        while rest:
            if len(chosen) + rest.bit_count() <= best_size:
                return
            if len(chosen) + color_bound(rest) <= best_size:
                return
            low = rest & -rest
            v = low.bit_length() - 1
            rest &= ~low
            dfs(chosen + [v], rest & adj[v])
            if dl.hit:
                open_bound = max(open_bound, len(chosen) + 1 + rest.bit_count())
                return

    if symmetry == "element-order" and m > 0:
        dfs([0], adj[0] & ~1)
    else:
        dfs([], full)
    return best, completed, open_bound


def max_family(
    params: GroundParams, spec: ConditionSpec, opts: SearchOptions | None = None
) -> SearchResult:
    """Largest family of k-sets of [n] satisfying the condition, exactly.

    Branch-and-bound in lexicographic candidate order; with no caps binding
    the result is optimal and is the lexicographically least maximum family
    (under symmetry="element-order", the least one through {1..k}).  When
    time_limit or node_cap trips, optimal=False and bound is the weakest
    bound among unexplored branches.
    """
    opts = opts or SearchOptions()
    universe = _universe(params, opts.enum_cap)
    m = len(universe)
    thr = threshold(spec)
    ell = 2 if spec.variant is Variant.PAIRWISE_T else spec.ell
    dl = _Deadline(opts.time_limit, opts.node_cap)

    if opts.exhaustive and m > opts.exhaustive_threshold:
        raise ParameterError(
            f"exhaustive mode needs binomial(n,k) <= {opts.exhaustive_threshold}, "
            f"got {m}"
        )

    incumbent_idx: list[int] = []
    if opts.incumbent is not None:
        inc = opts.incumbent
        if inc.params != params:
            raise ParameterError("incumbent family has different ground parameters")
        res = check_condition(inc, spec)
        if not res.ok:
            raise ParameterError(
                f"infeasible incumbent: pair-sum {res.min_pairsum} < {res.threshold} "
                f"at indices {res.witness}"
            )
        pos = {ks.mask: i for i, ks in enumerate(universe)}
        incumbent_idx = sorted(pos[ks.mask] for ks in inc)

    # vacuous conditions: everything fits
    if thr <= 0 or m < ell or pigeonhole_bound(params.n, params.k, ell) >= thr:
        return SearchResult(
            best=universe, size=m, optimal=True, nodes=0,
            elapsed=dl.elapsed(), bound=m,
        )

    pair_thr = _pairwise_threshold(spec)
    if pair_thr is not None:
        W = weight_matrix(universe)
        best_idx, completed, open_bound = _mis_search(
            W, pair_thr, dl, incumbent_idx, opts.symmetry
        )
        best_fam = universe.subfamily(best_idx)
        bound = len(best_idx) if completed else max(len(best_idx), open_bound)
        return SearchResult(
            best=best_fam, size=len(best_idx), optimal=completed,
            nodes=dl.nodes, elapsed=dl.elapsed(), bound=bound,
        )

    # general ell >= 3 search
    W = weight_matrix(universe)

    best_idx = list(incumbent_idx)
    best_size = len(best_idx)
    completed = True
    open_bound = 0
    use_bound = not opts.exhaustive

    def include_filter(chosen: list[int], c: int, cand: list[int]) -> list[int]:
        """Survivors d of cand: no bad tuple through c, d and ell-2 chosen."""
        if len(chosen) + 1 < ell - 1:  # even with c and d there is no full tuple
            return cand
        q = ell - 2
        if q == 1:
            # tuple = (e, c, d): need W[e,c] + W[e,d] + W[c,d] >= thr for all e
            ch = np.array(chosen, dtype=np.int64)
            cd = np.array(cand, dtype=np.int64)
            lhs = (
                W[np.ix_(ch, cd)].astype(np.int64)
                + W[ch, c][:, None].astype(np.int64)
                + W[c, cd][None, :].astype(np.int64)
            )
            ok = (lhs >= thr).all(axis=0)
            return [d for d, good in zip(cand, ok) if good]
        out = []
        ch = chosen
        for d in cand:
            good = True
            for sub in itertools.combinations(ch, q):
                s = int(W[c, d])
                for e in sub:
                    s += int(W[e, c]) + int(W[e, d])
                for a, b in itertools.combinations(sub, 2):
                    s += int(W[a, b])
                if s < thr:
                    good = False
                    break
            if good:
                out.append(d)
        return out

    def dfs(chosen: list[int], cand: list[int]):
        nonlocal best_idx, best_size, completed, open_bound
        if dl.tick():
            completed = False
            open_bound = max(open_bound, len(chosen) + len(cand))
            return
        if len(chosen) > best_size:
            best_idx, best_size = list(chosen), len(chosen)
        pos = 0
        while pos < len(cand):
            if use_bound and len(chosen) + len(cand) - pos <= best_size:
                return
            c = cand[pos]
            rest = cand[pos + 1 :]
            dfs(chosen + [c], include_filter(chosen, c, rest))
            if dl.hit:
                open_bound = max(open_bound, len(chosen) + len(rest))
                return
            pos += 1

    root_cand = list(range(m))
    if opts.symmetry == "element-order":
        dfs([0], include_filter([], 0, root_cand[1:]))
    else:
        dfs([], root_cand)

    best_fam = universe.subfamily(best_idx)
    bound = best_size if completed else max(best_size, open_bound)
    return SearchResult(
        best=best_fam, size=best_size, optimal=completed,
        nodes=dl.nodes, elapsed=dl.elapsed(), bound=bound,
    )


# ---------------------------------------------------------------------------
# bad-tuple enumeration and exporters
# ---------------------------------------------------------------------------


def enumerate_bad_tuples(
    params: GroundParams, spec: ConditionSpec, *, cap: int = DEFAULT_TUPLE_CAP
) -> tuple[Family, list[tuple[int, ...]]]:
    """The lex universe of k-sets plus every ell-tuple of it whose pair-sum
    misses the threshold, in lexicographic order.  CapExceeded beyond cap."""
    universe = _universe(params, DEFAULT_ENUM_CAP)
    thr = threshold(spec)
    ell = 2 if spec.variant is Variant.PAIRWISE_T else spec.ell
    if thr <= 0 or len(universe) < ell:
        return universe, []
    if pigeonhole_bound(params.n, params.k, ell) >= thr:
        return universe, []
    W = weight_matrix(universe)
    engine = _TupleSearch(
        W, element_index_arrays(universe), params.n, params.k, ell
    )
    return universe, engine.enumerate_below(thr - 1, cap)


def _format_header(universe: Family, spec: ConditionSpec, comment: str) -> list[str]:
    thr = threshold(spec)
    lines = [
        f"{comment} ekrf export: n={universe.params.n} k={universe.params.k} "
        f"variant={spec.variant.value} t={spec.t} ell={spec.ell} slack={spec.slack} "
        f"threshold={thr}",
        f"{comment} variable i (1-based) <-> k-set, lexicographic order:",
    ]
    for i, ks in enumerate(universe, start=1):
        lines.append(f"{comment} x{i} = {{{','.join(map(str, ks.elements))}}}")
    return lines


def export_ilp(
    params: GroundParams, spec: ConditionSpec, *, cap: int = DEFAULT_TUPLE_CAP
) -> str:
    """LP-format ILP: binary variable per k-set, maximize the count, one
    constraint sum(tuple) <= ell-1 per bad tuple."""
    universe, bad = enumerate_bad_tuples(params, spec, cap=cap)
    m = len(universe)
    lines = _format_header(universe, spec, "\\")
    lines.append("Maximize")
    names = [f"x{i}" for i in range(1, m + 1)]
    for i in range(0, m, 12):  # keep lines short for picky LP readers
        chunk = " + ".join(names[i : i + 12])
        prefix = " obj: " if i == 0 else "      + "
        lines.append(prefix + chunk)
    if bad:
        lines.append("Subject To")
        ell = len(bad[0])
        for ci, tup in enumerate(bad, start=1):
            body = " + ".join(f"x{i + 1}" for i in tup)
            lines.append(f" c{ci}: {body} <= {ell - 1}")
    lines.append("Binary")
    for i in range(0, m, 20):
        lines.append(" " + " ".join(names[i : i + 20]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def _totalizer(leaves: list[int], next_var: int) -> tuple[list[int], list[list[int]], int]:
    """Totalizer tree: returns (bits, clauses, next_var) where bits[p] is a
    variable equivalent to 'at least p+1 of the leaves are true' (both
    implication directions emitted)."""
    if len(leaves) == 1:
        return [leaves[0]], [], next_var
    half = len(leaves) // 2
    A, ca, next_var = _totalizer(leaves[:half], next_var)
    B, cb, next_var = _totalizer(leaves[half:], next_var)
    total = len(A) + len(B)
    R = list(range(next_var, next_var + total))
    next_var += total
    clauses = ca + cb
    for i in range(len(A) + 1):
        for j in range(len(B) + 1):
            if i + j >= 1:
                # >= direction: i from A and j from B force R_{i+j}
                cl = [R[i + j - 1]]
                if i > 0:
                    cl.append(-A[i - 1])
                if j > 0:
                    cl.append(-B[j - 1])
                clauses.append(cl)
            if i + j < total:
                # <= direction: R_{i+j+1} needs i+1 from A or j+1 from B
                cl = [-R[i + j]]
                if i < len(A):
                    cl.append(A[i])
                if j < len(B):
                    cl.append(B[j])
                clauses.append(cl)
    return R, clauses, next_var


def export_cnf(
    params: GroundParams,
    spec: ConditionSpec,
    target_size: int,
    *,
    cap: int = DEFAULT_TUPLE_CAP,
) -> str:
    """DIMACS CNF, satisfiable iff a feasible family of >= target_size k-sets
    exists: one negative clause per bad ell-tuple plus a totalizer encoding
    of the cardinality bound."""
    universe, bad = enumerate_bad_tuples(params, spec, cap=cap)
    m = len(universe)
    clauses: list[list[int]] = [[-(i + 1) for i in tup] for tup in bad]
    next_var = m + 1
    if target_size > m:
        clauses.append([])  # unsatisfiable on its face
    elif target_size > 0:
        bits, tclauses, next_var = _totalizer(list(range(1, m + 1)), next_var)
        clauses.extend(tclauses)
        clauses.append([bits[target_size - 1]])
    header = _format_header(universe, spec, "c")
    header.append(f"c decision: exists a feasible family of size >= {target_size}")
    lines = header
    lines.append(f"p cnf {next_var - 1} {len(clauses)}")
    for cl in clauses:
        lines.append(" ".join(map(str, cl + [0])))
    return "\n".join(lines) + "\n"
