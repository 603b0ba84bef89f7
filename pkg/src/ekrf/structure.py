"""Structural analyzers: intersecting predicates, matchings, sunflowers,
kernel decompositions, and the three-step audit used on certified families.

Exact and deterministic throughout.  Witnesses are lexicographically least:
pair predicates scan pairs in row-major index order, sunflower kernels are
tried in ascending element order, and clique witnesses come from include-first
depth-first search over member indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ._bitops import mask_words, weight_matrix
from .setcore import EkrfError, Family, GroundParams, ParameterError


class AuditFailure(EkrfError):
    """Raised by lemma_audit(strict=True) when a structural check fails."""


# ---------------------------------------------------------------------------
# pair predicates
# ---------------------------------------------------------------------------


def is_t_intersecting(family: Family, t: int) -> tuple[int, int] | None:
    """None if every pair of members meets in >= t elements, else the
    lexicographically least violating index pair (i, j)."""
    if t < 0:
        raise ParameterError(f"t must be >= 0, got {t}")
    m = len(family)
    if t == 0 or m < 2:
        return None
    W = weight_matrix(family)
    bad = np.triu(W < t, k=1)
    hits = np.argwhere(bad)
    if len(hits) == 0:
        return None
    i, j = hits[0]
    return int(i), int(j)


def _cross_weights(A: Family, B: Family) -> np.ndarray:
    """|A_i ∩ B_j| for all pairs, as an int16 (|A|, |B|) matrix."""
    wa = mask_words(A.masks())
    wb = mask_words(B.masks())
    out = np.zeros((len(A), len(B)), dtype=np.int16)
    if len(A) == 0 or len(B) == 0:
        return out
    chunk = max(1, min(len(A), (1 << 24) // max(1, len(B))))
    for r0 in range(0, len(A), chunk):
        r1 = min(len(A), r0 + chunk)
        inter = wa[r0:r1, None, :] & wb[None, :, :]
        out[r0:r1] = np.bitwise_count(inter).sum(axis=2, dtype=np.int16)
    return out


def is_cross_intersecting(A: Family, B: Family, r: int) -> tuple[int, int] | None:
    """None if |A_i ∩ B_j| >= r for every pair (A_i from A, B_j from B),
    else the lexicographically least violating (i, j)."""
    if A.params.n != B.params.n:
        raise ParameterError(
            f"ground-set mismatch: n={A.params.n} vs n={B.params.n}"
        )
    if r <= 0 or len(A) == 0 or len(B) == 0:
        return None
    CW = _cross_weights(A, B)
    hits = np.argwhere(CW < r)
    if len(hits) == 0:
        return None
    i, j = hits[0]
    return int(i), int(j)


# ---------------------------------------------------------------------------
# bitset max-clique machinery (shared by matching_number / find_sunflower)
# ---------------------------------------------------------------------------


def _bitset_rows(adj_bool: np.ndarray) -> list[int]:
    packed = np.packbits(adj_bool, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _color_bound(cand: int, adj: list[int]) -> int:
    """Greedy clique-cover size of cand: an upper bound on any clique in it."""
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


def _greedy_clique(adj: list[int], m: int) -> list[int]:
    best: list[int] = []
    for start in range(m):
        clique = [start]
        cand = adj[start] & ~((1 << (start + 1)) - 1)  # only higher indices
        while cand:
            v = (cand & -cand).bit_length() - 1
            clique.append(v)
            cand &= adj[v]
        if len(clique) > len(best):
            best = clique
        if len(best) > m // 2:  # cannot do much better cheaply
            break
    return best


def _max_clique_size(adj: list[int], m: int, seed: int) -> int:
    best = seed

    def expand(depth: int, cand: int):
        nonlocal best
        if depth > best:
            best = depth
        while cand:
            if depth + _color_bound(cand, adj) <= best:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand &= ~low
            nxt = cand & adj[v]
            if depth + 1 + nxt.bit_count() > best or depth + 1 > best:
                expand(depth + 1, nxt)

    expand(0, (1 << m) - 1)
    return best


def _lex_clique(adj: list[int], cand: int, target: int) -> list[int] | None:
    """Lexicographically least clique of exactly `target` vertices within
    cand, or None.  Include-first DFS in index order."""
    if target == 0:
        return []

    def dfs(chosen: list[int], cand: int) -> list[int] | None:
        need = target - len(chosen)
        if need == 0:
            return chosen
        if cand.bit_count() < need:
            return None
        rest = cand
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest &= ~low
            if 1 + (rest & adj[v]).bit_count() >= need:
                got = dfs(chosen + [v], rest & adj[v])
                if got is not None:
                    return got
            if rest.bit_count() < need:
                return None
        return None

    return dfs([], cand)


def _disjointness_bitsets(family: Family, equal: int) -> list[int]:
    """Adjacency bitsets of the graph joining members whose intersection size
    equals `equal` exactly (diagonal excluded)."""
    W = weight_matrix(family)
    adj_bool = W == equal
    np.fill_diagonal(adj_bool, False)
    return _bitset_rows(adj_bool)


def matching_number(family: Family) -> tuple[int, tuple[int, ...]]:
    """Exact maximum number of pairwise disjoint members, with the
    lexicographically least maximum witness (via max clique on the
    disjointness graph: greedy seed, clique-cover bound)."""
    m = len(family)
    if m == 0:
        raise ParameterError("matching_number needs a nonempty family")
    adj = _disjointness_bitsets(family, 0)
    seed = _greedy_clique(adj, m)
    nu = _max_clique_size(adj, m, len(seed))
    witness = _lex_clique(adj, (1 << m) - 1, nu)
    assert witness is not None
    return nu, tuple(witness)


# ---------------------------------------------------------------------------
# sunflowers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sunflower:
    """u members of the host family whose pairwise intersections all equal
    the kernel; petals (member - kernel) are pairwise disjoint."""

    kernel: tuple[int, ...]
    member_indices: tuple[int, ...]
    petal_count: int


def find_sunflower(family: Family, t: int, u: int) -> Sunflower | None:
    """First sunflower (lexicographically least kernel, then least member
    tuple) with kernel size exactly t and u petals; None when none exists.

    Kernel candidates are the t-subsets of the union of members contained in
    at least u members; petals are found as a u-clique in the graph joining
    hosts whose intersection is exactly the kernel.
    """
    k = family.params.k
    if not (0 <= t < k):
        raise ParameterError(f"need 0 <= t < k, got t={t} k={k}")
    if u < 1:
        raise ParameterError(f"need u >= 1, got u={u}")
    m = len(family)
    if m < u:
        return None
    um = family.union_mask()
    union = [e + 1 for e in range(family.params.n) if um >> e & 1]
    masks = family.masks()
    for kernel in itertools.combinations(union, t):
        t_mask = 0
        for e in kernel:
            t_mask |= 1 << (e - 1)
        hosts = [i for i in range(m) if masks[i] & t_mask == t_mask]
        if len(hosts) < u:
            continue
        sub = family.subfamily(hosts)  # canonical order preserved (hosts ascending)
        adj = _disjointness_bitsets(sub, t)
        clique = _lex_clique(adj, (1 << len(hosts)) - 1, u)
        if clique is None:
            continue
        indices = tuple(hosts[i] for i in clique)
        # re-verify the sunflower invariants before returning
        for a, b in itertools.combinations(indices, 2):
            if masks[a] & masks[b] != t_mask:
                raise EkrfError("internal error: clique is not a sunflower")
        return Sunflower(kernel=kernel, member_indices=indices, petal_count=u)
    return None


# ---------------------------------------------------------------------------
# kernel decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """Partition of a family by a kernel T: members containing T (f_T); for
    each a in T, members containing T-{a} but not a (f_minus[a]); and the
    leftover meeting T in fewer than |T|-1 elements."""

    kernel: tuple[int, ...]
    f_T: Family
    f_minus: dict[int, Family]
    leftover: Family
    f_T_indices: tuple[int, ...] = field(default=())
    f_minus_indices: dict[int, tuple[int, ...]] = field(default_factory=dict)
    leftover_indices: tuple[int, ...] = field(default=())


def kernel_decompose(family: Family, kernel) -> Decomposition:
    """Classify every member by how it meets the kernel T (|T| = t >= 1):
    contains T, misses exactly one a in T, or meets T in < t-1 elements."""
    given = tuple(kernel)
    T = tuple(sorted(set(given)))
    n = family.params.n
    if len(T) < 1:
        raise ParameterError("kernel must have at least one element")
    if len(T) != len(given):
        raise ParameterError(f"kernel has repeated elements: {given}")
    for e in T:
        if not (1 <= e <= n):
            raise ParameterError(f"kernel element {e} outside [1..{n}]")
    t = len(T)
    t_mask = 0
    for e in T:
        t_mask |= 1 << (e - 1)
    in_T, minus, left = [], {a: [] for a in T}, []
    for i, ks in enumerate(family):
        hit = ks.mask & t_mask
        c = hit.bit_count()
        if c == t:
            in_T.append(i)
        elif c == t - 1:
            a = (t_mask & ~hit).bit_length()  # the one missing element
            minus[a].append(i)
        else:
            left.append(i)
    params = family.params
    return Decomposition(
        kernel=T,
        f_T=family.subfamily(in_T),
        f_minus={a: family.subfamily(minus[a]) for a in T},
        leftover=family.subfamily(left),
        f_T_indices=tuple(in_T),
        f_minus_indices={a: tuple(minus[a]) for a in T},
        leftover_indices=tuple(left),
    )


# ---------------------------------------------------------------------------
# lemma audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditCheck:
    name: str
    passed: bool
    witness: tuple | None
    detail: str


@dataclass(frozen=True)
class AuditReport:
    """Outcome of the three-step structural audit.

    case 1: a sunflower with kernel size t and 2k+ell-2 petals was found and
    the three checks ran; case 2: no such sunflower (checks not applicable,
    ``passed`` is None)."""

    case: int
    required_petals: int
    sunflower: Sunflower | None
    kernel: tuple[int, ...] | None
    checks: tuple[AuditCheck, ...]
    passed: bool | None


def _residual_family(part: Family, kernel_minus_a: tuple[int, ...]) -> Family:
    """Members of part with the (t-1)-set they all contain stripped off."""
    n = part.params.n
    k_res = part.params.k - len(kernel_minus_a)
    drop = set(kernel_minus_a)
    lists = [tuple(e for e in ks.elements if e not in drop) for ks in part]
    return Family.from_element_lists(n, k_res, lists)


def lemma_audit(family: Family, t: int, ell: int, *, strict: bool = False) -> AuditReport:
    """Audit the structure a certified family must have around a big sunflower.

    Finds a sunflower with kernel size t and u = 2k+ell-2 petals (case 2
    report if none), then checks against its kernel T:
      (i)   every member meets T in >= t-1 elements (leftover empty);
      (ii)  each f_minus[a] is (t+ell-3)-intersecting;
      (iii) the residual families (members minus T) of distinct f_minus parts
            are pairwise (ell-1)-cross-intersecting.
    strict=True turns any failed check into an AuditFailure (the checks are
    theorems for families satisfying the eq4-style condition, so a failure
    there means an implementation bug or an out-of-hypothesis family).
    """
    if ell < 3:
        raise ParameterError(f"ell must be >= 3, got {ell}")
    k = family.params.k
    u_req = 2 * k + ell - 2
    sf = find_sunflower(family, t, u_req)
    if sf is None:
        return AuditReport(
            case=2, required_petals=u_req, sunflower=None, kernel=None,
            checks=(), passed=None,
        )
    T = sf.kernel
    dec = kernel_decompose(family, T)
    checks: list[AuditCheck] = []

    if dec.leftover_indices:
        w = dec.leftover_indices[0]
        checks.append(AuditCheck(
            "kernel-meeting", False, (w,),
            f"member #{w} {family[w]} meets kernel {T} in < {t - 1} elements",
        ))
    else:
        checks.append(AuditCheck(
            "kernel-meeting", True, None,
            f"all {len(family)} members meet kernel {T} in >= {t - 1} elements",
        ))

    r2 = t + ell - 3
    bad2 = None
    for a in T:
        pair = is_t_intersecting(dec.f_minus[a], r2)
        if pair is not None:
            gi = dec.f_minus_indices[a][pair[0]]
            gj = dec.f_minus_indices[a][pair[1]]
            bad2 = (a, gi, gj)
            break
    if bad2 is None:
        checks.append(AuditCheck(
            "residual-intersecting", True, None,
            f"each part avoiding one kernel element is {r2}-intersecting",
        ))
    else:
        checks.append(AuditCheck(
            "residual-intersecting", False, bad2,
            f"part avoiding {bad2[0]}: members #{bad2[1]}, #{bad2[2]} "
            f"intersect in < {r2} elements",
        ))

    r3 = ell - 1
    bad3 = None
    for a, b in itertools.combinations(T, 2):
        Ra = _residual_family(dec.f_minus[a], tuple(e for e in T if e != a))
        Rb = _residual_family(dec.f_minus[b], tuple(e for e in T if e != b))
        pair = is_cross_intersecting(Ra, Rb, r3)
        if pair is not None:
            gi = dec.f_minus_indices[a][pair[0]]
            gj = dec.f_minus_indices[b][pair[1]]
            bad3 = (a, b, gi, gj)
            break
    if bad3 is None:
        checks.append(AuditCheck(
            "cross-intersecting", True, None,
            f"residual parts are pairwise {r3}-cross-intersecting"
            + (" (single part, vacuous)" if len(T) < 2 else ""),
        ))
    else:
        checks.append(AuditCheck(
            "cross-intersecting", False, bad3,
            f"residuals of parts avoiding {bad3[0]} and {bad3[1]}: members "
            f"#{bad3[2]}, #{bad3[3]} cross-intersect in < {r3} elements",
        ))

    report = AuditReport(
        case=1, required_petals=u_req, sunflower=sf, kernel=T,
        checks=tuple(checks), passed=all(c.passed for c in checks),
    )
    if strict and report.passed is False:
        failed = ", ".join(c.name for c in checks if not c.passed)
        raise AuditFailure(f"lemma audit failed: {failed}")
    return report
