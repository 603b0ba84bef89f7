"""Candidate-extremal families and the closed-form bounds/profiles they meet.

The two main generators build a family out of two groups anchored at concrete
elements (element 1 and an interval of small elements):

  construct_thm6(n, k, t, ell):
      A = all k-sets containing [1..t]
      B = all k-sets containing [2..t+ell-2] but not element 1
  construct_thm8(n, k, ell, s):   (the t = 1 shape with a shortened interval)
      A = all k-sets containing element 1
      B = all k-sets containing [2..ell-s-1] but not element 1

The profiles f/g give, for each split x (members taken from group A) of an
ell-tuple, the minimum possible pair-sum; their integer minima are how the
constructions match the condition thresholds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .setcore import (
    DEFAULT_ENUM_CAP,
    Family,
    GroundParams,
    KSet,
    ParameterError,
    binomial,
)


def _require(ok: bool, ineq: str):
    if not ok:
        raise ParameterError(f"hypothesis violated: {ineq}")


def _sets_with_core(
    n: int, k: int, core: tuple[int, ...], forbidden: tuple[int, ...], cap: int
) -> list[KSet]:
    """All k-sets of [n] containing `core` and avoiding `forbidden`."""
    banned = set(core) | set(forbidden)
    pool = [e for e in range(1, n + 1) if e not in banned]
    need = k - len(core)
    if binomial(len(pool), need) > cap:
        raise ParameterError(
            f"group of binomial({len(pool)},{need}) sets exceeds cap {cap}"
        )
    out = []
    for extra in itertools.combinations(pool, need):
        out.append(KSet.from_elements(core + extra, n))
    return out


def construct_thm6(n: int, k: int, t: int, ell: int, *, cap: int = DEFAULT_ENUM_CAP) -> Family:
    """Two-group family: k-sets over [t], plus k-sets over [2..t+ell-2] avoiding 1.

    Size is binomial(n-t, k-t) + binomial(n-t-ell+2, k-t-ell+3), the t6 bound.
    """
    _require(1 <= t, "1 <= t")
    _require(3 <= ell, "3 <= ell")
    _require(t + ell - 2 <= k, "t + ell - 2 <= k")
    _require(k <= n, "k <= n")
    _require(n >= k + t + ell - 3, "n >= k + t + ell - 3 (both groups nonempty)")
    core_a = tuple(range(1, t + 1))
    core_b = tuple(range(2, t + ell - 1))  # the interval [2, t+ell-2]
    group_a = _sets_with_core(n, k, core_a, (), cap)
    group_b = _sets_with_core(n, k, core_b, (1,), cap)
    return Family.from_members(GroundParams(n, k), group_a + group_b)


def construct_thm8(n: int, k: int, ell: int, s: int, *, cap: int = DEFAULT_ENUM_CAP) -> Family:
    """Two-group family: k-sets containing 1, plus k-sets over [2..ell-s-1] avoiding 1.

    Size is binomial(n-1, k-1) + binomial(n-ell+s+1, k-ell+s+2), the t8 bound.
    With s = 0 this is construct_thm6 at t = 1.
    """
    _require(s >= 0, "s >= 0")
    _require(2 * s + 1 <= ell, "2s + 1 <= ell")
    _require(ell - s - 1 <= k, "ell - s - 1 <= k")
    _require(k <= n, "k <= n")
    _require(n >= k + ell - s - 2, "n >= k + ell - s - 2 (both groups nonempty)")
    core_b = tuple(range(2, ell - s))  # the interval [2, ell-s-1]; may be empty
    group_a = _sets_with_core(n, k, (1,), (), cap)
    group_b = _sets_with_core(n, k, core_b, (1,), cap)
    return Family.from_members(GroundParams(n, k), group_a + group_b)


def construct_star(n: int, k: int, t: int, *, cap: int = DEFAULT_ENUM_CAP) -> Family:
    """All k-sets containing the fixed t-set [1..t]; size binomial(n-t, k-t)."""
    _require(1 <= t, "1 <= t")
    _require(t <= k, "t <= k")
    _require(k <= n, "k <= n")
    members = _sets_with_core(n, k, tuple(range(1, t + 1)), (), cap)
    return Family.from_members(GroundParams(n, k), members)


def construct_sunflower(n: int, k: int, t: int, u: int) -> Family:
    """Sunflower with kernel [1..t] and u consecutive-block petals of size k-t."""
    _require(0 <= t, "0 <= t")
    _require(t < k, "t < k")
    _require(u >= 1, "u >= 1")
    _require(n >= t + u * (k - t), "n >= t + u(k - t) (room for disjoint petals)")
    kernel = tuple(range(1, t + 1))
    members = []
    for i in range(u):
        start = t + 1 + i * (k - t)
        petal = tuple(range(start, start + (k - t)))
        members.append(KSet.from_elements(kernel + petal, n))
    return Family.from_members(GroundParams(n, k), members)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfilePoint:
    """Minimum pair-sum of an ell-tuple taking x members from group A."""

    x: int
    value: int


@dataclass(frozen=True)
class Profile:
    """A profile curve over x = 0..ell plus its minimum metadata.

    Iterates as a sequence of ProfilePoint.  ``reference`` is the threshold
    the minimum is measured against (the matching condition's right-hand
    side); ``real_argmin`` is the vertex of the interpolating quadratic, as
    an exact Fraction (None if the curve is not strictly convex).
    """

    points: tuple[ProfilePoint, ...]
    min_value: int
    argmins: tuple[int, ...]
    real_argmin: Fraction | None
    reference: int
    expected_argmins: tuple[int, ...]

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def values(self) -> list[int]:
        return [p.value for p in self.points]

    @property
    def attains_reference(self) -> bool:
        return self.min_value == self.reference

    @property
    def meets_reference(self) -> bool:
        return self.min_value >= self.reference

    @property
    def min_at_expected(self) -> bool:
        return any(x in self.argmins for x in self.expected_argmins)


def _profile_from(values: list[int], reference: int, expected: tuple[int, ...]) -> Profile:
    points = tuple(ProfilePoint(x, v) for x, v in enumerate(values))
    mv = min(values)
    argmins = tuple(x for x, v in enumerate(values) if v == mv)
    # the curves are quadratic in x; fit through x = 0, 1, 2
    a = Fraction(values[0] - 2 * values[1] + values[2], 2)
    b = Fraction(values[1] - values[0]) - a
    real_argmin = -b / (2 * a) if a > 0 else None
    return Profile(points, mv, argmins, real_argmin, reference, expected)


def f_profile(t: int, ell: int) -> Profile:
    """Split profile of the thm6 shape:

    f(x) = C(x,2) t + x(ell-x)(t-1) + C(ell-x,2)(t+ell-3),  x = 0..ell.

    The integer minimum sits at x in {ell-2, ell-1} and equals the eq4
    threshold C(ell,2)(t-1) + C(ell-1,2) (carried as ``reference``).
    """
    _require(t >= 1, "t >= 1")
    _require(ell >= 3, "ell >= 3")
    values = [
        binomial(x, 2) * t
        + x * (ell - x) * (t - 1)
        + binomial(ell - x, 2) * (t + ell - 3)
        for x in range(ell + 1)
    ]
    reference = binomial(ell, 2) * (t - 1) + binomial(ell - 1, 2)
    return _profile_from(values, reference, (ell - 2, ell - 1))


def g_profile(ell: int, s: int) -> Profile:
    """Split profile of the thm8 shape:

    g(x) = C(x,2) + C(ell-x,2)(ell-s-2),  x = 0..ell.

    Flags (not asserts) whether the integer minimum sits at x = ell-2 and
    whether it meets C(ell-1,2) - s; both are guaranteed only for 2s <= ell-1.
    """
    _require(ell >= 3, "ell >= 3")
    _require(s >= 0, "s >= 0")
    _require(s <= ell - 2, "s <= ell - 2 (profile values stay nonnegative)")
    values = [
        binomial(x, 2) + binomial(ell - x, 2) * (ell - s - 2) for x in range(ell + 1)
    ]
    reference = binomial(ell - 1, 2) - s
    return _profile_from(values, reference, (ell - 2,))


# ---------------------------------------------------------------------------
# closed-form bounds
# ---------------------------------------------------------------------------

_BOUND_PARAMS = {
    "ekr": ("n", "k"),
    "t3": ("n", "k", "t"),
    "t5": ("n", "k", "ell"),
    "t6": ("n", "k", "t", "ell"),
    "t7": ("n", "k", "ell"),
    "t8": ("n", "k", "ell", "s"),
}


def rhs_bound(kind: str, **params: int) -> int:
    """Evaluate one of the named closed-form size bounds exactly.

    kind: ekr | t3 | t5 | t6 | t7 | t8, with keyword parameters
      ekr(n, k)          C(n-1, k-1)
      t3(n, k, t)        C(n-t, k-t)
      t5(n, k, ell)      C(n-1, k-1) + C(n-ell+1, k-ell+2)
      t6(n, k, t, ell)   C(n-t, k-t) + C(n-t-ell+2, k-t-ell+3)
      t7(n, k, ell)      C(n, k) - C(n-ell+1, k)
      t8(n, k, ell, s)   C(n-1, k-1) + C(n-ell+s+1, k-ell+s+2)
    """
    key = kind.lower()
    if key not in _BOUND_PARAMS:
        raise ParameterError(
            f"unknown bound kind {kind!r}; expected one of {sorted(_BOUND_PARAMS)}"
        )
    required = _BOUND_PARAMS[key]
    missing = [p for p in required if p not in params]
    if missing:
        raise ParameterError(f"bound {key} needs parameter(s): {', '.join(missing)}")
    extra = [p for p in params if p not in required]
    if extra:
        raise ParameterError(f"bound {key} does not take: {', '.join(sorted(extra))}")
    n, k = params["n"], params["k"]
    _require(1 <= k, "1 <= k")
    _require(k <= n, "k <= n")
    t = params.get("t", 1)
    ell = params.get("ell", 2)
    s = params.get("s", 0)
    if "t" in required:
        _require(t >= 1, "t >= 1")
    if "ell" in required:
        _require(ell >= 2, "ell >= 2")
    if "s" in required:
        _require(s >= 0, "s >= 0")

    if key == "ekr":
        return binomial(n - 1, k - 1)
    if key == "t3":
        _require(t <= k, "t <= k")
        return binomial(n - t, k - t)
    if key == "t5":
        return binomial(n - 1, k - 1) + binomial(max(n - ell + 1, 0), k - ell + 2)
    if key == "t6":
        _require(t <= k, "t <= k")
        return binomial(n - t, k - t) + binomial(
            max(n - t - ell + 2, 0), k - t - ell + 3
        )
    if key == "t7":
        return binomial(n, k) - binomial(max(n - ell + 1, 0), k)
    # t8
    return binomial(n - 1, k - 1) + binomial(max(n - ell + s + 1, 0), k - ell + s + 2)
