"""Ground types for k-uniform set families over [n] = {1, ..., n}.

Sets are bitmasks: element i corresponds to bit i-1, so intersection size is a
single AND plus popcount.  Families keep their members in ascending
lexicographic order of the sorted element lists and refuse duplicates, which
pins down every index-based witness produced elsewhere in the package.

The ground set is capped at n = 128: everything here is meant for exact,
desk-scale certification, not asymptotics.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Iterator

MAX_GROUND = 128
DEFAULT_ENUM_CAP = 10**6


class EkrfError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(EkrfError):
    """A parameter violates a documented precondition."""


class FormatError(EkrfError):
    """Family text/JSON input is malformed; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapExceeded(EkrfError):
    """An enumeration would exceed its configured cap."""


# ---------------------------------------------------------------------------
# binomial
# ---------------------------------------------------------------------------


def binomial(a: int, b: int) -> int:
    """Exact binomial coefficient C(a, b); 0 when b < 0 or b > a.

    Requires a >= 0.  Arbitrary precision (plain ints throughout).
    """
    if a < 0:
        raise ParameterError(f"binomial: a must be >= 0, got {a}")
    if b < 0 or b > a:
        return 0
    return comb(a, b)


# ---------------------------------------------------------------------------
# ground parameters and k-sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroundParams:
    """Ground-set size n and uniform member size k, 1 <= k <= n <= 128."""

    n: int
    k: int

    def __post_init__(self):
        if not (1 <= self.k <= self.n <= MAX_GROUND):
            raise ParameterError(
                f"need 1 <= k <= n <= {MAX_GROUND}, got n={self.n} k={self.k}"
            )


@dataclass(frozen=True)
class KSet:
    """A subset of [n] stored as a bitmask (element i <-> bit i-1)."""

    mask: int
    n: int

    @classmethod
    def from_elements(cls, elements: Iterable[int], n: int) -> "KSet":
        mask = 0
        for e in elements:
            if not (1 <= e <= n):
                raise ParameterError(f"element {e} outside ground set [1..{n}]")
            bit = 1 << (e - 1)
            if mask & bit:
                raise ParameterError(f"repeated element {e}")
            mask |= bit
        return cls(mask, n)

    @property
    def elements(self) -> tuple[int, ...]:
        m, out = self.mask, []
        while m:
            low = m & -m
            out.append(low.bit_length())
            m ^= low
        return tuple(out)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, element: int) -> bool:
        return 1 <= element <= self.n and bool(self.mask >> (element - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.elements)) + "}"


def intersection_size(a: KSet, b: KSet) -> int:
    """|A ∩ B| for two sets over the same ground set."""
    if a.n != b.n:
        raise ParameterError(f"mismatched ground sets: n={a.n} vs n={b.n}")
    return (a.mask & b.mask).bit_count()


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def _lex_key(ks: KSet) -> tuple[int, ...]:
    return ks.elements


@dataclass(frozen=True)
class Family:
    """A duplicate-free k-uniform family in canonical (lexicographic) order.

    All witnesses elsewhere in the package are indices into ``members``.
    """

    params: GroundParams
    members: tuple[KSet, ...] = field(default=())

    def __post_init__(self):
        seen = set()
        for ks in self.members:
            if ks.n != self.params.n:
                raise ParameterError(
                    f"member over ground [1..{ks.n}] in family over [1..{self.params.n}]"
                )
            if len(ks) != self.params.k:
                raise ParameterError(
                    f"member {ks} has size {len(ks)}, family is {self.params.k}-uniform"
                )
            if ks.mask in seen:
                raise ParameterError(f"duplicate member {ks}")
            seen.add(ks.mask)
        keys = [_lex_key(ks) for ks in self.members]
        if any(keys[i] > keys[i + 1] for i in range(len(keys) - 1)):
            raise ParameterError("members not in canonical order; use Family.from_members")

    @classmethod
    def from_members(cls, params: GroundParams, members: Iterable[KSet]) -> "Family":
        """Sort members into canonical order and validate; rejects duplicates."""
        ordered = tuple(sorted(members, key=_lex_key))
        return cls(params, ordered)

    @classmethod
    def from_element_lists(cls, n: int, k: int, lists: Iterable[Iterable[int]]) -> "Family":
        params = GroundParams(n, k)
        return cls.from_members(params, (KSet.from_elements(l, n) for l in lists))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[KSet]:
        return iter(self.members)

    def __getitem__(self, i: int) -> KSet:
        return self.members[i]

    def masks(self) -> list[int]:
        return [ks.mask for ks in self.members]

    def union_mask(self) -> int:
        u = 0
        for ks in self.members:
            u |= ks.mask
        return u

    def subfamily(self, indices: Iterable[int]) -> "Family":
        """The subfamily at the given member indices (re-canonicalised)."""
        return Family.from_members(self.params, (self.members[i] for i in indices))


def enumerate_ksets(params: GroundParams, cap: int = DEFAULT_ENUM_CAP) -> Iterator[KSet]:
    """Yield all k-subsets of [n] in ascending lexicographic order.

    Refuses to run when binomial(n, k) exceeds ``cap`` so a typo cannot start
    an astronomically long loop.
    """
    total = binomial(params.n, params.k)
    if total > cap:
        raise CapExceeded(
            f"binomial({params.n},{params.k}) = {total} exceeds cap {cap}; "
            f"raise cap to at least {total} to enumerate"
        )
    n, k = params.n, params.k
    # combinations(range(1, n+1), k) in lex order, done on bitmasks directly
    from itertools import combinations

    for combo in combinations(range(1, n + 1), k):
        mask = 0
        for e in combo:
            mask |= 1 << (e - 1)
        yield KSet(mask, n)


# ---------------------------------------------------------------------------
# text and JSON formats
# ---------------------------------------------------------------------------

_HEADER_RE = re.compile(r"^#\s*n=(\d+)\s+k=(\d+)\s+count=(\d+)\s*$")


def parse_family(text: str) -> Family:
    """Parse the plain-text family format.

    Line 1 is ``# n=<int> k=<int> count=<int>``; each following non-empty line
    is one member as comma-separated, strictly increasing elements.  Errors
    carry the offending 1-based line number.  Members are re-sorted into
    canonical order, so serialisation round-trips regardless of input order.
    """
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty input; expected header '# n=<n> k=<k> count=<count>'", 1)
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise FormatError(
            f"bad header {lines[0]!r}; expected '# n=<n> k=<k> count=<count>'", 1
        )
    n, k, count = (int(g) for g in m.groups())
    try:
        params = GroundParams(n, k)
    except ParameterError as exc:
        raise FormatError(str(exc), 1) from None

    members: list[KSet] = []
    seen: dict[int, int] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        try:
            elems = [int(tok) for tok in line.split(",")]
        except ValueError:
            raise FormatError(f"malformed member line {raw!r}", lineno) from None
        if any(elems[i] >= elems[i + 1] for i in range(len(elems) - 1)):
            raise FormatError(f"elements not strictly increasing in {raw!r}", lineno)
        if len(elems) != k:
            raise FormatError(f"member has {len(elems)} elements, expected k={k}", lineno)
        try:
            ks = KSet.from_elements(elems, n)
        except ParameterError as exc:
            raise FormatError(str(exc), lineno) from None
        if ks.mask in seen:
            raise FormatError(
                f"duplicate member {ks} (first seen on line {seen[ks.mask]})", lineno
            )
        seen[ks.mask] = lineno
        members.append(ks)

    if len(members) != count:
        raise FormatError(
            f"header says count={count} but {len(members)} member lines found", 1
        )
    return Family.from_members(params, members)


def serialize_family(family: Family) -> str:
    """Inverse of parse_family; byte-deterministic canonical text."""
    out = [f"# n={family.params.n} k={family.params.k} count={len(family)}"]
    out.extend(",".join(map(str, ks.elements)) for ks in family)
    return "\n".join(out) + "\n"


def parse_family_json(text: str) -> Family:
    """Parse the JSON family format {"n":..., "k":..., "members":[[...], ...]}."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or not {"n", "k", "members"} <= set(obj):
        raise FormatError("JSON family needs keys n, k, members")
    try:
        return Family.from_element_lists(obj["n"], obj["k"], obj["members"])
    except ParameterError as exc:
        raise FormatError(str(exc)) from None


def serialize_family_json(family: Family) -> str:
    obj = {
        "n": family.params.n,
        "k": family.params.k,
        "members": [list(ks.elements) for ks in family],
    }
    return json.dumps(obj, separators=(",", ":")) + "\n"


def load_family(path: str) -> Family:
    """Read a family file, picking the format by extension (.json vs text)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        return parse_family_json(text)
    return parse_family(text)


def save_family(family: Family, path: str) -> str:
    """Write a family file (format by extension); returns the text written."""
    text = serialize_family_json(family) if path.endswith(".json") else serialize_family(family)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text
