"""Ground types: bitmask sets, families, enumeration, file formats."""

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ekrf.setcore import (
    CapExceeded,
    Family,
    FormatError,
    GroundParams,
    KSet,
    ParameterError,
    binomial,
    enumerate_ksets,
    intersection_size,
    parse_family,
    parse_family_json,
    serialize_family,
    serialize_family_json,
)


# ---------------------------------------------------------------------------
# binomial


def test_binomial_hand_values():
    assert binomial(5, 2) == 10
    assert binomial(10, 4) == 210
    assert binomial(0, 0) == 1
    assert binomial(3, 7) == 0
    assert binomial(3, -1) == 0


def test_binomial_rejects_negative_a():
    with pytest.raises(ParameterError):
        binomial(-1, 0)


def test_binomial_pascal_rule_up_to_64():
    for a in range(1, 65):
        for b in range(0, a + 1):
            assert binomial(a, b) == binomial(a - 1, b - 1) + binomial(a - 1, b)


def test_binomial_is_exact_past_machine_width():
    # C(128, 64) needs ~125 bits; a float-based binomial would be off.
    assert binomial(128, 64) == math.comb(128, 64)
    assert binomial(128, 64) % 2 == 0


# ---------------------------------------------------------------------------
# KSet / intersection_size


def test_kset_roundtrip_elements():
    ks = KSet.from_elements([3, 1, 5], 6)
    assert ks.elements == (1, 3, 5)
    assert len(ks) == 3
    assert 3 in ks and 2 not in ks and 9 not in ks
    assert str(ks) == "{1,3,5}"


def test_kset_rejects_out_of_range_and_repeats():
    with pytest.raises(ParameterError):
        KSet.from_elements([0], 4)
    with pytest.raises(ParameterError):
        KSet.from_elements([5], 4)
    with pytest.raises(ParameterError):
        KSet.from_elements([2, 2], 4)


def test_intersection_size_hand_cases():
    a = KSet.from_elements([1, 2, 3], 6)
    b = KSet.from_elements([1, 2, 4], 6)
    c = KSet.from_elements([4, 5, 6], 6)
    assert intersection_size(a, b) == 2
    assert intersection_size(a, c) == 0
    assert intersection_size(a, a) == 3


def test_intersection_size_rejects_mixed_grounds():
    a = KSet.from_elements([1], 4)
    b = KSet.from_elements([1], 5)
    with pytest.raises(ParameterError):
        intersection_size(a, b)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_intersection_size_matches_set_intersection(data):
    n = data.draw(st.integers(2, 16))
    k = data.draw(st.integers(1, n))
    elems = st.lists(st.integers(1, n), min_size=k, max_size=k, unique=True)
    xs = data.draw(elems)
    ys = data.draw(elems)
    a = KSet.from_elements(xs, n)
    b = KSet.from_elements(ys, n)
    assert intersection_size(a, b) == len(set(xs) & set(ys))
    assert intersection_size(a, b) == intersection_size(b, a)
    assert 0 <= intersection_size(a, b) <= k


# ---------------------------------------------------------------------------
# GroundParams / Family


def test_ground_params_bounds():
    GroundParams(128, 1)
    with pytest.raises(ParameterError):
        GroundParams(129, 1)
    with pytest.raises(ParameterError):
        GroundParams(4, 5)
    with pytest.raises(ParameterError):
        GroundParams(4, 0)


def test_family_sorts_and_indexes():
    fam = Family.from_element_lists(5, 2, [(3, 4), (1, 2), (2, 5)])
    assert [ks.elements for ks in fam] == [(1, 2), (2, 5), (3, 4)]
    assert fam[1].elements == (2, 5)
    assert len(fam) == 3


def test_family_rejects_duplicates_and_wrong_size():
    with pytest.raises(ParameterError):
        Family.from_element_lists(5, 2, [(1, 2), (1, 2)])
    with pytest.raises(ParameterError):
        Family.from_element_lists(5, 2, [(1, 2, 3)])


def test_family_rejects_unsorted_direct_construction():
    params = GroundParams(4, 2)
    ks = [KSet.from_elements([3, 4], 4), KSet.from_elements([1, 2], 4)]
    with pytest.raises(ParameterError):
        Family(params, tuple(ks))


def test_subfamily_reindexes():
    fam = Family.from_element_lists(5, 2, [(1, 2), (1, 3), (4, 5)])
    sub = fam.subfamily([2, 0])
    assert [ks.elements for ks in sub] == [(1, 2), (4, 5)]


# ---------------------------------------------------------------------------
# enumeration


def test_enumerate_ksets_lexicographic_prefix():
    seq = [ks.elements for ks in enumerate_ksets(GroundParams(4, 2))]
    assert seq == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


def test_enumerate_ksets_single_full_set():
    seq = list(enumerate_ksets(GroundParams(3, 3)))
    assert len(seq) == 1 and seq[0].elements == (1, 2, 3)


def test_enumerate_ksets_counts_match_binomial():
    for n in range(1, 17):
        for k in range(1, n + 1):
            count = sum(1 for _ in enumerate_ksets(GroundParams(n, k)))
            assert count == binomial(n, k), (n, k)


def test_enumerate_ksets_cap():
    with pytest.raises(CapExceeded) as exc:
        list(enumerate_ksets(GroundParams(30, 15), cap=10))
    assert str(binomial(30, 15)) in str(exc.value)


# ---------------------------------------------------------------------------
# formats


def test_parse_family_basic():
    fam = parse_family("# n=4 k=2 count=2\n1,2\n3,4\n")
    assert [ks.elements for ks in fam] == [(1, 2), (3, 4)]


def test_parse_family_errors_carry_line_numbers():
    with pytest.raises(FormatError) as exc:
        parse_family("# n=4 k=2 count=1\n1,2,9\n")
    assert "line 2" in str(exc.value)

    with pytest.raises(FormatError) as exc:
        parse_family("# n=4 k=3 count=1\n1,2,9\n")
    assert "line 2" in str(exc.value) and "9" in str(exc.value)

    with pytest.raises(FormatError) as exc:
        parse_family("# n=4 k=2 count=2\n1,2\n1,2\n")
    assert "duplicate" in str(exc.value) and "line 3" in str(exc.value)

    with pytest.raises(FormatError) as exc:
        parse_family("not a header\n")
    assert "line 1" in str(exc.value)

    with pytest.raises(FormatError) as exc:
        parse_family("# n=4 k=2 count=3\n1,2\n")
    assert "count=3" in str(exc.value)

    with pytest.raises(FormatError):
        parse_family("# n=4 k=2 count=1\n2,1\n")  # not strictly increasing


def test_parse_family_reorders_members():
    fam = parse_family("# n=4 k=2 count=2\n3,4\n1,2\n")
    assert [ks.elements for ks in fam] == [(1, 2), (3, 4)]
    assert serialize_family(fam) == "# n=4 k=2 count=2\n1,2\n3,4\n"


def test_json_roundtrip_and_errors():
    fam = parse_family_json('{"n":4,"k":2,"members":[[1,2],[3,4]]}')
    assert len(fam) == 2
    assert parse_family_json(serialize_family_json(fam)).masks() == fam.masks()
    with pytest.raises(FormatError):
        parse_family_json("{")
    with pytest.raises(FormatError):
        parse_family_json('{"n":4,"k":2}')
    with pytest.raises(FormatError):
        parse_family_json('{"n":4,"k":2,"members":[[1,9]]}')


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_text_roundtrip_property(data):
    n = data.draw(st.integers(1, 12))
    k = data.draw(st.integers(1, n))
    universe = list(itertools.combinations(range(1, n + 1), k))
    m = data.draw(st.integers(0, min(len(universe), 8)))
    chosen = data.draw(st.permutations(universe)) [:m]
    fam = Family.from_element_lists(n, k, chosen)
    assert parse_family(serialize_family(fam)).masks() == fam.masks()
    assert parse_family_json(serialize_family_json(fam)).masks() == fam.masks()
