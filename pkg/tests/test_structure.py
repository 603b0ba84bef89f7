"""Structural analyzers: intersecting predicates, matchings, sunflowers, audits."""

import itertools

import pytest

from ekrf.setcore import Family, ParameterError, binomial, enumerate_ksets, GroundParams
from ekrf.conditions import ConditionSpec, Variant, check_condition
from ekrf.constructions import construct_star, construct_sunflower, construct_thm6
from ekrf.structure import (
    AuditFailure,
    find_sunflower,
    is_cross_intersecting,
    is_t_intersecting,
    kernel_decompose,
    lemma_audit,
    matching_number,
)

from conftest import members_as_sets, random_family


# ---------------------------------------------------------------------------
# is_t_intersecting / is_cross_intersecting


def test_t_intersecting_star():
    assert is_t_intersecting(construct_star(7, 3, 2), 2) is None


def test_t_intersecting_disjoint_witness():
    fam = Family.from_element_lists(6, 3, [(1, 2, 3), (4, 5, 6)])
    assert is_t_intersecting(fam, 1) == (0, 1)


def test_t_intersecting_thm6_group_b():
    fam = construct_thm6(9, 4, 2, 3)
    group_b = fam.subfamily([i for i, ks in enumerate(fam) if 1 not in ks])
    assert is_t_intersecting(group_b, 2) is None  # all share [2, t+ell-2] = {2,3}


def test_t_intersecting_witness_is_lex_least(rng):
    for _ in range(20):
        fam = random_family(rng, 8, 3, 8)
        sets = members_as_sets(fam)
        for t in range(0, 4):
            expected = None
            for i, j in itertools.combinations(range(len(sets)), 2):
                if len(sets[i] & sets[j]) < t:
                    expected = (i, j)
                    break
            assert is_t_intersecting(fam, t) == expected


def test_cross_intersecting_hand_cases():
    a = Family.from_element_lists(4, 3, [(1, 2, 3)])
    b = Family.from_element_lists(4, 3, [(1, 2, 4)])
    assert is_cross_intersecting(a, b, 2) is None
    assert is_cross_intersecting(a, b, 3) == (0, 0)
    assert is_cross_intersecting(a, b, 0) is None


def test_cross_intersecting_self_family():
    fam = construct_star(6, 3, 1)
    # self-pairs have |A ∩ A| = k, so A vs A at r <= 1 mirrors pairwise intersecting
    assert is_cross_intersecting(fam, fam, 1) is None


def test_cross_intersecting_ground_mismatch():
    a = Family.from_element_lists(4, 2, [(1, 2)])
    b = Family.from_element_lists(5, 2, [(1, 2)])
    with pytest.raises(ParameterError):
        is_cross_intersecting(a, b, 1)


# ---------------------------------------------------------------------------
# matching_number


def test_matching_number_all_triples_of_six():
    fam = Family.from_members(GroundParams(6, 3), enumerate_ksets(GroundParams(6, 3)))
    nu, witness = matching_number(fam)
    assert nu == 2
    assert [fam[i].elements for i in witness] == [(1, 2, 3), (4, 5, 6)]


def test_matching_number_star_is_one():
    nu, witness = matching_number(construct_star(8, 3, 1))
    assert nu == 1 and witness == (0,)


def test_matching_number_hand_case():
    fam = Family.from_element_lists(7, 3, [(1, 2, 3), (4, 5, 6), (1, 4, 7)])
    nu, _ = matching_number(fam)
    assert nu == 2


def test_matching_number_empty_family_rejected():
    with pytest.raises(ParameterError):
        matching_number(Family.from_element_lists(5, 2, []))


def test_matching_number_matches_exhaustive(rng):
    for _ in range(25):
        n = rng.randint(5, 9)
        k = rng.randint(2, 3)
        m = rng.randint(1, min(12, binomial(n, k)))
        fam = random_family(rng, n, k, m)
        sets = members_as_sets(fam)
        best = ()
        for r in range(len(sets), 0, -1):
            found = None
            for combo in itertools.combinations(range(len(sets)), r):
                if all(
                    not (sets[i] & sets[j])
                    for i, j in itertools.combinations(combo, 2)
                ):
                    found = combo
                    break
            if found:
                best = found
                break
        nu, witness = matching_number(fam)
        assert nu == len(best)
        assert witness == best  # combinations() scans lex order, so first = least


# ---------------------------------------------------------------------------
# find_sunflower


def test_find_sunflower_hand_instance():
    fam = Family.from_element_lists(7, 3, [(1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6)])
    flower = find_sunflower(fam, 1, 3)
    assert flower is not None
    assert flower.kernel == (1,)
    assert flower.petal_count == 3
    assert [fam[i].elements for i in flower.member_indices] == [
        (1, 2, 3), (1, 4, 5), (1, 6, 7)
    ]


def test_find_sunflower_disjoint_family_has_none():
    fam = Family.from_element_lists(9, 3, [(1, 2, 3), (4, 5, 6), (7, 8, 9)])
    assert find_sunflower(fam, 1, 2) is None
    # kernel size 0 turns the search into a disjointness (matching) question
    flower = find_sunflower(fam, 0, 3)
    assert flower is not None and flower.kernel == ()


def test_find_sunflower_recovers_construction():
    fam = construct_sunflower(14, 4, 2, 4)
    flower = find_sunflower(fam, 2, 4)
    assert flower is not None
    assert flower.kernel == (1, 2)
    assert flower.member_indices == tuple(range(4))


def test_find_sunflower_requires_exact_kernel():
    # pairwise intersections are {1,2}, never exactly {1}
    fam = Family.from_element_lists(6, 3, [(1, 2, 3), (1, 2, 4), (1, 2, 5)])
    assert find_sunflower(fam, 1, 3) is None
    flower = find_sunflower(fam, 2, 3)
    assert flower is not None and flower.kernel == (1, 2)


def test_find_sunflower_invariants_on_return(rng):
    for _ in range(15):
        fam = random_family(rng, 9, 3, 10)
        for t, u in [(0, 2), (1, 2), (1, 3), (2, 2)]:
            flower = find_sunflower(fam, t, u)
            if flower is None:
                continue
            assert len(flower.kernel) == t
            assert len(flower.member_indices) >= u
            kernel = set(flower.kernel)
            chosen = [set(fam[i].elements) for i in flower.member_indices]
            for a, b in itertools.combinations(chosen, 2):
                assert a & b == kernel


def test_find_sunflower_rejects_bad_kernel_size():
    fam = Family.from_element_lists(6, 3, [(1, 2, 3)])
    with pytest.raises(ParameterError):
        find_sunflower(fam, 3, 1)  # t must be < k
    with pytest.raises(ParameterError):
        find_sunflower(fam, 1, 0)  # need at least one petal


# ---------------------------------------------------------------------------
# kernel_decompose


def test_kernel_decompose_hand_example():
    fam = Family.from_element_lists(6, 3, [(1, 2, 3), (1, 2, 4), (1, 3, 5), (2, 3, 6)])
    dec = kernel_decompose(fam, (1, 2))
    assert [fam[i].elements for i in dec.f_T_indices] == [(1, 2, 3), (1, 2, 4)]
    assert [fam[i].elements for i in dec.f_minus_indices[1]] == [(2, 3, 6)]
    assert [fam[i].elements for i in dec.f_minus_indices[2]] == [(1, 3, 5)]
    assert dec.leftover_indices == ()


def test_kernel_decompose_star_all_in_f_T():
    fam = construct_star(7, 3, 2)
    dec = kernel_decompose(fam, (1, 2))
    assert len(dec.f_T_indices) == len(fam)
    assert all(len(ix) == 0 for ix in dec.f_minus_indices.values())
    assert dec.leftover_indices == ()


def test_kernel_decompose_disjoint_goes_to_leftover():
    fam = Family.from_element_lists(8, 3, [(4, 5, 6), (5, 6, 7)])
    dec = kernel_decompose(fam, (1, 2))
    assert len(dec.leftover_indices) == 2


def test_kernel_decompose_partition_property(rng):
    for _ in range(20):
        fam = random_family(rng, 8, 3, 9)
        kernel = tuple(sorted(rng.sample(range(1, 9), rng.randint(1, 3))))
        dec = kernel_decompose(fam, kernel)
        parts = [tuple(dec.f_T_indices), tuple(dec.leftover_indices)]
        parts.extend(tuple(ix) for ix in dec.f_minus_indices.values())
        flat = sorted(i for part in parts for i in part)
        assert flat == list(range(len(fam)))  # exhaustive and disjoint
        t = len(kernel)
        for i in dec.f_T_indices:
            assert set(kernel) <= set(fam[i].elements)
        for a, ixs in dec.f_minus_indices.items():
            for i in ixs:
                elems = set(fam[i].elements)
                assert a not in elems and set(kernel) - {a} <= elems
        for i in dec.leftover_indices:
            assert len(set(kernel) & set(fam[i].elements)) < t - 1


def test_kernel_decompose_rejects_bad_kernels():
    fam = Family.from_element_lists(6, 3, [(1, 2, 3)])
    with pytest.raises(ParameterError):
        kernel_decompose(fam, ())
    with pytest.raises(ParameterError):
        kernel_decompose(fam, (1, 1))
    with pytest.raises(ParameterError):
        kernel_decompose(fam, (0, 2))


# ---------------------------------------------------------------------------
# lemma_audit


def test_lemma_audit_on_construction_case_1():
    fam = construct_thm6(20, 4, 2, 3)
    report = lemma_audit(fam, 2, 3)
    assert report.case == 1
    assert report.required_petals == 2 * 4 + 3 - 2
    assert report.kernel is not None and len(report.kernel) == 2
    assert len(report.checks) == 3
    assert all(chk.passed for chk in report.checks)
    assert report.passed is True


def test_lemma_audit_case_2_without_sunflower():
    fam = construct_star(6, 3, 1)  # cannot host 7 disjoint petals inside [2..6]
    report = lemma_audit(fam, 1, 3)
    assert report.case == 2
    assert report.passed is None
    assert report.checks == ()


def test_lemma_audit_flags_engineered_failure():
    # a 7-petal sunflower with kernel {1} plus two members that avoid 1 and
    # intersect each other in 0 < t+ell-3 = 1 elements: the residual-family
    # intersection check must fail (the family does not satisfy the condition)
    members = [(1, 2 * i, 2 * i + 1) for i in range(1, 8)]
    members += [(2, 4, 6), (3, 5, 7)]
    fam = Family.from_element_lists(15, 3, members)
    assert not check_condition(fam, ConditionSpec(1, 3, Variant.EQ4), exact=True).ok
    report = lemma_audit(fam, 1, 3)
    assert report.case == 1
    assert report.passed is False
    failed = [chk for chk in report.checks if not chk.passed]
    assert failed and any(chk.witness for chk in failed)
    with pytest.raises(AuditFailure):
        lemma_audit(fam, 1, 3, strict=True)


def test_lemma_audit_passes_on_eq4_subfamilies(rng):
    # heredity: EQ4 survives member removal, so any case-1 audit must pass
    base = construct_thm6(15, 3, 1, 3)
    for _ in range(5):
        keep = sorted(rng.sample(range(len(base)), int(len(base) * 0.8)))
        fam = base.subfamily(keep)
        report = lemma_audit(fam, 1, 3)
        if report.case == 1:
            assert report.passed is True, [
                (chk.name, chk.witness) for chk in report.checks if not chk.passed
            ]
