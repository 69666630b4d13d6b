from fractions import Fraction

import pytest
from sympy import divisors

from cutrank.groups import (
    cyclic,
    dihedral,
    generalized_quaternion,
    split_metacyclic,
    subgroup_closure,
    trivial,
    whole,
)
from cutrank.rank import Method, rank_ferraz
from cutrank.shoda import (
    ShodaError,
    component_center_degree,
    detect_pq_family,
    k_invariant,
    make_pair,
    metacyclic_pq_group,
    rank_from_pairs,
    shoda_pairs_cyclic,
    shoda_pairs_dihedral,
    shoda_pairs_metacyclic_pq,
    shoda_pairs_quaternion,
    verify_esspair,
)

from conftest import corpus, pq_params


def test_verify_examples():
    F = split_metacyclic(5, 4, 5, 2)
    A = subgroup_closure(F, [1])
    assert verify_esspair(F, A, trivial(F))
    for G in (F, dihedral(4), cyclic(7)):
        assert verify_esspair(G, whole(G), whole(G))
    D = dihedral(4)
    A = subgroup_closure(D, [1])
    check = verify_esspair(D, A, A)
    assert not check and check.reason.startswith("(ii)")


def test_verify_reasons():
    Q = generalized_quaternion(4)
    check = verify_esspair(Q, whole(Q), subgroup_closure(Q, [2]))
    assert not check and check.reason == "(ii) H/K is not cyclic"
    D = dihedral(3)
    B = subgroup_closure(D, [3])
    check = verify_esspair(D, B, trivial(D))
    assert not check and check.reason == "(i) H is not normal in G"
    with pytest.raises(ShodaError):
        verify_esspair(D, trivial(D), B)


def test_k_invariant_examples():
    D = dihedral(6)
    A = subgroup_closure(D, [1])
    for d in (3, 6):
        K = subgroup_closure(D, [D.power(1, d)])
        assert k_invariant(D, A, K, 1) == 1
    G = dihedral(5)
    assert k_invariant(G, whole(G), whole(G), 0) == 1
    C = cyclic(12)
    for d in (3, 4, 6, 12):
        K = subgroup_closure(C, [d % 12])
        assert k_invariant(C, whole(C), K, 1) == 2


def test_rank_from_pairs_examples():
    r = rank_from_pairs(cyclic(12), shoda_pairs_cyclic(12))
    assert r.rank == 1 and r.method is Method.SHODA
    assert rank_from_pairs(dihedral(5), shoda_pairs_dihedral(5)).rank == 1
    assert rank_from_pairs(generalized_quaternion(2), shoda_pairs_quaternion(2)).rank == 0


def test_dihedral_contribution_from_rotation_pair():
    pairs = shoda_pairs_dihedral(5)
    top = [p for p in pairs if p.H.order == 5 and p.K.order == 1]
    assert len(top) == 1 and top[0].contribution == Fraction(4, 2) - 1


def test_pair_counts():
    assert len(shoda_pairs_cyclic(12)) == 6
    assert len(shoda_pairs_dihedral(6)) == 6
    assert len(shoda_pairs_metacyclic_pq(2, 2, 5, 1)) == 4


def test_quaternion_pair_set_even_m():
    # for even m, G/<a^2> is a Klein four-group: (G, <a^2>) is not an extremely strong Shoda pair
    Q = generalized_quaternion(4)
    check = verify_esspair(Q, whole(Q), subgroup_closure(Q, [2]))
    assert not check
    assert all(verify_esspair(Q, p.H, p.K) for p in shoda_pairs_quaternion(4))


def test_family_ranks_match_oracle():
    for n in range(1, 61):
        G = cyclic(n)
        assert rank_from_pairs(G, shoda_pairs_cyclic(n, G)).rank == rank_ferraz(G).rank, n
    for n in range(3, 31):
        G = dihedral(n)
        assert rank_from_pairs(G, shoda_pairs_dihedral(n, G)).rank == rank_ferraz(G).rank, n
    for m in range(2, 16):
        G = generalized_quaternion(m)
        assert rank_from_pairs(G, shoda_pairs_quaternion(m, G)).rank == rank_ferraz(G).rank, m
    for p, n, q, m in pq_params(300):
        G = metacyclic_pq_group(p, n, q, m)
        pairs = shoda_pairs_metacyclic_pq(p, n, q, m, G=G)
        assert rank_from_pairs(G, pairs).rank == rank_ferraz(G).rank, (p, n, q, m)


def test_quotient_type_pairs_contribute_zero():
    for n in range(3, 31):
        for pair in shoda_pairs_dihedral(n):
            if pair.H.order == 2 * n:
                assert pair.contribution == 0
    for m in range(2, 16):
        for pair in shoda_pairs_quaternion(m):
            if pair.H.order == 4 * m:
                assert pair.contribution == 0


def test_contributions_non_negative():
    for n in range(1, 40):
        assert all(p.contribution >= 0 for p in shoda_pairs_cyclic(n))
    for p, n, q, m in pq_params(300):
        assert all(pr.contribution >= 0 for pr in shoda_pairs_metacyclic_pq(p, n, q, m))


def test_odd_order_k_is_two():
    """k = 2 for every pair with H/K non-trivial in a group of odd order.

    For H = K the representative is the identity and k = 1 is forced, else
    the (G, G) term would be -1/2.
    """
    checked = 0
    for G in corpus():
        if G.order % 2 == 0:
            continue
        for g in range(1, G.order):
            H = subgroup_closure(G, [g])
            for d in divisors(int(G.elem_order[g]))[1:]:
                K = subgroup_closure(G, [G.power(g, d)])
                check = verify_esspair(G, H, K)
                if check:
                    assert k_invariant(G, H, K, check.h_rep) == 2, (G.name, g, d)
                    checked += 1
        assert k_invariant(G, whole(G), whole(G), 0) == 1
    assert checked > 100


def test_make_pair_rejects_invalid():
    D = dihedral(3)
    with pytest.raises(ShodaError):
        make_pair(D, subgroup_closure(D, [3]), trivial(D))


def test_rank_from_pairs_rejects_forged_pair():
    """(A, A) in D8 would contribute phi(1)/(1*2) - 1 = -1/2; it must never be summed."""
    from cutrank.shoda import ShodaPair

    D = dihedral(4)
    A = subgroup_closure(D, [1])
    forged = ShodaPair(A, A, 0, 1, 1, 2, D)
    assert forged.contribution == Fraction(-1, 2)
    with pytest.raises(ShodaError):
        rank_from_pairs(D, shoda_pairs_dihedral(4, D) + [forged])


def test_rank_from_pairs_rejects_foreign_pair():
    pairs = shoda_pairs_cyclic(6)
    with pytest.raises(ShodaError):
        rank_from_pairs(cyclic(12), pairs)


def test_single_pair_sum():
    C = cyclic(5)
    assert rank_from_pairs(C, [make_pair(C, whole(C), trivial(C))]).rank == 1


def test_component_center_degree_examples():
    assert component_center_degree(split_metacyclic(5, 4, 5, 2)) == (4, 1)
    assert component_center_degree(split_metacyclic(8, 2, 8, 7)) == (2, 2)
    assert component_center_degree(split_metacyclic(7, 3, 7, 2)) == (3, 2)


def test_component_center_degree_requires_word_form():
    from cutrank.groups import abelian

    with pytest.raises(ShodaError):
        component_center_degree(abelian([2, 2]))


def test_detect_pq_family():
    assert detect_pq_family(5, 4, 5, 2) == (2, 2, 5, 1)
    assert detect_pq_family(7, 3, 7, 2) == (3, 1, 7, 1)
    assert detect_pq_family(6, 2, 6, 5) is None
    assert detect_pq_family(5, 4, 5, 4) is None


def test_pair_json():
    data = shoda_pairs_cyclic(12)[-1].to_json()
    assert data == {"H_order": 12, "K_order": 1, "h_rep": 1, "k": 2, "index_HK": 12,
                    "index_NH": 1, "contribution": "1"}
