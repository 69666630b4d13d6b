from fractions import Fraction
from math import prod

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import divisor_count, factorint
from sympy.functions.combinatorial.numbers import partition

from cutrank.groups import (
    GroupError,
    abelian,
    cyclic,
    dihedral,
    direct_product,
    from_table,
    generalized_quaternion,
    split_metacyclic,
)
from cutrank.groupspec import parse_group_spec
from cutrank.rank import (
    AbelianVerdict,
    Method,
    NilpotentCase,
    PGroupCase,
    RankVerdict,
    classify_abelian,
    is_nilpotent,
    nilpotent_ecut_check,
    pgroup_ecut_case,
    prime_spectrum_check,
    rank_cyclic,
    rank_dihedral,
    rank_ferraz,
    rank_metacyclic_pq,
    rank_quaternion,
    spectrum_verdict,
)
from cutrank.shoda import metacyclic_pq_group

from conftest import corpus, invariant_chains, pq_params
from oracle import naive_rank


# ---------------------------------------------------------------- oracle


def test_rank_ferraz_examples():
    assert rank_ferraz(dihedral(3)).rank == 0
    r = rank_ferraz(cyclic(5))
    assert (r.rank, r.n_R, r.n_Q) == (1, 3, 2)
    r = rank_ferraz(cyclic(7))
    assert (r.rank, r.n_R, r.n_Q) == (2, 4, 2)
    assert r.verdict is RankVerdict.NOT_ECUT and r.method is Method.FERRAZ_ORACLE


def test_rank_ferraz_matches_naive_oracle():
    for G in corpus():
        if G.order <= 96:
            assert rank_ferraz(G).rank == naive_rank(G), G.name


def test_report_json_key_order():
    data = rank_ferraz(cyclic(12)).to_json()
    assert list(data) == ["order", "n_C", "n_R", "n_Q", "rank", "verdict", "method", "witness"]
    assert data["verdict"] == "ECUT_NOT_CUT"


# ---------------------------------------------------------------- closed forms


def test_closed_form_examples():
    assert rank_cyclic(12) == 1
    assert rank_dihedral(8) == 1
    assert rank_quaternion(2) == 0
    assert rank_metacyclic_pq(2, 1, 3, 1) == 0
    assert rank_metacyclic_pq(3, 1, 13, 1) == 1
    assert rank_metacyclic_pq(5, 1, 11, 1) == 1


def test_floor_reading():
    # the ceiling reading would give 3 + 1 - 2 = 2 for n = 5
    assert rank_cyclic(5) == 1 == rank_ferraz(cyclic(5)).rank
    assert rank_dihedral(5) == 1 == rank_ferraz(dihedral(5)).rank


def test_cyclic_formula_needs_divisor_term():
    # without the -tau(n) term C12 would have rank 7
    assert 12 // 2 + 1 == 7 and rank_cyclic(12) == 1


def test_closed_forms_match_oracle():
    for n in range(1, 101):
        assert rank_cyclic(n) == rank_ferraz(cyclic(n)).rank, n
    for n in range(3, 61):
        assert rank_dihedral(n) == rank_ferraz(dihedral(n)).rank, n
    for m in range(2, 31):
        assert rank_quaternion(m) == rank_ferraz(generalized_quaternion(m)).rank, m


def test_pq_formula_matches_oracle():
    for p, n, q, m in pq_params(300):
        assert rank_metacyclic_pq(p, n, q, m) == rank_ferraz(metacyclic_pq_group(p, n, q, m)).rank


def test_pq_formula_is_exact_rational():
    # p = 2 branch, (n, q, m) = (2, 5, 1): 2 + 4/4 - 3 = 0
    assert Fraction(2) + Fraction(4, 4) - 3 == 0 == rank_metacyclic_pq(2, 2, 5, 1)


@pytest.mark.parametrize("args", [(2, 1, 2, 1), (2, 3, 3, 1), (4, 1, 5, 1), (3, 1, 5, 1)])
def test_pq_formula_domain(args):
    with pytest.raises(ValueError):
        rank_metacyclic_pq(*args)


@pytest.mark.parametrize("f,n", [(rank_cyclic, 0), (rank_dihedral, 2), (rank_quaternion, 1)])
def test_closed_form_domains(f, n):
    with pytest.raises(ValueError):
        f(n)


@given(st.integers(1, 2000))
def test_cyclic_formula_identity(n):
    assert rank_cyclic(n) == n // 2 + 1 - int(divisor_count(n))


# ---------------------------------------------------------------- abelian


def test_classify_abelian_examples():
    assert classify_abelian([4, 2]) is AbelianVerdict.CUT_EXPONENT
    assert classify_abelian([8]) is AbelianVerdict.ECUT_CYCLIC_EXCEPTION
    assert classify_abelian([10, 2]) is AbelianVerdict.NOT_ECUT
    assert classify_abelian([5]) is AbelianVerdict.ECUT_CYCLIC_EXCEPTION
    assert classify_abelian([3, 4]) is AbelianVerdict.ECUT_CYCLIC_EXCEPTION
    assert classify_abelian([]) is AbelianVerdict.CUT_EXPONENT


def test_classify_abelian_matches_oracle_up_to_100():
    expected = {AbelianVerdict.CUT_EXPONENT: {0}, AbelianVerdict.ECUT_CYCLIC_EXCEPTION: {1}}
    chains = invariant_chains(100)
    # one chain per abelian group: sum over n of prod partitions(e) for n = prod p^e
    assert len(chains) == sum(prod(int(partition(e)) for e in factorint(n).values()) for n in range(1, 101))
    for chain in chains:
        rank = rank_ferraz(abelian(chain)).rank
        verdict = classify_abelian(chain)
        if verdict is AbelianVerdict.NOT_ECUT:
            assert rank >= 2, chain
        else:
            assert rank in expected[verdict], chain


# ---------------------------------------------------------------- p-groups


def test_pgroup_examples():
    assert pgroup_ecut_case(cyclic(5)).case is PGroupCase.C5
    assert pgroup_ecut_case(split_metacyclic(9, 3, 3, 4)).case is PGroupCase.CUT_3GROUP
    res = pgroup_ecut_case(dihedral(8))
    assert res.case is PGroupCase.SPLIT_2GROUP and res.x == 1
    # C_a^R = {a, a^7}, C_a3^R = {a^3, a^5}
    assert res.witness_block == (1, 3, 5, 7)


def test_pgroup_not_prime_power():
    with pytest.raises(GroupError):
        pgroup_ecut_case(cyclic(6))


def test_pgroup_cases_agree_with_oracle():
    for G in corpus():
        try:
            res = pgroup_ecut_case(G)
        except GroupError:
            continue
        assert (res.case is not PGroupCase.NOT_ECUT) == (res.rank <= 1), G.name


def test_ecut_3groups_are_cut():
    for G in corpus():
        if set(factorint(G.order)) == {3}:
            assert rank_ferraz(G).rank != 1, G.name


# ---------------------------------------------------------------- nilpotent


def test_nilpotent_examples():
    r = nilpotent_ecut_check(direct_product(generalized_quaternion(2), cyclic(3)))
    assert r.case is NilpotentCase.REAL_2PART and r.rank == 0
    assert nilpotent_ecut_check(cyclic(5)).case is NilpotentCase.C5
    assert nilpotent_ecut_check(abelian([3, 3])).case is NilpotentCase.CUT_3GROUP
    r = nilpotent_ecut_check(cyclic(12))
    assert r.case is NilpotentCase.SPLIT_2PART and r.h is not None


def test_nilpotency_detection():
    assert is_nilpotent(generalized_quaternion(4))
    assert not is_nilpotent(dihedral(3))
    with pytest.raises(GroupError):
        nilpotent_ecut_check(dihedral(3))


# ---------------------------------------------------------------- prime spectrum


def test_spectrum_examples():
    G = dihedral(3)
    assert prime_spectrum_check(G, rank_ferraz(G)).consistent
    G = split_metacyclic(11, 5, 11, 3)
    v = prime_spectrum_check(G, rank_ferraz(G))
    assert v.consistent and v.extra_primes == (11,)
    v = spectrum_verdict(2 * 11, RankVerdict.CUT)
    assert not v.consistent
    assert not spectrum_verdict(11 * 19 * 4, RankVerdict.ECUT_NOT_CUT).consistent
    assert not spectrum_verdict(269 * 2, RankVerdict.ECUT_NOT_CUT).consistent


def test_spectrum_rejects_non_solvable():
    # A5 from its permutation representation
    from itertools import permutations

    def parity(p):
        s, seen = 0, set()
        for i in range(5):
            if i in seen:
                continue
            j, n = i, 0
            while j not in seen:
                seen.add(j)
                j, n = p[j], n + 1
            s += n - 1
        return s % 2

    els = sorted(p for p in permutations(range(5)) if parity(p) == 0)
    idx = {p: i for i, p in enumerate(els)}
    table = [[idx[tuple(b[a[k]] for k in range(5))] for b in els] for a in els]
    A5 = from_table(table)
    with pytest.raises(GroupError):
        prime_spectrum_check(A5, rank_ferraz(A5))


# ---------------------------------------------------------------- direct products


def test_direct_product_remarks():
    """Ecut products of non-trivial groups have cut factors; rank is superadditive."""
    small = [G for G in corpus() if 1 < G.order <= 24]
    ranks = {id(G): rank_ferraz(G).rank for G in small}
    checked = 0
    for i, H in enumerate(small):
        for K in small[i:]:
            if H.order * K.order > 512:
                continue
            rho = rank_ferraz(direct_product(H, K)).rank
            assert rho >= ranks[id(H)] + ranks[id(K)], (H.name, K.name)
            if rho <= 1:
                assert ranks[id(H)] == 0 and ranks[id(K)] == 0, (H.name, K.name)
            checked += 1
    assert checked > 1000


def test_product_spec_roundtrip():
    assert rank_ferraz(parse_group_spec("C5xC2")).verdict is RankVerdict.NOT_ECUT


def test_pq_lists_against_formula(caplog):
    import logging

    from cutrank.rank import LISTED_ECUT_PQ, check_pq_lists

    with caplog.at_level(logging.WARNING, logger="cutrank.rank"):
        res = check_pq_lists(2000)
    assert res.ecut == LISTED_ECUT_PQ
    assert res.cut_discrepancy == {(4, 5)}
    assert "(4, 5)" in caplog.text
