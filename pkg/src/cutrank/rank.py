"""Central unit rank: class-count oracle, closed forms and structural classifications."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import divisor_count, factorint, isprime, primerange, totient

from .classes import ClassPartition, EcutWitness, Tag, Verdict, class_partition, ecut_witness
from .groups import (
    FiniteGroup,
    GroupError,
    Subgroup,
    invariant_factors,
    is_solvable,
    subgroup_as_group,
    subgroup_closure,
)

log = logging.getLogger(__name__)


class RankVerdict(enum.Enum):
    CUT = "CUT"
    ECUT_NOT_CUT = "ECUT_NOT_CUT"
    NOT_ECUT = "NOT_ECUT"

    @classmethod
    def of(cls, rank: int) -> RankVerdict:
        if rank == 0:
            return cls.CUT
        return cls.ECUT_NOT_CUT if rank == 1 else cls.NOT_ECUT


class Method(enum.Enum):
    FERRAZ_ORACLE = "FERRAZ_ORACLE"
    CLOSED_FORM = "CLOSED_FORM"
    SHODA = "SHODA"


class InconsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagree."""


@dataclass(frozen=True)
class RankReport:
    rank: int
    verdict: RankVerdict
    method: Method
    witness: EcutWitness | None = None
    order: int | None = None
    n_C: int | None = None
    n_R: int | None = None
    n_Q: int | None = None

    def to_json(self) -> dict:
        out = {"order": self.order, "n_C": self.n_C, "n_R": self.n_R, "n_Q": self.n_Q,
               "rank": self.rank, "verdict": self.verdict.value, "method": self.method.value}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def rank_ferraz(G: FiniteGroup, partition: ClassPartition | None = None) -> RankReport:
    """Rank as (number of real classes) - (number of rational classes)."""
    P = partition or class_partition(G)
    rank = P.n_R - P.n_Q
    witness = ecut_witness(G, P)
    expected = {0: Verdict.ALL_ISR, 1: Verdict.SINGLE_SPLIT_QCLASS}.get(rank, Verdict.NOT_ECUT)
    if witness.verdict is not expected:
        raise InconsistencyError(f"{G.name}: rank {rank} but witness {witness.verdict.value}")
    return RankReport(rank, RankVerdict.of(rank), Method.FERRAZ_ORACLE, witness,
                      G.order, P.n_C, P.n_R, P.n_Q)


# --------------------------------------------------------------------------
# Closed forms. Throughout, floor(n/2) is the floor, not the ceiling.


def rank_cyclic(n: int) -> int:
    if n < 1:
        raise ValueError("rank_cyclic needs n >= 1")
    return n // 2 + 1 - int(divisor_count(n))


def rank_dihedral(n: int) -> int:
    if n < 3:
        raise ValueError("rank_dihedral needs n >= 3")
    return n // 2 + 1 - int(divisor_count(n))


def rank_quaternion(m: int) -> int:
    if m < 2:
        raise ValueError("rank_quaternion needs m >= 2")
    return m + 1 - int(divisor_count(2 * m))


def rank_metacyclic_pq(p: int, n: int, q: int, m: int) -> int:
    """Rank of C_{q^m} x| C_{p^n} with faithful action, p and q distinct primes."""
    if not (isprime(p) and isprime(q)) or p == q or n < 1 or m < 1:
        raise ValueError("need distinct primes p, q and n, m >= 1")
    if int(totient(q**m)) % p**n:
        raise ValueError(f"no faithful action: {p}^{n} does not divide phi({q}^{m})")
    if p == 2:
        value = Fraction(2 ** (n - 1)) + Fraction(q**m - 1, 2**n) - n - m
    else:
        value = Fraction(p**n - 1, 2) + Fraction(q**m - 1, 2 * p**n) - n - m
    if value.denominator != 1 or value < 0:
        raise ValueError(f"rank formula gives non-integral or negative value {value}")
    return int(value)


# (p^n, q^m) as published for C_{q^m} x| C_{p^n}; the cut list omits (4, 5)
LISTED_CUT_PQ = frozenset({(2, 3), (3, 7)})
LISTED_ECUT_PQ = frozenset({(2, 3), (2, 5), (4, 5), (3, 7), (3, 13), (5, 11)})


def pq_rank_table(limit: int) -> dict[tuple[int, int, int, int], int]:
    """Closed-form rank of every faithful (p, n, q, m) with p^n q^m <= limit."""
    out = {}
    for q in primerange(2, limit):
        qm = q
        for m in range(1, limit.bit_length() + 1):
            if qm > limit:
                break
            phi = int(totient(qm))
            for p in primerange(2, limit // qm + 1):
                pn = p
                for n in range(1, limit.bit_length() + 1):
                    if p == q or pn * qm > limit:
                        break
                    if phi % pn == 0:
                        out[(p, n, q, m)] = rank_metacyclic_pq(p, n, q, m)
                    pn *= p
            qm *= q
    return out


@dataclass(frozen=True)
class PQListCheck:
    cut: frozenset[tuple[int, int]]
    ecut: frozenset[tuple[int, int]]

    @property
    def cut_discrepancy(self) -> frozenset[tuple[int, int]]:
        return self.cut ^ LISTED_CUT_PQ

    @property
    def ecut_discrepancy(self) -> frozenset[tuple[int, int]]:
        return self.ecut ^ LISTED_ECUT_PQ


def check_pq_lists(limit: int = 5000) -> PQListCheck:
    """Compare the published cut / ecut lists with the closed form; mismatches are logged."""
    table = pq_rank_table(limit)
    cut = frozenset((p**n, q**m) for (p, n, q, m), r in table.items() if r == 0)
    ecut = frozenset((p**n, q**m) for (p, n, q, m), r in table.items() if r <= 1)
    res = PQListCheck(cut, ecut)
    for name, diff in (("cut", res.cut_discrepancy), ("ecut", res.ecut_discrepancy)):
        if diff:
            log.warning("p-q metacyclic %s list disagrees with the rank formula at %s",
                        name, sorted(diff))
    return res


# --------------------------------------------------------------------------
# Abelian groups


class AbelianVerdict(enum.Enum):
    CUT_EXPONENT = "CUT_EXPONENT"
    ECUT_CYCLIC_EXCEPTION = "ECUT_CYCLIC_EXCEPTION"
    NOT_ECUT = "NOT_ECUT"


def classify_abelian(factors: list[int] | tuple[int, ...]) -> AbelianVerdict:
    """Ecut abelian groups are C5, C8, C12, or have exponent dividing 4 or 6."""
    inv = invariant_factors(factors)
    exponent = inv[0] if inv else 1
    if 4 % exponent == 0 or 6 % exponent == 0:
        return AbelianVerdict.CUT_EXPONENT
    if len(inv) == 1 and exponent in (5, 8, 12):
        return AbelianVerdict.ECUT_CYCLIC_EXCEPTION
    return AbelianVerdict.NOT_ECUT


# --------------------------------------------------------------------------
# p-groups and nilpotent groups


class PGroupCase(enum.Enum):
    C5 = "C5"
    CUT_3GROUP = "CUT_3GROUP"
    CUT_2GROUP = "CUT_2GROUP"
    SPLIT_2GROUP = "SPLIT_2GROUP"
    NOT_ECUT = "NOT_ECUT"


@dataclass(frozen=True)
class PGroupResult:
    case: PGroupCase
    prime: int
    rank: int
    x: int | None = None
    witness_block: tuple[int, ...] | None = None


def prime_of_pgroup(order: int) -> int:
    f = factorint(order)
    if len(f) != 1:
        raise GroupError(f"order {order} is not a prime power")
    return next(iter(f))


def real_class(G: FiniteGroup, P: ClassPartition, x: int) -> np.ndarray:
    return np.flatnonzero(P.r_labels == P.r_labels[x])


def pgroup_ecut_case(G: FiniteGroup) -> PGroupResult:
    """Which alternative of the ecut p-group classification G falls under.

    The case is decided structurally (prime, order, elements of order 8 and
    their real classes); the oracle rank is then required to agree.
    """
    p = prime_of_pgroup(G.order)
    P = class_partition(G)
    rank = P.n_R - P.n_Q
    outside = np.flatnonzero(P.tags < Tag.INVERSE_SEMI_RATIONAL)
    result = PGroupResult(PGroupCase.NOT_ECUT, p, rank)
    if p == 5 and G.order == 5:
        result = PGroupResult(PGroupCase.C5, p, rank)
    elif p in (2, 3) and len(outside) == 0:
        result = PGroupResult(PGroupCase.CUT_2GROUP if p == 2 else PGroupCase.CUT_3GROUP, p, rank)
    elif p == 2:
        for x in np.flatnonzero(G.elem_order == 8):
            x = int(x)
            block = np.union1d(real_class(G, P, x), real_class(G, P, G.power(x, 3)))
            if P.r_labels[x] != P.r_labels[G.power(x, 3)] and np.isin(outside, block).all():
                result = PGroupResult(PGroupCase.SPLIT_2GROUP, p, rank, x,
                                      tuple(int(y) for y in block))
                break
    predicted_ecut = result.case is not PGroupCase.NOT_ECUT
    if predicted_ecut != (rank <= 1):
        raise InconsistencyError(f"{G.name}: p-group case {result.case.value} vs oracle rank {rank}")
    return result


def sylow_subgroups(G: FiniteGroup) -> dict[int, Subgroup] | None:
    """Normal Sylow subgroups keyed by prime, or None if some Sylow subgroup is not normal."""
    out = {}
    for p in sorted(factorint(G.order)):
        orders = G.elem_order
        members = [int(g) for g in range(G.order) if _is_power_of(int(orders[g]), p)]
        S = subgroup_closure(G, members)
        if S.order != len(members):
            return None
        out[p] = S
    return out


def _is_power_of(k: int, p: int) -> bool:
    while k % p == 0:
        k //= p
    return k == 1


def is_nilpotent(G: FiniteGroup) -> bool:
    return sylow_subgroups(G) is not None


class NilpotentCase(enum.Enum):
    C5 = "i"
    CUT_3GROUP = "ii"
    ECUT_2GROUP = "iii"
    REAL_2PART = "iv(a)"
    SPLIT_2PART = "iv(b)"
    NOT_ECUT = "none"


@dataclass(frozen=True)
class NilpotentResult:
    case: NilpotentCase
    rank: int
    h: int | None = None


def _rank_of(G: FiniteGroup) -> tuple[int, ClassPartition]:
    P = class_partition(G)
    return P.n_R - P.n_Q, P


def nilpotent_ecut_check(G: FiniteGroup) -> NilpotentResult:
    """Case of the ecut nilpotent classification that G satisfies, checked against the oracle.

    Each case is tested on the Sylow subgroups as groups in their own right;
    only the final comparison uses the oracle rank of G itself.
    """
    sylow = sylow_subgroups(G)
    if sylow is None:
        raise GroupError(f"{G.name} is not nilpotent")
    rank, P = _rank_of(G)
    primes = set(sylow)
    case, h_witness = NilpotentCase.NOT_ECUT, None
    if G.order == 5:
        case = NilpotentCase.C5
    elif primes <= {3}:
        # the trivial group counts as a cut 3-group
        if rank == 0:
            case = NilpotentCase.CUT_3GROUP
    elif primes == {2}:
        if rank <= 1:
            case = NilpotentCase.ECUT_2GROUP
    elif primes == {2, 3}:
        Hs, Ks = sylow[2], sylow[3]
        H, K = subgroup_as_group(G, Hs, "P2"), subgroup_as_group(G, Ks, "P3")
        (rh, PH), (rk, _) = _rank_of(H), _rank_of(K)
        if rh == 0 and rk == 0:
            if PH.real.all():
                case = NilpotentCase.REAL_2PART
            else:
                h_witness = _split_2part_witness(G, P, Hs, Ks, PH)
                if h_witness is not None:
                    case = NilpotentCase.SPLIT_2PART
    if (case is not NilpotentCase.NOT_ECUT) != (rank <= 1):
        raise InconsistencyError(f"{G.name}: nilpotent case {case.value} vs oracle rank {rank}")
    return NilpotentResult(case, rank, h_witness)


def _split_2part_witness(G: FiniteGroup, P: ClassPartition, Hs: Subgroup, Ks: Subgroup,
                         PH: ClassPartition) -> int | None:
    """A non-real h in the 2-part such that for every k != 1 in the 3-part,
    C^Q_(hk) is the disjoint union of C^R_(hk) and C^R_(hk^-1) and equals the
    set of non inverse semi-rational elements."""
    outside = np.flatnonzero(P.tags < Tag.INVERSE_SEMI_RATIONAL)
    for idx in np.flatnonzero(~PH.real):
        h = Hs.elements[int(idx)]
        ok = True
        for k in Ks.elements[1:]:
            hk, hk_inv = G.mul(h, k), G.mul(h, int(G.inv[k]))
            q_block = np.flatnonzero(P.q_labels == P.q_labels[hk])
            r1, r2 = real_class(G, P, hk), real_class(G, P, hk_inv)
            if (P.r_labels[hk] == P.r_labels[hk_inv]
                    or not np.array_equal(np.union1d(r1, r2), q_block)
                    or not np.array_equal(q_block, outside)):
                ok = False
                break
        if ok:
            return h
    return None


# --------------------------------------------------------------------------
# Prime spectrum of solvable groups

CUT_PRIMES = frozenset({2, 3, 5, 7})
SEMI_RATIONAL_PRIMES = frozenset({2, 3, 5, 7, 13, 17})
EXTRA_PRIME_RANGE = (11, 267)


@dataclass(frozen=True)
class SpectrumVerdict:
    consistent: bool
    primes: tuple[int, ...]
    extra_primes: tuple[int, ...]
    reason: str

    def to_json(self) -> dict:
        return {"consistent": self.consistent, "primes": list(self.primes),
                "extra_primes": list(self.extra_primes), "reason": self.reason}


def spectrum_verdict(order: int, verdict: RankVerdict) -> SpectrumVerdict:
    """Prime-divisor necessary conditions for solvable cut / ecut groups."""
    primes = tuple(sorted(factorint(order)))
    if verdict is RankVerdict.CUT:
        extra = tuple(p for p in primes if p not in CUT_PRIMES)
        ok = not extra
        reason = "ok" if ok else f"cut group with primes {extra} outside {{2,3,5,7}}"
    elif verdict is RankVerdict.ECUT_NOT_CUT:
        extra = tuple(p for p in primes if p not in SEMI_RATIONAL_PRIMES)
        lo, hi = EXTRA_PRIME_RANGE
        if len(extra) > 1:
            ok, reason = False, f"more than one prime {extra} outside {{2,3,5,7,13,17}}"
        elif extra and not lo <= extra[0] <= hi:
            ok, reason = False, f"extra prime {extra[0]} outside [{lo},{hi}]"
        else:
            ok, reason = True, "ok"
    else:
        extra, ok, reason = (), True, "not ecut; no condition"
    return SpectrumVerdict(ok, primes, extra, reason)


def prime_spectrum_check(G: FiniteGroup, report: RankReport) -> SpectrumVerdict:
    if not is_solvable(G):
        raise GroupError(f"{G.name} is not solvable")
    return spectrum_verdict(G.order, report.verdict)
