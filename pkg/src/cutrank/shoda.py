"""Extremely strong Shoda pairs and the rank formula summed over a pair set.

Only the normal-subgroup sufficient condition for the idempotent
orthogonality axiom is certified: a pair (H, K) is accepted when H is normal
in G, which holds for every family handled here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import divisors, factorint, totient

from .groups import (
    FiniteGroup,
    Subgroup,
    cyclic,
    dihedral,
    generalized_quaternion,
    is_normal,
    normalizer,
    split_metacyclic,
    subgroup_closure,
    whole,
)
from .presentation import multiplicative_order
from .rank import InconsistencyError, Method, RankReport, RankVerdict


class ShodaError(ValueError):
    pass


@dataclass(frozen=True)
class PairCheck:
    ok: bool
    reason: str = ""
    h_rep: int | None = None
    normalizer: Subgroup | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ShodaPair:
    H: Subgroup
    K: Subgroup
    h_rep: int
    k_invariant: int
    index_HK: int
    index_NH: int
    group: FiniteGroup = field(repr=False, compare=False)

    @property
    def contribution(self) -> Fraction:
        return Fraction(int(totient(self.index_HK)), self.k_invariant * self.index_NH) - 1

    def to_json(self) -> dict:
        return {"H_order": self.H.order, "K_order": self.K.order, "h_rep": self.h_rep,
                "k": self.k_invariant, "index_HK": self.index_HK, "index_NH": self.index_NH,
                "contribution": str(self.contribution)}


def _order_mod(G: FiniteGroup, h: int, kmask: np.ndarray) -> int:
    cur, k = h, 1
    while not kmask[cur]:
        cur = G.mul(cur, h)
        k += 1
    return k


def verify_esspair(G: FiniteGroup, H: Subgroup, K: Subgroup) -> PairCheck:
    """Check that (H, K) is an extremely strong Shoda pair of G.

    (i)   K normal in H, H normal in G (hence in N_G(K));
    (ii)  H/K cyclic and self-centralising in N_G(K)/K.
    The failure reason names the first condition that does not hold.
    """
    hmask, kmask = H.mask(G.order), K.mask(G.order)
    if not hmask[K.array].all():
        raise ShodaError("K is not contained in H")
    if not is_normal(G, K, within=H):
        return PairCheck(False, "(i) K is not normal in H")
    if not is_normal(G, H):
        return PairCheck(False, "(i) H is not normal in G")
    N = normalizer(G, K)
    if not N.mask(G.order)[H.array].all():
        return PairCheck(False, "(i) H is not contained in N_G(K)")
    index = H.order // K.order
    h_rep = next((h for h in H.elements if _order_mod(G, h, kmask) == index), None)
    if h_rep is None:
        return PairCheck(False, "(ii) H/K is not cyclic")
    n = N.array
    comm = G.mul_vec(G.mul_vec(G.inv[n], G.inv[h_rep]), G.mul_vec(n, h_rep))
    cent = n[kmask[comm]]
    if len(cent) != H.order:
        return PairCheck(False, "(ii) H/K is not maximal abelian in N_G(K)/K")
    return PairCheck(True, "", h_rep, N)


def k_invariant(G: FiniteGroup, H: Subgroup, K: Subgroup, h_rep: int,
                N: Subgroup | None = None) -> int:
    """1 if h * x^-1 h x lies in K for some x normalising K, else 2."""
    N = N or normalizer(G, K)
    n = N.array
    prods = G.mul_vec(h_rep, G.mul_vec(G.mul_vec(G.inv[n], h_rep), n))
    return 1 if K.mask(G.order)[prods].any() else 2


def make_pair(G: FiniteGroup, H: Subgroup, K: Subgroup) -> ShodaPair:
    check = verify_esspair(G, H, K)
    if not check:
        raise ShodaError(f"not an extremely strong Shoda pair: {check.reason}")
    k = k_invariant(G, H, K, check.h_rep, check.normalizer)
    return ShodaPair(H, K, check.h_rep, k, H.order // K.order,
                     check.normalizer.order // H.order, G)


def rank_from_pairs(G: FiniteGroup, pairs: list[ShodaPair]) -> RankReport:
    """Sum of phi([H:K]) / (k [N_G(K):H]) - 1 over the pairs."""
    total = Fraction(0)
    for pair in pairs:
        if pair.group is not G and pair.group.order != G.order:
            raise ShodaError("pair belongs to a different group")
        if not verify_esspair(G, pair.H, pair.K):
            raise ShodaError("unverified pair in pair set")
        c = pair.contribution
        if c < 0:
            raise ShodaError(f"negative contribution {c}: pair data inconsistent")
        total += c
    if total.denominator != 1:
        raise ShodaError(f"non-integral rank {total}: pair set incomplete or invalid")
    rank = int(total)
    return RankReport(rank, RankVerdict.of(rank), Method.SHODA, order=G.order)


# --------------------------------------------------------------------------
# Pair sets of the standard families


def _a_power_subgroup(G: FiniteGroup, a: int, d: int) -> Subgroup:
    return subgroup_closure(G, [G.power(a, d)])


def shoda_pairs_cyclic(n: int, G: FiniteGroup | None = None) -> list[ShodaPair]:
    """(<a>, <a^d>) for every divisor d of n."""
    G = G or cyclic(n)
    A = whole(G)
    return [make_pair(G, A, _a_power_subgroup(G, 1 % n, d)) for d in divisors(n)]


def _dihedral_like_pairs(G: FiniteGroup, rot: int, even: bool) -> list[ShodaPair]:
    a, b = 1, rot
    W = whole(G)
    A = subgroup_closure(G, [a])
    pairs = [make_pair(G, W, W)]
    if even:
        a2 = G.power(a, 2)
        pairs.append(make_pair(G, W, subgroup_closure(G, [a2, G.mul(a, b)])))
        pairs.append(make_pair(G, W, subgroup_closure(G, [a2, b])))
    pairs.append(make_pair(G, W, A))
    return pairs


def shoda_pairs_dihedral(n: int, G: FiniteGroup | None = None) -> list[ShodaPair]:
    G = G or dihedral(n)
    pairs = _dihedral_like_pairs(G, n, n % 2 == 0)
    A = subgroup_closure(G, [1])
    pairs += [make_pair(G, A, _a_power_subgroup(G, 1, d)) for d in divisors(n) if d not in (1, 2)]
    return pairs


def shoda_pairs_quaternion(m: int, G: FiniteGroup | None = None) -> list[ShodaPair]:
    """Pairs for Q_4m.

    For odd m the quotient-type pairs are (G,G), (G,<a>), (G,<a^2>). For even m
    G/<a^2> is a Klein four-group, so (G,<a^2>) is not a Shoda pair; the
    quotient-type pairs are then (G,G), (G,<a^2,ab>), (G,<a^2,b>), (G,<a>).
    """
    G = G or generalized_quaternion(m)
    pairs = _dihedral_like_pairs(G, 2 * m, m % 2 == 0)
    A = subgroup_closure(G, [1])
    if m % 2:
        pairs.append(make_pair(G, whole(G), _a_power_subgroup(G, 1, 2)))
    pairs += [make_pair(G, A, _a_power_subgroup(G, 1, d))
              for d in divisors(2 * m) if d not in (1, 2)]
    return pairs


def faithful_twist(p: int, n: int, q: int, m: int) -> int:
    """Least r with multiplicative order exactly p^n modulo q^m."""
    qm = q**m
    for r in range(2, qm):
        if np.gcd(r, qm) == 1 and multiplicative_order(r, qm) == p**n:
            return r
    raise ShodaError(f"no element of order {p}^{n} modulo {q}^{m}")


def metacyclic_pq_group(p: int, n: int, q: int, m: int, r: int | None = None) -> FiniteGroup:
    qm, pn = q**m, p**n
    if int(totient(qm)) % pn:
        raise ShodaError(f"no faithful action: {pn} does not divide phi({qm})")
    r = faithful_twist(p, n, q, m) if r is None else r
    if multiplicative_order(r, qm) != pn:
        raise ShodaError(f"r = {r} does not have order {pn} modulo {qm}")
    return split_metacyclic(qm, pn, qm, r)


def shoda_pairs_metacyclic_pq(p: int, n: int, q: int, m: int, r: int | None = None,
                              G: FiniteGroup | None = None) -> list[ShodaPair]:
    """(G,G), (<a>, <a^(q^j)>) for 1 <= j <= m, (G, <a, b^(p^j)>) for 1 <= j <= n."""
    G = G or metacyclic_pq_group(p, n, q, m, r)
    qm = q**m
    a, b = 1, qm
    W, A = whole(G), subgroup_closure(G, [a])
    pairs = [make_pair(G, W, W)]
    pairs += [make_pair(G, A, _a_power_subgroup(G, a, q**j)) for j in range(1, m + 1)]
    pairs += [make_pair(G, W, subgroup_closure(G, [a, G.power(b, p**j)])) for j in range(1, n + 1)]
    return pairs


def detect_pq_family(n: int, t: int, l: int, r: int) -> tuple[int, int, int, int] | None:
    """(p, e_p, q, e_q) when M(n,t,l,r) is C_{q^e_q} x| C_{p^e_p} with faithful action."""
    fq, fp = factorint(n), factorint(t)
    if len(fq) != 1 or len(fp) != 1 or l != n:
        return None
    (q, eq), (p, ep) = next(iter(fq.items())), next(iter(fp.items()))
    if p == q or multiplicative_order(r, n) != t:
        return None
    return p, ep, q, eq


# --------------------------------------------------------------------------


def component_center_degree(G: FiniteGroup) -> tuple[int, int]:
    """(matrix size o, centre degree phi(n)/o) of the simple component of (<a, b^o>, <b^o>)."""
    if G.word_form is None:
        raise ShodaError("component_center_degree needs a metacyclic group in normal form")
    n = G.word_form.n
    o = G.word_form.twist_order
    b = n if G.word_form.t > 1 else 0
    bo = G.power(b, o) if b else 0
    H = subgroup_closure(G, [1 % n, bo])
    K = subgroup_closure(G, [bo])
    check = verify_esspair(G, H, K)
    if not check:
        raise ShodaError(f"(<a,b^o>, <b^o>) is not an extremely strong Shoda pair: {check.reason}")
    if H.order // K.order != n:
        raise ShodaError("<b^o> meets <a> non-trivially; centre degree is not phi(n)/o")
    phi = int(totient(n))
    if phi % o:
        raise InconsistencyError(f"o = {o} does not divide phi({n}) = {phi}")
    return o, phi // o
