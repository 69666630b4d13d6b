"""Finite groups on element indices ``0..order-1``.

Every group carries a vectorised multiplication ``mul_vec`` working on numpy
integer arrays. Dense Cayley tables are only materialised on request, so the
metacyclic families (which multiply in normal form) never need one for class
computations. Index 0 is always the identity.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sympy import factorint

from .presentation import MetacyclicParams, checked_params

DEFAULT_CAP = 2048

MulVec = Callable[[np.ndarray, np.ndarray], np.ndarray]


class GroupError(ValueError):
    pass


class GroupTooLarge(GroupError):
    def __init__(self, order: int, cap: int):
        self.order = order
        self.cap = cap
        super().__init__(f"group order {order} exceeds cap {cap}")


class NotNormalError(GroupError):
    pass


def default_cap() -> int:
    env = os.environ.get("CUTRANK_CAP")
    if env:
        cap = int(env)
        if cap < 1:
            raise ValueError("CUTRANK_CAP must be >= 1")
        return cap
    return DEFAULT_CAP


def _check_cap(order: int, cap: int | None) -> None:
    cap = default_cap() if cap is None else cap
    if order > cap:
        raise GroupTooLarge(order, cap)


class FiniteGroup:
    """Immutable finite group with identity 0.

    Derived data (inverse, element orders, Cayley table, conjugacy labels) is
    computed lazily and cached on first use.
    """

    def __init__(
        self,
        order: int,
        mul_vec: MulVec,
        *,
        generators: Sequence[int] | None = None,
        word_form: MetacyclicParams | None = None,
        name: str = "G",
        factors: tuple[FiniteGroup, FiniteGroup] | None = None,
    ):
        if order < 1:
            raise GroupError("order must be positive")
        self.order = order
        self._mul_vec = mul_vec
        self.identity = 0
        self.word_form = word_form
        self.name = name
        self.factors = factors
        if generators is None:
            generators = greedy_generators(self)
        self.generators = tuple(int(g) for g in generators if g != 0)

    def __repr__(self) -> str:
        return f"<FiniteGroup {self.name} order={self.order}>"

    def __len__(self) -> int:
        return self.order

    @property
    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def mul_vec(self, x, y) -> np.ndarray:
        return self._mul_vec(np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64))

    def mul(self, g: int, h: int) -> int:
        if "table" in self.__dict__:
            return int(self.table[g, h])
        return int(self.mul_vec(g, h))

    def power(self, g: int, k: int) -> int:
        k %= int(self.elem_order[g])
        result, base = 0, int(g)
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def conj(self, g: int, x: int) -> int:
        """x^-1 g x."""
        return self.mul(self.mul(int(self.inv[x]), g), x)

    @cached_property
    def table(self) -> np.ndarray:
        e = self.elements
        t = self.mul_vec(e[:, None], e[None, :])
        t.setflags(write=False)
        return t

    @cached_property
    def _orders_and_inverses(self) -> tuple[np.ndarray, np.ndarray]:
        e = self.elements
        order = np.zeros(self.order, dtype=np.int64)
        inv = np.zeros(self.order, dtype=np.int64)
        prev = np.zeros(self.order, dtype=np.int64)
        cur = e.copy()
        for k in range(1, self.order + 1):
            hit = (cur == 0) & (order == 0)
            order[hit] = k
            inv[hit] = prev[hit]
            if order.all():
                break
            prev = cur
            cur = self.mul_vec(cur, e)
        else:
            raise GroupError("some element has no finite order; not a group")
        order.setflags(write=False)
        inv.setflags(write=False)
        return order, inv

    @property
    def elem_order(self) -> np.ndarray:
        return self._orders_and_inverses[0]

    @property
    def inv(self) -> np.ndarray:
        return self._orders_and_inverses[1]

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.elem_order))

    @cached_property
    def conjugacy_labels(self) -> np.ndarray:
        """Class label per element; classes numbered by their least element."""
        e = self.elements
        src, dst = [], []
        for s in self.generators:
            src.append(e)
            dst.append(self.mul_vec(self.mul_vec(self.inv[s], e), s))
        labels = components(self.order, src, dst)
        labels.setflags(write=False)
        return labels

    @cached_property
    def is_abelian(self) -> bool:
        gens = np.array(self.generators, dtype=np.int64)
        if len(gens) < 2:
            return True
        return bool(np.array_equal(self.mul_vec(gens[:, None], gens[None, :]),
                                   self.mul_vec(gens[None, :], gens[:, None])))


def components(n: int, src: Iterable[np.ndarray], dst: Iterable[np.ndarray]) -> np.ndarray:
    """Connected components of a graph on 0..n-1, relabelled by least member."""
    src = list(src)
    if src:
        rows = np.concatenate(src)
        cols = np.concatenate(list(dst))
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, raw = connected_components(graph, directed=True, connection="weak")
    return canonical_labels(raw)


def canonical_labels(raw: np.ndarray) -> np.ndarray:
    """Renumber a labelling so blocks are ordered by their least element."""
    _, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.reshape(-1)]


def blocks_from_labels(labels: np.ndarray) -> tuple[tuple[int, ...], ...]:
    order = np.argsort(labels, kind="stable")
    splits = np.flatnonzero(np.diff(labels[order])) + 1
    return tuple(tuple(int(x) for x in chunk) for chunk in np.split(order, splits))


def greedy_generators(G: FiniteGroup) -> list[int]:
    """Generating set built from elements of decreasing order."""
    by_order = sorted(range(1, G.order), key=lambda g: (-int(G.elem_order[g]), g))
    gens: list[int] = []
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    for g in by_order:
        if mask.all():
            break
        if not mask[g]:
            gens.append(g)
            mask = _closure_mask(G, gens)
    return gens


# --------------------------------------------------------------------------
# Subgroups


@dataclass(frozen=True)
class Subgroup:
    """Sorted element indices of a subgroup of some parent group."""

    elements: tuple[int, ...]

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> Subgroup:
        return cls(tuple(int(x) for x in np.flatnonzero(mask)))

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in self._set

    def __iter__(self):
        return iter(self.elements)

    @cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.elements)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64)

    def mask(self, order: int) -> np.ndarray:
        m = np.zeros(order, dtype=bool)
        m[list(self.elements)] = True
        return m


def _closure_mask(G: FiniteGroup, seed: Iterable[int]) -> np.ndarray:
    gens = np.unique(np.array([int(s) for s in seed] or [0], dtype=np.int64))
    gens = gens[gens != 0]
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    frontier = np.zeros(1, dtype=np.int64)
    while len(frontier) and len(gens):
        nxt = np.unique(G.mul_vec(frontier[:, None], gens[None, :]).ravel())
        nxt = nxt[~mask[nxt]]
        mask[nxt] = True
        frontier = nxt
    return mask


def subgroup_closure(G: FiniteGroup, seed: Iterable[int]) -> Subgroup:
    """Smallest subgroup of G containing seed."""
    return Subgroup.from_mask(_closure_mask(G, seed))


def whole(G: FiniteGroup) -> Subgroup:
    return Subgroup(tuple(range(G.order)))


def trivial(G: FiniteGroup) -> Subgroup:
    return Subgroup((0,))


def conjugate_sets(G: FiniteGroup, S: Subgroup | Sequence[int], xs: np.ndarray) -> np.ndarray:
    """Matrix whose row k is x_k^-1 S x_k."""
    s = np.asarray(list(S), dtype=np.int64)
    xs = np.asarray(xs, dtype=np.int64)
    return G.mul_vec(G.mul_vec(G.inv[xs][:, None], s[None, :]), xs[:, None])


def normalizer(G: FiniteGroup, K: Subgroup) -> Subgroup:
    kmask = K.mask(G.order)
    conj = conjugate_sets(G, K, G.elements)
    return Subgroup.from_mask(kmask[conj].all(axis=1))


def centralizer(G: FiniteGroup, S: Iterable[int]) -> Subgroup:
    s = np.array(sorted(set(int(x) for x in S)) or [0], dtype=np.int64)
    e = G.elements
    commute = G.mul_vec(e[:, None], s[None, :]) == G.mul_vec(s[None, :], e[:, None])
    return Subgroup.from_mask(commute.all(axis=1))


def center(G: FiniteGroup) -> Subgroup:
    return centralizer(G, G.generators)


def is_normal(G: FiniteGroup, H: Subgroup, within: Subgroup | None = None) -> bool:
    """Whether H is normalised by every element of ``within`` (default: G)."""
    xs = G.elements if within is None else within.array
    conj = conjugate_sets(G, H, xs)
    return bool(H.mask(G.order)[conj].all())


def is_subgroup(G: FiniteGroup, elements: Iterable[int]) -> bool:
    s = np.array(sorted(set(int(x) for x in elements)), dtype=np.int64)
    if len(s) == 0 or s[0] != 0:
        return False
    mask = np.zeros(G.order, dtype=bool)
    mask[s] = True
    return bool(mask[G.mul_vec(s[:, None], G.inv[s][None, :])].all())


def normal_closure(G: FiniteGroup, seed: Iterable[int]) -> Subgroup:
    mask = _closure_mask(G, seed)
    gens = np.array(G.generators, dtype=np.int64)
    while True:
        members = np.flatnonzero(mask)
        conj = G.mul_vec(G.mul_vec(G.inv[gens][:, None], members[None, :]), gens[:, None])
        if mask[conj].all():
            return Subgroup.from_mask(mask)
        mask = _closure_mask(G, np.concatenate([members, conj.ravel()]))


def derived_subgroup(G: FiniteGroup, H: Subgroup | None = None) -> Subgroup:
    """Commutator subgroup [H, H] (H defaults to G)."""
    if H is None:
        gens = np.array(G.generators, dtype=np.int64)
        if len(gens) < 2:
            return trivial(G)
        a, b = gens[:, None], gens[None, :]
        comm = G.mul_vec(G.mul_vec(G.inv[a], G.inv[b]), G.mul_vec(a, b))
        return normal_closure(G, comm.ravel())
    h = H.array
    a, b = h[:, None], h[None, :]
    comm = G.mul_vec(G.mul_vec(G.inv[a], G.inv[b]), G.mul_vec(a, b))
    return subgroup_closure(G, np.unique(comm))


def is_solvable(G: FiniteGroup) -> bool:
    H = whole(G)
    while H.order > 1:
        D = derived_subgroup(G, H)
        if D.order == H.order:
            return False
        H = D
    return True


def subgroup_as_group(G: FiniteGroup, H: Subgroup, name: str | None = None) -> FiniteGroup:
    """H as a group in its own right; element k is the k-th smallest member of H."""
    members = H.array
    pos = np.full(G.order, -1, dtype=np.int64)
    pos[members] = np.arange(len(members))

    def mul_vec(x, y):
        return pos[G.mul_vec(members[x], members[y])]

    return FiniteGroup(H.order, mul_vec, name=name or f"sub({G.name},{H.order})")


def quotient(G: FiniteGroup, N: Subgroup) -> tuple[FiniteGroup, np.ndarray]:
    """G/N with cosets numbered by least member, and the projection array."""
    if not is_normal(G, N):
        raise NotNormalError("quotient requires a normal subgroup")
    e = G.elements
    coset_min = G.mul_vec(e[:, None], N.array[None, :]).min(axis=1)
    projection = canonical_labels(coset_min)
    reps = np.unique(coset_min)
    table = projection[G.mul_vec(reps[:, None], reps[None, :])]

    def mul_vec(x, y):
        return table[x, y]

    gens = sorted({int(projection[g]) for g in G.generators} - {0})
    Q = FiniteGroup(len(reps), mul_vec, generators=gens, name=f"{G.name}/N{N.order}")
    Q.__dict__["table"] = table
    projection.setflags(write=False)
    return Q, projection


# --------------------------------------------------------------------------
# Constructors


def cyclic(n: int, *, cap: int | None = None) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group needs n >= 1")
    _check_cap(n, cap)

    def mul_vec(x, y):
        return (x + y) % n

    return FiniteGroup(n, mul_vec, generators=[1] if n > 1 else [], name=f"C{n}")


def metacyclic_mul(p: MetacyclicParams) -> MulVec:
    """Normal-form product (a^i1 b^j1)(a^i2 b^j2) = a^(i1 + i2 r^j1) b^(j1 + j2), index j*n + i."""
    n, t, l, r = p.as_tuple()
    rpow = np.array([pow(r, j, n) for j in range(t)], dtype=np.int64)

    def mul_vec(x, y):
        j1, i1 = np.divmod(x, n)
        j2, i2 = np.divmod(y, n)
        i = (i1 + i2 * rpow[j1]) % n
        j = j1 + j2
        wrap = j >= t
        i = np.where(wrap, (i + l) % n, i)
        j = np.where(wrap, j - t, j)
        return j * n + i

    return mul_vec


def split_metacyclic(*params, cap: int | None = None, name: str | None = None) -> FiniteGroup:
    """G_{n,t,l,r} from ``MetacyclicParams`` or four integers n, t, l, r."""
    p = params[0] if len(params) == 1 else checked_params(*params)
    if not isinstance(p, MetacyclicParams):
        raise TypeError("expected MetacyclicParams or (n, t, l, r)")
    checked_params(*p.as_tuple())
    _check_cap(p.order, cap)
    gens = [g for g in (1 % p.n if p.n > 1 else 0, p.n if p.t > 1 else 0) if g]
    return FiniteGroup(p.order, metacyclic_mul(p), generators=gens, word_form=p,
                       name=name or str(p))


def dihedral(n: int, *, cap: int | None = None) -> FiniteGroup:
    """D_{2n} = <a, b | a^n = b^2 = 1, a^b = a^-1>, order 2n."""
    if n < 3:
        raise GroupError("dihedral(n) requires n >= 3")
    return split_metacyclic(n, 2, n, n - 1, cap=cap, name=f"D{2 * n}")


def generalized_quaternion(m: int, *, cap: int | None = None) -> FiniteGroup:
    """Q_{4m} = <a, b | a^2m = 1, b^2 = a^m, a^b = a^-1>, order 4m."""
    if m < 2:
        raise GroupError("generalized_quaternion(m) requires m >= 2")
    return split_metacyclic(2 * m, 2, m, 2 * m - 1, cap=cap, name=f"Q{4 * m}")


def direct_product(G: FiniteGroup, H: FiniteGroup, *, cap: int | None = None) -> FiniteGroup:
    """G x H with element (g, h) at index g*|H| + h."""
    _check_cap(G.order * H.order, cap)
    m = H.order

    def mul_vec(x, y):
        g1, h1 = np.divmod(x, m)
        g2, h2 = np.divmod(y, m)
        return G.mul_vec(g1, g2) * m + H.mul_vec(h1, h2)

    gens = [g * m for g in G.generators] + list(H.generators)
    return FiniteGroup(G.order * m, mul_vec, generators=gens, name=f"{G.name}x{H.name}",
                       factors=(G, H))


def invariant_factors(orders: Iterable[int]) -> list[int]:
    """Normalise a list of cyclic orders to invariant factors n1, n2, ... with n_{i+1} | n_i."""
    by_prime: dict[int, list[int]] = {}
    for n in orders:
        if n < 1:
            raise GroupError("cyclic factor orders must be positive")
        for p, e in factorint(n).items():
            by_prime.setdefault(p, []).append(p**e)
    for powers in by_prime.values():
        powers.sort(reverse=True)
    width = max((len(v) for v in by_prime.values()), default=0)
    result = []
    for i in range(width):
        f = 1
        for powers in by_prime.values():
            if i < len(powers):
                f *= powers[i]
        result.append(f)
    return result


def abelian(factors: Sequence[int], *, cap: int | None = None) -> FiniteGroup:
    """Direct product of cyclic groups, normalised to invariant-factor form."""
    inv_factors = invariant_factors(factors)
    order = int(np.prod(inv_factors)) if inv_factors else 1
    _check_cap(order, cap)
    if not inv_factors:
        return cyclic(1)
    G = cyclic(inv_factors[0])
    for f in inv_factors[1:]:
        G = direct_product(G, cyclic(f), cap=cap)
    G.name = "A[" + ",".join(map(str, inv_factors)) + "]"
    return G


def from_table(table: Sequence[Sequence[int]] | np.ndarray, *, name: str = "G",
               check: bool = True) -> FiniteGroup:
    """Group from a 0-based Cayley table whose first row and column are the identity."""
    t = np.array(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise GroupError("Cayley table must be a non-empty square")
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise GroupError("Cayley table entries out of range")
    e = np.arange(n)
    if not (np.array_equal(t[0], e) and np.array_equal(t[:, 0], e)):
        raise GroupError("first row and column must be the identity")
    t.setflags(write=False)

    def mul_vec(x, y):
        return t[x, y]

    G = FiniteGroup(n, mul_vec, generators=(), name=name)
    G.__dict__["table"] = t
    if check:
        problems = check_group_axioms(G)
        if problems:
            raise GroupError("; ".join(problems))
    G.generators = tuple(greedy_generators(G))
    return G


def read_cayley_csv(path: str | os.PathLike, *, name: str | None = None) -> FiniteGroup:
    table = np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2)
    return from_table(table, name=name or os.path.basename(str(path)))


def check_group_axioms(G: FiniteGroup, exhaustive_limit: int = 256, samples: int = 200_000,
                       seed: int = 0) -> list[str]:
    """Associativity, identity and inverses; exhaustive up to ``exhaustive_limit``."""
    problems = []
    e = G.elements
    if not np.array_equal(G.mul_vec(0, e), e) or not np.array_equal(G.mul_vec(e, 0), e):
        problems.append("index 0 is not a two-sided identity")
    rows = G.mul_vec(e[:, None], e[None, :]) if G.order <= 4096 else None
    if rows is not None:
        if not all(len(np.unique(row)) == G.order for row in rows):
            problems.append("multiplication is not a Latin square")
    if G.order <= exhaustive_limit:
        ab = rows if rows is not None else G.mul_vec(e[:, None], e[None, :])
        left = G.mul_vec(ab[:, :, None], e[None, None, :])
        right = G.mul_vec(e[:, None, None], ab[None, :, :])
        if not np.array_equal(left, right):
            problems.append("multiplication is not associative")
    else:
        rng = np.random.default_rng(seed)
        x, y, z = rng.integers(0, G.order, size=(3, samples))
        if not np.array_equal(G.mul_vec(G.mul_vec(x, y), z), G.mul_vec(x, G.mul_vec(y, z))):
            problems.append("multiplication is not associative (sampled)")
    if not problems:
        try:
            inv = G.inv
        except GroupError as exc:
            problems.append(str(exc))
        else:
            if not (np.all(G.mul_vec(e, inv) == 0) and np.all(G.mul_vec(inv, e) == 0)):
                problems.append("inverse table is not two-sided")
    return problems

