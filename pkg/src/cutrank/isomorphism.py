"""Isomorphism testing: invariant fingerprints, then backtracking over generator images."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .classes import ClassPartition, class_partition
from .groups import FiniteGroup, center, derived_subgroup, greedy_generators

DEFAULT_BUDGET = 2_000_000


class IsomorphismUndecided(RuntimeError):
    """The backtracking search ran out of its node budget."""


@dataclass(frozen=True, eq=False)
class Isomorphism:
    """Bijection ``mapping[g] = phi(g)`` from the elements of one group onto another."""

    mapping: np.ndarray

    def __call__(self, g: int) -> int:
        return int(self.mapping[g])

    def is_homomorphism(self, G: FiniteGroup, H: FiniteGroup) -> bool:
        e = G.elements
        lhs = self.mapping[G.mul_vec(e[:, None], e[None, :])]
        rhs = H.mul_vec(self.mapping[e][:, None], self.mapping[e][None, :])
        return bool(np.array_equal(lhs, rhs))


def element_signatures(G: FiniteGroup, P: ClassPartition | None = None) -> np.ndarray:
    """Per-element invariant (order, class size, real-class size, rational-class size)."""
    P = P or class_partition(G)

    def sizes(labels):
        return np.bincount(labels)[labels]

    return np.stack([G.elem_order, sizes(P.conj_labels), sizes(P.r_labels), sizes(P.q_labels)], axis=1)


def _orders_mod(G: FiniteGroup, mask: np.ndarray) -> np.ndarray:
    e = G.elements
    out = np.zeros(G.order, dtype=np.int64)
    cur = e.copy()
    for k in range(1, G.order + 1):
        hit = mask[cur] & (out == 0)
        out[hit] = k
        if out.all():
            return out
        cur = G.mul_vec(cur, e)
    raise AssertionError("unreachable: every element has finite order modulo a subgroup")


def fingerprint(G: FiniteGroup, P: ClassPartition | None = None) -> tuple:
    """Isomorphism invariant: order, class count, signature histogram, centre, derived subgroup, abelianisation."""
    P = P or class_partition(G)
    sig = element_signatures(G, P)
    hist = tuple(sorted(Counter(map(tuple, sig.tolist())).items()))
    D = derived_subgroup(G)
    ab_orders = _orders_mod(G, D.mask(G.order))
    ab_hist = tuple(sorted((k, v // D.order) for k, v in Counter(ab_orders.tolist()).items()))
    return (G.order, P.n_C, center(G).order, D.order, ab_hist, hist)


def _bfs_layers(G: FiniteGroup, gens: list[int]) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Spanning tree of the Cayley graph: layers of (elements, parents, generator index)."""
    seen = np.zeros(G.order, dtype=bool)
    seen[0] = True
    frontier = np.zeros(1, dtype=np.int64)
    g = np.array(gens, dtype=np.int64)
    layers = []
    while len(frontier):
        prod = G.mul_vec(frontier[:, None], g[None, :]).ravel()
        parent = np.repeat(frontier, len(g))
        which = np.tile(np.arange(len(g)), len(frontier))
        fresh = ~seen[prod]
        prod, parent, which = prod[fresh], parent[fresh], which[fresh]
        prod, first = np.unique(prod, return_index=True)
        parent, which = parent[first], which[first]
        seen[prod] = True
        if len(prod):
            layers.append((prod, parent, which))
        frontier = prod
    if not seen.all():
        raise ValueError("generators do not generate the group")
    return layers


_WORDS = (
    lambda G, x, y: G.mul(x, y),
    lambda G, x, y: G.mul(x, int(G.inv[y])),
    lambda G, x, y: G.mul(G.mul(x, x), y),
    lambda G, x, y: G.mul(x, G.mul(y, y)),
    lambda G, x, y: G.mul(G.mul(int(G.inv[x]), int(G.inv[y])), G.mul(x, y)),
)


def is_isomorphic(G: FiniteGroup, H: FiniteGroup, *, budget: int = DEFAULT_BUDGET,
                  check_fingerprint: bool = True) -> Isomorphism | None:
    """An isomorphism G -> H, or None when the groups are not isomorphic.

    Raises IsomorphismUndecided when more than ``budget`` search nodes are needed.
    """
    if G.order != H.order:
        return None
    PG, PH = class_partition(G), class_partition(H)
    if check_fingerprint and fingerprint(G, PG) != fingerprint(H, PH):
        return None
    if G.order == 1:
        return Isomorphism(np.zeros(1, dtype=np.int64))

    sig_g = [tuple(s) for s in element_signatures(G, PG).tolist()]
    sig_h = [tuple(s) for s in element_signatures(H, PH).tolist()]
    gens = greedy_generators(G)
    layers = _bfs_layers(G, gens)
    by_sig: dict[tuple, list[int]] = {}
    for h, s in enumerate(sig_h):
        by_sig.setdefault(s, []).append(h)
    class_reps = {int(np.flatnonzero(PH.conj_labels == c)[0]) for c in range(PH.n_C)}
    candidates = [by_sig.get(sig_g[g], []) for g in gens]
    candidates[0] = [h for h in candidates[0] if h in class_reps]
    word_sigs = {(i, j): [sig_g[w(G, gens[i], gens[j])] for w in _WORDS]
                 for i in range(len(gens)) for j in range(i)}

    e = G.elements
    right = [G.mul_vec(e, g) for g in gens]
    nodes = 0
    images: list[int] = []

    def consistent(i: int, h: int) -> bool:
        for j in range(i):
            hj = images[j]
            if any(sig_h[w(H, h, hj)] != want for w, want in zip(_WORDS, word_sigs[(i, j)])):
                return False
        return True

    def extend() -> np.ndarray | None:
        phi = np.zeros(G.order, dtype=np.int64)
        himg = np.array(images, dtype=np.int64)
        for elems, parents, which in layers:
            phi[elems] = H.mul_vec(phi[parents], himg[which])
        if len(np.unique(phi)) != G.order:
            return None
        for k, h in enumerate(images):
            if not np.array_equal(phi[right[k]], H.mul_vec(phi, h)):
                return None
        return phi

    def search(i: int) -> np.ndarray | None:
        nonlocal nodes
        if i == len(gens):
            return extend()
        for h in candidates[i]:
            nodes += 1
            if nodes > budget:
                raise IsomorphismUndecided(f"isomorphism search exceeded {budget} nodes")
            if not consistent(i, h):
                continue
            images.append(h)
            found = search(i + 1)
            images.pop()
            if found is not None:
                return found
        return None

    phi = search(0)
    return None if phi is None else Isomorphism(phi)
