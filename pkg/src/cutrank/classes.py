"""Conjugacy, real and rational classes, and per-element rationality."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .groups import FiniteGroup, blocks_from_labels, components


class Tag(enum.IntEnum):
    """Strongest rationality property of an element; larger is stronger."""

    NONE = 0
    SEMI_RATIONAL = 1
    INVERSE_SEMI_RATIONAL = 2
    RATIONAL = 3


@dataclass(frozen=True)
class Rationality:
    tag: Tag
    is_real: bool


class Verdict(enum.Enum):
    ALL_ISR = "ALL_ISR"
    SINGLE_SPLIT_QCLASS = "SINGLE_SPLIT_QCLASS"
    NOT_ECUT = "NOT_ECUT"


@dataclass(frozen=True)
class EcutWitness:
    """Shape of the non-inverse-semi-rational part of a group.

    For SINGLE_SPLIT_QCLASS, ``q_block`` is the whole complement of the
    inverse semi-rational set and ``r_blocks`` are the two real classes it
    splits into; ``x`` is its least element and ``j`` the least exponent
    coprime to |x| with x^j outside the real class of x.
    """

    verdict: Verdict
    q_block: tuple[int, ...] | None = None
    r_blocks: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    x: int | None = None
    j: int | None = None

    def to_json(self) -> dict:
        out: dict = {"verdict": self.verdict.value}
        if self.q_block is not None:
            out["q_block"] = list(self.q_block)
            out["r_blocks"] = [list(b) for b in self.r_blocks]
            out["x"] = self.x
            out["j"] = self.j
        return out


@dataclass(frozen=True, eq=False)
class ClassPartition:
    """Conjugacy classes, real classes and rational classes as label arrays."""

    conj_labels: np.ndarray
    r_labels: np.ndarray
    q_labels: np.ndarray
    tags: np.ndarray = field(repr=False)
    real: np.ndarray = field(repr=False)

    @property
    def n_C(self) -> int:
        return int(self.conj_labels.max()) + 1

    @property
    def n_R(self) -> int:
        return int(self.r_labels.max()) + 1

    @property
    def n_Q(self) -> int:
        return int(self.q_labels.max()) + 1

    @cached_property
    def conj(self) -> tuple[tuple[int, ...], ...]:
        return blocks_from_labels(self.conj_labels)

    @cached_property
    def r_classes(self) -> tuple[tuple[int, ...], ...]:
        return blocks_from_labels(self.r_labels)

    @cached_property
    def q_classes(self) -> tuple[tuple[int, ...], ...]:
        return blocks_from_labels(self.q_labels)


def conjugacy_classes(G: FiniteGroup) -> tuple[tuple[int, ...], ...]:
    return blocks_from_labels(G.conjugacy_labels)


def _power_matrix(G: FiniteGroup, reps: np.ndarray, width: int) -> np.ndarray:
    """pw[c, k] = reps[c] ** k for 0 <= k < width."""
    pw = np.zeros((len(reps), width), dtype=np.int64)
    if width > 1:
        pw[:, 1] = reps
    for k in range(2, width):
        pw[:, k] = G.mul_vec(pw[:, k - 1], reps)
    return pw


def _class_data(G: FiniteGroup):
    conj = G.conjugacy_labels
    n_c = int(conj.max()) + 1
    reps = np.full(n_c, G.order, dtype=np.int64)
    np.minimum.at(reps, conj, np.arange(G.order))
    ords = G.elem_order[reps]
    width = int(ords.max())
    pw = _power_matrix(G, reps, width)
    k = np.arange(width)
    coprime = (np.gcd(k[None, :], ords[:, None]) == 1) & (k[None, :] < ords[:, None])
    return conj, reps, ords, pw, coprime


def class_partition(G: FiniteGroup) -> ClassPartition:
    """Conjugacy classes merged under inversion (real classes) and under coprime powers (rational classes)."""
    conj, reps, ords, pw, coprime = _class_data(G)
    n_c = len(reps)
    cls = np.arange(n_c)
    inv_cls = conj[G.inv[reps]]
    r_cls = components(n_c, [cls], [inv_cls])
    rows, cols = np.nonzero(coprime)
    q_cls = components(n_c, [rows], [conj[pw[rows, cols]]])

    tags = np.empty(n_c, dtype=np.int64)
    for c in range(n_c):
        reached = set(conj[pw[c, coprime[c]]].tolist())
        if reached == {c}:
            tags[c] = Tag.RATIONAL
        elif reached <= {c, int(inv_cls[c])}:
            tags[c] = Tag.INVERSE_SEMI_RATIONAL
        elif len(reached) <= 2:
            tags[c] = Tag.SEMI_RATIONAL
        else:
            tags[c] = Tag.NONE
    real = inv_cls == cls
    return ClassPartition(
        conj_labels=conj,
        r_labels=r_cls[conj],
        q_labels=q_cls[conj],
        tags=tags[conj],
        real=real[conj],
    )


def q_labels_by_exponent(G: FiniteGroup) -> np.ndarray:
    """Rational classes using exponents coprime to the group exponent instead of |g|."""
    conj = G.conjugacy_labels
    e = G.exponent
    js = np.array([j for j in range(1, e + 1) if np.gcd(j, e) == 1], dtype=np.int64)
    src, dst = [], []
    for j in js:
        # g^j for every element via square-and-multiply on the whole array
        result = np.zeros(G.order, dtype=np.int64)
        base = G.elements
        k = int(j)
        while k:
            if k & 1:
                result = G.mul_vec(result, base)
            base = G.mul_vec(base, base)
            k >>= 1
        src.append(conj)
        dst.append(conj[result])
    n_c = int(conj.max()) + 1
    q_cls = components(n_c, src, dst)
    return q_cls[conj]


def classify_element(G: FiniteGroup, g: int, partition: ClassPartition | None = None) -> Rationality:
    """Strongest of rational / inverse semi-rational / semi-rational for g.

    Semi-rational means every coprime power x^j lies in C_x or in C_{x^m}
    for one fixed m.
    """
    if partition is not None:
        return Rationality(Tag(int(partition.tags[g])), bool(partition.real[g]))
    conj = G.conjugacy_labels
    m = int(G.elem_order[g])
    powers = _power_matrix(G, np.array([g]), m)[0]
    reached = {int(conj[powers[j]]) for j in range(1, m) if np.gcd(j, m) == 1} or {int(conj[g])}
    c, ci = int(conj[g]), int(conj[G.inv[g]])
    if reached == {c}:
        tag = Tag.RATIONAL
    elif reached <= {c, ci}:
        tag = Tag.INVERSE_SEMI_RATIONAL
    elif len(reached) <= 2:
        tag = Tag.SEMI_RATIONAL
    else:
        tag = Tag.NONE
    return Rationality(tag, c == ci)


def inverse_semi_rational_set(G: FiniteGroup, partition: ClassPartition | None = None) -> frozenset[int]:
    P = partition or class_partition(G)
    return frozenset(int(x) for x in np.flatnonzero(P.tags >= Tag.INVERSE_SEMI_RATIONAL))


def ecut_witness(G: FiniteGroup, partition: ClassPartition | None = None) -> EcutWitness:
    P = partition or class_partition(G)
    outside = np.flatnonzero(P.tags < Tag.INVERSE_SEMI_RATIONAL)
    if len(outside) == 0:
        return EcutWitness(Verdict.ALL_ISR)
    q_ids = np.unique(P.q_labels[outside])
    if len(q_ids) != 1:
        return EcutWitness(Verdict.NOT_ECUT)
    q_block = np.flatnonzero(P.q_labels == q_ids[0])
    if not np.array_equal(q_block, outside):
        return EcutWitness(Verdict.NOT_ECUT)
    r_ids = np.unique(P.r_labels[q_block])
    if len(r_ids) != 2:
        return EcutWitness(Verdict.NOT_ECUT)
    x = int(q_block[0])
    m = int(G.elem_order[x])
    j = next(j for j in range(2, m) if np.gcd(j, m) == 1
             and P.r_labels[G.power(x, j)] != P.r_labels[x])
    blocks = tuple(tuple(int(y) for y in q_block[P.r_labels[q_block] == rid]) for rid in r_ids)
    return EcutWitness(Verdict.SINGLE_SPLIT_QCLASS, tuple(int(y) for y in q_block), blocks, x, j)
