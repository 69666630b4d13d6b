"""Enumeration of split metacyclic ecut groups and verification against the published tables."""

from __future__ import annotations

import csv
import io
import logging
import os
from collections.abc import Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from math import gcd

from sympy import divisors, totient

from .classes import class_partition
from .groups import FiniteGroup, GroupTooLarge, split_metacyclic
from .isomorphism import DEFAULT_BUDGET, fingerprint, is_isomorphic
from .presentation import MetacyclicParams, multiplicative_order, validate_params

__all__ = [
    "PHI_TABLE",
    "QUOTIENT_ORDERS",
    "AtlasRow",
    "AtlasClass",
    "FixtureRow",
    "FixtureTables",
    "MetacyclicParams",
    "VerificationReport",
    "candidate_space",
    "classify_space",
    "deduplicate",
    "load_fixtures",
    "validate_params",
    "verify_tables",
]

log = logging.getLogger(__name__)

# phi(n) -> admissible n, row order as published
PHI_TABLE: dict[int, tuple[int, ...]] = {
    2: (3, 4, 6),
    4: (5, 8, 10, 12),
    6: (7, 14, 9, 18),
    8: (16, 24, 15, 30, 20),
    10: (11, 22),
    12: (13, 26, 21, 42, 28, 36),
    16: (17, 34, 32, 48, 60, 40),
    18: (19, 27, 38, 54),
    24: (35, 56, 70, 84, 45, 72, 90, 39, 52, 78),
}

# orders of ecut cyclic groups C_t with t > 1
QUOTIENT_ORDERS = (2, 3, 4, 5, 6, 8, 12)

WIDE_PHI_BOUND = 48


@dataclass(frozen=True, order=True)
class AtlasRow:
    params: MetacyclicParams
    order: int
    rank: int
    abelian: bool = False
    fingerprint: tuple = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class AtlasClass:
    representative: AtlasRow
    members: tuple[MetacyclicParams, ...]

    @property
    def params(self) -> MetacyclicParams:
        return self.representative.params


@dataclass(frozen=True)
class FixtureRow:
    params: MetacyclicParams
    rank: int
    gap_id: str
    table: int

    def to_json(self) -> dict:
        p = self.params
        return {"n": p.n, "t": p.t, "l": p.l, "r": p.r, "order": p.order,
                "rank": self.rank, "gap_id": self.gap_id}


@dataclass(frozen=True)
class FixtureTables:
    table1: tuple[FixtureRow, ...]
    table2: tuple[FixtureRow, ...]

    @property
    def rows(self) -> tuple[FixtureRow, ...]:
        return self.table1 + self.table2


def load_fixtures(path: str | os.PathLike | None = None) -> FixtureTables:
    """Read fixture rows (columns n,l,r,t,order,rank,gap_id_annotation).

    Rows are assigned to table 1 or 2 by their rank column; params are not
    validated here so that broken fixtures reach the report.
    """
    if path is None:
        text = resources.files("cutrank.data").joinpath("split_metacyclic_tables.csv").read_text()
    else:
        with open(path, newline="") as fh:
            text = fh.read()
    t1, t2 = [], []
    for rec in csv.DictReader(io.StringIO(text)):
        n, l, r, t = (int(rec[k]) for k in ("n", "l", "r", "t"))
        rank = int(rec["rank"])
        row = FixtureRow(MetacyclicParams(n, t, l, r), rank, rec.get("gap_id_annotation", ""),
                         1 if rank == 0 else 2)
        if int(rec["order"]) != n * t:
            log.warning("fixture %s: order column %s != n*t", row.params, rec["order"])
        (t1 if rank == 0 else t2).append(row)
    return FixtureTables(tuple(t1), tuple(t2))


def phi_inverse(bound: int) -> dict[int, tuple[int, ...]]:
    """All n >= 3 with even phi(n) <= bound, keyed by phi(n)."""
    out: dict[int, list[int]] = {}
    # phi(n) >= sqrt(n/2), so n <= 2 * bound**2 covers every preimage
    for n in range(3, 2 * bound * bound + 1):
        v = int(totient(n))
        if v <= bound:
            out.setdefault(v, []).append(n)
    return {k: tuple(v) for k, v in sorted(out.items())}


def candidate_space(*, wide: bool = False) -> Iterator[MetacyclicParams]:
    """Every valid (n, t, l, r) with t an ecut cyclic order and n from the phi table.

    With ``wide`` the n range is every n with phi(n) <= 48 instead of the
    published table. Abelian candidates (r = 1) are included.
    """
    table = phi_inverse(WIDE_PHI_BOUND) if wide else PHI_TABLE
    ns = sorted({n for row in table.values() for n in row})
    for n in ns:
        units = [r for r in range(1, n) if gcd(r, n) == 1]
        twist = {r: multiplicative_order(r, n) for r in units}
        for t in QUOTIENT_ORDERS:
            for l in divisors(n):
                for r in units:
                    if t % twist[r] == 0 and (l * r - l) % n == 0:
                        yield MetacyclicParams(n, t, l, r)


def classify_candidate(params: MetacyclicParams, cap: int | None = None,
                       keep_all: bool = False) -> AtlasRow | None:
    """Oracle rank of one candidate; None when dropped (rank >= 2) or skipped (over cap)."""
    try:
        G = split_metacyclic(params, cap=cap)
    except GroupTooLarge as exc:
        log.warning("skipping %s: %s", params, exc)
        return None
    P = class_partition(G)
    rank = P.n_R - P.n_Q
    if rank > 1 and not keep_all:
        return None
    return AtlasRow(params, G.order, rank, G.is_abelian, fingerprint(G, P))


def _classify_chunk(args) -> list[AtlasRow | None]:
    chunk, cap = args
    return [classify_candidate(p, cap) for p in chunk]


def classify_space(candidates: Iterable[MetacyclicParams] | None = None, *, workers: int = 1,
                   cap: int | None = None) -> list[AtlasRow]:
    """Rows with rank <= 1, sorted by parameters regardless of evaluation order."""
    cands = list(candidate_space() if candidates is None else candidates)
    if workers <= 1:
        rows = [classify_candidate(p, cap) for p in cands]
    else:
        size = max(1, len(cands) // (workers * 8))
        chunks = [(cands[i:i + size], cap) for i in range(0, len(cands), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [row for part in pool.map(_classify_chunk, chunks) for row in part]
    return sorted(row for row in rows if row is not None)


def deduplicate(rows: Iterable[AtlasRow], *, budget: int = DEFAULT_BUDGET) -> list[AtlasClass]:
    """One class per isomorphism type; representative is the least (n, t, l, r)."""
    buckets: dict[tuple, list[AtlasRow]] = {}
    for row in sorted(rows):
        buckets.setdefault(row.fingerprint, []).append(row)
    classes: list[AtlasClass] = []
    for bucket in buckets.values():
        reps: list[tuple[AtlasRow, FiniteGroup, list[MetacyclicParams]]] = []
        for row in bucket:
            G = split_metacyclic(row.params)
            for rep_row, rep_group, members in reps:
                if is_isomorphic(rep_group, G, budget=budget, check_fingerprint=False) is not None:
                    if rep_row.rank != row.rank:
                        raise AssertionError(f"isomorphic {rep_row.params} and {row.params} differ in rank")
                    members.append(row.params)
                    break
            else:
                reps.append((row, G, [row.params]))
        classes += [AtlasClass(r, tuple(m)) for r, _, m in reps]
    return sorted(classes, key=lambda c: c.representative)


@dataclass
class VerificationReport:
    matched: list[dict] = field(default_factory=list)
    rank_mismatch: list[dict] = field(default_factory=list)
    unmatched_fixture: list[dict] = field(default_factory=list)
    unmatched_atlas: list[dict] = field(default_factory=list)
    invalid_fixture: list[dict] = field(default_factory=list)
    abelian_classes: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.rank_mismatch or self.unmatched_fixture or self.unmatched_atlas
                    or self.invalid_fixture)

    def counts(self) -> dict[str, int]:
        return {"rank0": sum(1 for m in self.matched if m["rank"] == 0),
                "rank1": sum(1 for m in self.matched if m["rank"] == 1)}

    def to_json(self) -> dict:
        return {"ok": self.ok, "counts": self.counts(), "matched": self.matched,
                "rank_mismatch": self.rank_mismatch, "unmatched_fixture": self.unmatched_fixture,
                "unmatched_atlas": self.unmatched_atlas, "invalid_fixture": self.invalid_fixture,
                "abelian_classes": self.abelian_classes}


def _params_json(p: MetacyclicParams) -> dict:
    return {"n": p.n, "t": p.t, "l": p.l, "r": p.r}


def verify_tables(atlas: list[AtlasClass], fixtures: FixtureTables, *,
                  budget: int = DEFAULT_BUDGET) -> VerificationReport:
    """Match fixture rows and non-abelian atlas classes one-to-one up to isomorphism."""
    report = VerificationReport()
    nonabelian = [c for c in atlas if not c.representative.abelian]
    report.abelian_classes = [dict(_params_json(c.params), order=c.representative.order,
                                   rank=c.representative.rank)
                              for c in atlas if c.representative.abelian]
    groups = {c.params: split_metacyclic(c.params) for c in nonabelian}
    hits: dict[MetacyclicParams, list[FixtureRow]] = {c.params: [] for c in nonabelian}

    for fx in fixtures.rows:
        entry = fx.to_json()
        checked = validate_params(*fx.params.as_tuple())
        if isinstance(checked, list):
            report.invalid_fixture.append(dict(entry, violations=checked))
            continue
        G = split_metacyclic(fx.params)
        P = class_partition(G)
        oracle = P.n_R - P.n_Q
        fp = fingerprint(G, P)
        found = [c for c in nonabelian if c.representative.fingerprint == fp
                 and is_isomorphic(G, groups[c.params], budget=budget,
                                   check_fingerprint=False) is not None]
        for c in found:
            hits[c.params].append(fx)
        if oracle != fx.rank:
            report.rank_mismatch.append(dict(entry, oracle_rank=oracle))
        elif len(found) != 1:
            report.unmatched_fixture.append(dict(entry, atlas_matches=[_params_json(c.params) for c in found]))
        elif found[0].representative.rank != fx.rank:
            report.rank_mismatch.append(dict(entry, oracle_rank=found[0].representative.rank))
        else:
            report.matched.append(dict(entry, atlas=_params_json(found[0].params)))

    for c in nonabelian:
        if len(hits[c.params]) != 1:
            report.unmatched_atlas.append(dict(_params_json(c.params), order=c.representative.order,
                                               rank=c.representative.rank,
                                               fixture_matches=len(hits[c.params])))
    return report
