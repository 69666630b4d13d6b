from __future__ import annotations

from functools import lru_cache

import pytest
from sympy import primerange, totient

from cutrank.atlas import classify_space, deduplicate, load_fixtures
from cutrank.groups import (
    abelian,
    cyclic,
    dihedral,
    generalized_quaternion,
    split_metacyclic,
)
from cutrank.groupspec import parse_group_spec
from cutrank.shoda import metacyclic_pq_group


def pq_params(limit: int) -> list[tuple[int, int, int, int]]:
    """(p, n, q, m) with p != q primes, p^n q^m <= limit and p^n | phi(q^m)."""
    out = []
    for q in primerange(2, limit):
        for m in range(1, 10):
            if q**m > limit:
                break
            for p in primerange(2, limit):
                if p == q:
                    continue
                for n in range(1, 10):
                    if p**n * q**m > limit:
                        break
                    if int(totient(q**m)) % p**n == 0:
                        out.append((p, n, q, m))
    return sorted(out)


def invariant_chains(limit: int, largest: int | None = None) -> list[list[int]]:
    """Every list n1 >= n2 >= ... with n_{i+1} | n_i and product <= limit."""
    out = [[]]
    for n in range(2, (largest or limit) + 1):
        if largest is not None and largest % n:
            continue
        if n > limit:
            break
        for rest in invariant_chains(limit // n, n):
            out.append([n] + rest)
    return out


PRODUCT_SPECS = ("Q8xC3", "D6xC3", "D8xC3", "Q8xC2", "D8xC2", "D6xC2", "C3xC3xC2",
                 "Q8xC3xC3", "D6xD6", "M(7,3,7,2)xC2", "M(5,4,5,2)xC3")
ABELIAN_FACTORS = ((2, 2), (4, 2), (2, 2, 2), (3, 3), (6, 2), (4, 4), (6, 6), (10, 2), (9, 3),
                   (8, 2), (12, 2), (5, 5))


@lru_cache(maxsize=None)
def corpus() -> tuple:
    """Groups shared by the invariant suites: families, small abelian groups,
    faithful p-q metacyclic groups, every fixture row and some direct products."""
    groups = [cyclic(n) for n in range(1, 25)]
    groups += [dihedral(n) for n in range(3, 17)]
    groups += [generalized_quaternion(m) for m in range(2, 9)]
    groups += [abelian(list(f)) for f in ABELIAN_FACTORS]
    groups += [metacyclic_pq_group(*args) for args in pq_params(200)]
    groups += [split_metacyclic(row.params) for row in load_fixtures().rows]
    groups += [parse_group_spec(s) for s in PRODUCT_SPECS]
    return tuple(groups)


@pytest.fixture(scope="session")
def fixtures():
    return load_fixtures()


@pytest.fixture(scope="session")
def atlas_rows():
    return classify_space()


@pytest.fixture(scope="session")
def atlas_classes(atlas_rows):
    return deduplicate(atlas_rows)


@pytest.fixture(scope="session")
def group_corpus():
    return corpus()

