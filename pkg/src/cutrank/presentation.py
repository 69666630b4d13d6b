"""Parameters of the metacyclic presentation <a, b | a^n = 1, b^t = a^l, a^b = a^r>."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from sympy.ntheory import n_order


class InvalidParams(ValueError):
    """Raised when (n, t, l, r) does not define a group of order n*t."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("invalid metacyclic parameters: " + "; ".join(violations))


@dataclass(frozen=True, order=True)
class MetacyclicParams:
    n: int
    t: int
    l: int
    r: int

    @property
    def order(self) -> int:
        return self.n * self.t

    @property
    def twist_order(self) -> int:
        """Multiplicative order of r modulo n."""
        return multiplicative_order(self.r, self.n)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n, self.t, self.l, self.r)

    def __str__(self) -> str:
        return f"M({self.n},{self.t},{self.l},{self.r})"


def multiplicative_order(r: int, n: int) -> int:
    if n == 1:
        return 1
    return int(n_order(r % n, n))


def param_violations(n: int, t: int, l: int, r: int) -> list[str]:
    """Every constraint (n, t, l, r) fails, in a fixed order; empty when valid."""
    bad = [f"{name} must be >= 1" for name, v in (("n", n), ("t", t), ("l", l), ("r", r)) if v < 1]
    if bad:
        return bad
    if gcd(r, n) != 1:
        bad.append(f"gcd(r, n) = {gcd(r, n)} != 1")
    if n % l != 0:
        bad.append(f"l = {l} does not divide n = {n}")
    if (l * r - l) % n != 0:
        bad.append(f"l*r = {l * r} is not congruent to l = {l} mod {n}")
    if gcd(r, n) == 1:
        o = multiplicative_order(r, n)
        if t % o != 0:
            bad.append(f"multiplicative order {o} of r mod n does not divide t = {t}")
    return bad


def validate_params(n: int, t: int, l: int, r: int) -> MetacyclicParams | list[str]:
    """Return the validated parameters, or the list of violated constraints."""
    bad = param_violations(n, t, l, r)
    if bad:
        return bad
    return MetacyclicParams(n, t, l, r)


def checked_params(n: int, t: int, l: int, r: int) -> MetacyclicParams:
    bad = param_violations(n, t, l, r)
    if bad:
        raise InvalidParams(bad)
    return MetacyclicParams(n, t, l, r)
