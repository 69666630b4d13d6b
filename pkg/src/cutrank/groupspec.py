"""Parser for the group-spec mini-language.

Grammar (whitespace is ignored)::

    spec    := factor ("x" factor)*
    factor  := "C" int | "D" int | "Q" int | "A[" int ("," int)* "]"
             | "M(" int "," int "," int "," int ")"

``D<k>`` is the dihedral group of order k, ``Q<k>`` the generalized quaternion
group of order k.
"""

from __future__ import annotations

import re

from .groups import (
    FiniteGroup,
    GroupError,
    GroupTooLarge,
    abelian,
    cyclic,
    dihedral,
    direct_product,
    generalized_quaternion,
    split_metacyclic,
)
from .presentation import InvalidParams


class GroupSpecError(GroupError):
    pass


_FACTOR = re.compile(
    r"C(?P<c>\d+)|D(?P<d>\d+)|Q(?P<q>\d+)"
    r"|A\[(?P<a>\d+(?:,\d+)*)?\]"
    r"|M\((?P<m>\d+,\d+,\d+,\d+)\)"
)


def split_factors(text: str) -> list[str]:
    spec = re.sub(r"\s+", "", text)
    if not spec:
        raise GroupSpecError("empty group spec")
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(spec):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise GroupSpecError(f"unbalanced brackets in {text!r}")
        elif ch == "x" and depth == 0:
            parts.append(spec[start:i])
            start = i + 1
    if depth:
        raise GroupSpecError(f"unbalanced brackets in {text!r}")
    parts.append(spec[start:])
    return parts


def parse_factor(token: str, cap: int | None = None) -> FiniteGroup:
    m = _FACTOR.fullmatch(token)
    if m is None:
        raise GroupSpecError(f"cannot parse group factor {token!r}")
    try:
        if m["c"] is not None:
            return cyclic(int(m["c"]), cap=cap)
        if m["d"] is not None:
            k = int(m["d"])
            if k % 2:
                raise GroupSpecError(f"dihedral order must be even, got {k}")
            return dihedral(k // 2, cap=cap)
        if m["q"] is not None:
            k = int(m["q"])
            if k % 4:
                raise GroupSpecError(f"quaternion order must be divisible by 4, got {k}")
            return generalized_quaternion(k // 4, cap=cap)
        if m["m"] is not None:
            return split_metacyclic(*map(int, m["m"].split(",")), cap=cap)
        factors = [int(v) for v in m["a"].split(",")] if m["a"] else []
        return abelian(factors, cap=cap)
    except InvalidParams as exc:
        raise GroupSpecError(str(exc)) from exc
    except (GroupSpecError, GroupTooLarge):
        raise
    except GroupError as exc:
        raise GroupSpecError(str(exc)) from exc


def parse_group_spec(text: str, *, cap: int | None = None) -> FiniteGroup:
    parts = split_factors(text)
    G = parse_factor(parts[0], cap)
    for token in parts[1:]:
        G = direct_product(G, parse_factor(token, cap), cap=cap)
    return G
