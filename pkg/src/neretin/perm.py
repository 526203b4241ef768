"""Permutations of ``range(n)`` as image tuples: ``p[i]`` is the image of ``i``."""

from __future__ import annotations

import math
from typing import Sequence

Perm = tuple


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_identity(p: Sequence[int]) -> bool:
    return all(i == j for i, j in enumerate(p))


def compose(p: Sequence[int], q: Sequence[int]) -> Perm:
    """``p`` after ``q``."""
    return tuple(p[j] for j in q)


def inverse(p: Sequence[int]) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def is_permutation(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def cycles(p: Sequence[int]) -> list:
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = p[i]
        out.append(tuple(cyc))
    return out


def sign(p: Sequence[int]) -> int:
    """Sign through the cycle decomposition."""
    transpositions = sum(len(c) - 1 for c in cycles(p))
    return -1 if transpositions % 2 else 1


def sign_by_inversions(p: Sequence[int]) -> int:
    """Independent sign computation by counting inversions."""
    n = len(p)
    inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
    return -1 if inv % 2 else 1


def order(p: Sequence[int]) -> int:
    out = 1
    for c in cycles(p):
        out = math.lcm(out, len(c))
    return out


def power(p: Sequence[int], k: int) -> Perm:
    result = identity(len(p))
    base = tuple(p)
    if k < 0:
        base = inverse(base)
        k = -k
    while k:
        if k & 1:
            result = compose(base, result)
        base = compose(base, base)
        k >>= 1
    return result


def from_cycles(n: int, *cycs: Sequence[int]) -> Perm:
    out = list(range(n))
    for c in cycs:
        for a, b in zip(c, list(c[1:]) + [c[0]]):
            out[a] = b
    return tuple(out)


def is_even(p: Sequence[int]) -> bool:
    return sign(p) == 1
