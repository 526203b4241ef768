"""Permutation groups: Schreier-Sims base and strong generating set, and a
naive closure used as an independent oracle."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from .. import perm as P


class BSGS:
    """Deterministic Schreier-Sims for permutations of ``range(n)``."""

    def __init__(self, generators: Iterable[Sequence[int]], n: int | None = None):
        gens = [tuple(g) for g in generators]
        if n is None:
            n = len(gens[0]) if gens else 0
        self.n = n
        self.generators = [g for g in gens if not P.is_identity(g)]
        self.base: list = []
        self.strong: list = []  # strong[i]: generators of the i-th stabilizer
        self.transversals: list = []  # point -> coset representative u with u(base[i]) = point
        self._build()

    def _orbit_transversal(self, b: int, gens: list) -> dict:
        trans = {b: P.identity(self.n)}
        todo = [b]
        while todo:
            x = todo.pop()
            for g in gens:
                y = g[x]
                if y not in trans:
                    trans[y] = P.compose(g, trans[x])
                    todo.append(y)
        return trans

    def sift(self, g: Sequence[int], start: int = 0) -> tuple:
        """Return the residue and the level at which sifting stopped."""
        h = tuple(g)
        for i in range(start, len(self.base)):
            x = h[self.base[i]]
            u = self.transversals[i].get(x)
            if u is None:
                return h, i
            h = P.compose(P.inverse(u), h)
        return h, len(self.base)

    def _new_base_point(self, g: tuple) -> int:
        return next(i for i in range(self.n) if g[i] != i)

    def _build(self) -> None:
        if not self.generators:
            return
        for g in self.generators:
            if all(g[b] == b for b in self.base):
                self.base.append(self._new_base_point(g))
        k = len(self.base)
        self.strong = [[g for g in self.generators if all(g[b] == b for b in self.base[:i])] for i in range(k)]
        self.transversals = [self._orbit_transversal(self.base[i], self.strong[i]) for i in range(k)]
        i = k - 1
        while i >= 0:
            restart = False
            for x, u in list(self.transversals[i].items()):
                for s in self.strong[i]:
                    sx = s[x]
                    # Schreier generator u_{s x}^-1 s u_x
                    schreier = P.compose(P.inverse(self.transversals[i][sx]), P.compose(s, u))
                    if P.is_identity(schreier):
                        continue
                    h, j = self.sift(schreier, i + 1)
                    if j < len(self.base) or not P.is_identity(h):
                        if j == len(self.base):
                            self.base.append(self._new_base_point(h))
                            self.strong.append([])
                            self.transversals.append({})
                        for level in range(i + 1, j + 1):
                            self.strong[level].append(h)
                            self.transversals[level] = self._orbit_transversal(self.base[level], self.strong[level])
                        i = j
                        restart = True
                        break
                if restart:
                    break
            if not restart:
                i -= 1

    def order(self) -> int:
        return math.prod(len(t) for t in self.transversals)

    def contains(self, g: Sequence[int]) -> bool:
        if len(g) != self.n:
            return False
        h, j = self.sift(g)
        return j == len(self.base) and P.is_identity(h)

    def to_json(self) -> dict:
        return {"n": self.n, "base": list(self.base), "orbit_sizes": [len(t) for t in self.transversals],
                "order": self.order()}


def group_closure(generators: Iterable[Sequence[int]], n: int | None = None) -> BSGS:
    gens = [tuple(g) for g in generators]
    if n is None:
        n = len(gens[0]) if gens else 0
    if n > 64:
        raise ValueError("point sets are limited to 64 points")
    return BSGS(gens, n)


def naive_closure(generators: Iterable[Sequence[int]], n: int, limit: int = 1_000_000) -> set:
    ident = P.identity(n)
    gens = [tuple(g) for g in generators]
    seen = {ident}
    todo = [ident]
    while todo:
        h = todo.pop()
        for g in gens:
            k = P.compose(g, h)
            if k not in seen:
                seen.add(k)
                if len(seen) > limit:
                    raise ValueError("closure exceeds the limit")
                todo.append(k)
    return seen


def symmetric_generators(n: int) -> list:
    if n < 2:
        return []
    return [P.from_cycles(n, (0, 1)), P.from_cycles(n, tuple(range(n)))]


def alternating_generators(n: int) -> list:
    return [P.from_cycles(n, (0, 1, i)) for i in range(2, n)]
