"""Parities of permutations induced on rational points, the block expansion
sign law, PGL generators, and the parity suites."""

from __future__ import annotations

import itertools
import math
import random
from typing import Sequence

from .. import perm as Pm
from ..aaut import parity as aaut_parity, parity_of_representative
from ..errors import ParityUndefined, PositionMismatch
from .bubbles import induced_aaut_level1, induced_permutation_blowup
from .fields import GF, FiniteField
from .groups import group_closure, naive_closure
from .projective import Linear, QuadraticAB, QuadraticStd, det, enumerate_points, induced_permutation, normalize, valid_ab_pairs


def parity(p: Sequence[int]) -> int:
    return Pm.sign(p)


def expand_at(p: Sequence[int], s: int, r: int, d: int, beta: Sequence[int]) -> tuple:
    """Replace position ``s`` (1-based) by a block of ``d`` positions sent to
    the block replacing ``r = p(s)`` through ``beta``; other positions keep
    their relative order."""
    n = len(p)
    if not (1 <= s <= n and 1 <= r <= n) or p[s - 1] != r - 1:
        raise PositionMismatch(f"p({s}) != {r}")
    if sorted(beta) != list(range(d)):
        raise ValueError("beta must be a permutation of range(d)")
    s0, r0 = s - 1, r - 1

    def src(i):
        return i if i < s0 else i + d - 1

    def dst(j):
        return j if j < r0 else j + d - 1

    out = [0] * (n + d - 1)
    for i in range(n):
        if i == s0:
            for k in range(d):
                out[s0 + k] = r0 + beta[k]
        else:
            out[src(i)] = dst(p[i])
    return tuple(out)


def expected_expansion_sign(p, s: int, r: int, d: int, beta) -> int:
    return Pm.sign(p) * Pm.sign(beta) * (-1) ** ((r - s) * (d - 1) % 2)


# PGL

def invertible_matrices(F: FiniteField, size: int):
    for flat in itertools.product(F.elements, repeat=size * size):
        m = tuple(tuple(flat[i * size:(i + 1) * size]) for i in range(size))
        if det(F, m):
            yield m


def pgl_elements(F: FiniteField, size: int) -> list:
    """One matrix per class modulo scalars (first nonzero entry 1)."""
    out = []
    for m in invertible_matrices(F, size):
        flat = [x for row in m for x in row]
        if normalize(F, flat) == tuple(flat):
            out.append(Linear(F, m))
    return out


def pgl_order(q: int, size: int) -> int:
    g = q ** (size * (size - 1) // 2) * math.prod(q ** k - 1 for k in range(2, size + 1))
    return g


def primitive_element(F: FiniteField) -> int:
    for a in range(2, F.q) if F.q > 2 else [1]:
        if len({F.pow(a, k) for k in range(F.q - 1)}) == F.q - 1:
            return a
    return 1


def pgl3_generators(F: FiniteField) -> list:
    """Elementary transvections over an additive basis, and one diagonal."""
    gens = []
    degree = getattr(F, "degree", 1)
    basis = [F.p ** k for k in range(degree)]
    for i, j in itertools.permutations(range(3), 2):
        for lam in basis:
            m = [[1 if a == b else 0 for b in range(3)] for a in range(3)]
            m[i][j] = lam
            gens.append(Linear(F, m))
    w = primitive_element(F)
    if w != 1:
        gens.append(Linear(F, [[w, 0, 0], [0, 1, 0], [0, 0, 1]]))
    return gens


def random_linear(rng: random.Random, F: FiniteField, size: int = 3) -> Linear:
    while True:
        m = [[rng.randrange(F.q) for _ in range(size)] for _ in range(size)]
        if det(F, m):
            return Linear(F, m)


def pgl2_parity_census(q: int) -> dict:
    F = GF(q)
    elements = pgl_elements(F, 2)
    counterexample = None
    signs = {1: 0, -1: 0}
    for m in elements:
        s = Pm.sign(induced_permutation(m, F))
        signs[s] += 1
        if s < 0 and counterexample is None:
            counterexample = {"matrix": [list(r) for r in m.matrix], "perm": list(induced_permutation(m, F))}
    return {
        "q": q,
        "modulus": F.modulus_string(),
        "order": len(elements),
        "expected_order": q * (q * q - 1),
        "even": signs[1],
        "odd": signs[-1],
        "allEven": signs[-1] == 0,
        "counterexample": counterexample,
    }


# element parities

def element_parity(m, F: FiniteField | None = None) -> dict:
    g = induced_aaut_level1(m, F)
    rep = parity_of_representative(g, g.domain)
    try:
        canonical = aaut_parity(g)
    except ParityUndefined as exc:
        canonical = f"undefined: {exc}"
    return {"map": repr(m), "leaves": g.domain.leaf_count, "representative": rep, "canonical": canonical}


def parity_suite(q: int, seed: int = 0, samples: int = 100) -> dict:
    F = GF(q)
    rng = random.Random(seed)
    n = q * q + q + 1
    gens = pgl3_generators(F)
    gen_perms = [induced_permutation(g, F) for g in gens]
    bsgs = group_closure(gen_perms, n)
    report = {
        "q": q,
        "modulus": F.modulus_string(),
        "points": n,
        "seed": seed,
        "generator_signs": [Pm.sign(p) for p in gen_perms],
        "pgl3_image_order": bsgs.order(),
        "pgl3_order": pgl_order(q, 3),
        "alt_order": math.factorial(n) // 2,
        "sym_order": math.factorial(n),
    }
    report["pgl3_in_alt"] = all(s == 1 for s in report["generator_signs"])
    if q == 4:
        linear = [element_parity(random_linear(rng, F), F) for _ in range(samples)]
        std = element_parity(QuadraticStd(F), F)
        report["linear_parities"] = sorted({x["representative"] for x in linear})
        report["quadratic_std"] = std
        report["allEven"] = report["linear_parities"] == [1] and std["representative"] == 1
    else:
        odd = None
        for m in pgl_elements(F, 3):
            if Pm.sign(induced_permutation(m, F)) < 0:
                odd = [list(r) for r in m.matrix]
                break
        report["odd_linear_example"] = odd
        report["odd_linear_exists"] = odd is not None
        report["quadratic_std"] = element_parity(QuadraticStd(F), F)
    ab = []
    for a, b in itertools.islice(valid_ab_pairs(F), 0, 3):
        m = QuadraticAB(F, a, b)
        ab.append({"a": list(a), "b": list(b), "blowup_sign": Pm.sign(induced_permutation_blowup(m, F))})
    report["quadratic_ab"] = ab
    return report


def naive_check(perms, n: int, limit: int = 1_000_000) -> tuple:
    bsgs = group_closure(perms, n)
    naive = naive_closure(perms, n, limit)
    return bsgs.order(), len(naive)


def points_report(q: int) -> dict:
    F = GF(q)
    return {"q": q, "P1": len(enumerate_points(F, 1)), "P2": len(enumerate_points(F, 2))}
