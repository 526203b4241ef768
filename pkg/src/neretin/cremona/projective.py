"""Projective points over small fields, linear and quadratic maps, and the
leading-order (germ) evaluation used for infinitely near points.

A direction at a point ``p`` of the plane is recorded as the line through
``p`` in that direction, in normalized dual coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from ..errors import NotBijectiveOnRationalPoints, UnsupportedMap
from .fields import FiniteField, QuadraticExtension


def normalize(F: FiniteField, v: Sequence[int]) -> tuple:
    for x in v:
        if x:
            s = F.inv(x)
            return tuple(F.mul(s, y) for y in v)
    raise ValueError("zero vector")


def is_zero(v) -> bool:
    return not any(v)


@lru_cache(maxsize=None)
def _points(F: FiniteField, dim: int) -> tuple:
    out = []
    for v in itertools.product(F.elements, repeat=dim + 1):
        if not is_zero(v) and normalize(F, v) == v:
            out.append(v)
    return tuple(sorted(out))


def enumerate_points(F: FiniteField, dim: int = 2) -> list:
    """Rational points of P^dim, normalized (first nonzero entry 1), sorted."""
    return list(_points(F, dim))


@lru_cache(maxsize=None)
def point_index(F: FiniteField, dim: int = 2) -> dict:
    return {p: i for i, p in enumerate(_points(F, dim))}


def cross(F: FiniteField, u, v) -> tuple:
    return (
        F.sub(F.mul(u[1], v[2]), F.mul(u[2], v[1])),
        F.sub(F.mul(u[2], v[0]), F.mul(u[0], v[2])),
        F.sub(F.mul(u[0], v[1]), F.mul(u[1], v[0])),
    )


def dot(F: FiniteField, u, v) -> int:
    return F.sum(F.mul(a, b) for a, b in zip(u, v))


def proportional(F: FiniteField, u, v) -> bool:
    return is_zero(cross(F, u, v)) if len(u) == 3 else F.sub(F.mul(u[0], v[1]), F.mul(u[1], v[0])) == 0


def line_through(F: FiniteField, p, r) -> tuple:
    return normalize(F, cross(F, p, r))


@lru_cache(maxsize=None)
def directions(F: FiniteField, p: tuple) -> tuple:
    """Lines through ``p`` in canonical order."""
    return tuple(sorted(ell for ell in _points(F, 2) if dot(F, ell, p) == 0))


def points_on(F: FiniteField, ell) -> list:
    return [p for p in _points(F, 2) if dot(F, ell, p) == 0]


def second_point(F: FiniteField, p, ell) -> tuple:
    return next(r for r in points_on(F, ell) if r != p)


def det3(F: FiniteField, m) -> int:
    (a, b, c), (d, e, f), (g, h, i) = m
    return F.sum([
        F.mul(a, F.sub(F.mul(e, i), F.mul(f, h))),
        F.neg(F.mul(b, F.sub(F.mul(d, i), F.mul(f, g)))),
        F.mul(c, F.sub(F.mul(d, h), F.mul(e, g))),
    ])


def det(F: FiniteField, m) -> int:
    if len(m) == 2:
        return F.sub(F.mul(m[0][0], m[1][1]), F.mul(m[0][1], m[1][0]))
    return det3(F, m)


def mat_inverse(F: FiniteField, m) -> tuple:
    n = len(m)
    a = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        s = F.inv(a[col][col])
        a[col] = [F.mul(s, x) for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def mat_mul(F: FiniteField, a, b) -> tuple:
    return tuple(tuple(F.sum(F.mul(a[i][k], b[k][j]) for k in range(len(b))) for j in range(len(b[0])))
                 for i in range(len(a)))


class TruncatedPolys:
    """``R[t] / t^K`` over a field, with elements as coefficient tuples."""

    def __init__(self, F: FiniteField, K: int):
        self.F = F
        self.K = K

    def const(self, a: int) -> tuple:
        return (a,) + (0,) * (self.K - 1)

    def add(self, a, b) -> tuple:
        return tuple(self.F.add(x, y) for x, y in zip(a, b))

    def mul(self, a, b) -> tuple:
        F, K = self.F, self.K
        out = [0] * K
        for i, x in enumerate(a):
            if x:
                for j in range(K - i):
                    if b[j]:
                        out[i + j] = F.add(out[i + j], F.mul(x, b[j]))
        return tuple(out)

    def sum(self, items) -> tuple:
        out = self.const(0)
        for x in items:
            out = self.add(out, x)
        return out


# maps

class ProjMap:
    kind = "abstract"
    degree = 1

    def __init__(self, F: FiniteField):
        self.F = F

    def apply_over(self, R, v) -> tuple:
        """Evaluate the defining polynomials over a ring ``R`` containing the
        coefficients."""
        raise NotImplementedError

    def apply(self, v) -> tuple:
        return self.apply_over(self.eval_field, v)

    @property
    def eval_field(self) -> FiniteField:
        return self.F

    def image(self, p) -> tuple | None:
        w = self.apply(p)
        if is_zero(w):
            return None
        return normalize(self.eval_field, w)

    def base_points(self) -> list:
        """Rational points of indeterminacy."""
        return [p for p in enumerate_points(self.F) if self.image(p) is None]

    def inverse(self) -> "ProjMap":
        raise NotImplementedError


class Linear(ProjMap):
    kind = "linear"

    def __init__(self, F: FiniteField, matrix):
        super().__init__(F)
        self.matrix = tuple(tuple(row) for row in matrix)
        self.dim = len(self.matrix) - 1
        if det(F, self.matrix) == 0:
            raise ValueError("singular matrix")

    def apply_over(self, R, v) -> tuple:
        return tuple(R.sum(R.mul(R.const(m), x) for m, x in zip(row, v)) for row in self.matrix)

    def inverse(self) -> "Linear":
        return Linear(self.F, mat_inverse(self.F, self.matrix))

    def compose(self, other: "Linear") -> "Linear":
        """``self`` after ``other``."""
        return Linear(self.F, mat_mul(self.F, self.matrix, other.matrix))

    def key(self) -> tuple:
        """Matrix normalized up to scalars."""
        flat = normalize(self.F, [x for row in self.matrix for x in row])
        return flat

    def __eq__(self, other) -> bool:
        return isinstance(other, Linear) and self.F == other.F and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Linear({self.matrix})"


class QuadraticStd(ProjMap):
    """The involution ``(x:y:z) -> (yz:xz:xy)``."""

    kind = "quadratic-std"
    degree = 2
    dim = 2

    def apply_over(self, R, v) -> tuple:
        x, y, z = v
        return (R.mul(y, z), R.mul(x, z), R.mul(x, y))

    def inverse(self) -> "QuadraticStd":
        return self

    def __repr__(self) -> str:
        return "QuadraticStd()"


class QuadraticAB(ProjMap):
    """Quadratic involution with base points a rational point ``a`` and a
    pair ``b``, ``conj(b)`` conjugate over the quadratic extension.

    It is ``A s A^-1`` with ``s`` the standard involution and ``A`` the matrix
    with columns ``a, b, conj(b)``; conjugation swaps the last two columns,
    which commutes with ``s``, so the map is defined over the base field."""

    kind = "quadratic-ab"
    degree = 2
    dim = 2

    def __init__(self, F: FiniteField, a, b, E: QuadraticExtension | None = None):
        super().__init__(F)
        self.E = E or QuadraticExtension(F)
        E = self.E
        self.a = normalize(F, a)
        self.b = normalize(E, b)
        self.bbar = normalize(E, [E.conjugate(x) for x in self.b])
        if self.bbar == self.b:
            raise ValueError("b must not be rational")
        A = tuple(tuple(col[i] for col in (self.a, self.b, self.bbar)) for i in range(3))
        if det3(E, A) == 0:
            raise ValueError("base points are collinear")
        self.A = A
        self.Ainv = mat_inverse(E, A)

    @property
    def eval_field(self) -> FiniteField:
        return self.E

    def apply_over(self, R, v) -> tuple:
        u = tuple(R.sum(R.mul(R.const(m), x) for m, x in zip(row, v)) for row in self.Ainv)
        x, y, z = u
        s = (R.mul(y, z), R.mul(x, z), R.mul(x, y))
        return tuple(R.sum(R.mul(R.const(m), x) for m, x in zip(row, s)) for row in self.A)

    def image(self, p) -> tuple | None:
        w = super().image(p)
        if w is None:
            return None
        if not all(self.E.is_base(x) for x in w):
            raise AssertionError("image of a rational point is not rational")
        return w

    def inverse(self) -> "QuadraticAB":
        return self

    def __repr__(self) -> str:
        return f"QuadraticAB(a={self.a}, b={self.b})"


def conjugate_pairs(F: FiniteField, E: QuadraticExtension | None = None) -> list:
    """Normalized non-rational points of P^2 over E, one per conjugate pair."""
    E = E or QuadraticExtension(F)
    seen = set()
    out = []
    for v in enumerate_points(E, 2):
        if all(E.is_base(x) for x in v) or v in seen:
            continue
        bar = normalize(E, [E.conjugate(x) for x in v])
        seen.add(v)
        seen.add(bar)
        out.append(v)
    return out


def valid_ab_pairs(F: FiniteField):
    """Every (a, b) giving a valid QuadraticAB, ``b`` one point per pair."""
    E = QuadraticExtension(F)
    for a in enumerate_points(F):
        for b in conjugate_pairs(F, E):
            bbar = normalize(E, [E.conjugate(x) for x in b])
            A = tuple(tuple(col[i] for col in (a, b, bbar)) for i in range(3))
            if det3(E, A):
                yield a, b


# induced permutations

def induced_permutation(m: ProjMap, F: FiniteField | None = None) -> tuple:
    """Permutation of the canonical point list of P^1 or P^2 induced by ``m``."""
    F = F or m.F
    dim = getattr(m, "dim", 2)
    pts = enumerate_points(F, dim)
    index = point_index(F, dim)
    images = []
    seen = {}
    for p in pts:
        w = m.image(p)
        if w is None:
            raise NotBijectiveOnRationalPoints("point of indeterminacy", p)
        if w in seen:
            raise NotBijectiveOnRationalPoints(f"collision with {pts[seen[w]]}", p)
        seen[w] = index[p]
        images.append(index[w])
    return tuple(images)


@dataclass(frozen=True)
class Germ:
    point: tuple
    tangent: tuple | None  # line, if determined


def germ_image(m: ProjMap, p, v, w=None) -> Germ | None:
    """Leading-order image of the curve ``p + t v + t^2 w``.

    Returns None when the curve maps identically to zero."""
    E = m.eval_field
    K = 2 * m.degree + 1
    R = TruncatedPolys(E, K)
    w = w if w is not None else (0, 0, 0)
    curve = tuple((pi, vi, wi) + (0,) * (K - 3) for pi, vi, wi in zip(p, v, w))
    coeffs = m.apply_over(R, curve)
    vecs = [tuple(c[k] for c in coeffs) for k in range(K)]
    k0 = next((k for k in range(K) if not is_zero(vecs[k])), None)
    if k0 is None:
        return None
    lead = normalize(E, vecs[k0])
    for k in range(k0 + 1, K):
        cr = cross(E, lead, vecs[k])
        if not is_zero(cr):
            return Germ(lead, normalize(E, cr))
    return Germ(lead, None)


def line_image(m: Linear, ell) -> tuple:
    """Image of a line under a linear map, from the images of its points."""
    F = m.F
    pts = [m.image(p) for p in points_on(F, ell)]
    return line_through(F, pts[0], pts[1])


def require_supported(m: ProjMap, allowed=("linear", "quadratic-std", "quadratic-ab")) -> None:
    if m.kind not in allowed or getattr(m, "dim", 2) != 2:
        raise UnsupportedMap(f"map of kind {m.kind} is not supported here")
