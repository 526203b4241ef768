"""Small finite fields with table arithmetic.

An element of GF(p^k) is stored as the integer ``a0 + a1 p + ... + a_{k-1} p^{k-1}``
for the residue ``a0 + a1 t + ...`` modulo a fixed monic irreducible
polynomial.  The prime subfield is therefore ``0..p-1`` and the ordering of
elements is the integer ordering.
"""

from __future__ import annotations

import itertools

from ..errors import ParseError

# monic moduli, coefficients from degree 0 upwards
MODULI = {
    2: (2, (0, 1)),
    3: (3, (0, 1)),
    4: (2, (1, 1, 1)),  # t^2 + t + 1
    5: (5, (0, 1)),
    7: (7, (0, 1)),
    8: (2, (1, 1, 0, 1)),  # t^3 + t + 1
    9: (3, (1, 0, 1)),  # t^2 + 1
}


class FiniteField:
    """Field given by complete addition and multiplication tables."""

    def __init__(self, q: int, p: int, add: list, mul: list, name: str):
        self.q = q
        self.p = p
        self._add = add
        self._mul = mul
        self.name = name
        self._neg = [add[x].index(0) for x in range(q)]
        self._inv = [None] + [mul[x].index(1) for x in range(1, q)]

    zero = 0
    one = 1

    @property
    def elements(self) -> range:
        return range(self.q)

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self._mul[a][self.inv(b)]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        out = 1
        while e:
            if e & 1:
                out = self._mul[out][a]
            a = self._mul[a][a]
            e >>= 1
        return out

    def const(self, a: int) -> int:
        return a

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def sum(self, items) -> int:
        out = 0
        for x in items:
            out = self._add[out][x]
        return out

    def verify_axioms(self) -> bool:
        E = self.elements
        for a, b in itertools.product(E, repeat=2):
            if self.add(a, b) != self.add(b, a) or self.mul(a, b) != self.mul(b, a):
                return False
        for a, b, c in itertools.product(E, repeat=3):
            if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)):
                return False
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                return False
            if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)):
                return False
        if any(self.add(a, 0) != a or self.mul(a, 1) != a for a in E):
            return False
        return all(self.mul(a, self.inv(a)) == 1 for a in E if a)

    def frobenius_is_automorphism(self) -> bool:
        f = self.frobenius
        if len({f(a) for a in self.elements}) != self.q:
            return False
        return all(f(self.add(a, b)) == self.add(f(a), f(b)) and f(self.mul(a, b)) == self.mul(f(a), f(b))
                   for a, b in itertools.product(self.elements, repeat=2))

    def __repr__(self) -> str:
        return self.name

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and self.name == other.name

    def __hash__(self) -> int:
        return hash(self.name)


class PrimePowerField(FiniteField):
    def __init__(self, q: int):
        if q not in MODULI:
            raise ValueError(f"unsupported field size {q}")
        p, modulus = MODULI[q]
        k = len(modulus) - 1
        self.degree = k
        self.modulus = modulus

        def to_poly(x):
            return [(x // p ** i) % p for i in range(k)]

        def from_poly(c):
            return sum(int(ci) * p ** i for i, ci in enumerate(c))

        def polymul(a, b):
            prod = [0] * (2 * k - 1)
            for i, ai in enumerate(a):
                for j, bj in enumerate(b):
                    prod[i + j] = (prod[i + j] + ai * bj) % p
            for deg in range(2 * k - 2, k - 1, -1):
                c = prod[deg]
                if c:
                    for i in range(k + 1):
                        prod[deg - k + i] = (prod[deg - k + i] - c * modulus[i]) % p
            return prod[:k]

        polys = [to_poly(x) for x in range(q)]
        add = [[from_poly([(a + b) % p for a, b in zip(polys[x], polys[y])]) for y in range(q)] for x in range(q)]
        mul = [[from_poly(polymul(polys[x], polys[y])) for y in range(q)] for x in range(q)]
        super().__init__(q, p, add, mul, f"GF({q})")

    def modulus_string(self) -> str:
        if self.degree == 1:
            return f"prime field mod {self.p}"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.modulus[i]
            if c:
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                terms.append(("" if c == 1 and i else str(c)) + mono)
        return " + ".join(terms)

    def to_str(self, a: int) -> str:
        """Coefficient string, constant term first (``"01"`` is t in GF(4))."""
        return "".join(str((a // self.p ** i) % self.p) for i in range(self.degree))

    def parse(self, text: str) -> int:
        text = text.strip()
        if not text or len(text) > self.degree or any(not ch.isdigit() or int(ch) >= self.p for ch in text):
            raise ParseError(f"bad element literal {text!r} for {self.name}")
        return sum(int(ch) * self.p ** i for i, ch in enumerate(text))


_CACHE: dict = {}


def GF(q: int) -> PrimePowerField:
    if q not in _CACHE:
        _CACHE[q] = PrimePowerField(q)
    return _CACHE[q]


class QuadraticExtension(FiniteField):
    """``F[s] / (s^2 - c s - e)`` for the first irreducible quadratic.

    Elements are ``x + y s`` stored as ``x + q*y`` so that the base field
    embeds as ``0..q-1``."""

    def __init__(self, base: FiniteField):
        F = base
        q = F.q
        for c, e in itertools.product(F.elements, repeat=2):
            if all(F.sub(F.sub(F.mul(x, x), F.mul(c, x)), e) != 0 for x in F.elements):
                break
        else:  # pragma: no cover - every finite field has an irreducible quadratic
            raise ValueError("no irreducible quadratic")
        self.base = F
        self.c, self.e = c, e

        def split(z):
            return z % q, z // q

        add = [[0] * (q * q) for _ in range(q * q)]
        mul = [[0] * (q * q) for _ in range(q * q)]
        for z1 in range(q * q):
            x1, y1 = split(z1)
            for z2 in range(q * q):
                x2, y2 = split(z2)
                add[z1][z2] = F.add(x1, x2) + q * F.add(y1, y2)
                # (x1 + y1 s)(x2 + y2 s) with s^2 = c s + e
                yy = F.mul(y1, y2)
                x = F.add(F.mul(x1, x2), F.mul(e, yy))
                y = F.add(F.add(F.mul(x1, y2), F.mul(y1, x2)), F.mul(c, yy))
                mul[z1][z2] = x + q * y
        super().__init__(q * q, F.p, add, mul, f"{F.name}[s]/(s^2-{c}s-{e})")

    def is_base(self, z: int) -> bool:
        return z < self.base.q

    def conjugate(self, z: int) -> int:
        """The nontrivial automorphism over the base field: s goes to c - s."""
        F, q = self.base, self.base.q
        x, y = z % q, z // q
        return F.add(x, F.mul(y, self.c)) + q * F.neg(y)
