"""Finitary almost automorphisms of rooted trees.

An element is a triple (domain tree, range tree, leaf bijection) together with
a finitely supported portrait below every domain leaf.  The address
``leaf + w`` is sent to ``leaf_map[leaf] + portrait[leaf](w)``.

Reduction merges any domain caret whose children are sent onto all the
children of one range vertex; the permutation of the children is absorbed
into the merged portrait.  The reduced representative is unique, so equality
of elements is structural equality of reduced forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from . import perm as P
from .errors import (
    ArityMismatch,
    BudgetExceeded,
    CongruenceFailure,
    InternalInconsistency,
    NotExpandable,
    ParityUndefined,
    ParseError,
)
from .trees import (
    AdmissibleTree,
    RigidPermutation,
    address_from_str,
    address_to_str,
    is_prefix,
    needs_wide,
    special_tree,
)


class Portrait:
    """Finitary tree automorphism: a permutation of the children at finitely
    many vertices (given by the input address), identity elsewhere."""

    __slots__ = ("labels", "_key")

    def __init__(self, labels: Mapping | Iterable = ()):
        items = labels.items() if isinstance(labels, Mapping) else labels
        clean = {}
        for u, p in items:
            p = tuple(p)
            if not P.is_permutation(p):
                raise ValueError(f"label at {u!r} is not a permutation")
            if not P.is_identity(p):
                clean[tuple(u)] = p
        self.labels = clean
        self._key = None

    IDENTITY: "Portrait"

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self.labels.items()))
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Portrait) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Portrait({dict(self.key())})"

    def __bool__(self) -> bool:
        return bool(self.labels)

    def is_identity(self) -> bool:
        return not self.labels

    def label(self, u) -> tuple | None:
        return self.labels.get(tuple(u))

    @property
    def depth(self) -> int:
        """Length of the longest labelled address plus one (0 if trivial)."""
        return max((len(u) + 1 for u in self.labels), default=0)

    def apply(self, w) -> tuple:
        out = []
        prefix = ()
        for x in w:
            p = self.labels.get(prefix)
            out.append(p[x] if p is not None else x)
            prefix = prefix + (x,)
        return tuple(out)

    def section(self, i: int) -> "Portrait":
        return Portrait({u[1:]: p for u, p in self.labels.items() if u and u[0] == i})

    def inverse(self) -> "Portrait":
        return Portrait({self.apply(u): P.inverse(p) for u, p in self.labels.items()})

    def compose(self, other: "Portrait") -> "Portrait":
        """``self`` after ``other``."""
        if not self.labels:
            return other
        if not other.labels:
            return self
        other_inv = other.inverse()
        support = set(other.labels) | {other_inv.apply(v) for v in self.labels}
        out = {}
        for u in support:
            b = other.labels.get(u)
            a = self.labels.get(other.apply(u))
            if a is None:
                out[u] = b
            elif b is None:
                out[u] = a
            else:
                out[u] = P.compose(a, b)
        return Portrait(out)

    def all_even(self) -> bool:
        return all(P.sign(p) == 1 for p in self.labels.values())

    def prefixed(self, i: int) -> dict:
        return {(i,) + u: p for u, p in self.labels.items()}


Portrait.IDENTITY = Portrait()


class AlmostAutomorphism:
    """Representative ``(leaf bijection, S, S')`` with portraits.

    ``entries`` maps each domain leaf to ``(range leaf, Portrait)``.
    """

    def __init__(self, domain: AdmissibleTree, range_: AdmissibleTree, entries: Mapping, check: bool = True):
        if not domain.compatible(range_):
            raise ArityMismatch("domain and range live in different trees")
        self.domain = domain
        self.range = range_
        ent = {}
        for leaf, value in entries.items():
            if isinstance(value, tuple) and len(value) == 2 and isinstance(value[1], Portrait):
                target, portrait = value
            else:
                target, portrait = value, Portrait.IDENTITY
            ent[tuple(leaf)] = (tuple(target), portrait)
        self.entries = ent
        if check:
            if set(ent) != domain.leaf_set:
                raise ValueError("entries must be indexed by the domain leaves")
            targets = [t for t, _ in ent.values()]
            if len(set(targets)) != len(targets) or set(targets) != range_.leaf_set:
                raise ValueError("leaf map must be a bijection onto the range leaves")

    # construction
    @classmethod
    def identity(cls, d: int, root_arity: int | None = None) -> "AlmostAutomorphism":
        t = AdmissibleTree(d, root_arity)
        return cls(t, t, {(): ((), Portrait.IDENTITY)})

    @classmethod
    def from_leaf_map(cls, domain: AdmissibleTree, range_: AdmissibleTree, leaf_map: Mapping,
                      portraits: Mapping | None = None) -> "AlmostAutomorphism":
        portraits = portraits or {}
        entries = {tuple(a): (tuple(b), portraits.get(tuple(a), Portrait.IDENTITY)) for a, b in leaf_map.items()}
        return cls(domain, range_, entries)

    @classmethod
    def from_rigid(cls, rigid: RigidPermutation) -> "AlmostAutomorphism":
        return cls.from_leaf_map(rigid.tree, rigid.tree, rigid.leaf_map)

    @classmethod
    def from_portrait(cls, d: int, portrait: Portrait, root_arity: int | None = None) -> "AlmostAutomorphism":
        t = AdmissibleTree(d, root_arity)
        return cls(t, t, {(): ((), portrait)})

    # basic data
    @property
    def d(self) -> int:
        return self.domain.d

    @property
    def root_arity(self) -> int:
        return self.domain.root_arity

    def target(self, leaf) -> tuple:
        return self.entries[tuple(leaf)][0]

    def portrait(self, leaf) -> Portrait:
        return self.entries[tuple(leaf)][1]

    @property
    def leaf_map(self) -> dict:
        return {a: t for a, (t, _) in self.entries.items()}

    def leaf_permutation(self) -> tuple:
        """Planar positions: the i-th domain leaf goes to position out[i]."""
        idx = self.range.leaf_index
        return tuple(idx[self.entries[a][0]] for a in self.domain.leaves)

    def _require_compatible(self, other: "AlmostAutomorphism") -> None:
        if not self.domain.compatible(other.domain):
            raise ArityMismatch("elements of different groups")

    def evaluate(self, u) -> tuple:
        """Image of an address lying at or below a domain leaf."""
        u = tuple(u)
        leaf = self.domain.leaf_above(u)
        if leaf is None:
            raise NotExpandable(f"{u!r} lies above the domain leaves")
        target, portrait = self.entries[leaf]
        return target + portrait.apply(u[len(leaf):])

    __call__ = evaluate

    def max_portrait_depth(self) -> int:
        return max((p.depth for _, p in self.entries.values()), default=0)

    # expansion and reduction
    def expand_leaf(self, leaf) -> "AlmostAutomorphism":
        leaf = tuple(leaf)
        target, portrait = self.entries[leaf]
        arity = self.domain.arity_at(leaf)
        root = portrait.label(()) or P.identity(arity)
        entries = dict(self.entries)
        del entries[leaf]
        for i in range(arity):
            entries[leaf + (i,)] = (target + (root[i],), portrait.section(i))
        return AlmostAutomorphism(self.domain.expand(leaf), self.range.expand(target), entries, check=False)

    def expand_to(self, tree: AdmissibleTree) -> "AlmostAutomorphism":
        """Representative with domain exactly ``tree``."""
        g = self
        if not self.domain.compatible(tree):
            raise ArityMismatch("target tree lives in a different tree")
        if not g.domain.interior <= tree.interior:
            g = self.reduce()
            if not g.domain.interior <= tree.interior:
                raise NotExpandable("the reduced domain is not contained in the requested tree")
        if g.domain == tree:
            return g
        domain_interior = set(g.domain.interior)
        range_interior = set(g.range.interior)
        entries = dict(g.entries)
        todo = [u for u in entries if u in tree.interior]
        while todo:
            leaf = todo.pop()
            target, portrait = entries.pop(leaf)
            arity = tree.arity_at(leaf)
            root = portrait.label(()) or P.identity(arity)
            domain_interior.add(leaf)
            range_interior.add(target)
            for i in range(arity):
                child = leaf + (i,)
                entries[child] = (target + (root[i],), portrait.section(i))
                if child in tree.interior:
                    todo.append(child)
        rng = AdmissibleTree(self.d, self.root_arity, range_interior)
        return AlmostAutomorphism(tree, rng, entries, check=False)

    def expand_range_to(self, tree: AdmissibleTree) -> "AlmostAutomorphism":
        """Representative with range exactly ``tree``."""
        return self.invert().expand_to(tree).invert()

    def expand_both(self, domain_at_least: AdmissibleTree, range_at_least: AdmissibleTree) -> "AlmostAutomorphism":
        """Representative whose domain and range contain the given trees."""
        g = self.expand_to(self.domain.join(domain_at_least)) if not domain_at_least <= self.domain else self
        if range_at_least <= g.range:
            return g
        return g.expand_range_to(g.range.join(range_at_least))

    def reduce(self) -> "AlmostAutomorphism":
        return self.canonical

    @cached_property
    def canonical(self) -> "AlmostAutomorphism":
        domain_interior = set(self.domain.interior)
        range_interior = set(self.range.interior)
        entries = dict(self.entries)
        dom = self.domain

        def collapsible(u):
            return u in domain_interior and all(
                c not in domain_interior for c in dom.children(u)
            )

        candidates = [u for u in domain_interior if collapsible(u)]
        changed = False
        while candidates:
            u = candidates.pop()
            if not collapsible(u):
                continue
            kids = dom.children(u)
            images = [entries[c][0] for c in kids]
            first = images[0]
            if not first:
                continue
            v = first[:-1]
            if v not in range_interior or len(images) != dom.arity_at(v):
                continue
            if any(len(im) != len(first) or im[:-1] != v for im in images):
                continue
            if any(v + (j,) in range_interior for j in range(len(images))):
                continue
            sigma = tuple(im[-1] for im in images)
            if sorted(sigma) != list(range(len(images))):
                continue
            labels = {}
            if not P.is_identity(sigma):
                labels[()] = sigma
            for i, c in enumerate(kids):
                labels.update(entries[c][1].prefixed(i))
                del entries[c]
            entries[u] = (v, Portrait(labels))
            domain_interior.discard(u)
            range_interior.discard(v)
            changed = True
            if u and collapsible(u[:-1]):
                candidates.append(u[:-1])
        if not changed:
            return self
        out = AlmostAutomorphism(
            AdmissibleTree(self.d, self.root_arity, domain_interior),
            AdmissibleTree(self.d, self.root_arity, range_interior),
            entries,
            check=False,
        )
        out.__dict__["canonical"] = out
        return out

    def key(self) -> tuple:
        c = self.canonical
        return (
            c.d,
            c.root_arity,
            tuple((a,) + (c.entries[a][0], c.entries[a][1].key()) for a in c.domain.leaves),
        )

    def is_reduced(self) -> bool:
        return self.canonical is self

    def equals(self, other: "AlmostAutomorphism") -> bool:
        return self.key() == other.key()

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlmostAutomorphism):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def structurally_equal(self, other: "AlmostAutomorphism") -> bool:
        return (
            self.domain == other.domain
            and self.range == other.range
            and all(self.entries[a][0] == other.entries[a][0] and self.entries[a][1] == other.entries[a][1]
                    for a in self.domain.leaves)
        )

    def is_identity(self) -> bool:
        c = self.canonical
        return c.domain.leaf_count == 1 and c.entries[()][1].is_identity()

    # group operations
    def invert(self) -> "AlmostAutomorphism":
        entries = {t: (a, p.inverse()) for a, (t, p) in self.entries.items()}
        return AlmostAutomorphism(self.range, self.domain, entries, check=False)

    def compose(self, other: "AlmostAutomorphism") -> "AlmostAutomorphism":
        """``self`` after ``other``, in reduced form."""
        return compose(self, other)

    def __mul__(self, other: "AlmostAutomorphism") -> "AlmostAutomorphism":
        return compose(self, other)

    def power(self, n: int) -> "AlmostAutomorphism":
        base = self if n >= 0 else self.invert()
        result = AlmostAutomorphism.identity(self.d, self.root_arity)
        for _ in range(abs(n)):
            result = compose(base, result)
        return result

    def all_labels_even(self) -> bool:
        return all(p.all_even() for _, p in self.canonical.entries.values())

    def __repr__(self) -> str:
        wide = needs_wide(self.d, self.root_arity)
        parts = []
        for a in self.domain.leaves:
            t, p = self.entries[a]
            s = f"{address_to_str(a, wide) or 'ε'}->{address_to_str(t, wide) or 'ε'}"
            if p:
                s += f"{dict(p.key())}"
            parts.append(s)
        return f"AlmostAutomorphism(d={self.d}, n={self.root_arity}, {' '.join(parts)})"

    # serialization
    def to_json(self) -> dict:
        c = self.canonical
        wide = needs_wide(c.d, c.root_arity)
        rows = []
        for a in c.domain.leaves:
            t, p = c.entries[a]
            rows.append({
                "from": address_to_str(a, wide),
                "to": address_to_str(t, wide),
                "portrait": [{"at": address_to_str(u, wide), "perm": list(s)} for u, s in p.key()],
            })
        return {"d": c.d, "rootArity": c.root_arity, "map": rows}

    @classmethod
    def from_json(cls, obj) -> "AlmostAutomorphism":
        try:
            d = int(obj["d"])
            n = int(obj.get("rootArity", d))
            wide = needs_wide(d, n)
            entries = {}
            for row in obj["map"]:
                a = address_from_str(row["from"], wide)
                t = address_from_str(row["to"], wide)
                labels = {address_from_str(x["at"], wide): tuple(int(v) for v in x["perm"])
                          for x in row.get("portrait", [])}
                if a in entries:
                    raise ParseError(f"duplicate domain leaf {row['from']!r}")
                entries[a] = (t, Portrait(labels))
            domain = AdmissibleTree.from_leaves(d, entries.keys(), n)
            range_ = AdmissibleTree.from_leaves(d, [t for t, _ in entries.values()], n)
            return cls(domain, range_, entries)
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad element JSON: {exc}") from exc


def compose(g: AlmostAutomorphism, f: AlmostAutomorphism) -> AlmostAutomorphism:
    """Reduced form of ``g`` after ``f``."""
    g._require_compatible(f)
    meet = f.range.join(g.domain)
    f2 = f if f.range == meet else f.expand_range_to(meet)
    g2 = g.expand_to(meet)
    entries = {}
    for a, (m, pf) in f2.entries.items():
        t, pg = g2.entries[m]
        entries[a] = (t, pg.compose(pf))
    return AlmostAutomorphism(f2.domain, g2.range, entries, check=False).canonical


def invert(g: AlmostAutomorphism) -> AlmostAutomorphism:
    return g.invert().canonical


def reduce(g: AlmostAutomorphism) -> AlmostAutomorphism:
    return g.canonical


def expand_to(g: AlmostAutomorphism, tree: AdmissibleTree) -> AlmostAutomorphism:
    return g.expand_to(tree)


def equals(g: AlmostAutomorphism, f: AlmostAutomorphism) -> bool:
    return g.equals(f)


# classification

@dataclass(frozen=True)
class Classification:
    kind: str
    tree: AdmissibleTree | None = None
    address: tuple | None = None
    exponent: int | None = None
    image: tuple | None = None
    iterations: int = 0

    def to_json(self) -> dict:
        if self.kind == "Elliptic":
            return {"kind": "Elliptic", "witness": self.tree.to_json(), "iterations": self.iterations}
        wide = needs_wide(self.tree.d, self.tree.root_arity) if self.tree else False
        return {
            "kind": "Translation",
            "witness": {
                "address": address_to_str(self.address, wide),
                "exponent": self.exponent,
                "image": address_to_str(self.image, wide),
            },
            "iterations": self.iterations,
        }


def _contracting_cone(h: AlmostAutomorphism, extra_depth: int = 1):
    """An address ``a`` with ``h(cone(a))`` a cone strictly inside ``cone(a)``."""
    for leaf in h.domain.leaves:
        target, portrait = h.entries[leaf]
        words = [()]
        frontier = [()]
        arity = h.domain.arity_at(leaf)
        for _ in range(extra_depth):
            nxt = []
            for w in frontier:
                k = arity if not leaf and not w else h.d
                nxt.extend(w + (i,) for i in range(k))
            words.extend(nxt)
            frontier = nxt
        for w in words:
            a = leaf + w
            b = target + portrait.apply(w)
            if len(b) > len(a) and is_prefix(a, b):
                return a, b
    return None


def verify_translation_witness(g: AlmostAutomorphism, address, exponent: int, image, depth: int = 3) -> bool:
    """Check by evaluation that ``g**exponent`` maps cone(address) onto
    cone(image) and that the latter is strictly smaller."""
    address, image = tuple(address), tuple(image)
    if not (len(image) > len(address) and is_prefix(address, image)):
        return False
    h = g.power(exponent).canonical
    path = AdmissibleTree(h.d, h.root_arity, {address[:k] for k in range(len(address))})
    rep = h.expand_to(h.domain.join(path))
    if rep.domain.leaf_above(address) is None:
        return False
    words = _words(h.d, depth + rep.max_portrait_depth())
    images = {rep.evaluate(address + w) for w in words}
    return len(images) == len(words) and all(
        len(x) == len(image) + len(words[0]) and x[: len(image)] == image for x in images
    )


def _words(d: int, length: int):
    out = [()]
    for _ in range(length):
        out = [w + (i,) for w in out for i in range(d)]
    return out


def classify(g: AlmostAutomorphism, budget: int = 64) -> Classification:
    """Elliptic/translation certificate search with an explicit budget."""
    g = g.canonical
    tree = g.domain.join(g.range)
    power = AlmostAutomorphism.identity(g.d, g.root_arity)
    elliptic = None
    for k in range(1, budget + 1):
        if elliptic is None:
            rep = g.expand_to(tree)
            if rep.range == tree:
                elliptic = Classification("Elliptic", tree=tree, iterations=k)
            else:
                tree = tree.join(rep.range)
        power = compose(g, power)
        found = _contracting_cone(power)
        if found is not None:
            if elliptic is not None:
                raise InternalInconsistency("element certified both elliptic and translation")
            a, b = found
            if not verify_translation_witness(g, a, k, b):
                raise InternalInconsistency("translation witness failed to verify")
            return Classification("Translation", tree=g.domain, address=a, exponent=k, image=b, iterations=k)
        if elliptic is not None:
            return elliptic
    raise BudgetExceeded(f"no certificate within {budget} iterations")


def order(g: AlmostAutomorphism, limit: int = 1000) -> int | None:
    """Order of ``g`` when it is at most ``limit``."""
    h = g.canonical
    for n in range(1, limit + 1):
        if h.is_identity():
            return n
        h = compose(g, h)
    return None


# parity

def parity_of_representative(g: AlmostAutomorphism, tree: AdmissibleTree) -> int:
    return P.sign(g.expand_to(tree).leaf_permutation())


def rigid_tree(g: AlmostAutomorphism) -> AdmissibleTree:
    """Domain of a representative without portrait labels: every leaf cone
    expanded fully down to the depth of its portrait."""
    c = g.canonical
    tree = c.domain
    for a, (_, portrait) in c.entries.items():
        frontier = [a]
        for _ in range(portrait.depth):
            tree = tree.expand_all(frontier)
            frontier = [u + (i,) for u in frontier for i in range(tree.arity_at(u))]
    return tree


def parity(g: AlmostAutomorphism) -> int:
    """Sign of the leaf bijection of a label-free representative.  For odd
    ``d`` every further expansion multiplies it by +1, so the value does not
    depend on the representative among label-free or even-labelled ones."""
    if g.d % 2 == 0:
        raise ParityUndefined(f"parity needs odd arity, got d={g.d}")
    return parity_of_representative(g, rigid_tree(g))


# transport between T_{d,n} and T_d

class Transporter:
    """Fixed forest isomorphism between the complement of the root star of
    ``T_{d,n}`` and the complement of ``special_tree(n, d)`` in ``T_d``."""

    def __init__(self, d: int, n: int):
        if (n - 1) % (d - 1):
            raise CongruenceFailure(f"{n} is not 1 modulo {d - 1}")
        self.d = d
        self.n = n
        self.anchor = special_tree(n, d)
        self.source_star = AdmissibleTree.star(d, n)
        self._back = {leaf: i for i, leaf in enumerate(self.anchor.leaves)}

    def forward_address(self, u) -> tuple:
        u = tuple(u)
        if not u:
            raise ValueError("the root is not in the transported forest")
        return self.anchor.leaves[u[0]] + u[1:]

    def backward_address(self, u) -> tuple:
        u = tuple(u)
        leaf = self.anchor.leaf_above(u)
        if leaf is None:
            raise ValueError(f"{u!r} is inside the anchor tree")
        return (self._back[leaf],) + u[len(leaf):]

    def transport(self, g: AlmostAutomorphism) -> AlmostAutomorphism:
        if (g.d, g.root_arity) != (self.d, self.n):
            raise ArityMismatch("element does not act on the source tree")
        rep = g.expand_both(self.source_star, self.source_star)

        def tree_of(t):
            inner = {self.forward_address(u) for u in t.interior if u}
            return AdmissibleTree(self.d, None, inner | self.anchor.interior)

        entries = {self.forward_address(a): (self.forward_address(t), p) for a, (t, p) in rep.entries.items()}
        return AlmostAutomorphism(tree_of(rep.domain), tree_of(rep.range), entries).canonical

    def untransport(self, h: AlmostAutomorphism) -> AlmostAutomorphism:
        if (h.d, h.root_arity) != (self.d, self.d):
            raise ArityMismatch("element does not act on the target tree")
        rep = h.expand_both(self.anchor, self.anchor)

        def tree_of(t):
            inner = {self.backward_address(u) for u in t.interior if u not in self.anchor.interior}
            return AdmissibleTree(self.d, self.n, inner | {()})

        entries = {self.backward_address(a): (self.backward_address(t), p) for a, (t, p) in rep.entries.items()}
        return AlmostAutomorphism(tree_of(rep.domain), tree_of(rep.range), entries).canonical


def almost_isomorphism(d: int, n: int) -> Transporter:
    return Transporter(d, n)


# named elements

def swap(d: int = 2) -> AlmostAutomorphism:
    """Exchange the first two root cones rigidly."""
    star = AdmissibleTree.star(d)
    images = {(0,): (1,), (1,): (0,)}
    leaf_map = {u: images.get(u, u) for u in star.leaves}
    return AlmostAutomorphism.from_leaf_map(star, star, leaf_map)


def translation_b() -> AlmostAutomorphism:
    """The binary element sending leaves 0, 10, 11 to 00, 01, 1."""
    dom = AdmissibleTree.from_leaves(2, [(0,), (1, 0), (1, 1)])
    rng = AdmissibleTree.from_leaves(2, [(0, 0), (0, 1), (1,)])
    return AlmostAutomorphism.from_leaf_map(dom, rng, {(0,): (0, 0), (1, 0): (0, 1), (1, 1): (1,)})
