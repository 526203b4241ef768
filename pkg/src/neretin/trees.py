"""Rooted trees of bounded arity, admissible subtrees and rigid permutations.

Addresses are tuples of child indices; the root is ``()``.  Root children are
numbered ``0..root_arity-1`` and every other vertex has ``d`` children.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import ArityMismatch, BoundExceeded, InfeasibleLeafCount, NotALeaf, ParseError

Address = tuple

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"
RIGID_ENUMERATION_BOUND = 8


def is_prefix(a: Address, b: Address) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


def address_to_str(addr: Address, wide: bool = False) -> str:
    if wide:
        return ".".join(str(i) for i in addr)
    return "".join(DIGITS[i] for i in addr)


def address_from_str(text: str, wide: bool = False) -> Address:
    if text == "":
        return ()
    if wide:
        try:
            return tuple(int(part) for part in text.split("."))
        except ValueError as exc:
            raise ParseError(f"bad address {text!r}") from exc
    out = []
    for ch in text.lower():
        k = DIGITS.find(ch)
        if k < 0:
            raise ParseError(f"bad address digit {ch!r} in {text!r}")
        out.append(k)
    return tuple(out)


def needs_wide(d: int, root_arity: int) -> bool:
    return max(d, root_arity) > len(DIGITS)


class AdmissibleTree:
    """Finite rooted subtree closed under prefixes in which every vertex has
    either all of its children or none.

    The tree is stored through its set of interior vertices, which is an
    arbitrary prefix-closed set; the leaves are derived from it.
    """

    def __init__(self, d: int, root_arity: int | None = None, interior: Iterable[Address] = ()):
        if d < 2:
            raise ValueError("arity must be at least 2")
        self.d = d
        self.root_arity = d if root_arity is None else root_arity
        if self.root_arity < 1:
            raise ValueError("root arity must be positive")
        interior = frozenset(tuple(u) for u in interior)
        for u in interior:
            if u and u[:-1] not in interior:
                raise ValueError(f"interior set is not prefix closed at {u!r}")
            self._check_address(u)
        self.interior = interior

    # construction helpers
    @classmethod
    def root(cls, d: int, root_arity: int | None = None) -> "AdmissibleTree":
        return cls(d, root_arity)

    @classmethod
    def star(cls, d: int, root_arity: int | None = None) -> "AdmissibleTree":
        return cls(d, root_arity, [()])

    @classmethod
    def from_leaves(cls, d: int, leaves: Iterable[Address], root_arity: int | None = None) -> "AdmissibleTree":
        leaves = {tuple(u) for u in leaves}
        if not leaves:
            raise ValueError("a tree has at least one leaf")
        interior = {u[:k] for u in leaves for k in range(len(u))}
        tree = cls(d, root_arity, interior)
        if set(tree.leaves) != leaves:
            raise ValueError("leaf set is not the leaf set of an admissible tree")
        return tree

    def _check_address(self, u: Address) -> None:
        for k, digit in enumerate(u):
            bound = self.root_arity if k == 0 else self.d
            if not 0 <= digit < bound:
                raise ValueError(f"address {u!r} out of range")

    # basic structure
    def arity_at(self, u: Address) -> int:
        return self.root_arity if len(u) == 0 else self.d

    def children(self, u: Address) -> tuple:
        return tuple(u + (i,) for i in range(self.arity_at(u)))

    @cached_property
    def leaves(self) -> tuple:
        """Leaves in planar (lexicographic) order."""
        if not self.interior:
            return ((),)
        out = [c for u in self.interior for c in self.children(u) if c not in self.interior]
        out.sort()
        return tuple(out)

    @cached_property
    def leaf_set(self) -> frozenset:
        return frozenset(self.leaves)

    @cached_property
    def leaf_index(self) -> dict:
        return {u: i for i, u in enumerate(self.leaves)}

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)

    @cached_property
    def vertices(self) -> frozenset:
        return self.interior | self.leaf_set

    @property
    def depth(self) -> int:
        return max(len(u) for u in self.leaves)

    def is_leaf(self, u: Address) -> bool:
        return u in self.leaf_set

    def __contains__(self, u) -> bool:
        return tuple(u) in self.vertices

    def compatible(self, other: "AdmissibleTree") -> bool:
        return self.d == other.d and self.root_arity == other.root_arity

    def _require_compatible(self, other: "AdmissibleTree") -> None:
        if not self.compatible(other):
            raise ArityMismatch(
                f"trees over ({self.d},{self.root_arity}) and ({other.d},{other.root_arity})"
            )

    def __le__(self, other: "AdmissibleTree") -> bool:
        self._require_compatible(other)
        return self.interior <= other.interior

    def __lt__(self, other: "AdmissibleTree") -> bool:
        return self <= other and self.interior != other.interior

    def __eq__(self, other) -> bool:
        if not isinstance(other, AdmissibleTree):
            return NotImplemented
        return (self.d, self.root_arity, self.interior) == (other.d, other.root_arity, other.interior)

    def __hash__(self) -> int:
        return hash((self.d, self.root_arity, self.interior))

    def __repr__(self) -> str:
        wide = needs_wide(self.d, self.root_arity)
        shown = ",".join(address_to_str(u, wide) or "ε" for u in self.leaves)
        return f"AdmissibleTree(d={self.d}, n={self.root_arity}, leaves=[{shown}])"

    # operations
    def expand(self, u: Address) -> "AdmissibleTree":
        u = tuple(u)
        if u not in self.leaf_set:
            raise NotALeaf(f"{u!r} is not a leaf")
        return AdmissibleTree(self.d, self.root_arity, self.interior | {u})

    def expand_all(self, leaves: Iterable[Address]) -> "AdmissibleTree":
        tree = self
        for u in leaves:
            tree = tree.expand(u)
        return tree

    def collapsible_vertices(self) -> frozenset:
        return frozenset(
            u for u in self.interior if all(c not in self.interior for c in self.children(u))
        )

    def collapse(self, u: Address) -> "AdmissibleTree":
        u = tuple(u)
        if u not in self.collapsible_vertices():
            raise ValueError(f"{u!r} is not collapsible")
        return AdmissibleTree(self.d, self.root_arity, self.interior - {u})

    def join(self, other: "AdmissibleTree") -> "AdmissibleTree":
        self._require_compatible(other)
        return AdmissibleTree(self.d, self.root_arity, self.interior | other.interior)

    def meet(self, other: "AdmissibleTree") -> "AdmissibleTree":
        self._require_compatible(other)
        return AdmissibleTree(self.d, self.root_arity, self.interior & other.interior)

    def leaf_above(self, u: Address) -> Address | None:
        """The leaf that is a prefix of ``u``, if any."""
        for k in range(len(u) + 1):
            if u[:k] in self.leaf_set:
                return u[:k]
            if u[:k] not in self.interior:
                return None
        return None

    # serialization
    def to_json(self) -> dict:
        wide = needs_wide(self.d, self.root_arity)
        return {
            "d": self.d,
            "rootArity": self.root_arity,
            "leaves": [address_to_str(u, wide) for u in self.leaves],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AdmissibleTree":
        try:
            d = int(obj["d"])
            n = int(obj.get("rootArity", d))
            wide = needs_wide(d, n)
            leaves = [address_from_str(s, wide) for s in obj["leaves"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad tree JSON: {exc}") from exc
        return cls.from_leaves(d, leaves, n)


def join(t1: AdmissibleTree, t2: AdmissibleTree) -> AdmissibleTree:
    return t1.join(t2)


def expand(tree: AdmissibleTree, u: Address) -> AdmissibleTree:
    return tree.expand(u)


def collapsible_vertices(tree: AdmissibleTree) -> frozenset:
    return tree.collapsible_vertices()


def leaves_ordered(tree: AdmissibleTree) -> tuple:
    return tree.leaves


def feasible_leaf_count(h: int, d: int, root_arity: int | None = None) -> bool:
    n = d if root_arity is None else root_arity
    if h == 1:
        return True
    return h >= n and (h - n) % (d - 1) == 0


def special_tree(h: int, d: int, root_arity: int | None = None) -> AdmissibleTree:
    """Tree with ``h`` leaves obtained by expanding leaves breadth first,
    left to right."""
    if h < 1 or not feasible_leaf_count(h, d, root_arity):
        raise InfeasibleLeafCount(f"no admissible tree with {h} leaves for d={d}")
    tree = AdmissibleTree(d, root_arity)
    frontier = [()]
    while tree.leaf_count < h:
        u = frontier.pop(0)
        tree = tree.expand(u)
        frontier.extend(tree.children(u))
    return tree


@dataclass(frozen=True)
class RigidPermutation:
    """Leaf bijection of a fixed tree extended rigidly below the leaves.

    ``images[i]`` is the planar position of the image of the ``i``-th leaf.
    """

    tree: AdmissibleTree
    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(self.tree.leaf_count)):
            raise ValueError("images must be a permutation of leaf positions")

    @property
    def leaf_map(self) -> dict:
        leaves = self.tree.leaves
        return {leaves[i]: leaves[j] for i, j in enumerate(self.images)}

    def __call__(self, u: Address) -> Address:
        leaf = self.tree.leaf_above(u)
        if leaf is None:
            raise NotALeaf(f"{u!r} is not below a leaf")
        target = self.tree.leaves[self.images[self.tree.leaf_index[leaf]]]
        return target + u[len(leaf):]

    def compose(self, other: "RigidPermutation") -> "RigidPermutation":
        """``self`` after ``other``."""
        if self.tree != other.tree:
            raise ArityMismatch("rigid permutations of different trees")
        return RigidPermutation(self.tree, tuple(self.images[j] for j in other.images))

    def inverse(self) -> "RigidPermutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return RigidPermutation(self.tree, tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))


def rigid_permutations(tree: AdmissibleTree, bound: int = RIGID_ENUMERATION_BOUND) -> Iterator[RigidPermutation]:
    if tree.leaf_count > bound:
        raise BoundExceeded(f"{tree.leaf_count}! rigid permutations exceed the bound {bound}")
    for images in itertools.permutations(range(tree.leaf_count)):
        yield RigidPermutation(tree, images)


def _positions(tree: AdmissibleTree, items: Sequence) -> list:
    out = []
    for item in items:
        if isinstance(item, int):
            if not 0 <= item < tree.leaf_count:
                raise NotALeaf(f"position {item} out of range")
            out.append(item)
        else:
            item = tuple(item)
            if item not in tree.leaf_index:
                raise NotALeaf(f"{item!r} is not a leaf")
            out.append(tree.leaf_index[item])
    return out


def rigid_moving_block(tree: AdmissibleTree, source: Sequence, target: Sequence) -> RigidPermutation:
    """Rigid permutation sending ``source[i]`` to ``target[i]`` and the
    remaining leaves, in planar order, onto the remaining positions.

    Entries may be leaf addresses or planar positions.
    """
    src = _positions(tree, source)
    tgt = _positions(tree, target)
    if len(src) != len(tgt) or len(set(src)) != len(src) or len(set(tgt)) != len(tgt):
        raise ValueError("source and target blocks must be distinct and of equal size")
    images = [None] * tree.leaf_count
    for i, j in zip(src, tgt):
        images[i] = j
    rest_src = [i for i in range(tree.leaf_count) if images[i] is None]
    used = set(tgt)
    rest_tgt = [j for j in range(tree.leaf_count) if j not in used]
    for i, j in zip(rest_src, rest_tgt):
        images[i] = j
    return RigidPermutation(tree, tuple(images))


def count_admissible_trees(leaf_count: int, d: int) -> int:
    """Number of admissible subtrees of the d-ary tree with a given number of
    leaves (a Fuss-Catalan number)."""
    if (leaf_count - 1) % (d - 1):
        return 0
    k = (leaf_count - 1) // (d - 1)
    return math.comb(d * k, k) // ((d - 1) * k + 1)


def all_trees_up_to_depth(d: int, depth: int, root_arity: int | None = None) -> list:
    """Every admissible tree whose leaves have length at most ``depth``."""

    def grow(u: Address, level: int):
        # subtrees hanging at u, as sets of interior vertices
        options = [frozenset()]
        if len(u) < depth:
            arity = (d if root_arity is None else root_arity) if len(u) == 0 else d
            child_options = [grow(u + (i,), level + 1) for i in range(arity)]
            for combo in itertools.product(*child_options):
                options.append(frozenset({u}).union(*combo))
        return options

    return [AdmissibleTree(d, root_arity, interior) for interior in grow((), 0)]
