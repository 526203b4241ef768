"""Random trees and random almost automorphisms for tests and suites."""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from . import perm as P
from .aaut import AlmostAutomorphism, Portrait, compose
from .trees import AdmissibleTree


def random_perm(rng: random.Random, n: int, even: bool = False) -> tuple:
    p = list(range(n))
    rng.shuffle(p)
    p = tuple(p)
    if even and P.sign(p) < 0:
        p = (p[1], p[0]) + p[2:]
    return p


def random_tree(rng: random.Random, d: int, expansions: int, root_arity: int | None = None,
                max_depth: int | None = None) -> AdmissibleTree:
    tree = AdmissibleTree(d, root_arity)
    for _ in range(expansions):
        options = [u for u in tree.leaves if max_depth is None or len(u) < max_depth]
        if not options:
            break
        tree = tree.expand(rng.choice(options))
    return tree


def random_portrait(rng: random.Random, d: int, depth: int, density: float = 0.5,
                    even: bool = False, root_arity: int | None = None) -> Portrait:
    """Portrait with labels on vertices of length < depth."""
    labels = {}
    frontier = [()]
    for level in range(depth):
        nxt = []
        for u in frontier:
            arity = root_arity if (root_arity and not u) else d
            if rng.random() < density:
                labels[u] = random_perm(rng, arity, even)
            nxt.extend(u + (i,) for i in range(arity))
        frontier = nxt
    return Portrait(labels)


def random_element(rng: random.Random, d: int, expansions: int = 3, root_arity: int | None = None,
                   portrait_depth: int = 1, density: float = 0.3, even: bool = False,
                   max_depth: int | None = None) -> AlmostAutomorphism:
    dom = random_tree(rng, d, expansions, root_arity, max_depth)
    rng_tree = random_tree(rng, d, expansions, root_arity, max_depth)
    leaves = list(rng_tree.leaves)
    rng.shuffle(leaves)
    entries = {}
    for a, t in zip(dom.leaves, leaves):
        arity = dom.arity_at(a)
        portrait = random_portrait(rng, d, portrait_depth, density, even,
                                   root_arity=arity if not a else None)
        entries[a] = (t, portrait)
    return AlmostAutomorphism(dom, rng_tree, entries)


def random_tree_automorphism(rng: random.Random, d: int, depth: int = 2, density: float = 0.6,
                             root_arity: int | None = None) -> AlmostAutomorphism:
    portrait = random_portrait(rng, d, depth, density, root_arity=root_arity)
    return AlmostAutomorphism.from_portrait(d, portrait, root_arity)


def random_finite_order(rng: random.Random, d: int, expansions: int = 3) -> AlmostAutomorphism:
    """Conjugate of a tree automorphism by a random element."""
    a = random_tree_automorphism(rng, d)
    h = random_element(rng, d, expansions)
    return compose(compose(h, a), h.invert())


def random_forest_automorphism(rng: random.Random, tree: AdmissibleTree, portrait_depth: int = 1,
                               density: float = 0.4) -> AlmostAutomorphism:
    """Element with domain and range ``tree`` (any leaf bijection, random portraits)."""
    leaves = list(tree.leaves)
    rng.shuffle(leaves)
    entries = {}
    for a, t in zip(tree.leaves, leaves):
        entries[a] = (t, random_portrait(rng, tree.d, portrait_depth, density))
    return AlmostAutomorphism(tree, tree, entries)


def words(alphabet_sizes: Sequence[int]) -> list:
    return [tuple(w) for w in itertools.product(*(range(k) for k in alphabet_sizes))]


def boundary_words(d: int, length: int, root_arity: int | None = None) -> list:
    """All addresses of a given length in T_{d,n}."""
    sizes = [root_arity or d] + [d] * (length - 1) if length else []
    return words(sizes)
