"""Depth-one blow-up actions of plane maps on rational bubble points and the
almost automorphisms of the blow-up tree they induce.

The blow-up tree for P^2 over GF(q) is T_{d,n} with ``d = q + 1`` and
``n = q^2 + q + 1``.  The root child ``i`` is the ``i``-th rational point in
canonical order, and child ``j`` of a point is its ``j``-th direction (line
through the point, canonical order).
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import perm as Pm
from ..aaut import AlmostAutomorphism, Portrait
from ..errors import InternalInconsistency, NotBijectiveOnRationalPoints, UnsupportedMap
from ..trees import AdmissibleTree
from .fields import FiniteField
from .projective import (
    Linear,
    ProjMap,
    directions,
    dot,
    enumerate_points,
    germ_image,
    is_zero,
    mat_inverse,
    normalize,
    point_index,
    points_on,
    require_supported,
    second_point,
)


def tree_parameters(F: FiniteField) -> tuple:
    q = F.q
    return q + 1, q * q + q + 1


def blowup_tree(F: FiniteField, base_points) -> AdmissibleTree:
    """Root, its point children, and the directions at the given points."""
    d, n = tree_parameters(F)
    index = point_index(F)
    interior = [()] + [(index[p],) for p in base_points]
    return AdmissibleTree(d, n, interior)


def bubble_of(F: FiniteField, address: tuple) -> tuple:
    pts = enumerate_points(F)
    p = pts[address[0]]
    if len(address) == 1:
        return ("pt", p)
    return ("dir", p, directions(F, p)[address[1]])


def address_of(F: FiniteField, bubble: tuple) -> tuple:
    i = point_index(F)[bubble[1]]
    if bubble[0] == "pt":
        return (i,)
    return (i, directions(F, bubble[1]).index(bubble[2]))


def rational(m: ProjMap, v) -> tuple:
    if not all(x < m.F.q for x in v):
        raise InternalInconsistency("germ image is not rational")
    return tuple(v)


def linear_direction_image(m: Linear, ell) -> tuple:
    """Image of a line under ``m``: the dual action ``ell -> ell M^-1``."""
    F = m.F
    inv = mat_inverse(F, m.matrix)
    return normalize(F, tuple(F.sum(F.mul(ell[i], inv[i][j]) for i in range(3)) for j in range(3)))


def _resolve(m: ProjMap, germs, range_base) -> tuple:
    results = set()
    for g in germs:
        if g is None:
            continue
        point = rational(m, g.point)
        if point not in range_base:
            results.add(("pt", point))
        elif g.tangent is not None:
            results.add(("dir", point, rational(m, g.tangent)))
    if len(results) != 1:
        raise InternalInconsistency(f"germ images disagree or are undetermined: {sorted(results)}")
    return results.pop()


def bubble_image(m: ProjMap, bubble: tuple, range_base) -> tuple:
    """Image of a depth-one bubble vertex, from germs of curves through it.

    Points use the straight lines through them; directions at a base point
    use the conics ``p + t v + t^2 w`` tangent to them."""
    F = m.F
    if bubble[0] == "pt":
        p = bubble[1]
        germs = [germ_image(m, p, second_point(F, p, ell)) for ell in directions(F, p)]
    else:
        _, p, ell = bubble
        v = second_point(F, p, ell)
        germs = [germ_image(m, p, v, w) for w in enumerate_points(F)]
    return _resolve(m, germs, range_base)


def tangent_map(m: ProjMap, p: tuple, image: tuple) -> tuple:
    """Permutation of direction indices at a point where ``m`` is a local
    isomorphism."""
    F = m.F
    src = directions(F, p)
    dst = directions(F, image)
    out = []
    for ell in src:
        if isinstance(m, Linear):
            new = linear_direction_image(m, ell)
        else:
            g = germ_image(m, p, second_point(F, p, ell))
            if g is None or g.tangent is None or rational(m, g.point) != image:
                raise InternalInconsistency("map is not a local isomorphism here")
            new = rational(m, g.tangent)
        out.append(dst.index(new))
    if not Pm.is_permutation(out):
        raise InternalInconsistency("differential is not bijective on directions")
    return tuple(out)


@dataclass
class BubbleAction:
    map: ProjMap
    field: FiniteField
    domain_base: list
    range_base: list
    leaves: dict  # domain leaf address -> range leaf address
    directions: dict  # point-leaf address -> direction permutation (local isomorphisms only)

    def domain_tree(self) -> AdmissibleTree:
        return blowup_tree(self.field, self.domain_base)

    def range_tree(self) -> AdmissibleTree:
        return blowup_tree(self.field, self.range_base)

    def pair_action(self) -> dict:
        """On (point, direction) addresses for point leaves mapped to point leaves."""
        out = {}
        for a, perm in self.directions.items():
            t = self.leaves[a]
            for j, k in enumerate(perm):
                out[a + (j,)] = t + (k,)
        return out


def base_points_of(m: ProjMap) -> list:
    return m.base_points()


def depth1_action(m: ProjMap, F: FiniteField | None = None) -> BubbleAction:
    """Bijection between the leaves of the blow-up trees of ``m`` and of its
    inverse, with direction maps at points where ``m`` is a local
    isomorphism.  Bijectivity is verified exhaustively."""
    require_supported(m)
    F = F or m.F
    domain_base = base_points_of(m)
    range_base = base_points_of(m.inverse())
    dom = blowup_tree(F, domain_base)
    rng = blowup_tree(F, range_base)
    leaves = {}
    dirs = {}
    for a in dom.leaves:
        b = bubble_of(F, a)
        if isinstance(m, Linear):
            img = ("pt", m.image(b[1]))
        else:
            img = bubble_image(m, b, range_base)
        t = address_of(F, img)
        leaves[a] = t
        if len(a) == 1 and len(t) == 1:
            dirs[a] = tangent_map(m, b[1], img[1])
    targets = set(leaves.values())
    if len(targets) != len(leaves) or targets != rng.leaf_set:
        raise NotBijectiveOnRationalPoints("depth-one action is not a bijection of leaves", None)
    return BubbleAction(m, F, domain_base, range_base, leaves, dirs)


def induced_aaut_level1(m: ProjMap, F: FiniteField | None = None) -> AlmostAutomorphism:
    """Almost automorphism of T_{q+1, q^2+q+1} exact on depth-one bubble
    points.  Portraits carry the direction maps at local isomorphisms and are
    truncated (identity) below."""
    action = depth1_action(m, F)
    entries = {}
    for a, t in action.leaves.items():
        perm = action.directions.get(a)
        portrait = Portrait({(): perm}) if perm is not None else Portrait.IDENTITY
        entries[a] = (t, portrait)
    return AlmostAutomorphism(action.domain_tree(), action.range_tree(), entries)


def induced_permutation_blowup(m: ProjMap, F: FiniteField | None = None) -> tuple:
    """Permutation of the planar-ordered leaves of the blow-up tree at the
    rational base points (the maps considered are involutions, so the two
    trees agree)."""
    action = depth1_action(m, F)
    dom = action.domain_tree()
    if action.range_tree() != dom:
        raise UnsupportedMap("domain and range blow-up trees differ")
    index = dom.leaf_index
    return tuple(index[action.leaves[a]] for a in dom.leaves)


def direction_leaf_count(F: FiniteField, base_points) -> int:
    d, n = tree_parameters(F)
    return n - len(base_points) + d * len(base_points)


def check_line_images(m: Linear) -> bool:
    """The dual formula agrees with the images of the points on each line."""
    F = m.F
    for ell in enumerate_points(F):
        pts = [m.image(p) for p in points_on(F, ell)]
        new = linear_direction_image(m, ell)
        if any(dot(F, new, p) for p in pts):
            return False
    return True


def check_germs_linear(m: Linear) -> bool:
    """Germ tangents of a linear map agree with the dual formula."""
    F = m.F
    for p in enumerate_points(F):
        for ell in directions(F, p):
            g = germ_image(m, p, second_point(F, p, ell))
            if g is None or is_zero(g.point) or g.tangent != linear_direction_image(m, ell):
                return False
    return True
