"""The cube complex on classes ``[A, phi]`` of admissible trees and group
elements.

``[A, phi] = [B, psi]`` when ``psi^-1 phi`` is a forest isomorphism from the
complement of ``A`` onto the complement of ``B``.  Vertices are hashed by an
exact class invariant: the multiset of the charts ``phi`` restricted to the
leaf cones of ``A``, each reduced modulo automorphisms of the cone.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

from .aaut import AlmostAutomorphism, compose
from .errors import (
    ArityMismatch,
    CapExceeded,
    InternalInconsistency,
    NoCollapsibleVertex,
    NotANeighbor,
    NotExpandable,
)
from .simplicial import SimplicialComplex, interval_complex, join as complex_join
from .trees import AdmissibleTree, rigid_moving_block, special_tree


class CubeVertex:
    def __init__(self, tree: AdmissibleTree, elt: AlmostAutomorphism | None = None):
        if elt is None:
            elt = AlmostAutomorphism.identity(tree.d, tree.root_arity)
        if not tree.compatible(elt.domain):
            raise ArityMismatch("tree and element live in different trees")
        self.tree = tree
        self.elt = elt.canonical

    @property
    def d(self) -> int:
        return self.tree.d

    @property
    def height(self) -> int:
        return self.tree.leaf_count

    @cached_property
    def key(self) -> tuple:
        return (self.tree.d, self.tree.root_arity, self.height, tuple(sorted(self.pieces)))

    @cached_property
    def pieces(self) -> tuple:
        """One reduced chart per leaf of the tree, in planar order."""
        span = self.tree.join(self.elt.domain)
        rep = self.elt.expand_to(span)

        def node(u):
            if u in rep.domain.leaf_set:
                return ("L", rep.entries[u][0])
            kids = [node(c) for c in span.children(u)]
            if all(k[0] == "L" for k in kids):
                images = [k[1] for k in kids]
                first = images[0]
                if first:
                    v = first[:-1]
                    arity = span.arity_at(v)
                    if (len(images) == arity and all(im and im[:-1] == v for im in images)
                            and len(set(images)) == arity):
                        return ("L", v)
            return ("N", tuple(sorted(kids)))

        return tuple(node(leaf) for leaf in self.tree.leaves)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CubeVertex):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"CubeVertex(h={self.height}, tree={self.tree!r}, elt={self.elt!r})"

    def expand(self, leaves) -> "CubeVertex":
        return CubeVertex(self.tree.expand_all(leaves), self.elt)


def base_vertex(d: int) -> CubeVertex:
    """``[root star, id]``."""
    return CubeVertex(AdmissibleTree.star(d))


def root_vertex(d: int) -> CubeVertex:
    return CubeVertex(AdmissibleTree(d))


def vertex_equal(x: CubeVertex, y: CubeVertex) -> bool:
    """Class equality by the defining relation."""
    if not x.tree.compatible(y.tree):
        return False
    if x.height != y.height:
        return False
    chi = compose(y.elt.invert(), x.elt)
    try:
        rep = chi.expand_to(x.tree)
    except NotExpandable:
        return False
    return rep.range == y.tree


def rigid_as_element(tree: AdmissibleTree, images) -> AlmostAutomorphism:
    leaves = tree.leaves
    return AlmostAutomorphism.from_leaf_map(tree, tree, {leaves[i]: leaves[j] for i, j in enumerate(images)})


def planar_transfer(source: AdmissibleTree, target: AdmissibleTree) -> AlmostAutomorphism:
    """Forest isomorphism matching the leaves of two trees in planar order."""
    if source.leaf_count != target.leaf_count:
        raise ValueError("trees with different leaf counts")
    return AlmostAutomorphism.from_leaf_map(source, target, dict(zip(source.leaves, target.leaves)))


def rebase(x: CubeVertex, tree: AdmissibleTree) -> CubeVertex:
    """The same class written with first entry ``tree``."""
    sigma = planar_transfer(x.tree, tree)
    return CubeVertex(tree, compose(x.elt, sigma.invert()))


def up_neighbors(x: CubeVertex) -> list:
    return [CubeVertex(x.tree.expand(u), x.elt) for u in x.tree.leaves]


@dataclass(frozen=True)
class DownNeighbor:
    vertex: CubeVertex
    subset: tuple  # 1-based planar positions of the merged leaves


def down_neighbors_labelled(x: CubeVertex) -> list:
    if x.height == 1:
        raise NoCollapsibleVertex("the one-leaf tree has no collapsible vertex")
    u = min(x.tree.collapsible_vertices())
    block = x.tree.children(u)
    lower = x.tree.collapse(u)
    out = []
    for subset in itertools.combinations(range(x.tree.leaf_count), len(block)):
        tau = rigid_moving_block(x.tree, block, subset)
        elt = compose(x.elt, rigid_as_element(x.tree, tau.images))
        out.append(DownNeighbor(CubeVertex(lower, elt), tuple(i + 1 for i in subset)))
    return out


def down_neighbors(x: CubeVertex) -> list:
    return [n.vertex for n in down_neighbors_labelled(x)]


def neighbors(x: CubeVertex) -> list:
    out = up_neighbors(x)
    if x.height > 1:
        out.extend(down_neighbors(x))
    return out


def degree(x: CubeVertex) -> int:
    return len({y.key for y in neighbors(x)})


def expected_degree(h: int, d: int) -> int:
    return h + math.comb(h, d)


def _down_labels(x: CubeVertex) -> dict:
    return {n.vertex.key: n.subset for n in down_neighbors_labelled(x)}


def spans_cube(x: CubeVertex, downs) -> bool:
    """Whether the given down-neighbors of ``x`` span a cube with ``x``."""
    labels = _down_labels(x) if x.height > 1 else {}
    subsets = []
    for y in downs:
        if y.key not in labels:
            raise NotANeighbor(f"{y!r} is not a down-neighbor")
        subsets.append(set(labels[y.key]))
    for a, b in itertools.combinations(subsets, 2):
        if a & b:
            return False
    return True


def up_cube(x: CubeVertex, leaves) -> list:
    """Vertices of the cube spanned at ``x`` by expanding the given leaves."""
    leaves = list(leaves)
    out = []
    for k in range(len(leaves) + 1):
        for sub in itertools.combinations(leaves, k):
            out.append(CubeVertex(x.tree.expand_all(sub), x.elt))
    return out


def is_cube(vertices) -> bool:
    """Check by definition that the given vertices form a cube: the lowest
    one ``[M, psi]`` and leaves ``a_1..a_k`` of ``M`` with the vertices being
    exactly ``[M + c(a_I), psi]``."""
    vertices = list(vertices)
    n = len(vertices)
    k = n.bit_length() - 1
    if n != 2 ** k or len({v.key for v in vertices}) != n:
        return False
    low = min(vertices, key=lambda v: v.height)
    keys = {v.key for v in vertices}
    ups = {y.key: leaf for leaf, y in zip(low.tree.leaves, up_neighbors(low))}
    chosen = [ups[v.key] for v in vertices if v.key in ups]
    if len(chosen) != k:
        return False
    return {v.key for v in up_cube(low, chosen)} == keys


def interval_labels(d: int, h: int) -> SimplicialComplex:
    return interval_complex(d, h)


@dataclass
class DescendingLink:
    vertex: CubeVertex
    neighbors: list
    complex: SimplicialComplex
    phi: dict  # complex vertex index -> subset of 1-based leaf positions

    def phi_complex(self) -> SimplicialComplex:
        return self.complex.relabel(self.phi)


def descending_link(x: CubeVertex) -> DescendingLink:
    if x.height == 1:
        return DescendingLink(x, [], SimplicialComplex(), {})
    labelled = down_neighbors_labelled(x)
    n = len(labelled)
    sets = [set(item.subset) for item in labelled]
    faces = []

    def grow(start, chosen, used):
        extended = False
        for i in range(start, n):
            if not (sets[i] & used):
                extended = True
                grow(i + 1, chosen + [i], used | sets[i])
        if not extended and chosen:
            faces.append(chosen)

    grow(0, [], set())
    # grow() may report non-maximal families when later indices are blocked;
    # the complex constructor keeps only maximal faces
    complex_ = SimplicialComplex(range(n), faces)
    phi = {i: item.subset for i, item in enumerate(labelled)}
    return DescendingLink(x, [item.vertex for item in labelled], complex_, phi)


def ascending_link(x: CubeVertex) -> SimplicialComplex:
    labels = [("up", i + 1) for i in range(x.height)]
    return SimplicialComplex.simplex(labels)


def squares_through(x: CubeVertex, a: CubeVertex, b: CubeVertex, cache: dict | None = None) -> bool:
    """Whether neighbors ``a`` and ``b`` of ``x`` span a square with ``x``,
    decided from the definition of cubes."""
    cache = {} if cache is None else cache

    def nbrs(v):
        if v.key not in cache:
            cache[v.key] = {w.key: w for w in neighbors(v)}
        return cache[v.key]

    common = set(nbrs(a)) & set(nbrs(b))
    common.discard(x.key)
    for key in common:
        w = nbrs(a)[key]
        if is_cube([x, a, b, w]):
            return True
    return False


@dataclass
class Link:
    vertex: CubeVertex
    labels: dict  # label -> neighbor vertex
    complex: SimplicialComplex


def link(x: CubeVertex) -> Link:
    """Link of ``x`` computed from the cube structure: two neighbors are
    joined when they span a square with ``x``; larger cliques are kept as
    faces only when an explicit cube realising them exists."""
    labels = {("up", i + 1): y for i, y in enumerate(up_neighbors(x))}
    if x.height > 1:
        for item in down_neighbors_labelled(x):
            labels[("down",) + item.subset] = item.vertex
    names = list(labels)
    cache: dict = {}
    edges = []
    for a, b in itertools.combinations(names, 2):
        if squares_through(x, labels[a], labels[b], cache):
            edges.append((a, b))
    g = nx.Graph()
    g.add_nodes_from(names)
    g.add_edges_from(edges)
    faces = []
    for clique in nx.find_cliques(g):
        if len(clique) <= 2 or _realise_face(x, clique):
            faces.append(clique)
        else:
            # keep the clique's proper subfaces only
            for sub in itertools.combinations(clique, len(clique) - 1):
                faces.append(list(sub))
    return Link(x, labels, SimplicialComplex(names, faces))


def _realise_face(x: CubeVertex, labels) -> bool:
    """Build a cube containing ``x`` and the given neighbors explicitly."""
    ups = [lab[1] - 1 for lab in labels if lab[0] == "up"]
    downs = [set(p - 1 for p in lab[1:]) for lab in labels if lab[0] == "down"]
    merged = set().union(*downs) if downs else set()
    if any(len(a & b) for a, b in itertools.combinations(downs, 2)):
        return False
    if merged & set(ups):
        return False
    h = x.height
    special = special_tree(h, x.d)
    y = rebase(x, special)
    collapsible = sorted(special.collapsible_vertices())
    if len(collapsible) < len(downs):
        return False
    blocks = [special.children(u) for u in collapsible[: len(downs)]]
    source = [leaf for blk in blocks for leaf in blk]
    target = [p for ds in downs for p in sorted(ds)]
    tau = rigid_moving_block(special, source, target)
    elt = compose(y.elt, rigid_as_element(special, tau.images))
    low_tree = special
    for u in collapsible[: len(downs)]:
        low_tree = low_tree.collapse(u)
    inverse_images = {j: i for i, j in enumerate(tau.images)}
    up_leaves = [special.leaves[inverse_images[p]] for p in ups]
    low = CubeVertex(low_tree, elt)
    cube = up_cube(low, list(collapsible[: len(downs)]) + up_leaves)
    keys = {v.key for v in cube}
    wanted = {x.key}
    for lab in labels:
        if lab[0] == "up":
            wanted.add(up_neighbors(x)[lab[1] - 1].key)
        else:
            wanted.add(next(n.vertex.key for n in down_neighbors_labelled(x) if n.subset == lab[1:]))
    return wanted <= keys and is_cube(cube)


# group action

def act(g: AlmostAutomorphism, x: CubeVertex) -> CubeVertex:
    if not g.domain.compatible(x.tree):
        raise ArityMismatch("element and vertex live in different trees")
    return CubeVertex(x.tree, compose(g, x.elt))


@dataclass
class StabilizerResult:
    stabilizes: bool
    certificate: AlmostAutomorphism | None = None

    def __bool__(self) -> bool:
        return self.stabilizes


def verify_stabilizer_certificate(x: CubeVertex, certificate: AlmostAutomorphism) -> bool:
    """The certificate must expand to a forest automorphism of T minus the tree."""
    try:
        rep = certificate.expand_to(x.tree)
    except NotExpandable:
        return False
    return rep.range == x.tree


def stabilizes(g: AlmostAutomorphism, x: CubeVertex) -> StabilizerResult:
    gx = act(g, x)
    if not vertex_equal(gx, x):
        return StabilizerResult(False)
    cert = compose(x.elt.invert(), compose(g, x.elt))
    rep = cert.expand_to(x.tree)
    if rep.range != x.tree:
        raise InternalInconsistency("stabilizer certificate is not a forest automorphism")
    return StabilizerResult(True, rep)


def orbit_element(x: CubeVertex) -> AlmostAutomorphism:
    """Element ``g`` with ``g . [special_tree(h), id] = x``."""
    special = special_tree(x.height, x.d, x.tree.root_arity)
    return compose(x.elt, planar_transfer(x.tree, special).invert())


# ball exploration

@dataclass
class ExploredBall:
    center: CubeVertex
    radius: int
    vertices: list
    distance: list
    edges: list
    cube_records: list = field(default_factory=list)  # (min vertex id, leaf positions, vertex ids)
    max_height: int | None = None

    @property
    def heights(self) -> list:
        return [v.height for v in self.vertices]

    def index(self) -> dict:
        return {v.key: i for i, v in enumerate(self.vertices)}

    def maximal_cubes(self) -> list:
        sets = {frozenset(ids) for _, _, ids in self.cube_records}
        faces = set()
        for _, _, ids in self.cube_records:
            for sub in _facets(ids):
                faces.add(sub)
        return sorted((sorted(c) for c in sets if c not in faces), key=lambda c: (len(c), c))

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": i, "height": v.height} for i, v in enumerate(self.vertices)],
            "edges": [list(e) for e in self.edges],
            "cubes": self.maximal_cubes(),
        }

    def to_dot(self) -> str:
        lines = ["graph ball {"]
        for i, v in enumerate(self.vertices):
            lines.append(f'  v{i} [label="{v.height}"];')
        for a, b in self.edges:
            lines.append(f"  v{a} -- v{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        adj = {i: set() for i in range(len(self.vertices))}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        todo = [0]
        while todo:
            i = todo.pop()
            for j in adj[i] - seen:
                seen.add(j)
                todo.append(j)
        return len(seen) == len(self.vertices)


def _facets(ids: tuple) -> list:
    """Facets of a cube given as a tuple of vertex ids indexed by subsets
    (bit masks) of its leaf set."""
    n = len(ids)
    k = n.bit_length() - 1
    out = []
    for j in range(k):
        bit = 1 << j
        low = frozenset(ids[m] for m in range(n) if not m & bit)
        high = frozenset(ids[m] for m in range(n) if m & bit)
        out.extend([low, high])
    return out


def ball(center: CubeVertex, radius: int, cap: int = 100_000, max_height: int | None = None,
         check_equal: bool = True, with_cubes: bool = True) -> ExploredBall:
    vertices = [center]
    distance = [0]
    index = {center.key: 0}
    edges = set()
    todo = deque([0])
    while todo:
        i = todo.popleft()
        x = vertices[i]
        for y in neighbors(x):
            if max_height is not None and y.height > max_height:
                continue
            j = index.get(y.key)
            if j is None:
                if distance[i] >= radius:
                    continue
                if len(vertices) >= cap:
                    raise CapExceeded(f"ball exceeds {cap} vertices")
                j = len(vertices)
                index[y.key] = j
                vertices.append(y)
                distance.append(distance[i] + 1)
                todo.append(j)
            elif check_equal and not vertex_equal(y, vertices[j]):
                raise InternalInconsistency("vertex key collision between unequal classes")
            if abs(vertices[i].height - vertices[j].height) != center.d - 1:
                raise InternalInconsistency("edge violates the height rule")
            edges.add((min(i, j), max(i, j)))
    result = ExploredBall(center, radius, vertices, distance, sorted(edges), max_height=max_height)
    if with_cubes:
        result.cube_records = _explored_cubes(result, index)
    return result


def _explored_cubes(b: ExploredBall, index: dict) -> list:
    records = []
    for i, x in enumerate(b.vertices):
        leaves = x.tree.leaves
        present = {(): i}
        level = [()]
        while level:
            nxt = []
            seen = set()
            for sub in level:
                start = sub[-1] + 1 if sub else 0
                for p in range(start, len(leaves)):
                    cand = sub + (p,)
                    if cand in seen:
                        continue
                    if any(cand[:k] + cand[k + 1:] not in present for k in range(len(cand))):
                        continue
                    v = CubeVertex(x.tree.expand_all(leaves[q] for q in cand), x.elt)
                    j = index.get(v.key)
                    if j is None:
                        continue
                    present[cand] = j
                    seen.add(cand)
                    nxt.append(cand)
            level = nxt
        for sub in present:
            ids = tuple(present[tuple(sub[m] for m in range(len(sub)) if mask >> m & 1)] for mask in range(2 ** len(sub)))
            records.append((i, sub, ids))
    return records


@dataclass
class Census:
    per_height: dict  # h -> {"by_size": n, "by_positions": n, "bound": 2**(h+1)}
    vertex_classes: dict  # h -> number of vertex orbits found (expected 1)
    within_bound: bool

    def to_json(self) -> dict:
        return {"per_height": {str(h): v for h, v in sorted(self.per_height.items())},
                "vertex_classes": {str(h): v for h, v in sorted(self.vertex_classes.items())},
                "within_bound": self.within_bound}


def cube_orbit_census(b: ExploredBall, k: int) -> Census:
    by_size: dict = {}
    by_positions: dict = {}
    for i, sub, _ in b.cube_records:
        h = b.vertices[i].height
        if h > k:
            continue
        by_size.setdefault(h, set()).add(len(sub))
        by_positions.setdefault(h, set()).add(sub)
    per_height = {}
    ok = True
    for h in sorted(by_size):
        bound = 2 ** (h + 1)
        row = {"by_size": len(by_size[h]), "by_positions": len(by_positions[h]), "bound": bound}
        ok = ok and row["by_size"] <= bound and row["by_positions"] <= bound
        per_height[h] = row
    vertex_classes: dict = {}
    for x in b.vertices:
        if x.height > k:
            continue
        g = orbit_element(x)
        special = CubeVertex(special_tree(x.height, x.d, x.tree.root_arity))
        if not vertex_equal(act(g, special), x):
            raise InternalInconsistency("vertex is not in the orbit of the special vertex")
        vertex_classes[x.height] = 1
    return Census(per_height, vertex_classes, ok)
