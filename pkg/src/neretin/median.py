"""Finite median graphs: hyperplanes, the d-infinity metric, halfspace depth
and the invariant cube cut out by the unbalanced halfspaces of a group
action.

Vertex sets are handled internally as integer bitmasks over a fixed vertex
order, which keeps interval and halfspace arithmetic cheap.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import InternalInconsistency, NotMedian


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mix(words: np.ndarray) -> np.ndarray:
    """Hash rows of uint64 words along the last axis (wrapping arithmetic)."""
    h = words[..., 0].copy()
    for j in range(1, words.shape[-1]):
        h = h * np.uint64(0x9E3779B97F4A7C15) ^ words[..., j]
    return h


@dataclass(frozen=True)
class Hyperplane:
    index: int
    edges: frozenset  # pairs of vertex indices
    minus: int  # halfspace bitmasks
    plus: int

    @property
    def carrier(self) -> int:
        mask = 0
        for a, b in self.edges:
            mask |= 1 << a | 1 << b
        return mask

    def side(self, v: int) -> int:
        return self.plus if self.plus >> v & 1 else self.minus

    def other(self, half: int) -> int:
        return self.minus if half == self.plus else self.plus


class MedianGraph:
    """A validated finite median graph."""

    def __init__(self, vertices: Sequence[Hashable], edges: Iterable[tuple], validate: bool = True):
        self.vertices = list(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise ValueError("repeated vertex")
        n = len(self.vertices)
        self.adj = [set() for _ in range(n)]
        for a, b in edges:
            i, j = self.index[a], self.index[b]
            if i == j:
                raise ValueError("loop edge")
            self.adj[i].add(j)
            self.adj[j].add(i)
        self.n = n
        self.dist = [self._bfs(i) for i in range(n)]
        self._intervals: dict = {}
        self.validated = False
        if validate:
            self.validate()
        self.hyperplanes = self._hyperplanes()
        self._hyperplane_of_edge = {}
        for J in self.hyperplanes:
            for e in J.edges:
                self._hyperplane_of_edge[e] = J.index

    # construction helpers
    @classmethod
    def from_networkx(cls, g: nx.Graph, validate: bool = True) -> "MedianGraph":
        return cls(sorted(g.nodes, key=repr), g.edges, validate)

    @classmethod
    def from_json(cls, data: dict, validate: bool = True) -> "MedianGraph":
        return cls(data["vertices"], [tuple(e) for e in data["edges"]], validate)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [[self.vertices[a], self.vertices[b]] for a, b in self.edge_list()]}

    def edge_list(self) -> list:
        return sorted((a, b) for a in range(self.n) for b in self.adj[a] if a < b)

    def _bfs(self, s: int) -> list:
        dist = [-1] * self.n
        dist[s] = 0
        todo = deque([s])
        while todo:
            u = todo.popleft()
            for w in self.adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    todo.append(w)
        return dist

    def interval(self, a: int, b: int) -> int:
        key = (a, b) if a <= b else (b, a)
        mask = self._intervals.get(key)
        if mask is None:
            da, db, dab = self.dist[a], self.dist[b], self.dist[a][b]
            mask = 0
            for z in range(self.n):
                if da[z] + db[z] == dab:
                    mask |= 1 << z
            self._intervals[key] = mask
        return mask

    def validate(self) -> None:
        """Accept iff every triple has a unique median.

        Fast path: the hyperplane cuts embed the graph isometrically into a
        hypercube and the image is closed under coordinatewise majority.  Then
        the majority of a triple is its unique median.  Otherwise an explicit
        violating triple is searched for."""
        if self.n == 0:
            raise NotMedian((), "empty graph")
        far = [i for i, d in enumerate(self.dist[0]) if d < 0]
        if far:
            u = self.vertices[far[0]]
            raise NotMedian((self.vertices[0], u, u), f"disconnected: {u!r} is unreachable from {self.vertices[0]!r}")
        if self._embedding_is_median_closed():
            self.validated = True
            return
        for a, b, c in itertools.combinations(range(self.n), 3):
            m = self.interval(a, b) & self.interval(b, c) & self.interval(a, c)
            if m == 0 or m & (m - 1):
                raise NotMedian((self.vertices[a], self.vertices[b], self.vertices[c]))
        raise InternalInconsistency("graph failed the embedding test but no triple violates")

    def _embedding_is_median_closed(self) -> bool:
        cuts = self._hyperplanes()
        n = self.n
        codes = np.zeros((n, len(cuts)), dtype=bool)
        for k, J in enumerate(cuts):
            for v in _bits(J.plus):
                codes[v, k] = True
        dist = np.array(self.dist)
        for v in range(n):
            if not np.array_equal((codes[v] != codes).sum(axis=1), dist[v]):
                return False
        # codes as rows of uint64 words; lookup by a mixed hash, confirmed exactly
        width = -(-max(len(cuts), 1) // 64) * 64
        padded = np.zeros((n, width), dtype=bool)
        padded[:, : len(cuts)] = codes
        keys = np.packbits(padded, axis=1).view(np.uint64)
        hashes = _mix(keys)
        order = np.argsort(hashes)
        sorted_h = hashes[order]
        for a in range(n):
            rest = keys[a:]
            ab = keys[a] & rest
            aob = keys[a] | rest
            maj = ab[:, None, :] | (aob[:, None, :] & rest[None, :, :])
            h = _mix(maj)
            pos = np.minimum(np.searchsorted(sorted_h, h), n - 1)
            cand = order[pos]
            if not (sorted_h[pos] == h).all() or not (keys[cand] == maj).all():
                return False
        return True

    def median(self, a: int, b: int, c: int) -> int:
        m = self.interval(a, b) & self.interval(b, c) & self.interval(a, c)
        return m.bit_length() - 1

    def _hyperplanes(self) -> list:
        edges = self.edge_list()
        parent = {e: e for e in edges}

        def find(e):
            while parent[e] != e:
                parent[e] = parent[parent[e]]
                e = parent[e]
            return e

        def union(e, f):
            re, rf = find(e), find(f)
            if re != rf:
                parent[max(re, rf)] = min(re, rf)

        def norm(a, b):
            return (a, b) if a < b else (b, a)

        # opposite edges of each 4-cycle a-b-c-d
        for a in range(self.n):
            for b, d in itertools.combinations(sorted(self.adj[a]), 2):
                for c in self.adj[b] & self.adj[d]:
                    if c != a:
                        union(norm(a, b), norm(d, c))
                        union(norm(a, d), norm(b, c))
        classes: dict = {}
        for e in edges:
            classes.setdefault(find(e), []).append(e)
        out = []
        for i, root in enumerate(sorted(classes)):
            a, b = root
            minus = plus = 0
            for z in range(self.n):
                if self.dist[a][z] < self.dist[b][z]:
                    minus |= 1 << z
                else:
                    plus |= 1 << z
            out.append(Hyperplane(i, frozenset(classes[root]), minus, plus))
        return out

    # hyperplane geometry
    def hyperplane_of_edge(self, a: int, b: int) -> Hyperplane:
        return self.hyperplanes[self._hyperplane_of_edge[(min(a, b), max(a, b))]]

    def transverse(self, J: Hyperplane, K: Hyperplane) -> bool:
        return all(x & y for x in (J.minus, J.plus) for y in (K.minus, K.plus))

    def separating(self, x: int, y: int) -> list:
        return [J for J in self.hyperplanes if (J.plus >> x & 1) != (J.plus >> y & 1)]

    def d_infty(self, x: int, y: int) -> int:
        """Longest chain of pairwise nested hyperplanes separating x and y."""
        return int(self.d_infty_matrix[x, y])

    @cached_property
    def d_infty_matrix(self) -> np.ndarray:
        # Seen from x, the hyperplanes separating x from y form a down-set for
        # inclusion of x-sides, so d(x, y) is the largest chain length ending
        # at a separating hyperplane.
        k, n = len(self.hyperplanes), self.n
        out = np.zeros((n, n), dtype=np.int64)
        if k == 0:
            return out
        halves = np.zeros((2 * k, n), dtype=np.int64)
        for J in self.hyperplanes:
            for v in _bits(J.minus):
                halves[2 * J.index, v] = 1
            for v in _bits(J.plus):
                halves[2 * J.index + 1, v] = 1
        # inside[h1, h2]: halfspace h1 is contained in halfspace h2
        inside = (halves @ (1 - halves).T) == 0
        sizes = halves.sum(axis=1)
        for x in range(n):
            idx = 2 * np.arange(k) + halves[1::2, x]
            size = sizes[idx]
            sub = inside[np.ix_(idx, idx)]
            chain = np.ones(k, dtype=np.int64)
            for i in np.argsort(size, kind="stable"):
                below = sub[:, i] & (size < size[i])
                if below.any():
                    chain[i] = chain[below].max() + 1
            separated = 1 - halves[idx]  # k x n: y off the x-side
            out[x] = (chain[:, None] * separated).max(axis=0)
        return out

    def d_infty_to_set(self, x: int, mask: int) -> int:
        return int(self.d_infty_matrix[x, list(_bits(mask))].min())

    def _carrier_distance(self, J: Hyperplane) -> np.ndarray:
        return self.d_infty_matrix[:, list(_bits(J.carrier))].min(axis=1)

    def halfspace_depth(self, J: Hyperplane, half: int) -> int:
        return int(self._carrier_distance(J)[list(_bits(half))].max())

    def depths(self, J: Hyperplane) -> tuple:
        dist = self._carrier_distance(J)
        return int(dist[list(_bits(J.minus))].max()), int(dist[list(_bits(J.plus))].max())

    def balanced(self, J: Hyperplane) -> bool:
        a, b = self.depths(J)
        return a == b

    def deep_side(self, J: Hyperplane) -> int:
        """The halfspace of larger depth (``J+`` for an unbalanced hyperplane)."""
        a, b = self.depths(J)
        if a == b:
            raise ValueError("balanced hyperplane")
        return J.minus if a > b else J.plus

    # convexity
    def convex_hull(self, mask: int) -> int:
        current = mask
        while True:
            members = list(_bits(current))
            grown = current
            for a, b in itertools.combinations(members, 2):
                grown |= self.interval(a, b)
            if grown == current:
                return current
            current = grown

    def crossing(self, mask: int) -> list:
        return [J for J in self.hyperplanes if J.minus & mask and J.plus & mask]

    def is_cube(self, mask: int) -> bool:
        """Convex, with pairwise transverse crossing hyperplanes and 2^k vertices."""
        if mask == 0 or self.convex_hull(mask) != mask:
            return False
        cross = self.crossing(mask)
        if bin(mask).count("1") != 2 ** len(cross):
            return False
        return all(self.transverse(J, K) for J, K in itertools.combinations(cross, 2))

    def mask_of(self, vertices: Iterable[Hashable]) -> int:
        mask = 0
        for v in vertices:
            mask |= 1 << self.index[v]
        return mask

    def names(self, mask: int) -> list:
        return [self.vertices[i] for i in _bits(mask)]


def validate_median(vertices, edges) -> MedianGraph:
    return MedianGraph(vertices, edges, validate=True)


# group actions

@dataclass
class Action:
    graph: MedianGraph
    generators: list  # list of tuples: generator[i] = image of vertex index i
    names: list = field(default_factory=list)

    def __post_init__(self):
        if not self.names:
            self.names = [f"g{i}" for i in range(len(self.generators))]
        for name, g in zip(self.names, self.generators):
            if sorted(g) != list(range(self.graph.n)):
                raise ValueError(f"{name} is not a permutation")
            for a, b in self.graph.edge_list():
                if g[b] not in self.graph.adj[g[a]]:
                    raise ValueError(f"{name} is not a graph automorphism")

    @classmethod
    def from_json(cls, graph: MedianGraph, data: dict) -> "Action":
        gens, names = [], []
        for item in data.get("generators", []):
            perm = item["perm"]
            gens.append(tuple(graph.index[v] for v in perm))
            names.append(item.get("name", f"g{len(names)}"))
        return cls(graph, gens, names)

    def to_json(self) -> dict:
        return {"generators": [{"name": n, "perm": [self.graph.vertices[j] for j in g]}
                               for n, g in zip(self.names, self.generators)]}

    def apply_mask(self, g: tuple, mask: int) -> int:
        out = 0
        for i in _bits(mask):
            out |= 1 << g[i]
        return out

    def apply_hyperplane(self, g: tuple, J: Hyperplane) -> Hyperplane:
        a, b = next(iter(J.edges))
        return self.graph.hyperplane_of_edge(g[a], g[b])

    def group_elements(self, limit: int = 100_000) -> list:
        ident = tuple(range(self.graph.n))
        seen = {ident}
        todo = [ident]
        while todo:
            h = todo.pop()
            for g in self.generators:
                k = tuple(g[h[i]] for i in range(self.graph.n))
                if k not in seen:
                    seen.add(k)
                    if len(seen) > limit:
                        raise ValueError("group too large")
                    todo.append(k)
        return sorted(seen)


def orbit(action: Action, x: int) -> int:
    mask = 1 << x
    todo = [x]
    while todo:
        v = todo.pop()
        for g in action.generators:
            w = g[v]
            if not mask >> w & 1:
                mask |= 1 << w
                todo.append(w)
    return mask


def hyperplane_separates(G: MedianGraph, K: Hyperplane, J: Hyperplane, L: Hyperplane) -> bool:
    """``K`` separates ``J`` and ``L``: the carriers of J and L lie in opposite
    halfspaces of K, and K differs from both."""
    if K.index in (J.index, L.index):
        return False
    cj, cl = J.carrier, L.carrier
    for half in (K.minus, K.plus):
        if cj & ~half == 0 and cl & half == 0:
            return True
    return False


@dataclass
class FixedRegionReport:
    region: list
    region_mask: int
    unbalanced: list  # (hyperplane index, depth minus, depth plus)
    balanced: list
    trace: list  # (check name, passed)

    def to_json(self) -> dict:
        return {
            "region": self.region,
            "unbalanced": [list(x) for x in self.unbalanced],
            "balanced": self.balanced,
            "trace": [{"check": name, "passed": ok} for name, ok in self.trace],
        }


def fixed_region(G: MedianGraph, action: Action) -> FixedRegionReport:
    trace = []

    def check(name: str, ok: bool):
        trace.append((name, bool(ok)))
        if not ok:
            raise InternalInconsistency(f"check failed: {name}")

    unbalanced, balanced, deep = [], [], []
    for J in G.hyperplanes:
        a, b = G.depths(J)
        if a == b:
            balanced.append(J.index)
        else:
            unbalanced.append((J.index, a, b))
            deep.append(G.deep_side(J))
    check("unbalanced halfspaces pairwise intersect",
          all(x & y for x, y in itertools.combinations(deep, 2)))
    check("balanced hyperplanes pairwise transverse",
          all(G.transverse(G.hyperplanes[i], G.hyperplanes[j]) for i, j in itertools.combinations(balanced, 2)))
    # case 1 scan: a translate gJ strictly between J and hJ
    for g, h in itertools.product(action.generators, repeat=2):
        for J in G.hyperplanes:
            if hyperplane_separates(G, action.apply_hyperplane(g, J), J, action.apply_hyperplane(h, J)):
                trace.append(("no translate separates J and hJ", False))
                raise InternalInconsistency(f"gJ separates J and hJ for J={J.index}")
    trace.append(("no translate separates J and hJ", True))
    region = (1 << G.n) - 1
    for half in deep:
        region &= half
    check("region nonempty", region != 0)
    check("region is a cube", G.is_cube(region))
    check("region invariant", all(action.apply_mask(g, region) == region for g in action.generators))
    return FixedRegionReport(G.names(region), region, unbalanced, balanced, trace)


def all_cubes(G: MedianGraph) -> set:
    """Every cube subgraph, as a vertex mask, by brute force from each vertex."""
    found = set()
    for v in range(G.n):
        nbrs = sorted(G.adj[v])
        for k in range(len(nbrs) + 1):
            for sub in itertools.combinations(nbrs, k):
                mask = 1 << v
                for w in sub:
                    mask |= 1 << w
                hull = G.convex_hull(mask)
                if bin(hull).count("1") == 2 ** k and G.is_cube(hull):
                    found.add(hull)
    return found


def invariant_cubes(G: MedianGraph, action: Action) -> list:
    return sorted(c for c in all_cubes(G) if all(action.apply_mask(g, c) == c for g in action.generators))


def orbit_hull_check(G: MedianGraph, action: Action, x0: int) -> tuple:
    """Compare the hyperplanes crossing the hull of the orbit of ``x0`` with
    the translates of hyperplanes separating ``x0`` from ``s x0``."""
    hull = G.convex_hull(orbit(action, x0))
    crossing = {J.index for J in G.crossing(hull)}
    seeds = {J.index for s in action.generators for J in G.separating(x0, s[x0])}
    translates = set(seeds)
    todo = list(seeds)
    while todo:
        i = todo.pop()
        for g in action.generators:
            j = action.apply_hyperplane(g, G.hyperplanes[i]).index
            if j not in translates:
                translates.add(j)
                todo.append(j)
    return crossing == translates, crossing, translates


# examples and random inputs

def hypercube(n: int) -> MedianGraph:
    verts = list(range(2 ** n))
    edges = [(v, v ^ (1 << i)) for v in verts for i in range(n) if v < v ^ (1 << i)]
    return MedianGraph(verts, edges)


def path(n: int) -> MedianGraph:
    return MedianGraph(list(range(n + 1)), [(i, i + 1) for i in range(n)])


def grid(a: int, b: int) -> MedianGraph:
    """Product of paths of lengths a and b."""
    verts = [(i, j) for i in range(a + 1) for j in range(b + 1)]
    edges = [((i, j), (i + 1, j)) for i in range(a) for j in range(b + 1)]
    edges += [((i, j), (i, j + 1)) for i in range(a + 1) for j in range(b)]
    return MedianGraph(verts, edges)


def majority(a: int, b: int, c: int) -> int:
    return (a & b) | (b & c) | (a & c)


def median_closure(points: Iterable[int], cap: int = 2000) -> set:
    """Closure of a set of hypercube vertices (as bit patterns) under majority."""
    closed = np.unique(np.array(list(points), dtype=np.int64))
    frontier = closed
    while frontier.size:
        found = []
        for a in frontier:
            m = (a & closed[:, None]) | (closed[:, None] & closed[None, :]) | (a & closed[None, :])
            found.append(np.unique(m))
        merged = np.unique(np.concatenate(found + [closed]))
        frontier = np.setdiff1d(merged, closed, assume_unique=True)
        closed = merged
        if closed.size > cap:
            raise ValueError("median closure too large")
    return {int(v) for v in closed}


def covering_edges(points: Iterable[int]) -> list:
    """Pairs with no third point of the set between them in the cube order."""
    pts = np.array(sorted(points), dtype=np.int64)
    edges = []
    for i, a in enumerate(pts):
        rest = pts[i + 1:]
        if not rest.size:
            break
        lo, hi = a & rest, a | rest
        # between[j, c]: pts[c] lies in the cube interval of a and rest[j]
        between = ((pts[None, :] & lo[:, None]) == lo[:, None]) & ((pts[None, :] | hi[:, None]) == hi[:, None])
        count = between.sum(axis=1)  # includes a and rest[j] themselves
        for j in np.nonzero(count == 2)[0]:
            edges.append((int(a), int(rest[j])))
    return edges


def cube_symmetry(n: int, perm: Sequence[int], flip: int):
    """The hypercube automorphism moving bit i to bit perm[i], then flipping."""
    def apply(v: int) -> int:
        out = 0
        for i in range(n):
            if v >> i & 1:
                out |= 1 << perm[i]
        return out ^ flip
    return apply


def random_cube_symmetry(rng: random.Random, n: int):
    perm = list(range(n))
    rng.shuffle(perm)
    return cube_symmetry(n, perm, rng.randrange(2 ** n))


@dataclass
class RandomInstance:
    graph: MedianGraph
    action: Action
    points: list


def random_instance(rng: random.Random, n: int = 6, k: int = 4, gens: int = 2, cap: int = 512) -> RandomInstance:
    """Median closure of the orbit of ``k`` random points of Q_n under a random
    group of cube symmetries, with that group acting on the covering graph."""
    while True:
        symmetries = [random_cube_symmetry(rng, n) for _ in range(rng.randint(0, gens))]
        points = {rng.randrange(2 ** n) for _ in range(k)}
        todo = list(points)
        while todo and len(points) <= cap:
            v = todo.pop()
            for g in symmetries:
                w = g(v)
                if w not in points:
                    points.add(w)
                    todo.append(w)
        if len(points) > cap:
            continue
        try:
            closed = median_closure(points, cap)
        except ValueError:
            continue
        verts = sorted(closed)
        G = MedianGraph(verts, covering_edges(closed))
        gens_ = [tuple(G.index[g(v)] for v in verts) for g in symmetries]
        return RandomInstance(G, Action(G, gens_), sorted(points))


def random_median_graph(rng: random.Random, n: int = 6, k: int = 5, cap: int = 400) -> MedianGraph:
    return random_instance(rng, n, k, gens=0, cap=cap).graph


def automorphisms(G: MedianGraph, limit: int = 500) -> list:
    g = nx.Graph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from(G.edge_list())
    matcher = nx.algorithms.isomorphism.GraphMatcher(g, g)
    out = []
    for m in itertools.islice(matcher.isomorphisms_iter(), limit):
        out.append(tuple(m[i] for i in range(G.n)))
    return out


def random_action(rng: random.Random, G: MedianGraph, gens: int = 2) -> Action:
    """Random subgroup of the full automorphism group (small graphs only)."""
    autos = automorphisms(G)
    chosen = [rng.choice(autos) for _ in range(rng.randint(0, gens))]
    return Action(G, chosen)


def brute_d_infty(G: MedianGraph, x: int, y: int) -> int:
    """Largest set of pairwise non-transverse separating hyperplanes, by search."""
    seps = G.separating(x, y)
    best = 0

    def grow(start, chosen):
        nonlocal best
        best = max(best, len(chosen))
        for i in range(start, len(seps)):
            if all(not G.transverse(seps[i], seps[j]) for j in chosen):
                grow(i + 1, chosen + [i])

    grow(0, [])
    return best
