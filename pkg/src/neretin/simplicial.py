"""Finite simplicial complexes, interval complexes and integral homology."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import networkx as nx

from .errors import LabelCollision, SizeExceeded

FACE_BOUND = 200_000


def _sort_key(x):
    return (str(type(x)), x) if not isinstance(x, tuple) else ("", x)


class SimplicialComplex:
    """Complex given by its maximal faces; the full face set is built on
    demand by closure."""

    def __init__(self, vertices: Iterable[Hashable] = (), maximal_faces: Iterable[Iterable[Hashable]] = (),
                 face_bound: int = FACE_BOUND):
        verts = list(dict.fromkeys(vertices))
        faces = {frozenset(f) for f in maximal_faces}
        faces.discard(frozenset())
        for f in faces:
            for v in f:
                if v not in verts:
                    verts.append(v)
        for v in verts:
            faces.add(frozenset([v]))
        # keep only maximal ones
        by_size = sorted(faces, key=len, reverse=True)
        maximal = []
        for f in by_size:
            if not any(f < g for g in maximal):
                maximal.append(f)
        self.vertices = tuple(sorted(verts, key=_sort_key))
        self.maximal_faces = tuple(sorted((tuple(sorted(f, key=_sort_key)) for f in maximal),
                                          key=lambda t: (len(t), [_sort_key(x) for x in t])))
        self.face_bound = face_bound
        self._faces = None

    @classmethod
    def from_faces(cls, faces: Iterable[Iterable[Hashable]], vertices: Iterable[Hashable] = ()) -> "SimplicialComplex":
        return cls(vertices, faces)

    @classmethod
    def simplex(cls, vertices: Sequence[Hashable]) -> "SimplicialComplex":
        vertices = list(vertices)
        return cls(vertices, [vertices] if vertices else [])

    @classmethod
    def empty(cls) -> "SimplicialComplex":
        return cls()

    def faces(self) -> frozenset:
        """All nonempty faces."""
        if self._faces is None:
            out = set()
            for f in self.maximal_faces:
                if 2 ** len(f) > self.face_bound * 4 or len(out) > self.face_bound:
                    raise SizeExceeded("face count beyond the configured bound")
                for k in range(1, len(f) + 1):
                    for sub in itertools.combinations(f, k):
                        out.add(frozenset(sub))
            if len(out) > self.face_bound:
                raise SizeExceeded(f"{len(out)} faces exceed the bound {self.face_bound}")
            self._faces = frozenset(out)
        return self._faces

    def faces_of_dim(self, k: int) -> list:
        return sorted((tuple(sorted(f, key=_sort_key)) for f in self.faces() if len(f) == k + 1),
                      key=lambda t: [_sort_key(x) for x in t])

    @property
    def dimension(self) -> int:
        return max((len(f) for f in self.maximal_faces), default=0) - 1

    def f_vector(self) -> tuple:
        counts = [0] * (self.dimension + 1)
        for f in self.faces():
            counts[len(f) - 1] += 1
        return tuple(counts)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.f_vector()))

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for f in self.maximal_faces:
            g.add_edges_from(itertools.combinations(f, 2))
        return g

    def edges(self) -> set:
        return {frozenset(e) for e in self.graph().edges()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and {frozenset(f) for f in self.maximal_faces} == {
            frozenset(f) for f in other.maximal_faces
        }

    def __hash__(self):
        return hash(frozenset(frozenset(f) for f in self.maximal_faces))

    def __repr__(self) -> str:
        return f"SimplicialComplex({len(self.vertices)} vertices, f={self.f_vector()})"

    def relabel(self, mapping) -> "SimplicialComplex":
        m = mapping if callable(mapping) else mapping.__getitem__
        return SimplicialComplex([m(v) for v in self.vertices], [[m(v) for v in f] for f in self.maximal_faces])

    def to_json(self) -> dict:
        def enc(v):
            return list(v) if isinstance(v, tuple) else v

        return {"vertices": [enc(v) for v in self.vertices],
                "maximal_faces": [[enc(v) for v in f] for f in self.maximal_faces]}

    @classmethod
    def from_json(cls, obj: dict) -> "SimplicialComplex":
        def dec(v):
            return tuple(v) if isinstance(v, list) else v

        return cls([dec(v) for v in obj["vertices"]], [[dec(v) for v in f] for f in obj["maximal_faces"]])


def interval_complex(p: int, q: int) -> SimplicialComplex:
    """Vertices: p-subsets of {1..q}; faces: pairwise disjoint families."""
    if p < 1 or q < 0:
        raise ValueError("need p >= 1 and q >= 0")
    ground = list(range(1, q + 1))
    verts = [tuple(c) for c in itertools.combinations(ground, p)]
    maximal = []

    slack = q % p

    def grow(remaining: tuple, family: list, skipped: int):
        # each element is either skipped or the minimum of its block
        if len(remaining) < p:
            if skipped + len(remaining) == slack:
                maximal.append(list(family))
            return
        first = remaining[0]
        rest = remaining[1:]
        for others in itertools.combinations(rest, p - 1):
            block = (first,) + others
            left = tuple(x for x in rest if x not in others)
            family.append(block)
            grow(left, family, skipped)
            family.pop()
        if skipped < slack:
            grow(rest, family, skipped + 1)

    grow(tuple(ground), [], 0)
    maximal = [f for f in maximal if f]
    return SimplicialComplex(verts, maximal)


def interval_complex_counts(p: int, q: int) -> tuple:
    """Closed-form vertex and edge counts."""
    return math.comb(q, p), math.comb(q, p) * math.comb(q - p, p) // 2 if q >= p else 0


def connected_components(K: SimplicialComplex) -> int:
    if not K.vertices:
        return 0
    return nx.number_connected_components(K.graph())


def is_flag(K: SimplicialComplex):
    """Return ``(True, None)`` or ``(False, clique)`` with a clique of the
    1-skeleton that is not a face."""
    faces = K.faces()
    for clique in nx.enumerate_all_cliques(K.graph()):
        if frozenset(clique) not in faces:
            return False, tuple(sorted(clique, key=_sort_key))
    return True, None


def join(K1: SimplicialComplex, K2: SimplicialComplex) -> SimplicialComplex:
    shared = set(K1.vertices) & set(K2.vertices)
    if shared:
        raise LabelCollision(f"shared vertex labels {sorted(shared, key=_sort_key)[:5]}")
    if not K1.vertices:
        return K2
    if not K2.vertices:
        return K1
    maximal = [list(a) + list(b) for a in K1.maximal_faces for b in K2.maximal_faces]
    return SimplicialComplex(list(K1.vertices) + list(K2.vertices), maximal)


def cone(K: SimplicialComplex, apex: Hashable = "apex") -> SimplicialComplex:
    return join(SimplicialComplex([apex], [[apex]]), K)


# integral homology


def _oriented_boundary(faces_k: list, index_km1: dict) -> list:
    """Rows indexed by k-faces, as dicts column -> coefficient."""
    rows = []
    for f in faces_k:
        row = {}
        for i in range(len(f)):
            sub = f[:i] + f[i + 1:]
            row[index_km1[sub]] = -1 if i % 2 else 1
        rows.append(row)
    return rows


def smith_invariants(rows: list, ncols: int) -> list:
    """Nonzero invariant factors of an integer matrix given as sparse rows.

    Unit pivots are eliminated sparsely; whatever remains is reduced densely
    by a Euclidean Smith normal form.
    """
    rows = [dict(r) for r in rows if r]
    col_rows: dict = {}
    for i, r in enumerate(rows):
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    alive = set(range(len(rows)))
    invariants = []
    while True:
        pivot = None
        best = None
        for c, rs in col_rows.items():
            for i in rs:
                if abs(rows[i][c]) == 1:
                    cost = (len(rs) - 1) * (len(rows[i]) - 1)
                    if best is None or cost < best:
                        best, pivot = cost, (i, c)
                        if cost == 0:
                            break
            if best == 0:
                break
        if pivot is None:
            break
        i, c = pivot
        prow = rows[i]
        pv = prow[c]
        for j in list(col_rows[c]):
            if j == i:
                continue
            rj = rows[j]
            factor = rj[c] * pv  # pv is +-1 so pv == 1/pv
            for cc, val in prow.items():
                new = rj.get(cc, 0) - factor * val
                if new:
                    if cc not in rj:
                        col_rows.setdefault(cc, set()).add(j)
                    rj[cc] = new
                elif cc in rj:
                    del rj[cc]
                    col_rows[cc].discard(j)
            if not rj:
                alive.discard(j)
        for cc in prow:
            col_rows[cc].discard(i)
            if not col_rows[cc]:
                del col_rows[cc]
        alive.discard(i)
        rows[i] = {}
        invariants.append(1)
    rest_rows = [rows[i] for i in sorted(alive) if rows[i]]
    if rest_rows:
        cols = sorted({c for r in rest_rows for c in r})
        pos = {c: k for k, c in enumerate(cols)}
        dense = [[0] * len(cols) for _ in rest_rows]
        for a, r in enumerate(rest_rows):
            for c, v in r.items():
                dense[a][pos[c]] = v
        invariants.extend(dense_smith(dense))
    return invariants


def dense_smith(m: list) -> list:
    """Nonzero diagonal of the Smith normal form of a dense integer matrix."""
    a = [list(r) for r in m]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    diag = []
    t = 0
    while t < nr and t < nc:
        # find a nonzero entry of minimal absolute value
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                v = a[i][j]
                if v and (best is None or abs(v) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            done = True
            p = a[t][t]
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for r in a:
                            r[j] -= q * r[t]
                    if a[t][j]:
                        done = False
            if done:
                # divisibility of the remaining block
                bad = None
                for i in range(t + 1, nr):
                    for j in range(t + 1, nc):
                        if a[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad])]
                continue
            # move the smallest entry of row/column t to the pivot
            best = (t, t)
            for i in range(t, nr):
                if a[i][t] and abs(a[i][t]) < abs(a[best[0]][best[1]]):
                    best = (i, t)
            for j in range(t, nc):
                if a[t][j] and abs(a[t][j]) < abs(a[best[0]][best[1]]):
                    best = (t, j)
            i, j = best
            a[t], a[i] = a[i], a[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def rank_mod_p(rows: list, ncols: int, p: int) -> int:
    """Rank over GF(p), used as an independent cross-check."""
    rows = [{c: v % p for c, v in r.items() if v % p} for r in rows]
    rows = [r for r in rows if r]
    rank = 0
    pivots: dict = {}
    for r in rows:
        r = dict(r)
        while r:
            c = min(r)
            if c in pivots:
                pr = pivots[c]
                f = r[c] * pow(pr[c], -1, p) % p
                for cc, v in pr.items():
                    nv = (r.get(cc, 0) - f * v) % p
                    if nv:
                        r[cc] = nv
                    else:
                        r.pop(cc, None)
            else:
                pivots[c] = r
                rank += 1
                break
    return rank


@dataclass
class HomologyReport:
    betti: list
    torsion: list
    f_vector: tuple
    ranks: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"betti": self.betti, "torsion": self.torsion, "f_vector": list(self.f_vector)}


def chain_data(K: SimplicialComplex, top: int):
    faces = {k: K.faces_of_dim(k) for k in range(0, top + 1)}
    index = {k: {f: i for i, f in enumerate(fs)} for k, fs in faces.items()}
    boundaries = {}
    for k in range(1, top + 1):
        boundaries[k] = _oriented_boundary(faces[k], index[k - 1]) if faces.get(k) else []
    return faces, boundaries


def homology(K: SimplicialComplex, max_dim: int = 1) -> HomologyReport:
    """Integral (unreduced) homology in degrees ``0..max_dim``."""
    fv = K.f_vector() if K.vertices else ()
    if not K.vertices:
        return HomologyReport([0] * (max_dim + 1), [[] for _ in range(max_dim + 1)], fv)
    top = min(max_dim + 1, K.dimension)
    faces, boundaries = chain_data(K, top)
    invariants = {}
    for k in range(1, top + 1):
        invariants[k] = smith_invariants(boundaries[k], len(faces[k - 1])) if boundaries[k] else []
    betti, torsion, ranks = [], [], []
    for k in range(0, max_dim + 1):
        ck = len(faces.get(k, [])) if k <= K.dimension else 0
        rk = len(invariants.get(k, []))
        rk1 = len(invariants.get(k + 1, []))
        betti.append(ck - rk - rk1)
        torsion.append(sorted(x for x in invariants.get(k + 1, []) if x > 1))
        ranks.append(rk)
    return HomologyReport(betti, torsion, fv, ranks)


def euler_check(K: SimplicialComplex) -> bool:
    """Alternating sum of Betti numbers equals the Euler characteristic."""
    rep = homology(K, K.dimension)
    return sum((-1) ** k * b for k, b in enumerate(rep.betti)) == K.euler_characteristic()


@dataclass
class ConnectivityReport:
    p: int
    q: int
    k: int
    applicable: bool
    components: int
    betti: list
    verdict: str
    caveat: str

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "k": self.k, "applicable": self.applicable,
                "components": self.components, "betti": self.betti,
                "verdict": self.verdict, "caveat": self.caveat}


def verify_connectivity_bound(p: int, q: int, k: int) -> ConnectivityReport:
    K = interval_complex(p, q)
    comps = connected_components(K)
    applicable = q >= (3 + 2 * k) * p
    caveat = "connectivity above degree 0 is certified homologically only"
    if not applicable:
        return ConnectivityReport(p, q, k, False, comps, [], "NOT-APPLICABLE", caveat)
    ok = comps == 1
    betti = []
    if k >= 1:
        rep = homology(K, k)
        betti = rep.betti
        ok = ok and all(b == 0 for b in rep.betti[1:]) and all(not t for t in rep.torsion[1:])
    return ConnectivityReport(p, q, k, True, comps, betti, "PASS" if ok else "FAIL", caveat)


def complexes_isomorphic(K1: SimplicialComplex, K2: SimplicialComplex) -> bool:
    """Isomorphism test: 1-skeleton isomorphism (networkx) plus matching
    higher faces under some skeleton isomorphism."""
    if K1.f_vector() != K2.f_vector():
        return False
    g1, g2 = K1.graph(), K2.graph()
    matcher = nx.algorithms.isomorphism.GraphMatcher(g1, g2)
    f2 = K2.faces()
    for m in matcher.isomorphisms_iter():
        if all(frozenset(m[v] for v in f) in f2 for f in K1.maximal_faces):
            return True
    return False


def map_is_isomorphism(K1: SimplicialComplex, K2: SimplicialComplex, mapping: dict) -> bool:
    """Whether ``mapping`` is a bijection of vertices carrying faces onto faces."""
    values = list(mapping.values())
    if set(mapping) != set(K1.vertices) or len(set(values)) != len(values) or set(values) != set(K2.vertices):
        return False
    image = {frozenset(mapping[v] for v in f) for f in K1.faces()}
    return image == set(K2.faces())
