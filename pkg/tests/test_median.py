import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from neretin.errors import NotMedian
from neretin.median import (
    Action,
    MedianGraph,
    brute_d_infty,
    cube_symmetry,
    fixed_region,
    grid,
    hypercube,
    invariant_cubes,
    orbit,
    orbit_hull_check,
    path,
    random_instance,
    validate_median,
)

seeds = st.integers(0, 10**6)


def coordinate_permutations(n):
    G = hypercube(n)
    gens = [tuple(cube_symmetry(n, perm, 0)(v) for v in G.vertices)
            for perm in ((1, 0) + tuple(range(2, n)), tuple(range(1, n)) + (0,))]
    return G, Action(G, gens)


def brute_is_median(vertices, edges):
    g = nx.Graph()
    g.add_nodes_from(vertices)
    g.add_edges_from(edges)
    if not nx.is_connected(g):
        return False
    dist = dict(nx.all_pairs_shortest_path_length(g))
    for a, b, c in itertools.combinations(vertices, 3):
        meds = [m for m in vertices
                if dist[a][m] + dist[m][b] == dist[a][b]
                and dist[b][m] + dist[m][c] == dist[b][c]
                and dist[a][m] + dist[m][c] == dist[a][c]]
        if len(meds) != 1:
            return False
    return True


def test_validation_examples():
    validate_median(list(range(8)), hypercube(3).edge_list())
    path(5)
    with pytest.raises(NotMedian) as info:
        validate_median([0, 1, 2, 3], [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    assert len(info.value.triple) == 3


def test_hyperplane_counts():
    assert len(hypercube(3).hyperplanes) == 3
    assert len(hypercube(4).hyperplanes) == 4
    assert len(path(5).hyperplanes) == 5
    assert len(grid(3, 2).hyperplanes) == 5


def test_d_infty_examples():
    Q = hypercube(3)
    assert Q.d_infty(0, 7) == 1
    assert path(5).d_infty(0, 5) == 5
    G = grid(3, 2)
    assert G.d_infty(G.index[(0, 0)], G.index[(3, 2)]) == 3


def test_depth_examples():
    edge = path(1)
    J = edge.hyperplanes[0]
    assert edge.depths(J) == (0, 0) and edge.balanced(J)
    P3 = path(3)
    middle = P3.hyperplane_of_edge(1, 2)
    end = P3.hyperplane_of_edge(0, 1)
    assert P3.depths(middle) == (1, 1)
    assert sorted(P3.depths(end)) == [0, 2]
    assert not P3.balanced(end)
    assert P3.deep_side(end) == P3.mask_of([1, 2, 3])


def test_fixed_region_examples():
    P2 = path(2)
    reflection = Action(P2, [(2, 1, 0)])
    assert fixed_region(P2, reflection).region == [1]
    Q, sym = coordinate_permutations(3)
    assert fixed_region(Q, sym).region == list(range(8))
    P3 = path(3)
    r = fixed_region(P3, Action(P3, []))
    assert r.region == [1, 2]
    assert r.region_mask in invariant_cubes(P3, Action(P3, []))


def test_convex_hull_examples():
    Q = hypercube(3)
    assert Q.convex_hull(Q.mask_of([0, 1])) == Q.mask_of([0, 1])
    assert Q.convex_hull(Q.mask_of([0, 7])) == (1 << 8) - 1
    assert Q.convex_hull(Q.mask_of([5])) == Q.mask_of([5])


def test_orbit_examples():
    P3 = path(3)
    assert orbit(Action(P3, []), 2) == 1 << 2
    P2 = path(2)
    assert orbit(Action(P2, [(2, 1, 0)]), 0) == P2.mask_of([0, 2])
    Q, sym = coordinate_permutations(3)
    assert orbit(sym, 1) == Q.mask_of([1, 2, 4])


def test_json_roundtrip():
    G = grid(2, 1)
    H = MedianGraph.from_json(G.to_json())
    assert H.n == G.n and sorted(H.edge_list()) == sorted(G.edge_list())


def test_rejects_non_automorphism():
    P2 = path(2)
    with pytest.raises(ValueError):
        Action(P2, [(1, 0, 2)])


# properties

@given(seeds)
def test_validation_matches_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 7)
    verts = list(range(n))
    tree_edges = [(i, rng.randrange(i)) for i in range(1, n)]
    extra = [tuple(rng.sample(verts, 2)) for _ in range(rng.randint(0, 3))]
    edges = sorted({tuple(sorted(e)) for e in tree_edges + extra})
    expected = brute_is_median(verts, edges)
    try:
        validate_median(verts, edges)
        got = True
    except NotMedian:
        got = False
    assert got == expected


@given(seeds)
def test_random_instances_are_median(seed):
    inst = random_instance(random.Random(seed), n=4, k=3, cap=40)
    G = inst.graph
    assert brute_is_median(list(range(G.n)), G.edge_list())


@given(seeds)
def test_distance_counts_separating_hyperplanes(seed):
    rng = random.Random(seed)
    G = random_instance(rng, n=5, k=4, cap=80).graph
    g = nx.Graph(G.edge_list())
    g.add_nodes_from(range(G.n))
    dist = dict(nx.all_pairs_shortest_path_length(g))
    for _ in range(10):
        x, y = rng.randrange(G.n), rng.randrange(G.n)
        assert len(G.separating(x, y)) == dist[x][y]


@given(seeds)
def test_d_infty_matrix_matches_brute_force(seed):
    rng = random.Random(seed)
    G = random_instance(rng, n=5, k=4, cap=60).graph
    M = G.d_infty_matrix
    for x in range(G.n):
        for y in range(G.n):
            assert M[x][y] == brute_d_infty(G, x, y)


@given(seeds)
def test_fixed_region_is_an_invariant_cube(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, n=4, k=3, gens=2, cap=48)
    G, A = inst.graph, inst.action
    r = fixed_region(G, A)
    assert r.region_mask in invariant_cubes(G, A)
    assert all(ok for _, ok in r.trace)


@given(seeds)
def test_orbit_hull_crossings(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, n=4, k=3, gens=2, cap=48)
    ok, _, _ = orbit_hull_check(inst.graph, inst.action, rng.randrange(inst.graph.n))
    assert ok
