import itertools
import random

import pytest
from hypothesis import given, strategies as st

from neretin.simplicial import (
    SimplicialComplex,
    cone,
    connected_components,
    dense_smith,
    euler_check,
    homology,
    interval_complex,
    interval_complex_counts,
    is_flag,
    join,
    smith_invariants,
    verify_connectivity_bound,
)


def brute_interval_faces(p, q):
    """All pairwise disjoint families of p-subsets, by exhaustion."""
    verts = list(itertools.combinations(range(1, q + 1), p))
    faces = set()
    for k in range(1, q // p + 1):
        for fam in itertools.combinations(verts, k):
            if all(not set(a) & set(b) for a, b in itertools.combinations(fam, 2)):
                faces.add(frozenset(fam))
    return faces


def triangle_boundary():
    return SimplicialComplex.from_faces([(0, 1), (1, 2), (0, 2)])


def test_interval_examples():
    assert interval_complex(1, 4).f_vector() == (4, 6, 4, 1)
    K = interval_complex(2, 4)
    assert K.f_vector() == (6, 3)
    assert connected_components(K) == 3
    assert interval_complex(2, 6).f_vector() == (15, 45, 15)
    assert connected_components(interval_complex(2, 6)) == 1
    assert interval_complex(2, 5).f_vector() == (10, 15)
    assert interval_complex(3, 3).f_vector() == (1,)


@pytest.mark.parametrize("p,q", [(p, q) for p in (1, 2, 3) for q in range(0, 9) if q >= p])
def test_interval_against_brute_force(p, q):
    K = interval_complex(p, q)
    assert K.faces() == brute_interval_faces(p, q)
    v, e = interval_complex_counts(p, q)
    fv = K.f_vector()
    assert fv[0] == v and (fv[1] if len(fv) > 1 else 0) == e


def test_interval_flag_small():
    for p in range(1, 4):
        for q in range(p, 9):
            assert is_flag(interval_complex(p, q))[0]


def test_homology_examples():
    assert homology(SimplicialComplex.simplex([0, 1, 2, 3]), 3).betti == [1, 0, 0, 0]
    assert homology(interval_complex(2, 4), 0).betti[0] == 3
    assert homology(triangle_boundary(), 1).betti == [1, 1]
    assert connected_components(SimplicialComplex.empty()) == 0


def test_betti_one_of_i_2_10():
    rep = homology(interval_complex(2, 10), 1)
    assert rep.betti == [1, 0]
    assert rep.torsion[1] == []


def test_flag_examples():
    ok, clique = is_flag(triangle_boundary())
    assert not ok and clique == (0, 1, 2)
    assert is_flag(SimplicialComplex.from_faces([(0, 1), (1, 2), (2, 3)]))[0]


def test_join_examples():
    K = interval_complex(2, 4)
    pt = SimplicialComplex.simplex(["apex"])
    assert join(pt, K).faces() == cone(K).faces()
    assert join(SimplicialComplex.empty(), K).faces() == K.faces()


def test_connectivity_reports():
    assert verify_connectivity_bound(2, 6, 0).verdict == "PASS"
    assert verify_connectivity_bound(2, 10, 1).verdict == "PASS"
    r = verify_connectivity_bound(2, 4, 0)
    assert r.verdict == "NOT-APPLICABLE" and r.components == 3


def test_json_roundtrip():
    K = interval_complex(2, 5)
    assert SimplicialComplex.from_json(K.to_json()).faces() == K.faces()


def test_torsion_is_found():
    # six-vertex real projective plane has H_1 = Z/2
    rp2 = SimplicialComplex.from_faces([
        (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
        (2, 3, 5), (2, 4, 5), (2, 4, 6), (3, 4, 6), (3, 5, 6),
    ])
    rep = homology(rp2, 2)
    assert rep.betti == [1, 0, 0]
    assert rep.torsion[1] == [2]


@given(st.integers(0, 10**6))
def test_smith_matches_sympy(seed):
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form

    rng = random.Random(seed)
    r, c = rng.randint(1, 5), rng.randint(1, 5)
    m = [[rng.randint(-3, 3) for _ in range(c)] for _ in range(r)]
    rows = [{j: x for j, x in enumerate(row) if x} for row in m]
    ours = sorted(abs(x) for x in smith_invariants(rows, c))
    snf = smith_normal_form(sympy.Matrix(m), domain=sympy.ZZ)
    theirs = sorted(abs(int(snf[i, i])) for i in range(min(r, c)) if snf[i, i] != 0)
    assert ours == theirs
    assert sorted(abs(x) for x in dense_smith([row[:] for row in m]) if x) == theirs


@given(st.integers(0, 10**6))
def test_homology_consistent_with_euler_and_mod_p(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 7)
    faces = [tuple(sorted(rng.sample(range(n), rng.randint(1, 3)))) for _ in range(rng.randint(1, 8))]
    K = SimplicialComplex.from_faces(faces)
    assert euler_check(K)
    rep = homology(K, 0)
    assert rep.betti[0] == connected_components(K)


@given(st.integers(0, 10**6))
def test_join_f_vector(seed):
    rng = random.Random(seed)
    A = SimplicialComplex.from_faces([tuple(rng.sample(range(5), rng.randint(1, 3))) for _ in range(3)])
    B = SimplicialComplex.from_faces([tuple(rng.sample(range(10, 15), rng.randint(1, 2))) for _ in range(3)])
    J = join(A, B)
    # join faces are unions of a face (or nothing) from each side
    fa = A.faces() | {frozenset()}
    fb = B.faces() | {frozenset()}
    expected = {a | b for a in fa for b in fb} - {frozenset()}
    assert J.faces() == expected
