import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from neretin import perm as Pm
from neretin.aaut import compose as acompose, parity as aparity
from neretin.cremona.bubbles import (
    blowup_tree,
    check_germs_linear,
    check_line_images,
    depth1_action,
    direction_leaf_count,
    induced_aaut_level1,
    induced_permutation_blowup,
)
from neretin.cremona.fields import GF, MODULI, QuadraticExtension
from neretin.cremona.groups import alternating_generators, group_closure, naive_closure, symmetric_generators
from neretin.cremona.parity import (
    expand_at,
    expected_expansion_sign,
    parity,
    parity_suite,
    pgl2_parity_census,
    pgl3_generators,
    pgl_elements,
    pgl_order,
    random_linear,
)
from neretin.cremona.projective import (
    Linear,
    QuadraticAB,
    QuadraticStd,
    enumerate_points,
    induced_permutation,
    valid_ab_pairs,
)
from neretin.errors import NotBijectiveOnRationalPoints, ParseError, PositionMismatch

seeds = st.integers(0, 10**6)
FIELDS = sorted(MODULI)


# fields

@pytest.mark.parametrize("q", FIELDS)
def test_field_axioms(q):
    F = GF(q)
    assert F.verify_axioms()
    assert F.frobenius_is_automorphism()
    assert QuadraticExtension(F).verify_axioms()


@pytest.mark.parametrize("q", [4, 8, 9])
def test_field_against_sympy(q):
    gt = pytest.importorskip("sympy.polys.galoistools")
    from sympy.polys.domains import ZZ

    F = GF(q)
    p, modulus = MODULI[q]
    k = F.degree
    mod_hi = list(reversed(modulus))  # sympy lists the leading coefficient first

    def poly(a):
        return gt.gf_strip([ZZ((a // p ** i) % p) for i in reversed(range(k))])

    def value(c):
        c = [0] * (k - len(c)) + [int(x) for x in c]
        return sum(x * p ** i for i, x in enumerate(reversed(c)))

    for a, b in itertools.product(range(q), repeat=2):
        prod = gt.gf_rem(gt.gf_mul(poly(a), poly(b), p, ZZ), mod_hi, p, ZZ)
        assert F.mul(a, b) == value(prod)
        assert F.add(a, b) == value(gt.gf_add(poly(a), poly(b), p, ZZ))


def test_literals():
    F = GF(4)
    assert F.parse("01") == 2 and F.to_str(2) == "01"
    assert F.modulus_string() == "t^2 + t + 1"
    with pytest.raises(ParseError):
        F.parse("2")


def test_conjugation_is_involutive_automorphism():
    E = QuadraticExtension(GF(3))
    for z in E.elements:
        assert E.conjugate(E.conjugate(z)) == z
        assert (E.conjugate(z) == z) == E.is_base(z)
    for a, b in itertools.product(E.elements, repeat=2):
        assert E.conjugate(E.mul(a, b)) == E.mul(E.conjugate(a), E.conjugate(b))


# points and permutations

def test_point_counts():
    assert len(enumerate_points(GF(2), 1)) == 3
    assert len(enumerate_points(GF(2), 2)) == 7
    assert len(enumerate_points(GF(4), 2)) == 21


def test_induced_permutation_examples():
    F = GF(2)
    assert Pm.is_identity(induced_permutation(Linear(F, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])))
    p = induced_permutation(Linear(F, [[0, 1, 0], [0, 0, 1], [1, 0, 0]]))
    assert len(p) == 7 and Pm.order(p) == 3
    for q in (2, 3, 4):
        with pytest.raises(NotBijectiveOnRationalPoints):
            induced_permutation(QuadraticStd(GF(q)))


def test_pgl2_census():
    for q in (4, 8):
        assert pgl2_parity_census(q)["allEven"]
    for q in (2, 3, 5):
        r = pgl2_parity_census(q)
        assert not r["allEven"] and r["order"] == r["expected_order"]


def test_perm_parity_examples():
    assert parity((0, 1, 2)) == 1
    assert parity((1, 0, 2)) == -1
    assert parity((1, 2, 0)) == 1


def test_expand_at_examples():
    out = expand_at((1, 0), 1, 2, 2, (0, 1))
    assert len(out) == 3 and Pm.order(out) == 3 and Pm.sign(out) == 1
    assert Pm.sign(expand_at((0, 1, 2), 2, 2, 2, (1, 0))) == -1
    for s in range(1, 4):
        p = Pm.from_cycles(3, (0, 1, 2))
        r = p[s - 1] + 1
        assert Pm.sign(expand_at(p, s, r, 3, (0, 1, 2))) == Pm.sign(p)
    with pytest.raises(PositionMismatch):
        expand_at((1, 0), 1, 1, 2, (0, 1))


@given(seeds, st.integers(1, 8), st.sampled_from([2, 3, 4]))
def test_expand_at_sign_law(seed, n, d):
    rng = random.Random(seed)
    p = list(range(n))
    rng.shuffle(p)
    beta = list(range(d))
    rng.shuffle(beta)
    s = rng.randint(1, n)
    r = p[s - 1] + 1
    out = expand_at(p, s, r, d, beta)
    assert Pm.is_permutation(out)
    assert Pm.sign_by_inversions(out) == expected_expansion_sign(p, s, r, d, beta)


# groups

def test_closure_examples():
    assert group_closure([(1, 2, 0)], 3).order() == 3
    assert group_closure(symmetric_generators(7), 7).order() == 5040
    assert group_closure(alternating_generators(7), 7).order() == 2520
    F = GF(2)
    bsgs = group_closure([induced_permutation(g, F) for g in pgl3_generators(F)], 7)
    assert bsgs.order() == 168


@given(seeds)
def test_bsgs_matches_naive_closure(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    gens = []
    for _ in range(rng.randint(1, 3)):
        g = list(range(n))
        rng.shuffle(g)
        gens.append(tuple(g))
    bsgs = group_closure(gens, n)
    naive = naive_closure(gens, n)
    assert bsgs.order() == len(naive)
    for g in itertools.islice(itertools.permutations(range(n)), 200):
        assert bsgs.contains(g) == (g in naive)


def test_pgl_orders():
    for q in (2, 3):
        assert len(pgl_elements(GF(q), 2)) == pgl_order(q, 2)
    assert len(pgl_elements(GF(2), 3)) == 168


@given(seeds, st.sampled_from([2, 3, 4]))
def test_induced_permutation_is_homomorphism(seed, q):
    rng = random.Random(seed)
    F = GF(q)
    a, b = random_linear(rng, F), random_linear(rng, F)
    assert induced_permutation(a.compose(b)) == Pm.compose(induced_permutation(a), induced_permutation(b))


# depth-one actions

def test_depth1_identity_and_lines():
    F = GF(4)
    ident = Linear(F, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    action = depth1_action(ident)
    assert all(a == t for a, t in action.leaves.items())
    assert len(action.pair_action()) == 21 * 5
    assert all(Pm.is_identity(p) for p in action.directions.values())
    w = 2
    for diag in ([[1, 0, 0], [0, w, 0], [0, 0, 1]], [[w, 0, 0], [0, 1, 0], [0, 0, F.mul(w, w)]]):
        m = Linear(F, diag)
        assert check_line_images(m) and check_germs_linear(m)


def test_quadratic_std_over_f2():
    F = GF(2)
    m = QuadraticStd(F)
    action = depth1_action(m)
    assert len(action.leaves) == direction_leaf_count(F, m.base_points()) == 4 + 3 * 3
    assert sorted(action.leaves.values()) == sorted(blowup_tree(F, m.inverse().base_points()).leaves)


def test_level1_linear_over_f4():
    F = GF(4)
    rng = random.Random(3)
    m = random_linear(rng, F)
    g = induced_aaut_level1(m)
    star = blowup_tree(F, [])
    assert g.domain.interior <= star.interior and g.range.interior <= star.interior
    assert aparity(g) == Pm.sign(induced_permutation(m))


def test_level1_quadratic_std_over_f4():
    F = GF(4)
    g = induced_aaut_level1(QuadraticStd(F))
    assert g.expand_to(blowup_tree(F, QuadraticStd(F).base_points())).domain.leaf_count == 33
    assert aparity(g) == 1


@given(seeds, st.sampled_from([2, 4]))
def test_level1_is_functorial_on_linear_maps(seed, q):
    rng = random.Random(seed)
    F = GF(q)
    a, b = random_linear(rng, F), random_linear(rng, F)
    lhs = acompose(induced_aaut_level1(a), induced_aaut_level1(b))
    rhs = induced_aaut_level1(a.compose(b))
    assert lhs.equals(rhs)


def test_quadratic_ab_blowup_signs():
    for q, expected in ((2, 1), (3, -1), (4, 1)):
        F = GF(q)
        for a, b in itertools.islice(valid_ab_pairs(F), 3):
            assert Pm.sign(induced_permutation_blowup(QuadraticAB(F, a, b), F)) == expected


def test_parity_suites():
    r4 = parity_suite(4, seed=0, samples=20)
    assert r4["allEven"] and r4["pgl3_in_alt"]
    r2 = parity_suite(2)
    assert r2["pgl3_image_order"] == 168 and math.factorial(7) % r2["pgl3_image_order"] == 0
    r3 = parity_suite(3)
    # PGL3(F3) = PSL3(F3) is simple, so its image lies in the alternating group
    assert r3["pgl3_in_alt"] and not r3["odd_linear_exists"]
    assert r3["quadratic_std"]["representative"] == -1
