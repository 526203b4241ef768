import json
import random

import pytest
from hypothesis import given, strategies as st

from neretin import perm as P
from neretin.aaut import (
    AlmostAutomorphism,
    Portrait,
    almost_isomorphism,
    classify,
    compose,
    equals,
    expand_to,
    invert,
    order,
    parity,
    parity_of_representative,
    reduce,
    swap,
    translation_b,
    verify_translation_witness,
)
from neretin.errors import BudgetExceeded, CongruenceFailure, NotExpandable, ParityUndefined, ParseError
from neretin.sampling import boundary_words, random_element, random_finite_order, random_tree
from neretin.trees import AdmissibleTree, special_tree

seeds = st.integers(0, 10**6)


def ident(d=2, n=None):
    return AlmostAutomorphism.identity(d, n)


def test_reduce_examples():
    t = special_tree(3, 2)
    g = AlmostAutomorphism.from_leaf_map(t, t, {u: u for u in t.leaves})
    r = reduce(g)
    assert r.domain == AdmissibleTree(2) and r.is_identity()
    b = translation_b()
    assert reduce(b).structurally_equal(b)


def test_compose_examples():
    b = translation_b()
    assert compose(b, invert(b)).is_identity()
    s = swap(2)
    assert compose(s, s).is_identity()
    assert invert(ident()).is_identity()
    assert invert(b).domain == b.range


def test_expand_to_examples():
    t = special_tree(5, 3)
    assert expand_to(ident(3), t).range == t
    # swap needs leaf 0 as a leaf of the domain; the tree below lacks it
    s = swap(2)
    assert s.expand_to(AdmissibleTree.from_leaves(2, [(0, 0), (0, 1), (1,)])).domain.leaf_count == 3
    with pytest.raises(NotExpandable):
        translation_b().expand_to(AdmissibleTree.star(2))


def test_equals_examples():
    deep = AdmissibleTree.from_leaves(2, [(0, 0), (0, 1), (1, 0), (1, 1)])
    g = AlmostAutomorphism.from_leaf_map(deep, deep, {u: u for u in deep.leaves})
    assert equals(g, ident())
    assert not equals(translation_b(), swap(2))


def test_classify_examples():
    c = classify(swap(2), 64)
    assert c.kind == "Elliptic"
    # the witness is an invariant tree; the root star is invariant as well
    for t in (c.tree, AdmissibleTree.star(2)):
        assert swap(2).expand_to(t).range == t
    c = classify(translation_b(), 64)
    assert c.kind == "Translation"
    assert (c.address, c.exponent, c.image) == ((0,), 1, (0, 0))
    assert verify_translation_witness(translation_b(), (0,), 1, (0, 0))


def test_parity_examples():
    star = AdmissibleTree.star(2)
    assert parity_of_representative(ident(), special_tree(5, 2)) == 1
    assert parity_of_representative(swap(2), star) == -1
    deep = AdmissibleTree.from_leaves(2, [(0, 0), (0, 1), (1, 0), (1, 1)])
    assert parity_of_representative(swap(2), deep) == 1
    assert parity(ident(3)) == 1
    s3 = swap(3)
    assert parity_of_representative(s3, AdmissibleTree.star(3)) == parity_of_representative(
        s3, AdmissibleTree.star(3).expand((0,)).expand((1,)).expand((2,)))
    with pytest.raises(ParityUndefined):
        parity(swap(2))


def test_transporter_examples():
    T = almost_isomorphism(3, 7)
    assert T.transport(ident(3, 7)).is_identity()
    with pytest.raises(CongruenceFailure):
        almost_isomorphism(3, 6)


def test_swap_json():
    data = swap(2).to_json()
    assert data == {"d": 2, "rootArity": 2, "map": [{"from": "", "to": "", "portrait": [{"at": "", "perm": [1, 0]}]}]}
    assert AlmostAutomorphism.from_json(json.loads(json.dumps(data))).equals(swap(2))
    with pytest.raises(ParseError):
        AlmostAutomorphism.from_json({"d": 2})


# properties

@given(seeds, st.sampled_from([2, 3]))
def test_compose_matches_pointwise_evaluation(seed, d):
    rng = random.Random(seed)
    g, f = random_element(rng, d, 3), random_element(rng, d, 3)
    gf = compose(g, f)
    for w in boundary_words(d, 6):
        assert gf.evaluate(w) == g.evaluate(f.evaluate(w))


@given(seeds, st.sampled_from([2, 3]))
def test_group_laws(seed, d):
    rng = random.Random(seed)
    a, b, c = (random_element(rng, d, 3) for _ in range(3))
    assert equals(compose(compose(a, b), c), compose(a, compose(b, c)))
    assert compose(a, invert(a)).is_identity()
    assert equals(invert(invert(a)), a)
    assert equals(compose(ident(d), a), a)


@given(seeds, st.sampled_from([2, 3]))
def test_reduce_idempotent_and_class_invariant(seed, d):
    rng = random.Random(seed)
    g = random_element(rng, d, 3)
    r = reduce(g)
    assert reduce(r).structurally_equal(r)
    bigger = g.domain.join(random_tree(rng, d, 3))
    assert reduce(expand_to(g, bigger)).structurally_equal(r)
    assert g.key() == expand_to(g, bigger).key()


@given(seeds)
def test_parity_is_representative_independent_and_multiplicative(seed):
    rng = random.Random(seed)
    g, f = (random_element(rng, 3, 3, even=True) for _ in range(2))
    p = parity(g)
    for _ in range(3):
        t = g.domain.join(random_tree(rng, 3, 4))
        assert parity_of_representative(g, t) == p
    assert parity(compose(g, f)) == p * parity(f)


@given(seeds)
def test_finite_order_elements_are_elliptic(seed):
    rng = random.Random(seed)
    g = random_finite_order(rng, 2)
    assert order(g) is not None
    assert classify(g, 64).kind == "Elliptic"


@given(seeds)
def test_transport_is_homomorphism(seed):
    rng = random.Random(seed)
    T = almost_isomorphism(3, 7)
    g, f = random_element(rng, 3, 2, root_arity=7), random_element(rng, 3, 2, root_arity=7)
    assert equals(T.transport(compose(g, f)), compose(T.transport(g), T.transport(f)))
    assert equals(T.untransport(T.transport(g)), g)


BUDGET_CASE = {"d": 2, "rootArity": 2, "map": [
    {"from": "00", "to": "101", "portrait": []},
    {"from": "0100", "to": "100", "portrait": []},
    {"from": "0101", "to": "11", "portrait": []},
    {"from": "011", "to": "01", "portrait": [{"at": "1", "perm": [1, 0]}]},
    {"from": "1", "to": "00", "portrait": []},
]}


def test_budget_exceeded_then_decided():
    g = AlmostAutomorphism.from_json(BUDGET_CASE)
    with pytest.raises(BudgetExceeded):
        classify(g, 1)
    assert classify(g, 64).kind in ("Elliptic", "Translation")


@given(seeds)
def test_elliptic_powers_stay_bounded(seed):
    rng = random.Random(seed)
    g = random_finite_order(rng, 2)
    c = classify(g, 64)
    power = g
    for _ in range(20):
        assert power.canonical.domain.leaf_count <= c.tree.leaf_count
        power = compose(g, power)
