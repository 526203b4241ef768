import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from neretin import perm as P
from neretin.errors import InfeasibleLeafCount
from neretin.sampling import random_tree
from neretin.trees import (
    AdmissibleTree,
    address_from_str,
    address_to_str,
    all_trees_up_to_depth,
    collapsible_vertices,
    count_admissible_trees,
    expand,
    join,
    leaves_ordered,
    rigid_moving_block,
    rigid_permutations,
    special_tree,
)


def L(*words):
    return {tuple(int(c) for c in w) for w in words}


def tree(d, *words):
    return AdmissibleTree.from_leaves(d, [tuple(int(c) for c in w) for w in words])


def test_expand_examples():
    root = AdmissibleTree(2)
    assert set(expand(root, ()).leaves) == L("0", "1")
    t = expand(expand(root, ()), (0,))
    assert set(t.leaves) == L("00", "01", "1")
    assert t.leaf_count == 3


def test_collapsible_examples():
    assert collapsible_vertices(AdmissibleTree(2)) == frozenset()
    assert collapsible_vertices(tree(2, "00", "01", "1")) == {(0,)}
    assert collapsible_vertices(tree(2, "00", "01", "10", "11")) == {(0,), (1,)}


def test_join_examples():
    t = tree(2, "00", "01", "1")
    assert join(t, t) == t
    assert join(AdmissibleTree(2), t) == t
    assert set(join(t, tree(2, "0", "10", "11")).leaves) == L("00", "01", "10", "11")


def test_leaves_ordered():
    assert leaves_ordered(tree(2, "1", "00", "01")) == ((0, 0), (0, 1), (1,))
    assert leaves_ordered(AdmissibleTree(2)) == ((),)
    assert leaves_ordered(tree(2, "01", "1", "00")) == leaves_ordered(tree(2, "00", "01", "1"))


def test_special_tree_examples():
    assert special_tree(1, 2) == AdmissibleTree(2)
    assert set(special_tree(3, 2).leaves) == L("00", "01", "1")
    assert set(special_tree(5, 3).leaves) == L("00", "01", "02", "1", "2")
    with pytest.raises(InfeasibleLeafCount):
        special_tree(4, 3)


def test_rigid_permutations_examples():
    assert len(list(rigid_permutations(AdmissibleTree(2)))) == 1
    t = tree(2, "00", "01", "1")
    perms = list(rigid_permutations(t))
    assert len(perms) == 6
    assert len({p.images for p in perms}) == 6
    tau = rigid_moving_block(t, [(0, 0), (0, 1)], [1, 2])
    assert tau.compose(tau.inverse()).is_identity()


def test_addresses_roundtrip():
    assert address_to_str(()) == ""
    assert address_from_str("012") == (0, 1, 2)
    wide = (40, 3)
    assert address_from_str(address_to_str(wide, wide=True), wide=True) == wide


def test_fuss_catalan_oracle():
    # trees with 1 + k(d-1) leaves are counted by binom(dk, k)/((d-1)k+1)
    for d in (2, 3, 4):
        for k in range(6):
            expected = math.comb(d * k, k) // ((d - 1) * k + 1)
            assert count_admissible_trees(1 + k * (d - 1), d) == expected


def test_enumeration_against_brute_force():
    # prefix closed interior sets inside the depth-3 binary tree
    nodes = [w for n in range(3) for w in itertools.product(range(2), repeat=n)]
    brute = set()
    for mask in range(1 << len(nodes)):
        chosen = {nodes[i] for i in range(len(nodes)) if mask >> i & 1}
        if all(not u or u[:-1] in chosen for u in chosen):
            brute.add(frozenset(chosen))
    listed = {t.interior for t in all_trees_up_to_depth(2, 3)}
    assert listed == brute


@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4]), st.integers(0, 6))
def test_leaf_count_rule(seed, d, k):
    t = random_tree(random.Random(seed), d, k)
    assert t.leaf_count == 1 + k * (d - 1)
    assert len(t.leaves) == t.leaf_count
    assert list(t.leaves) == sorted(t.leaves)


@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_join_is_least_upper_bound(seed, d):
    rng = random.Random(seed)
    a, b = random_tree(rng, d, 4), random_tree(rng, d, 4)
    j = join(a, b)
    assert a.interior <= j.interior and b.interior <= j.interior
    assert join(a, b) == join(b, a)
    assert j.interior == a.interior | b.interior


@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_collapse_inverts_expand(seed, d):
    rng = random.Random(seed)
    t = random_tree(rng, d, 4)
    u = rng.choice(t.leaves)
    e = t.expand(u)
    assert u in e.collapsible_vertices()
    assert e.collapse(u) == t


@given(st.integers(0, 10**6))
def test_rigid_moving_block_is_rigid(seed):
    rng = random.Random(seed)
    t = random_tree(rng, 2, 4)
    u = rng.choice(sorted(t.collapsible_vertices()))
    target = sorted(rng.sample(range(t.leaf_count), 2))
    tau = rigid_moving_block(t, t.children(u), target)
    assert P.is_permutation(tau.images)
    idx = t.leaf_index
    assert sorted(tau.images[idx[c]] for c in t.children(u)) == target
