"""Prefix-closed trees, forests, and translated-top overlap counting."""
import random

import pytest

from overlap_lab.errors import UsageError
from overlap_lab.forest import Forest, Tree, overlap, stnd_at_depth
from overlap_lab.gf2_core import BitVec, from01, ones, zeros

from oracles import overlap_by_sweep


def _random_forest(rng: random.Random, n: int, ntrees: int) -> Forest:
    trees = []
    for _ in range(ntrees):
        count = rng.randint(1, max(1, (1 << n) // 2))
        tops = {BitVec(n, rng.randrange(1 << n)) for _ in range(count)}
        trees.append(Tree.from_tops(n, tops))
    return Forest(n, tuple(trees))


def test_tree_is_a_prefix_closure():
    t = Tree.from_tops(3, {from01("000"), from01("110")})
    assert t.contains(from01(""))
    assert t.contains(from01("1"))
    assert t.contains(from01("11"))
    assert not t.contains(from01("10"))
    assert not t.contains(from01("1100"))  # longer than the height
    assert t.nodes_at(2) == {from01("00"), from01("11")}
    assert list(t.nodes())[0] == zeros(0)
    assert t.truncate(2) == Tree.from_tops(2, {from01("00"), from01("11")})


def test_tree_rejects_malformed():
    with pytest.raises(UsageError):
        Tree.from_tops(3, set())
    with pytest.raises(UsageError):
        Tree.from_tops(3, {from01("10")})
    t = Tree.from_tops(2, {from01("01")})
    with pytest.raises(UsageError):
        t.nodes_at(3)


def test_forest_shape_and_membership():
    t0 = Tree.from_tops(3, {from01("000"), from01("110")})
    t1 = Tree.from_tops(3, {from01("011"), from01("101")})
    f = Forest(3, (t0, t1))
    assert f.top_level() == t0.tops | t1.tops
    assert f.disjoint_tops()
    assert f.nodes_at(1) == {from01("0"), from01("1")}
    assert f.trees_containing(from01("11")) == (0,)
    assert f.trees_containing(from01("01")) == (1,)
    shared = Forest(3, (t0, Tree.from_tops(3, {from01("000")})))
    assert not shared.disjoint_tops()
    with pytest.raises(UsageError):
        Forest(3, ())
    with pytest.raises(UsageError):
        Forest(3, (t0, Tree.from_tops(2, {from01("00")})))


def test_forest_truncate_and_extends():
    rng = random.Random(3)
    big = _random_forest(rng, 4, 2)
    small = big.truncate(2)
    assert big.extends(small)
    assert big.extends(big)
    assert not small.extends(big)  # taller forests never shrink-extend
    reordered = Forest(2, (small.trees[1], small.trees[0]))
    if small.trees[0] != small.trees[1]:
        assert not big.extends(reordered)
    wider = Forest(4, big.trees + (big.trees[0],))
    assert wider.extends(small)
    assert not big.extends(Forest(2, small.trees + (small.trees[0],)))


def test_overlap_matches_full_sweep():
    rng = random.Random(99)
    for _ in range(150):
        n = rng.randint(1, 6)
        f = _random_forest(rng, n, rng.randint(1, 3))
        x = BitVec(n, rng.randrange(1 << n))
        y = BitVec(n, rng.randrange(1 << n))
        assert overlap(f, x, y) == overlap_by_sweep(f, x, y)


def test_overlap_parity_and_diagonal():
    rng = random.Random(100)
    for _ in range(150):
        n = rng.randint(1, 7)
        f = _random_forest(rng, n, rng.randint(1, 3))
        x = BitVec(n, rng.randrange(1 << n))
        y = BitVec(n, rng.randrange(1 << n))
        if x == y:
            assert overlap(f, x, y) == len(f.top_level())
        else:
            # z -> z + x + y pairs up the witnesses, so the count is even
            assert overlap(f, x, y) % 2 == 0


def test_stnd_agrees_with_overlap_threshold():
    rng = random.Random(101)
    for _ in range(100):
        n = rng.randint(1, 6)
        f = _random_forest(rng, n, rng.randint(1, 2))
        x = BitVec(n, rng.randrange(1 << n))
        y = BitVec(n, rng.randrange(1 << n))
        cnt = overlap(f, x, y)
        for k in (0, 1, cnt, cnt + 1, cnt + 2):
            assert stnd_at_depth(f, k, x, y) == (cnt >= k)


def test_point_length_checks():
    f = _random_forest(random.Random(5), 3, 1)
    with pytest.raises(UsageError):
        overlap(f, ones(2), ones(3))
    with pytest.raises(UsageError):
        stnd_at_depth(f, 1, ones(3), ones(4))
    with pytest.raises(UsageError):
        stnd_at_depth(f, -1, ones(3), ones(3))
