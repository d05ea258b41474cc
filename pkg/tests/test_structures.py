"""Level structures: validity clauses, shifts, the two orders, enumeration.

The designed two-tree forest below is deliberately sparse: at the top level
only sums in {110, 101, 011} admit meeting points, so enumeration, shifts
and order relations all get exercised away from the full-tree easy case.
"""
import pytest

from overlap_lab.errors import UsageError
from overlap_lab.forest import Forest, Tree
from overlap_lab.gf2_core import BitVec, from01, zeros
from overlap_lab.structures import (
    MStruct,
    enumerate_structures,
    essentially_extends,
    essentially_same,
    extends,
    restrict,
    translate,
    validate,
)

from oracles import structures_by_filter


def sparse_forest() -> Forest:
    t0 = Tree.from_tops(3, {from01("000"), from01("110")})
    t1 = Tree.from_tops(3, {from01("011"), from01("101")})
    return Forest(3, (t0, t1))


def full_forest(n: int) -> Forest:
    return Forest(n, (Tree.from_tops(n, {BitVec(n, w) for w in range(1 << n)}),))


def _pair_struct(ell, iota, ux, uy, fwd, bwd, hf, hb) -> MStruct:
    x, y = from01(ux), from01(uy)
    return MStruct(
        ell,
        iota,
        [x, y],
        {(x, y): hf, (y, x): hb},
        {(x, y): tuple(from01(v) for v in fwd), (y, x): tuple(from01(v) for v in bwd)},
    )


def test_constructor_checks_shape():
    x, y = from01("00"), from01("10")
    with pytest.raises(UsageError, match="iota"):
        _pair_struct(2, 0, "00", "10", (), (), (), ())
    with pytest.raises(UsageError, match="length ell"):
        MStruct(2, 1, [from01("0")], {}, {})
    with pytest.raises(UsageError, match="missing"):
        MStruct(2, 1, [x, y], {(x, y): (0,)}, {(x, y): (x,)})
    with pytest.raises(UsageError, match="iota-tuples"):
        _pair_struct(2, 2, "00", "10", ("11",), ("01",), (0, 0), (0, 0))
    with pytest.raises(UsageError, match="natural"):
        _pair_struct(2, 1, "00", "10", ("11",), ("01",), (-1,), (0,))
    with pytest.raises(UsageError, match="length ell"):
        _pair_struct(2, 1, "00", "10", ("1",), ("01",), (0,), (0,))
    good = _pair_struct(2, 1, "00", "10", ("11",), ("01",), (0,), (1,))
    with pytest.raises(UsageError, match="exactly"):
        MStruct(2, 1, [x, y], dict(good.h) | {(x, x): (0,)}, good.g)


def test_u_is_sorted_and_deduplicated():
    m = _pair_struct(2, 1, "10", "00", ("01",), ("11",), (1,), (0,))
    assert [v.to01() for v in m.u] == ["00", "10"]
    n = MStruct(2, 1, list(m.u) + [m.u[0]], m.h, m.g)
    assert n == m
    assert hash(n) == hash(m)
    assert m.key() == n.key()


def test_validate_accepts_hand_built_structure():
    f = sparse_forest()
    m = _pair_struct(2, 1, "00", "10", ("11",), ("01",), (0,), (1,))
    assert validate(m, f) == []
    fam = m.pair_family(m.u[0], m.u[1])
    assert fam == frozenset({frozenset({from01("11"), from01("01")})})


def test_validate_accepts_branches_off_the_trees():
    # u members need not be nodes of any tree; only meeting points are tied
    f = sparse_forest()
    m = _pair_struct(3, 1, "111", "001", ("000",), ("110",), (0,), (0,))
    assert [d for d in validate(m, f)] == []


def test_validate_flags_each_clause():
    f = sparse_forest()

    bad_tree = _pair_struct(2, 1, "00", "10", ("11",), ("01",), (5,), (1,))
    assert [d.code for d in validate(bad_tree, f)] == ["4.1(1)"]

    wrong_home = _pair_struct(2, 1, "00", "10", ("10",), ("00",), (0,), (1,))
    assert [d.code for d in validate(wrong_home, f)] == ["3.4(c)", "3.4(c)"]

    broken_meet = _pair_struct(2, 1, "00", "10", ("11",), ("10",), (0,), (1,))
    assert [d.code for d in validate(broken_meet, f)] == ["3.4(d)"]

    repeated = _pair_struct(
        2, 2, "00", "10", ("11", "01"), ("01", "11"), (0, 1), (1, 0)
    )
    codes = [d.code for d in validate(repeated, full_forest(2))]
    assert codes == ["3.4(e)"]

    small_u = MStruct(2, 1, [from01("00")], {}, {})
    assert [d.code for d in validate(small_u, f)] == ["3.4(a)"]

    too_deep = _pair_struct(4, 1, "0000", "1000", ("1100",), ("0100",), (0,), (1,))
    assert [d.code for d in validate(too_deep, f)] == ["4.1(1)"]


def test_translate_shifts_u_and_keeps_meeting_data():
    f = sparse_forest()
    m = _pair_struct(2, 1, "00", "10", ("11",), ("01",), (0,), (1,))
    rho = from01("01")
    t = translate(m, rho)
    assert [v.to01() for v in t.u] == ["01", "11"]
    assert t.g[(from01("01"), from01("11"))] == (from01("11"),)
    assert t.h[(from01("11"), from01("01"))] == (1,)
    # the meeting identity is translation invariant, so validity survives
    assert validate(t, f) == []
    assert translate(t, rho) == m
    longer = translate(m, from01("011"))  # extra coordinates are ignored
    assert longer == t
    with pytest.raises(UsageError):
        translate(m, from01("0"))


def test_translate_is_a_bijection_per_level():
    f = sparse_forest()
    for ell in (2, 3):
        slice_ = list(enumerate_structures(f, 1, ell, 2))
        keys = {m.key() for m in slice_}
        for rho_word in range(1 << ell):
            rho = BitVec(ell, rho_word)
            shifted = {translate(m, rho).key() for m in slice_}
            assert shifted == keys


# -- hand-built chain for the order relations -------------------------------
#
# m sits at level 2 with two branches; n extends it to level 3 slotwise, and
# nprime is n with its two slots swapped: the same unordered meeting data,
# so the strict order rejects it but the essential order accepts it.

def _order_triple():
    m = _pair_struct(2, 2, "00", "10", ("01", "00"), ("11", "10"), (3, 5), (7, 9))
    n = _pair_struct(3, 2, "000", "100", ("010", "001"), ("110", "101"), (3, 5), (7, 9))
    nprime = _pair_struct(
        3, 2, "000", "100", ("001", "010"), ("101", "110"), (5, 3), (9, 7)
    )
    return m, n, nprime


def test_extends_is_slotwise():
    m, n, nprime = _order_triple()
    assert extends(m, n)
    assert extends(m, m)
    assert not extends(n, m)
    assert not extends(m, nprime)  # slots permuted
    assert not extends(n, nprime)  # same level, different structures


def test_essential_order_forgives_slot_permutation():
    m, n, nprime = _order_triple()
    assert essentially_extends(m, n)
    assert essentially_extends(m, nprime)
    assert essentially_same(n, nprime)
    assert essentially_same(nprime, n)
    assert essentially_same(n, n)
    assert n != nprime


def test_essential_same_needs_matching_trees():
    _, n, nprime = _order_triple()
    retree = MStruct(
        n.ell,
        n.iota,
        n.u,
        {p: ((1, 2) if p == (n.u[0], n.u[1]) else n.h[p]) for p in n.h},
        n.g,
    )
    assert not essentially_same(n, retree)


def test_iota_mismatch_is_an_error():
    m, _, _ = _order_triple()
    other = _pair_struct(2, 1, "00", "10", ("01",), ("11",), (0,), (0,))
    with pytest.raises(UsageError):
        extends(other, m)
    with pytest.raises(UsageError):
        essentially_same(other, m)


def test_restrict_keeps_surviving_pairs():
    f = full_forest(2)
    u = [from01("00"), from01("01"), from01("10")]
    h = {}
    g = {}
    fwd = {
        ("00", "01"): "00",
        ("00", "10"): "11",
        ("01", "10"): "01",
    }
    for (a, b), v in fwd.items():
        x, y = from01(a), from01(b)
        s = x ^ y
        h[(x, y)] = h[(y, x)] = (0,)
        g[(x, y)] = (from01(v),)
        g[(y, x)] = (from01(v) ^ s,)
    m = MStruct(2, 1, u, h, g)
    assert validate(m, f) == []
    r = restrict(m, [from01("00"), from01("10")])
    assert [v.to01() for v in r.u] == ["00", "10"]
    assert r.g[(from01("00"), from01("10"))] == (from01("11"),)
    assert validate(r, f) == []
    with pytest.raises(UsageError):
        restrict(m, [from01("00")])
    with pytest.raises(UsageError):
        restrict(m, [from01("00"), from01("11")])


def test_enumeration_matches_generate_and_test():
    f2 = full_forest(2)
    got = list(enumerate_structures(f2, 2, 2, 2))
    assert len(got) == 48
    assert len({m.key() for m in got}) == 48
    assert set(got) == structures_by_filter(f2, 2, 2, 2)
    # level 1 has two words only: four distinct meeting points cannot fit
    assert list(enumerate_structures(f2, 2, 1, 2)) == []
    assert structures_by_filter(f2, 2, 1, 2) == set()

    fs = sparse_forest()
    assert set(enumerate_structures(fs, 1, 3, 2)) == structures_by_filter(fs, 1, 3, 2)
    assert set(enumerate_structures(fs, 2, 2, 3)) == structures_by_filter(fs, 2, 2, 3)


def test_enumeration_is_deterministic():
    f = sparse_forest()
    a = list(enumerate_structures(f, 1, 2, 3))
    b = list(enumerate_structures(f, 1, 2, 3))
    assert a == b


def test_enumeration_rejects_bad_parameters():
    f = sparse_forest()
    with pytest.raises(UsageError):
        list(enumerate_structures(f, 1, 0, 2))
    with pytest.raises(UsageError):
        list(enumerate_structures(f, 1, 4, 2))
    with pytest.raises(UsageError):
        list(enumerate_structures(f, 1, 2, 1))
