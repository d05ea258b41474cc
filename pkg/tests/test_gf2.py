"""Packed bit-vector arithmetic and the two translation results."""
import random

import pytest
from hypothesis import given, strategies as st

from overlap_lab.errors import UsageError
from overlap_lab.gf2_core import (
    BitVec,
    add,
    check_pair_family,
    from01,
    is_independent,
    ones,
    solve_translate,
    unit,
    zeros,
)

from oracles import independent_by_subset_sums, translate_solutions


def test_bitvec_basics():
    v = BitVec(3, 0b011)
    assert len(v) == 3
    # coordinate 0 is the leftmost character of the 0/1 form
    assert (v[0], v[1], v[2]) == (1, 1, 0)
    assert v.to01() == "110"
    assert from01("110") == v
    assert v ^ BitVec(3, 0b101) == BitVec(3, 0b110)
    assert add(v, v) == zeros(3)
    assert v.restrict(2) == from01("11")
    assert v.restrict(0) == zeros(0)
    assert from01("11").concat(from01("0")) == v
    assert from01("11").is_prefix_of(v)
    assert not from01("10").is_prefix_of(v)
    assert v.weight() == 2
    assert ones(3).weight() == 3
    assert unit(4, 2) == from01("0010")
    assert sorted([from01("10"), from01("01")]) == [from01("01"), from01("10")]


def test_bitvec_rejects_malformed():
    with pytest.raises(UsageError):
        BitVec(-1, 0)
    with pytest.raises(UsageError):
        BitVec(2, 0b100)  # bit outside the declared length
    with pytest.raises(UsageError):
        BitVec(2, 0b11)[2]
    with pytest.raises(UsageError):
        from01("10") ^ from01("100")
    with pytest.raises(UsageError):
        from01("10").restrict(3)
    with pytest.raises(UsageError):
        unit(3, 3)
    with pytest.raises(UsageError):
        from01("10x")


@given(st.text(alphabet="01", max_size=24))
def test_from01_round_trip(s):
    assert from01(s).to01() == s


@given(st.integers(1, 6), st.integers(0, 5), st.integers(0, 2**30))
def test_independence_matches_subset_sum_oracle(n, size, seed):
    rng = random.Random(seed)
    vecs = [BitVec(n, rng.randrange(1 << n)) for _ in range(size)]
    assert is_independent(vecs) == independent_by_subset_sums(vecs)


def test_independence_known_cases():
    basis = [unit(4, i) for i in range(4)]
    assert is_independent(basis)
    assert is_independent([])
    assert not is_independent(basis + [zeros(4)])
    assert not is_independent([basis[0], basis[0]])
    # three vectors summing to zero
    assert not is_independent([from01("110"), from01("011"), from01("101")])


def _spanning_set(rng: random.Random, n: int, k: int) -> list[BitVec]:
    """A random independent k-subset of 2^n, built by rejection."""
    while True:
        vecs = [BitVec(n, rng.randrange(1, 1 << n)) for _ in range(k)]
        if is_independent(vecs):
            return vecs


def test_solve_translate_recovers_planted_shift():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(5, 8)
        b = _spanning_set(rng, n, rng.randint(5, min(7, n)))
        x = BitVec(n, rng.randrange(1 << n))
        a = [v ^ x for v in rng.sample(b, 5)]
        got = solve_translate(a, b)
        assert got == x
        assert translate_solutions(a, b) == [x.word]


def test_solve_translate_none_when_oracle_empty():
    rng = random.Random(11)
    misses = 0
    for _ in range(200):
        n = rng.randint(5, 8)
        b = _spanning_set(rng, n, 5)
        a = [BitVec(n, rng.randrange(1 << n)) for _ in range(5)]
        if len(set(a)) < 5:
            continue
        sols = translate_solutions(a, b)
        got = solve_translate(a, b)
        if sols:
            assert got is not None and [got.word] == sols
        else:
            assert got is None
            misses += 1
    assert misses > 100  # random A almost never translates into B


def test_solve_translate_hypothesis_checks():
    b = [unit(6, i) for i in range(5)]
    with pytest.raises(UsageError):
        solve_translate(b[:4], b)  # too few on the A side
    dependent = b + [b[0] ^ b[1]]
    with pytest.raises(UsageError):
        solve_translate([v ^ ones(6) for v in b], dependent)


def _basis_family(k: int, n: int):
    b = [unit(n, i) for i in range(k)]
    bstar = b[0]
    pairs = [(b[i], b[i] ^ bstar) for i in range(1, 4)]
    return bstar, b, pairs


def test_pair_family_accepts_the_meeting_shape():
    bstar, b, pairs = _basis_family(5, 6)
    assert check_pair_family(bstar, b, pairs) is True


def test_pair_family_rejects_impostor_pairs():
    # hypotheses hold (distinct elements, one common sum) but the pair is
    # {b1, b2}, not {b, b + bstar}
    b = [unit(6, i) for i in range(5)]
    assert check_pair_family(b[0], b, [(b[1], b[2])]) is False


def test_pair_family_hypothesis_violations():
    bstar, b, pairs = _basis_family(5, 6)
    with pytest.raises(UsageError, match="independent"):
        check_pair_family(bstar, b + [b[1] ^ b[2]], pairs)
    with pytest.raises(UsageError, match="member of B"):
        check_pair_family(unit(6, 5), b, pairs)
    with pytest.raises(UsageError, match="outside"):
        check_pair_family(bstar, b, [(unit(6, 5), unit(6, 5) ^ bstar)])
    with pytest.raises(UsageError, match=r"hypothesis \(a\)"):
        check_pair_family(bstar, b, pairs + [pairs[0]])
    mixed = [pairs[0], (b[2], b[3])]  # sums differ between the two pairs
    with pytest.raises(UsageError, match=r"hypothesis \(b\)"):
        check_pair_family(bstar, b, mixed)
    with pytest.raises(UsageError, match="length mismatch"):
        check_pair_family(bstar, b, [(unit(7, 1), unit(7, 1))])


def test_pair_family_zero_and_bstar_are_excluded():
    bstar, b, _ = _basis_family(5, 6)
    with pytest.raises(UsageError, match="outside"):
        check_pair_family(bstar, b, [(zeros(6), bstar)])
