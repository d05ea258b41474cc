"""Fixed-length bit vectors over GF(2) and the two translation lemmas.

Vectors are stored as packed integers: coordinate i of a length-n vector is
bit i of the word (so coordinate 0 is the leftmost character in the text
form).  Addition is XOR, restriction is a low-bit mask, concatenation is a
shift-or.  All operations are exact and allocation-light.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import InternalError, UsageError

__all__ = [
    "BitVec",
    "zeros",
    "ones",
    "unit",
    "from01",
    "add",
    "is_independent",
    "solve_translate",
    "check_pair_family",
]


@dataclass(frozen=True, slots=True)
class BitVec:
    """A length-n vector over GF(2), packed into an int (bit i = coord i)."""

    n: int
    word: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise UsageError("vector length must be >= 0")
        if self.word < 0 or self.word >> self.n:
            raise UsageError("word has bits outside the declared length")

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise UsageError(f"coordinate {i} out of range for length {self.n}")
        return (self.word >> i) & 1

    def __xor__(self, other: "BitVec") -> "BitVec":
        if self.n != other.n:
            raise UsageError(f"length mismatch: {self.n} vs {other.n}")
        return BitVec(self.n, self.word ^ other.word)

    def restrict(self, k: int) -> "BitVec":
        """First k coordinates."""
        if not 0 <= k <= self.n:
            raise UsageError(f"cannot restrict length-{self.n} vector to {k}")
        return BitVec(k, self.word & ((1 << k) - 1))

    def concat(self, other: "BitVec") -> "BitVec":
        return BitVec(self.n + other.n, self.word | (other.word << self.n))

    def is_prefix_of(self, other: "BitVec") -> bool:
        return self.n <= other.n and other.word & ((1 << self.n) - 1) == self.word

    def weight(self) -> int:
        return self.word.bit_count()

    def to01(self) -> str:
        return "".join("1" if (self.word >> i) & 1 else "0" for i in range(self.n))

    def __lt__(self, other: "BitVec") -> bool:
        return (self.n, self.to01()) < (other.n, other.to01())

    def __repr__(self) -> str:
        return f"BitVec({self.to01()!r})"


def zeros(n: int) -> BitVec:
    return BitVec(n, 0)


def ones(n: int) -> BitVec:
    return BitVec(n, (1 << n) - 1)


def unit(n: int, i: int) -> BitVec:
    """The i-th standard basis vector of length n."""
    if not 0 <= i < n:
        raise UsageError(f"unit index {i} out of range for length {n}")
    return BitVec(n, 1 << i)


def from01(s: str) -> BitVec:
    if any(c not in "01" for c in s):
        raise UsageError(f"not a 0/1 string: {s!r}")
    w = 0
    for i, c in enumerate(s):
        if c == "1":
            w |= 1 << i
    return BitVec(len(s), w)


def add(x: BitVec, y: BitVec) -> BitVec:
    """Coordinatewise sum over GF(2); lengths must agree."""
    return x ^ y


def _common_length(vecs: Iterable[BitVec]) -> int:
    it = iter(vecs)
    try:
        first = next(it)
    except StopIteration:
        raise UsageError("expected at least one vector")
    for v in it:
        if v.n != first.n:
            raise UsageError(f"length mismatch: {v.n} vs {first.n}")
    return first.n


def is_independent(vecs: Sequence[BitVec]) -> bool:
    """True iff the vectors are linearly independent (empty family counts).

    Gaussian elimination on packed words; a repeated vector or the zero
    vector makes the family dependent.
    """
    if not vecs:
        return True
    _common_length(vecs)
    pivots: dict[int, int] = {}
    for v in vecs:
        w = v.word
        while w:
            low = w & (-w)
            if low in pivots:
                w ^= pivots[low]
            else:
                pivots[low] = w
                break
        if not w:
            return False
    return True


def solve_translate(a_set: Sequence[BitVec], b_set: Sequence[BitVec]) -> Optional[BitVec]:
    """Find the unique x with A + x contained in B, if one exists.

    Requires |A| >= 5 and B linearly independent; under those hypotheses at
    most one x can work, so finding two is an internal error.  Candidates are
    limited to a0 + b (b in B) for a fixed a0 in A, which is complete: if
    A + x is inside B then a0 + x is some b.
    """
    a_list = sorted(set(a_set))
    b_list = sorted(set(b_set))
    if len(a_list) < 5:
        raise UsageError(f"need at least 5 distinct vectors on the A side, got {len(a_list)}")
    n = _common_length(a_list + b_list)
    if not is_independent(b_list):
        raise UsageError("B side must be linearly independent")
    b_words = {b.word for b in b_list}
    a_words = [a.word for a in a_list]
    a0 = a_words[0]
    solutions = []
    for bw in b_words:
        x = a0 ^ bw
        if all((aw ^ x) in b_words for aw in a_words):
            solutions.append(x)
    if len(solutions) > 1:
        raise InternalError(
            f"two distinct translations {solutions[:2]} both map A into B; "
            "uniqueness is guaranteed for |A| >= 5 and independent B"
        )
    if not solutions:
        return None
    return BitVec(n, solutions[0])


def check_pair_family(
    bstar: BitVec,
    b_set: Sequence[BitVec],
    pairs: Sequence[tuple[BitVec, BitVec]],
) -> bool:
    """Decide whether every pair has the shape {b, b + bstar} with b in B.

    Hypotheses (checked, violations are usage errors):
      - bstar is a member of the independent family B;
      - every pair element lies in (B + {0, bstar-shift}) minus {0, bstar},
        i.e. in (B ∪ (bstar + B)) \\ {0, bstar};
      - (a) no repetitions among the 2|pairs| listed elements;
      - (b) all pairs have the same coordinatewise sum.
    """
    b_list = sorted(set(b_set))
    n = _common_length([bstar] + b_list)
    if not is_independent(b_list):
        raise UsageError("B must be linearly independent")
    b_words = {b.word for b in b_list}
    if bstar.word not in b_words:
        raise UsageError("bstar must be a member of B")
    allowed = (b_words | {bstar.word ^ bw for bw in b_words}) - {0, bstar.word}

    flat: list[int] = []
    for x, y in pairs:
        if x.n != n or y.n != n:
            raise UsageError("pair element length mismatch")
        for v in (x, y):
            if v.word not in allowed:
                raise UsageError(
                    f"element {v.to01()} lies outside (B u (bstar+B)) minus {{0, bstar}}"
                )
        flat.extend((x.word, y.word))
    if len(set(flat)) != len(flat):
        raise UsageError("hypothesis (a) fails: repeated element across the pairs")
    sums = {x.word ^ y.word for x, y in pairs}
    if len(sums) > 1:
        raise UsageError("hypothesis (b) fails: pair sums are not constant")

    good = {frozenset((bw, bw ^ bstar.word)) for bw in b_words if bw != bstar.word}
    return all(frozenset((x.word, y.word)) in good for x, y in pairs)
