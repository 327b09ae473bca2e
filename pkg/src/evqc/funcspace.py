"""Boolean functions f: Z_N -> Z_2 and the promise classes built on them.

A function on an n-bit argument is stored as its full truth table, packed
little-endian into a Python integer: bit j of ``mask`` holds f(j).  That
gives O(1) evaluation, cheap complement/permutation via bit twiddling, and
exact hashing.  All values are immutable; every operation returns a new
instance.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

# Exhaustive class listings walk up to 2^(2^n) truth tables; past n = 4
# that is no longer a desk-scale job.
ENUMERATION_LIMIT = 4


class FunctionClass(enum.Enum):
    """Promise classes told apart by the decision protocols."""

    CONSTANT = "Constant"
    BALANCED_W = "BalancedW"
    CLASS_CN = "ClassCN"
    OTHER = "Other"


@dataclass(frozen=True)
class BoolFunc:
    """Truth table of a boolean function on n-bit arguments.

    Parameters
    ----------
    n : int
        Number of argument bits; the domain is {0, ..., 2**n - 1}.
    mask : int
        Packed truth table, bit j = f(j).
    """

    n: int
    mask: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one argument bit, got n={self.n}")
        if not 0 <= self.mask < (1 << self.size):
            raise ValueError("mask does not fit a %d-entry truth table" % self.size)
        bits = np.fromiter(
            ((self.mask >> j) & 1 for j in range(self.size)),
            dtype=np.uint8,
            count=self.size,
        )
        bits.setflags(write=False)
        object.__setattr__(self, "_bits", bits)

    @property
    def size(self) -> int:
        """Domain size N = 2**n."""
        return 1 << self.n

    @property
    def ones(self) -> int:
        """Number of arguments mapped to 1."""
        return self.mask.bit_count()

    @property
    def table(self) -> tuple[int, ...]:
        return tuple(int(b) for b in self._bits)

    def __call__(self, j: int) -> int:
        if not 0 <= j < self.size:
            raise ValueError(f"argument {j} outside domain of size {self.size}")
        return (self.mask >> j) & 1

    def bits(self) -> np.ndarray:
        """Truth table as a read-only uint8 vector indexed by argument."""
        return self._bits

    def signs(self) -> np.ndarray:
        """(-1)**f(j) as a float vector, the diagonal of the oracle."""
        return 1.0 - 2.0 * self._bits.astype(np.float64)

    @classmethod
    def from_table(cls, table) -> "BoolFunc":
        values = [int(v) for v in table]
        size = len(values)
        n = size.bit_length() - 1
        if size < 2 or (1 << n) != size:
            raise ValueError(f"table length {size} is not a power of two >= 2")
        if any(v not in (0, 1) for v in values):
            raise ValueError("truth table entries must be 0 or 1")
        mask = sum(1 << j for j, v in enumerate(values) if v)
        return cls(n, mask)

    @classmethod
    def from_text(cls, text: str) -> "BoolFunc":
        return parse_function(text)

    def to_text(self) -> str:
        return format_function(self)

    def __str__(self) -> str:
        return "".join(str(v) for v in self.table)


def parse_function(text: str) -> BoolFunc:
    """Parse the two-line truth-table format.

    Line one is ``n=<int>``; line two is either 2**n characters of 0/1
    with index 0 first, or a ``0x`` hex literal packing the table
    little-endian by argument index.
    """
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise ValueError("expected a header line and a table line")
    header = lines[0].replace(" ", "")
    if not header.startswith("n="):
        raise ValueError(f"malformed header {lines[0]!r}, expected 'n=<int>'")
    try:
        n = int(header[2:])
    except ValueError:
        raise ValueError(f"malformed header {lines[0]!r}") from None
    if n < 1:
        raise ValueError("header must declare n >= 1")
    body = lines[1]
    size = 1 << n
    if body.lower().startswith("0x"):
        mask = int(body, 16)
        if mask >= (1 << size):
            raise ValueError("hex table has more bits than 2**n entries")
        return BoolFunc(n, mask)
    if len(body) != size:
        raise ValueError(f"table line has {len(body)} entries, expected {size}")
    if set(body) - {"0", "1"}:
        raise ValueError("table line may only contain 0 and 1")
    mask = sum(1 << j for j, ch in enumerate(body) if ch == "1")
    return BoolFunc(n, mask)


def format_function(f: BoolFunc) -> str:
    return f"n={f.n}\n{f}\n"


def hamming(j: int, k: int, n: int) -> int:
    """Hamming distance between two n-bit argument indices."""
    if n < 1:
        raise ValueError("n must be positive")
    top = 1 << n
    if not (0 <= j < top and 0 <= k < top):
        raise ValueError(f"arguments {j}, {k} outside range of {n}-bit indices")
    return (j ^ k).bit_count()


def imbalance(f: BoolFunc) -> int:
    """Half the excess of ones over zeros: (#ones - #zeros) / 2.

    Always an integer because the domain size is even.  Balanced functions
    score 0, the constants score +-N/2.
    """
    return f.ones - f.size // 2


def complement(f: BoolFunc) -> BoolFunc:
    """Flip every table entry."""
    return BoolFunc(f.n, f.mask ^ ((1 << f.size) - 1))


def permute(f: BoolFunc, l: int, m: int) -> BoolFunc:
    """Transpose the table values at argument indices l and m."""
    if not (0 <= l < f.size and 0 <= m < f.size):
        raise ValueError("transposition indices outside the domain")
    if l == m or f(l) == f(m):
        return f
    return BoolFunc(f.n, f.mask ^ ((1 << l) | (1 << m)))


def is_in_cn(f: BoolFunc) -> bool:
    """Membership in the class C_N.

    A function belongs when it, or its complement, maps exactly N/4
    arguments to 1 with no two of those arguments at Hamming distance 1.
    Undefined below n = 2 (N/4 would not be a positive integer).
    """
    if f.n < 2:
        raise ValueError(f"class C_N is undefined for n={f.n}; need n >= 2")
    return _quarter_spread(f) or _quarter_spread(complement(f))


def _quarter_spread(f: BoolFunc) -> bool:
    quarter = f.size // 4
    if f.ones != quarter:
        return False
    support = [j for j in range(f.size) if f(j)]
    return all(
        (a ^ b).bit_count() != 1 for a, b in itertools.combinations(support, 2)
    )


def classify(f: BoolFunc) -> FunctionClass:
    """Assign the promise class, checking Constant, then BalancedW, then C_N.

    The first two never overlap with C_N (N/4 ones is neither 0, N/2,
    nor N), so the priority order is a formality.
    """
    if f.ones in (0, f.size):
        return FunctionClass.CONSTANT
    if f.ones == f.size // 2:
        return FunctionClass.BALANCED_W
    if f.n >= 2 and is_in_cn(f):
        return FunctionClass.CLASS_CN
    return FunctionClass.OTHER


def lift(f: BoolFunc) -> BoolFunc:
    """Extend f by one argument bit, fixing the new upper half to 0.

    The output g on n+1 bits satisfies g(j) = f(j) for j < 2**n and
    g(j) = 0 above.  In the packed representation the mask is unchanged.
    """
    return BoolFunc(f.n + 1, f.mask)


def enumerate_class(n: int, cls: FunctionClass) -> Iterator[BoolFunc]:
    """Yield every member of a class once, in lexicographic truth-table order.

    Constants enumerate at any n; the other classes walk subsets of the
    domain and are capped at n <= ENUMERATION_LIMIT.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if cls is FunctionClass.CONSTANT:
        yield BoolFunc(n, 0)
        yield BoolFunc(n, (1 << (1 << n)) - 1)
        return
    if n > ENUMERATION_LIMIT:
        raise ValueError(
            f"exhaustive enumeration of {cls.value} is capped at n={ENUMERATION_LIMIT}"
        )
    size = 1 << n
    if cls is FunctionClass.BALANCED_W:
        members = [
            _mask_from(support)
            for support in itertools.combinations(range(size), size // 2)
        ]
    elif cls is FunctionClass.CLASS_CN:
        if n < 2:
            raise ValueError("class C_N is undefined for n < 2")
        bases = [
            support
            for support in itertools.combinations(range(size), size // 4)
            if all((a ^ b).bit_count() != 1 for a, b in itertools.combinations(support, 2))
        ]
        full = (1 << size) - 1
        masks = {_mask_from(s) for s in bases}
        masks |= {full ^ m for m in masks}
        members = sorted(masks)
    else:
        members = [
            m for m in range(1 << size) if classify(BoolFunc(n, m)) is cls
        ]
    for f in sorted((BoolFunc(n, m) for m in members), key=lambda g: g.table):
        yield f


def _mask_from(support) -> int:
    mask = 0
    for j in support:
        mask |= 1 << j
    return mask


def sample_cn(n: int, seed: int) -> BoolFunc:
    """Draw a C_N member by choosing N/4 arguments of even bit parity.

    Arguments of equal parity sit at even Hamming distances, so distance 1
    never occurs and membership is guaranteed by construction.  The draw is
    uniform over even-parity subsets and fully determined by the seed.
    """
    if n < 2:
        raise ValueError("class C_N is undefined for n < 2")
    size = 1 << n
    rng = np.random.default_rng(seed)
    evens = np.array([j for j in range(size) if j.bit_count() % 2 == 0])
    picked = rng.choice(evens, size=size // 4, replace=False)
    return BoolFunc(n, _mask_from(int(j) for j in picked))


def constant_zero(n: int) -> BoolFunc:
    return BoolFunc(n, 0)


def constant_one(n: int) -> BoolFunc:
    return BoolFunc(n, (1 << (1 << n)) - 1)


def canonical_balanced(n: int) -> BoolFunc:
    """The balanced representative with ones on the lower half of the domain."""
    return BoolFunc(n, (1 << ((1 << n) // 2)) - 1)


def canonical_cn(n: int) -> BoolFunc:
    """The C_N representative with ones on the first N/4 even-parity arguments."""
    if n < 2:
        raise ValueError("class C_N is undefined for n < 2")
    size = 1 << n
    evens = [j for j in range(size) if j.bit_count() % 2 == 0]
    return BoolFunc(n, _mask_from(evens[: size // 4]))
