"""Adversary argument for the classical query lower bound.

A deterministic classical solver that has asked at most half the domain,
and has heard only 0, cannot yet rule out either answer: the all-zero
constant is trivially consistent, and this module constructs a member of
C_N that is consistent too.  Hence 2**(n-1) + 1 queries are required.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from evqc.funcspace import BoolFunc, constant_zero, is_in_cn

EXHAUSTIVE_LIMIT = 3  # all query sets of size N/2 are walked up to here


@dataclass(frozen=True)
class QueryTranscript:
    """Record of an interaction where every query was answered 0."""

    n: int
    queried: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("the adversary argument needs n >= 2")
        size = 1 << self.n
        queried = frozenset(int(q) for q in self.queried)
        if any(not 0 <= q < size for q in queried):
            raise ValueError("queried indices outside the domain")
        object.__setattr__(self, "queried", queried)

    @property
    def answers(self) -> dict[int, int]:
        return {q: 0 for q in sorted(self.queried)}


def cn_witness(n: int, queried) -> BoolFunc:
    """A C_N member that answers 0 on every queried argument.

    Works whenever at most half the domain has been queried: the
    unqueried arguments are split by Hamming-distance parity from the
    smallest one; the larger side has at least N/4 elements, pairwise at
    even distance, and the first N/4 of them carry the ones.
    """
    transcript = QueryTranscript(n, frozenset(queried))
    size = 1 << n
    if len(transcript.queried) > size // 2:
        raise ValueError(
            f"{len(transcript.queried)} queries exceed half the domain; "
            "no consistent witness is guaranteed"
        )
    unchecked = [j for j in range(size) if j not in transcript.queried]
    pivot = unchecked[0]
    even = [j for j in unchecked if (j ^ pivot).bit_count() % 2 == 0]
    odd = [j for j in unchecked if (j ^ pivot).bit_count() % 2 == 1]
    side = even if len(even) >= len(odd) else odd
    support = side[: size // 4]
    mask = 0
    for j in support:
        mask |= 1 << j
    witness = BoolFunc(n, mask)
    # Construction guarantees both properties; fail loudly if not.
    assert is_in_cn(witness)
    assert all(witness(q) == 0 for q in transcript.queried)
    return witness


def min_queries(n: int) -> int:
    """Queries any deterministic classical solver needs in the worst case."""
    if n < 2:
        raise ValueError("the adversary argument needs n >= 2")
    return 2 ** (n - 1) + 1


@dataclass(frozen=True)
class AdversaryReport:
    n: int
    trials: int
    failures: tuple
    exhaustive: bool

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "failures": [list(f) for f in self.failures],
            "exhaustive": self.exhaustive,
        }


def verify_adversary(n: int, trials: int, seed: int) -> AdversaryReport:
    """Confirm the witness construction over many query sets.

    Exhausts all query sets of size N/2 for n <= EXHAUSTIVE_LIMIT, then
    adds random sets of random size up to N/2.  A failure records the
    offending query set; an empty list is the expected outcome.
    """
    if n < 2:
        raise ValueError("the adversary argument needs n >= 2")
    size = 1 << n
    failures = []
    exhaustive = n <= EXHAUSTIVE_LIMIT
    if exhaustive:
        for combo in itertools.combinations(range(size), size // 2):
            if not _witness_ok(n, combo):
                failures.append(tuple(combo))
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        count = int(rng.integers(0, size // 2 + 1))
        combo = tuple(int(q) for q in rng.choice(size, size=count, replace=False))
        if not _witness_ok(n, combo):
            failures.append(combo)
    return AdversaryReport(n=n, trials=trials, failures=tuple(failures), exhaustive=exhaustive)


def _witness_ok(n: int, queried) -> bool:
    try:
        witness = cn_witness(n, queried)
    except (ValueError, AssertionError):
        return False
    zero = constant_zero(n)
    return (
        all(zero(q) == 0 for q in queried)
        and is_in_cn(witness)
        and all(witness(q) == 0 for q in queried)
    )
