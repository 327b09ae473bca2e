"""Expectation-value readout and the oracle decision protocols.

Two independent evaluation routes are kept deliberately separate: the
direct route conjugates the state by the oracle and contracts with the
measurement, while the functional route sums a sign-weighted quadratic
form over a precomputed coefficient matrix.  Tests pit one against the
other; do not collapse them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from evqc.funcspace import (
    BoolFunc,
    canonical_balanced,
    canonical_cn,
    constant_one,
    constant_zero,
    lift,
)
from evqc.spinops import Operator, single_spin, spectral_range, total_spin, w_projector
from evqc.states import DensityMatrix, SpinSystem, pseudopure, pulsed_thermal

# Residual imaginary part tolerated before declaring an input non-hermitian.
IMAG_TOL = 1e-10


class Decision(enum.Enum):
    NOT_CONSTANT = "NotConstant"
    NOT_BALANCED = "NotBalanced"
    NOT_IN_CLASS = "NotInClass"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Resolution:
    """Relative readout resolution of the expectation-value machine."""

    epsilon: float

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class Verdict:
    """Outcome of one protocol run.

    The verdict only ever excludes a class; closeness to a reference value
    within the machine resolution is never read as membership.
    """

    decided: Decision
    expectation: float
    gap_reference: float
    resolution_used: Resolution


def _as_real(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value)):
        raise ValueError(f"{what} has imaginary residue {value.imag:g}; inputs are not hermitian")
    return float(value.real)


def _check_compatible(m: Operator, rho: DensityMatrix, f: BoolFunc | None = None) -> None:
    if m.dim != rho.dim:
        raise ValueError(f"dimension mismatch: measurement {m.dim}, state {rho.dim}")
    if f is not None and f.size != m.dim:
        raise ValueError(f"function domain {f.size} does not match operator dimension {m.dim}")


def expectation(m: Operator, rho: DensityMatrix, f: BoolFunc) -> float:
    """Expectation read after applying the phase oracle of f to the state.

    Computed as the contraction sum_jk s_j s_k M_jk rho_kj with
    s = (-1)**f, which is the oracle-conjugated trace without forming the
    conjugated matrix.
    """
    _check_compatible(m, rho, f)
    s = f.signs()
    p = m.mat * rho.mat.T
    value = complex(s @ p @ s)
    return _as_real(value, "expectation")


def b_matrix(rho: DensityMatrix, m: Operator) -> Operator:
    """Coefficient matrix with entries M_jk * rho_kj (no summation)."""
    _check_compatible(m, rho)
    return Operator(m.mat * rho.mat.T, hermitian=True)


def s_functional(b: Operator, f: BoolFunc) -> complex:
    """Sign-weighted sum over all entries of b: sum_jk (-1)^(f(j)+f(k)) B_jk.

    Summation is exactly rounded (math.fsum), so cancellations that are
    exact in real arithmetic come out as exact zeros here too.
    """
    if f.size != b.dim:
        raise ValueError(f"function domain {f.size} does not match matrix dimension {b.dim}")
    s = f.signs()
    terms = b.mat * np.outer(s, s)
    flat = terms.ravel()
    nz = flat[flat != 0]
    value = complex(math.fsum(nz.real), math.fsum(nz.imag))
    if __debug__:
        _cross_check_forms(b.mat, s, value)
    return value


def _cross_check_forms(bmat: np.ndarray, s: np.ndarray, value: complex) -> None:
    # Same functional via trace plus symmetrized upper triangle.
    upper = np.triu_indices(bmat.shape[0], 1)
    sym = (bmat + bmat.T)[upper]
    other = complex(np.trace(bmat) + np.sum(s[upper[0]] * s[upper[1]] * sym))
    tol = 1e-9 * max(1.0, float(np.abs(bmat).sum()))
    if abs(other - value) > tol:
        raise AssertionError(
            f"the two functional forms disagree: {value} vs {other}"
        )


def is_balanced_wrt(f: BoolFunc, b: Operator, tol: float | None = None) -> bool:
    """Whether the sign-weighted sum vanishes for this coefficient matrix.

    The default tolerance scales with the largest entry and the number of
    summands: 1e-10 * max|B| * N**2.
    """
    if tol is None:
        tol = 1e-10 * float(np.abs(b.mat).max(initial=0.0)) * b.dim**2
    return abs(s_functional(b, f)) <= tol


def trace_expectation(m: Operator, rho: DensityMatrix) -> float:
    """Plain readout without any oracle applied."""
    _check_compatible(m, rho)
    return _as_real(complex((m.mat * rho.mat.T).sum()), "expectation")


def distinguishable(m: Operator, rho1: DensityMatrix, rho2: DensityMatrix, eps: Resolution) -> bool:
    """Machine-level distinguishability of two states under one measurement.

    True when the readout difference exceeds eps times the spectral range
    of the measurement (strictly).
    """
    lam = spectral_range(m)
    if lam == 0.0:
        raise ValueError("measurement with zero spectral range cannot distinguish anything")
    gap = abs(trace_expectation(m, rho1) - trace_expectation(m, rho2))
    return gap > eps.epsilon * lam


def satisfiability_gap(n: int) -> float:
    """Readout gap between constant and balanced inputs on the pure protocol."""
    if n < 1:
        raise ValueError("n must be positive")
    return 2.0 ** (2 - n) * (1.0 - 2.0 ** (-n))


def _decide(
    e: float,
    const_refs: list[float],
    other_ref: float,
    other_exclusion: Decision,
    lam: float,
    eps: Resolution,
) -> Verdict:
    """Map a readout to the exclusion verdict it supports.

    The class whose reference sits farther from the readout than the
    resolution margin is excluded; when both references are within the
    margin the machine cannot tell them apart and the verdict is
    Inconclusive.
    """
    margin = eps.epsilon * lam
    d_const = min(abs(e - r) for r in const_refs)
    d_other = abs(e - other_ref)
    if d_const <= margin and d_other <= margin:
        decided = Decision.INCONCLUSIVE
    elif d_const >= d_other:
        decided = Decision.NOT_CONSTANT
    else:
        decided = other_exclusion
    return Verdict(
        decided=decided,
        expectation=e,
        gap_reference=const_refs[0],
        resolution_used=eps,
    )


def dj_decide_pseudopure(f: BoolFunc, alpha: float, eps: Resolution) -> Verdict:
    """Constant-vs-balanced decision on a pseudopure register.

    Measures the uniform-superposition projector after the oracle.  Both
    references are produced by running the same engine on representative
    class members, never from closed forms.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha={alpha:g} outside (0, 1]")
    n = f.n
    m = w_projector(n)
    rho = pseudopure(n, alpha)
    ref_const = expectation(m, rho, constant_zero(n))
    ref_balanced = expectation(m, rho, canonical_balanced(n))
    e = expectation(m, rho, f)
    lam = spectral_range(m)
    return _decide(e, [ref_const], ref_balanced, Decision.NOT_BALANCED, lam, eps)


def cn_decide_thermal(f: BoolFunc, sys: SpinSystem, eps: Resolution) -> Verdict:
    """Constant-vs-C_N decision on the pulsed thermal state, measuring
    total transverse spin.

    No pseudopure preparation is involved; the whole point of the class
    C_N is that the naturally prepared state already separates it from
    the constants.
    """
    if f.n != sys.n:
        raise ValueError(f"function on {f.n} bits does not match {sys.n} spins")
    if sys.n < 2:
        raise ValueError("the C_N protocol needs n >= 2")
    m = total_spin(sys.n, "x")
    rho = pulsed_thermal(sys)
    b = b_matrix(rho, m)
    ref_const = _as_real(s_functional(b, constant_zero(sys.n)), "reference")
    ref_cn = _as_real(s_functional(b, canonical_cn(sys.n)), "reference")
    e = _as_real(s_functional(b, f), "expectation")
    lam = spectral_range(m)
    return _decide(e, [ref_const], ref_cn, Decision.NOT_IN_CLASS, lam, eps)


def dj_decide_lifted(f: BoolFunc, sys: SpinSystem, eps: Resolution) -> Verdict:
    """Constant-vs-balanced decision for f on n-1 bits, run on n spins.

    The function is lifted by one argument bit (upper half fixed to 0) and
    the register reads out a single spin.  Lifting breaks complement
    symmetry, so the two constants produce references of opposite sign and
    both are checked.
    """
    if sys.n != f.n + 1:
        raise ValueError(f"lifted protocol needs {f.n + 1} spins for a {f.n}-bit function")
    m = single_spin(sys.n, 1, "x")
    rho = pulsed_thermal(sys)
    b = b_matrix(rho, m)
    ref_zero = _as_real(s_functional(b, lift(constant_zero(f.n))), "reference")
    ref_one = _as_real(s_functional(b, lift(constant_one(f.n))), "reference")
    ref_balanced = _as_real(s_functional(b, lift(canonical_balanced(f.n))), "reference")
    e = _as_real(s_functional(b, lift(f)), "expectation")
    lam = spectral_range(m)
    return _decide(e, [ref_zero, ref_one], ref_balanced, Decision.NOT_BALANCED, lam, eps)


def verdict_record(v: Verdict, n: int, lam: float) -> dict:
    """Flat mapping consumed by the report writer."""
    return {
        "decided": v.decided.value,
        "expectation": v.expectation,
        "gap_reference": v.gap_reference,
        "epsilon": v.resolution_used.epsilon,
        "lambda": lam,
        "n": n,
    }
