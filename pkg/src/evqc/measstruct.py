"""Structure of measurements whose readout survives argument relabeling.

A hermitian measurement gives permutation-invariant readouts on the
pseudopure family exactly when it splits as c * W + D + A with W the
uniform-superposition projector, D real diagonal and A pure-imaginary
antisymmetric; only c and D ever reach the readout.  This module
decomposes such operators, spot-checks the invariance, screens
necessary spectral conditions, and searches for the largest attainable
|c| relative to the spectral range under a fixed reference spectrum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from evqc.engine import expectation
from evqc.funcspace import BoolFunc, permute
from evqc.spinops import Operator, eig_multiset, total_spin, w_projector
from evqc.states import DensityMatrix

FEASIBILITY_TOL = 1e-6  # eigenvalue-match gate for accepted candidates
POLISH_TOL = 1e-9  # what the final feasibility polish aims for
SEARCH_N_LIMIT = 3

_MU_SCHEDULE = (1.0, 1e-1, 1e-2, 1e-3)


class NotInvariantFormError(ValueError):
    """The symmetrized off-diagonal entries are not uniform."""


@dataclass(frozen=True, eq=False)
class InvariantForm:
    """Parameters (c, D, A) of a permutation-invariant measurement.

    A is stored by the imaginary parts of its strictly upper triangle,
    row-major.
    """

    c: float
    d: np.ndarray
    a_upper: np.ndarray

    def __post_init__(self) -> None:
        d = np.array(self.d, dtype=float)
        if d.ndim != 1 or d.size < 2:
            raise ValueError("diagonal part must be a vector of length >= 2")
        a = np.array(self.a_upper, dtype=float)
        want = d.size * (d.size - 1) // 2
        if a.shape != (want,):
            raise ValueError(f"antisymmetric part needs {want} entries, got {a.shape}")
        d.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "a_upper", a)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return self.d.size

    def reconstruct(self) -> Operator:
        """Assemble the hermitian matrix c * W + diag(d) + A."""
        size = self.dim
        mat = np.full((size, size), self.c / size, dtype=complex)
        mat[np.diag_indices(size)] += self.d
        rows, cols = np.triu_indices(size, 1)
        mat[rows, cols] += 1j * self.a_upper
        mat[cols, rows] -= 1j * self.a_upper
        return Operator(mat, hermitian=True)


def decompose_invariant(m: Operator, tol: float = 1e-8) -> InvariantForm:
    """Split a hermitian operator into the invariant form, or refuse.

    The symmetrized off-diagonal entries must agree within tol; their
    common value fixes c, the diagonal fixes D, and what remains is the
    antisymmetric imaginary part.
    """
    mat = m.mat
    size = m.dim
    if size < 2:
        raise ValueError("need dimension >= 2")
    scale = max(1.0, float(np.abs(mat).max(initial=0.0)))
    if np.abs(mat - mat.conj().T).max() > 1e-10 * scale:
        raise ValueError("decompose_invariant requires a hermitian operator")
    rows, cols = np.triu_indices(size, 1)
    sym = (mat + mat.T)[rows, cols]
    # Hermitian input makes these real up to rounding.
    vals = sym.real
    spread = float(vals.max() - vals.min())
    if spread > tol:
        lo = int(np.argmin(vals))
        hi = int(np.argmax(vals))
        raise NotInvariantFormError(
            "symmetrized off-diagonal entries are not uniform: "
            f"entry ({rows[lo]},{cols[lo]}) gives {vals[lo]:.6g} but "
            f"({rows[hi]},{cols[hi]}) gives {vals[hi]:.6g} (spread {spread:.3g} > tol {tol:g})"
        )
    c = size * float(vals.mean()) / 2.0
    d = np.diag(mat).real - c / size
    a_upper = mat[rows, cols].imag.copy()
    return InvariantForm(c=c, d=d, a_upper=a_upper)


def check_permutation_invariance(
    m: Operator,
    rho: DensityMatrix,
    trials: int,
    seed: int,
    tol: float | None = None,
) -> bool:
    """Randomized check that readouts ignore argument transpositions.

    Draws random functions and transpositions; returns False on the first
    readout pair that differs beyond tol.  The state must belong to the
    pseudopure family, which is what the invariance statement covers.
    """
    _require_pseudopure_family(rho)
    if tol is None:
        tol = 1e-10 * max(1.0, float(np.abs(m.mat).max(initial=0.0)))
    n_bits = (m.dim - 1).bit_length()
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        f = BoolFunc(n_bits, _random_mask(rng, m.dim))
        l, k = _random_pair(rng, m.dim)
        if abs(expectation(m, rho, f) - expectation(m, rho, permute(f, l, k))) > tol:
            return False
    return True


def find_permutation_witness(
    m: Operator,
    rho: DensityMatrix,
    tol: float | None = None,
) -> tuple[BoolFunc, int, int] | None:
    """Exhaustive hunt for a transposition that shifts some readout.

    Returns (f, l, k) for the first violation in truth-table order, or
    None when every readout is invariant.  Only sensible at small n.
    """
    _require_pseudopure_family(rho)
    if tol is None:
        tol = 1e-10 * max(1.0, float(np.abs(m.mat).max(initial=0.0)))
    size = m.dim
    n_bits = (size - 1).bit_length()
    for mask in range(1 << size):
        f = BoolFunc(n_bits, mask)
        base = expectation(m, rho, f)
        for l, k in itertools.combinations(range(size), 2):
            if abs(base - expectation(m, rho, permute(f, l, k))) > tol:
                return f, l, k
    return None


def _require_pseudopure_family(rho: DensityMatrix) -> None:
    mat = rho.mat
    off = mat - np.diag(np.diag(mat))
    rows, cols = np.triu_indices(mat.shape[0], 1)
    off_vals = mat[rows, cols]
    diag_vals = np.diag(mat)
    uniform = (
        np.abs(off_vals - off_vals[0]).max(initial=0.0) <= 1e-12
        and np.abs(diag_vals - diag_vals[0]).max() <= 1e-12
        and np.abs(off.imag).max() <= 1e-12
    )
    if not uniform:
        raise ValueError("permutation invariance is only claimed for pseudopure-family states")


def _random_mask(rng: np.random.Generator, size: int) -> int:
    bits = rng.integers(0, 2, size=size)
    mask = 0
    for j in range(size):
        if bits[j]:
            mask |= 1 << j
    return mask


def _random_pair(rng: np.random.Generator, size: int) -> tuple[int, int]:
    l, k = rng.choice(size, size=2, replace=False)
    return int(l), int(k)


@dataclass(frozen=True, eq=False)
class NecessaryConditionsReport:
    """Spectral screening of a candidate against a reference operator."""

    trace_value: float
    trace_ok: bool
    det_checks: tuple[tuple[float, float, bool], ...]  # (lambda, |det(M - lambda)|, ok)
    passed: bool


def necessary_conditions(m: Operator, reference: Operator, tol: float) -> NecessaryConditionsReport:
    """Check the trace and the vanishing of det(M - lambda) for each
    reference eigenvalue.

    Necessary but not sufficient for unitary equivalence: multiplicities
    are not compared.
    """
    vals_m = eig_multiset(m).values
    vals_ref = eig_multiset(reference).values
    trace_value = float(np.trace(m.mat).real)
    trace_ok = abs(trace_value - float(np.trace(reference.mat).real)) <= tol
    checks = []
    for lam in vals_ref:
        det = float(np.prod(vals_m - lam))
        checks.append((float(lam), abs(det), abs(det) <= tol))
    passed = trace_ok and all(ok for _, _, ok in checks)
    return NecessaryConditionsReport(
        trace_value=trace_value,
        trace_ok=trace_ok,
        det_checks=tuple(checks),
        passed=passed,
    )


@dataclass(frozen=True, eq=False)
class SearchResult:
    """Best candidate from one search run, feasible or not."""

    n: int
    ratio: float
    form: InvariantForm
    penalty_residual: float  # max abs eigenvalue deviation from the reference
    budget: int
    seed: int
    restarts: int
    evaluations: int
    feasible: bool

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "ratio": self.ratio,
            "c": self.form.c,
            "D": [float(v) for v in self.form.d],
            "A_upper": [float(v) for v in self.form.a_upper],
            "penalty_residual": self.penalty_residual,
            "budget": self.budget,
            "seed": self.seed,
            "feasible": self.feasible,
        }


def _pack(c: float, d: np.ndarray, a: np.ndarray) -> np.ndarray:
    return np.concatenate(([c], d, a))


def _form_from_params(x: np.ndarray, size: int) -> InvariantForm:
    c = float(x[0])
    d = np.array(x[1 : 1 + size], dtype=float)
    a = np.array(x[1 + size :], dtype=float)
    # Zero-trace projection: shift the diagonal, leaving c alone.
    d -= (c + d.sum()) / size
    return InvariantForm(c=c, d=d, a_upper=a)


def search_max_c_ratio(
    n: int,
    budget: int = 100_000,
    seed: int = 0,
    restarts: int = 50,
) -> SearchResult:
    """Search for the largest |c| / spectral-range over operators sharing
    the total-transverse-spin spectrum.

    Random-restart derivative-free refinement of a penalty objective
    (eigenvalue mismatch squared minus mu times the ratio) over the
    invariant-form parameters, with a decreasing mu schedule and a final
    feasibility polish.  Same seed, same result, bit for bit.
    """
    if not 1 <= n <= SEARCH_N_LIMIT:
        raise ValueError(f"search supports 1 <= n <= {SEARCH_N_LIMIT}")
    if budget < 100:
        raise ValueError("budget too small to do anything")
    if restarts < 1:
        raise ValueError("need at least one restart")
    size = 1 << n
    target = eig_multiset(total_spin(n, "x")).values
    rng = np.random.default_rng(seed)
    n_params = 1 + size + size * (size - 1) // 2
    phase_budget = max(60, budget // (restarts * (len(_MU_SCHEDULE) + 2)))
    polish_budget = 2 * phase_budget

    def assess(x: np.ndarray) -> tuple[float, float]:
        form = _form_from_params(x, size)
        vals = np.linalg.eigvalsh(form.reconstruct().mat)
        mism = float(np.sum((vals - target) ** 2))
        spread = float(vals[-1] - vals[0])
        return mism, abs(form.c) / max(spread, 1e-12)

    evaluations = 0
    best: SearchResult | None = None
    best_infeasible: SearchResult | None = None

    for restart in range(restarts):
        if evaluations >= budget:
            break
        x = rng.standard_normal(n_params) * (0.5 * n)
        for mu in _MU_SCHEDULE:

            def penalty(v: np.ndarray, weight: float = mu) -> float:
                mism, ratio = assess(v)
                return mism - weight * ratio

            res = minimize(
                penalty,
                x,
                method="Powell",
                options={"maxfev": phase_budget, "xtol": 1e-10, "ftol": 1e-12},
            )
            x = res.x
            evaluations += res.nfev
        res = minimize(
            lambda v: assess(v)[0],
            x,
            method="Powell",
            options={"maxfev": polish_budget, "xtol": 1e-13, "ftol": 1e-15},
        )
        x = res.x
        evaluations += res.nfev

        form = _form_from_params(x, size)
        vals = np.linalg.eigvalsh(form.reconstruct().mat)
        residual = float(np.abs(vals - target).max())
        spread = float(vals[-1] - vals[0])
        ratio = abs(form.c) / max(spread, 1e-12)
        candidate = SearchResult(
            n=n,
            ratio=ratio,
            form=form,
            penalty_residual=residual,
            budget=budget,
            seed=seed,
            restarts=restarts,
            evaluations=evaluations,
            feasible=residual < FEASIBILITY_TOL,
        )
        if candidate.feasible:
            if best is None or candidate.ratio > best.ratio:
                best = candidate
        elif best_infeasible is None or candidate.penalty_residual < best_infeasible.penalty_residual:
            best_infeasible = candidate

    chosen = best if best is not None else best_infeasible
    assert chosen is not None  # restarts >= 1 always yields a candidate
    return SearchResult(
        n=chosen.n,
        ratio=chosen.ratio,
        form=chosen.form,
        penalty_residual=chosen.penalty_residual,
        budget=budget,
        seed=seed,
        restarts=restarts,
        evaluations=evaluations,
        feasible=chosen.feasible,
    )
