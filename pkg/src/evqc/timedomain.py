"""Free-evolution signals and their spectra.

The internal Hamiltonian is diagonal in the computational basis (weak
coupling, hbar = 1), so Heisenberg evolution of a measurement reduces to
multiplying each entry by a phase.  A dense matrix-exponential fallback
is kept solely so tests can cross-validate the fast path.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from evqc.spinops import Operator
from evqc.states import DensityMatrix, SpinSystem


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Diagonal internal Hamiltonian together with the system it came from."""

    op: Operator
    source: SpinSystem

    def __post_init__(self) -> None:
        if not self.op.diagonal:
            raise ValueError("internal Hamiltonian must be diagonal")
        if self.op.dim != self.source.size:
            raise ValueError("Hamiltonian dimension does not match the spin system")

    @property
    def diag(self) -> np.ndarray:
        return np.diag(self.op.mat).real


@dataclass(frozen=True, eq=False)
class SignalTrace:
    """Uniformly sampled real readout trace starting at t_start."""

    t_start: float
    dt: float
    samples: np.ndarray

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("need at least one sample")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.samples.size)


def _spin_z_column(n: int, i: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return 0.5 - ((idx >> (n - i)) & 1).astype(float)


def hamiltonian(sys: SpinSystem) -> Hamiltonian:
    """Zeeman terms plus scalar couplings: sum_i omega_i Iz_i
    + sum_(i<j) 2 pi J_ij Iz_i Iz_j."""
    diag = np.zeros(sys.size)
    for i in range(1, sys.n + 1):
        diag += sys.omega[i - 1] * _spin_z_column(sys.n, i)
    for i, j, strength in sys.couplings:
        diag += 2.0 * np.pi * strength * _spin_z_column(sys.n, i) * _spin_z_column(sys.n, j)
    op = Operator(np.diag(diag.astype(complex)), hermitian=True, diagonal=True)
    return Hamiltonian(op=op, source=sys)


def heisenberg_op(m: Operator, h: Hamiltonian, t: float) -> Operator:
    """Measurement evolved to time t: exp(iHt) M exp(-iHt).

    With H diagonal this is an entrywise phase: entry (j, k) picks up
    exp(i (H_jj - H_kk) t).
    """
    if m.dim != h.op.dim:
        raise ValueError("operator and Hamiltonian dimensions differ")
    phases = np.exp(1j * h.diag * t)
    mat = phases[:, None] * m.mat * phases.conj()[None, :]
    return Operator(mat, hermitian=m.hermitian)


def heisenberg_dense(m: Operator, h: Hamiltonian, t: float) -> Operator:
    """Same map through a dense matrix exponential; for cross-validation only."""
    u = expm(1j * h.op.mat * t)
    return Operator(u @ m.mat @ u.conj().T)


def signal(rho: DensityMatrix, h: Hamiltonian, m: Operator, dt: float, count: int) -> SignalTrace:
    """Sample Tr(rho M(t)) at t = k dt for k = 0..count-1."""
    if rho.dim != m.dim or rho.dim != h.op.dim:
        raise ValueError("state, measurement, and Hamiltonian dimensions differ")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if count < 1:
        raise ValueError("need at least one sample")
    weights = rho.mat * m.mat.T  # entry (a, b): rho_ab M_ba
    freq = h.diag[None, :] - h.diag[:, None]  # phase rate per entry
    flat_w = weights.ravel()
    keep = flat_w != 0
    w = flat_w[keep]
    omega = freq.ravel()[keep]
    t = dt * np.arange(count)
    values = np.exp(1j * np.outer(t, omega)) @ w
    worst = float(np.abs(values.imag).max(initial=0.0))
    if worst > 1e-10 * max(1.0, float(np.abs(values.real).max(initial=0.0))):
        raise ValueError(f"signal came out complex (residue {worst:g}); inputs are not hermitian")
    return SignalTrace(t_start=0.0, dt=dt, samples=values.real)


def spectrum(trace: SignalTrace) -> list[tuple[float, float]]:
    """Discrete Fourier transform magnitudes, sorted by angular frequency."""
    count = trace.samples.size
    if count < 2:
        raise ValueError("need at least two samples for a spectrum")
    transform = np.fft.fft(trace.samples)
    omegas = 2.0 * np.pi * np.fft.fftfreq(count, d=trace.dt)
    order = np.argsort(omegas)
    return [(float(omegas[i]), float(abs(transform[i]))) for i in order]


def find_peaks(spec: list[tuple[float, float]], rel_threshold: float = 0.05) -> list[tuple[float, float]]:
    """Local maxima of the magnitude at or above rel_threshold of the global maximum."""
    if not spec:
        return []
    mags = [mag for _, mag in spec]
    floor = rel_threshold * max(mags)
    peaks = []
    for i in range(1, len(spec) - 1):
        if mags[i] >= floor and mags[i] > mags[i - 1] and mags[i] > mags[i + 1]:
            peaks.append(spec[i])
    return peaks


def write_trace_csv(trace: SignalTrace, path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "t", "value"])
        for k, (t, v) in enumerate(zip(trace.times, trace.samples)):
            writer.writerow([k, f"{t:.17g}", f"{v:.17g}"])


def write_spectrum_csv(spec: list[tuple[float, float]], path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega", "magnitude"])
        for omega, mag in spec:
            writer.writerow([f"{omega:.17g}", f"{mag:.17g}"])
