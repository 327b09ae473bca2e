"""Spin systems and the density matrices the protocols run on.

Temperatures enter only through theta = hbar / (k_B T); in the
high-temperature regime theta * omega_i is a small dimensionless number
and every state here keeps only the term linear in it.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from evqc.spinops import MAX_DENSE_N, Operator, single_spin, w_projector

# Past this the linear truncation of exp(-H/kT) is no longer trustworthy.
HIGH_TEMPERATURE_LIMIT = 0.1

TRACE_TOL = 1e-12


@dataclass(frozen=True)
class SpinSystem:
    """Static description of an n-spin register.

    Parameters
    ----------
    n : int
        Number of spins, 1..12.
    omega : array_like
        Angular precession frequency per spin, all positive, length n.
    theta : float
        hbar / (k_B T) for the sample temperature, positive.
    couplings : sequence of (i, j, J)
        Scalar couplings between spins i < j (1-based); used only by the
        time-domain picture.
    """

    n: int
    omega: np.ndarray
    theta: float
    couplings: tuple[tuple[int, int, float], ...] = field(default=())

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_DENSE_N:
            raise ValueError(f"spin count n={self.n} outside 1..{MAX_DENSE_N}")
        omega = np.array(self.omega, dtype=float)
        if omega.shape != (self.n,):
            raise ValueError(f"omega must have shape ({self.n},), got {omega.shape}")
        if np.any(omega <= 0):
            raise ValueError("all frequencies must be positive")
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        seen = set()
        normalized = []
        for i, j, strength in self.couplings:
            i, j = int(i), int(j)
            if not (1 <= i < j <= self.n):
                raise ValueError(f"coupling ({i}, {j}) must satisfy 1 <= i < j <= n")
            if (i, j) in seen:
                raise ValueError(f"duplicate coupling ({i}, {j})")
            seen.add((i, j))
            normalized.append((i, j, float(strength)))
        object.__setattr__(self, "couplings", tuple(normalized))
        worst = float(self.theta * omega.max())
        if worst > HIGH_TEMPERATURE_LIMIT:
            warnings.warn(
                f"theta*omega reaches {worst:.3g}; the linearized states are "
                "outside their high-temperature regime",
                stacklevel=2,
            )

    @property
    def size(self) -> int:
        return 1 << self.n


def parse_system(data: dict) -> SpinSystem:
    """Build a SpinSystem from the JSON configuration mapping."""
    try:
        n = int(data["n"])
        omega = data["omega"]
        theta = float(data["theta"])
    except KeyError as missing:
        raise ValueError(f"spin system config lacks key {missing}") from None
    couplings = tuple(
        (int(i), int(j), float(strength)) for i, j, strength in data.get("couplings", ())
    )
    return SpinSystem(n=n, omega=np.asarray(omega, dtype=float), theta=theta, couplings=couplings)


def load_system(path) -> SpinSystem:
    with open(path, encoding="utf-8") as fh:
        return parse_system(json.load(fh))


def system_to_dict(sys: SpinSystem) -> dict:
    out = {"n": sys.n, "omega": [float(w) for w in sys.omega], "theta": sys.theta}
    if sys.couplings:
        out["couplings"] = [[i, j, strength] for i, j, strength in sys.couplings]
    return out


def demo_system(n: int) -> SpinSystem:
    """Deterministic demonstration register with spread-out frequencies."""
    omega = 2.0 * np.pi * np.linspace(400.0, 600.0, n)
    return SpinSystem(n=n, omega=omega, theta=2e-8)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace operator.  Positivity is checked on demand only."""

    op: Operator

    def __post_init__(self) -> None:
        mat = self.op.mat
        scale = max(1.0, float(np.abs(mat).max(initial=0.0)))
        if np.abs(mat - mat.conj().T).max() > 1e-10 * scale:
            raise ValueError("density matrix must be hermitian")
        if abs(np.trace(mat).real - 1.0) > TRACE_TOL or abs(np.trace(mat).imag) > TRACE_TOL:
            raise ValueError(f"density matrix trace {np.trace(mat):} is not 1")

    @property
    def mat(self) -> np.ndarray:
        return self.op.mat

    @property
    def dim(self) -> int:
        return self.op.dim

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.mat)[0])

    def is_positive_semidefinite(self, tol: float = 0.0) -> bool:
        return self.min_eigenvalue() >= -tol


def _spin_z_diag(n: int, i: int) -> np.ndarray:
    # +1/2 where bit i (counted from the most significant) is 0, else -1/2.
    idx = np.arange(1 << n)
    bit = (idx >> (n - i)) & 1
    return 0.5 - bit.astype(float)


def thermal_state(sys: SpinSystem) -> DensityMatrix:
    """Equilibrium state, linear in theta: (1 - theta * sum_i omega_i Iz_i) / N.

    Diagonal, hence invariant under every phase oracle.
    """
    size = sys.size
    diag = np.full(size, 1.0 / size)
    for i in range(1, sys.n + 1):
        diag = diag - (sys.theta / size) * sys.omega[i - 1] * _spin_z_diag(sys.n, i)
    return DensityMatrix(Operator(np.diag(diag.astype(complex)), hermitian=True, diagonal=True))


def pseudopure(n: int, alpha: float) -> DensityMatrix:
    """Mixture of the maximally mixed state with the uniform-superposition projector.

    alpha is the purity weight; physical preparations have 0 < alpha <= 1
    and anything else draws a warning but is still constructed.
    """
    if not 1 <= n <= MAX_DENSE_N:
        raise ValueError(f"register size n={n} outside 1..{MAX_DENSE_N}")
    size = 1 << n
    if not 0 < alpha <= 1:
        warnings.warn(f"pseudopure weight alpha={alpha:g} outside (0, 1]", stacklevel=2)
    mat = ((1.0 - alpha / size) / size) * np.eye(size, dtype=complex)
    mat = mat + (alpha / size) * w_projector(n).mat
    return DensityMatrix(Operator(mat, hermitian=True))


def pure_w(n: int) -> DensityMatrix:
    """The uniform-superposition projector itself as a state."""
    return DensityMatrix(w_projector(n))


def pulsed_thermal(sys: SpinSystem) -> DensityMatrix:
    """Thermal state after an ideal 90-degree y rotation on every spin.

    Obtained by substituting the transverse component for the longitudinal
    one in the linearized equilibrium state; no pulse propagator is
    simulated because the substitution is exact for the truncated form.
    """
    size = sys.size
    mat = (1.0 / size) * np.eye(size, dtype=complex)
    for i in range(1, sys.n + 1):
        mat = mat - (sys.theta / size) * sys.omega[i - 1] * single_spin(sys.n, i, "x").mat
    return DensityMatrix(Operator(mat, hermitian=True))
