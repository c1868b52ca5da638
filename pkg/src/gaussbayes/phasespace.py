"""Single-mode Gaussian state algebra.

States are (mean, covariance) pairs in the quadrature convention
x = (q, p), vacuum covariance = identity/2.  The Wigner function and the
Gaussian fidelity use the doubled second-moment matrix G = 2*cov; fixing
that factor here once reproduces every closed form downstream.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GaussianState",
    "ProbeSpec",
    "vacuum",
    "coherent",
    "displace",
    "squeeze",
    "rotate",
    "squeeze_matrix",
    "rotation_matrix",
    "wigner",
    "fidelity",
    "mean_photon",
    "qfi_fidelity",
]

_UNCERTAINTY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First-moment vector (2,) and symmetric covariance matrix (2,2)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2).copy()
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2).copy()
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ValueError("covariance must be symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.det(cov) < 0.25 - _UNCERTAINTY_TOL or cov[0, 0] <= 0:
            raise ValueError("covariance violates the uncertainty relation")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(np.linalg.det(self.cov) - 0.25) <= tol


@dataclass(frozen=True)
class ProbeSpec:
    """Displaced squeezed probe: D(alpha) S(s e^{i psi}) |0>."""

    alpha: complex = 0j
    s: float = 0.0
    psi: float = 0.0

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("squeezing strength must be >= 0")

    def state(self) -> GaussianState:
        return displace(squeeze(vacuum(), self.s, self.psi), self.alpha)

    def mean_photon(self) -> float:
        return abs(self.alpha) ** 2 + math.sinh(self.s) ** 2


def vacuum() -> GaussianState:
    return GaussianState(np.zeros(2), 0.5 * np.eye(2))


def coherent(alpha: complex) -> GaussianState:
    return displace(vacuum(), alpha)


def displace(st: GaussianState, alpha: complex) -> GaussianState:
    alpha = complex(alpha)
    shift = math.sqrt(2.0) * np.array([alpha.real, alpha.imag])
    return GaussianState(st.mean + shift, st.cov)


def squeeze_matrix(r: float, phi: float = 0.0) -> np.ndarray:
    """Symplectic matrix of the squeezer S(r e^{i phi}) acting on (q, p)."""
    ch, sh = math.cosh(r), math.sinh(r)
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[ch - c * sh, s * sh], [s * sh, ch + c * sh]])


def rotation_matrix(theta: float) -> np.ndarray:
    # clockwise: R(theta) |alpha> has mean sqrt(2)*alpha*(cos t, -sin t)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def _symplectic_apply(st: GaussianState, m: np.ndarray) -> GaussianState:
    return GaussianState(m @ st.mean, m @ st.cov @ m.T)


def squeeze(st: GaussianState, r: float, phi: float = 0.0) -> GaussianState:
    return _symplectic_apply(st, squeeze_matrix(r, phi))


def rotate(st: GaussianState, theta: float) -> GaussianState:
    return _symplectic_apply(st, rotation_matrix(theta))


def wigner(st: GaussianState, x) -> float | np.ndarray:
    """Wigner function at phase-space point(s) x = (q, p).

    Accepts a single point of shape (2,) or an array of points (..., 2).
    """
    x = np.asarray(x, dtype=float)
    gam = 2.0 * st.cov
    det = np.linalg.det(gam)
    if det <= 0:
        raise ValueError("degenerate state: second-moment matrix is singular")
    ginv = np.linalg.inv(gam)
    d = x - st.mean
    quad = np.einsum("...i,ij,...j->...", d, ginv, d)
    out = np.exp(-quad) / (math.pi * math.sqrt(det))
    return float(out) if out.ndim == 0 else out


def fidelity(a: GaussianState, b: GaussianState) -> float:
    """Uhlmann fidelity of two single-mode Gaussian states.

    Closed form in the first moments and the doubled covariances
    G = 2*cov; exact for mixed states of one mode as well.
    """
    g1 = 2.0 * a.cov
    g2 = 2.0 * b.cov
    gsum = g1 + g2
    d = a.mean - b.mean
    expo = -float(d @ np.linalg.solve(gsum, d))
    lam = (1.0 - np.linalg.det(g1)) * (1.0 - np.linalg.det(g2))
    lam = max(lam, 0.0)  # rounding can push the pure-state value below 0
    denom = math.sqrt(np.linalg.det(gsum) + lam) - math.sqrt(lam)
    f = 2.0 * math.exp(expo) / denom
    return min(max(f, 0.0), 1.0)


def mean_photon(st: GaussianState) -> float:
    return 0.5 * float(st.mean @ st.mean) + 0.5 * (float(np.trace(st.cov)) - 1.0)


def qfi_fidelity(state_family, theta: float, dtheta: float = 1e-4) -> float:
    """Quantum Fisher information from a fidelity finite difference.

    ``state_family`` maps a parameter value to a GaussianState; the QFI at
    ``theta`` is estimated as 8(1 - sqrt(F[rho(theta), rho(theta+dtheta)]))
    / dtheta^2.  Slightly negative results from rounding are clamped to 0
    with a warning.
    """
    f = fidelity(state_family(theta), state_family(theta + dtheta))
    val = 8.0 * (1.0 - math.sqrt(f)) / (dtheta * dtheta)
    if val < 0.0:
        warnings.warn("negative QFI estimate clamped to 0 (rounding)", RuntimeWarning)
        return 0.0
    return val
