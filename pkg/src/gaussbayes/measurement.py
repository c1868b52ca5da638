"""Homodyne and heterodyne detection: outcome densities and samplers.

Heterodyne outcomes are complex numbers beta with density
(1/pi) F(|beta><beta|, rho); equivalently a bivariate Gaussian in
(Re beta, Im beta) with covariance (cov + 1/2)/2.  Homodyne outcomes are
real quadrature values; homodyne at angle theta is defined as q-homodyne
after rotating the state by -theta, which fixes the sign convention once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .phasespace import GaussianState, coherent, fidelity, rotate

__all__ = [
    "MeasurementKind",
    "Measurement",
    "HETERODYNE",
    "homodyne",
    "heterodyne_density",
    "homodyne_density",
    "homodyne_moments",
    "husimi_moments",
    "sample_outcome",
    "sample_outcomes",
]


class MeasurementKind(Enum):
    HETERODYNE = "heterodyne"
    HOMODYNE = "homodyne"


@dataclass(frozen=True)
class Measurement:
    kind: MeasurementKind
    quadrature_angle: float = 0.0  # homodyne only; 0 measures q

    def __post_init__(self):
        if self.kind is MeasurementKind.HOMODYNE:
            if not (0.0 <= self.quadrature_angle < math.pi):
                raise ValueError("quadrature angle must lie in [0, pi)")


HETERODYNE = Measurement(MeasurementKind.HETERODYNE)


def homodyne(angle: float = 0.0) -> Measurement:
    return Measurement(MeasurementKind.HOMODYNE, angle)


def heterodyne_density(st: GaussianState, beta: complex) -> float:
    """Probability density over the complex plane for heterodyne outcome beta."""
    return fidelity(coherent(beta), st) / math.pi


def husimi_moments(st: GaussianState):
    """Mean (complex) and 2x2 covariance of the heterodyne outcome in
    (Re beta, Im beta) coordinates."""
    mean = (st.mean[0] + 1j * st.mean[1]) / math.sqrt(2.0)
    cov = (st.cov + 0.5 * np.eye(2)) / 2.0
    return mean, cov


def homodyne_moments(st: GaussianState, angle: float = 0.0):
    """Mean and variance of the measured quadrature."""
    rotated = rotate(st, -angle) if angle != 0.0 else st
    return float(rotated.mean[0]), float(rotated.cov[0, 0])


def homodyne_density(st: GaussianState, q, angle: float = 0.0):
    """Gaussian marginal of the (rotated) Wigner function; vectorized in q."""
    mu, var = homodyne_moments(st, angle)
    q = np.asarray(q, dtype=float)
    out = np.exp(-((q - mu) ** 2) / (2.0 * var)) / np.sqrt(2.0 * math.pi * var)
    return float(out) if out.ndim == 0 else out


def sample_outcomes(st: GaussianState, meas: Measurement, rng: np.random.Generator, size: int):
    """Draw ``size`` independent outcomes; deterministic given the generator state."""
    if meas.kind is MeasurementKind.HOMODYNE:
        mu, var = homodyne_moments(st, meas.quadrature_angle)
        return rng.normal(mu, math.sqrt(var), size)
    mean, cov = husimi_moments(st)
    chol = np.linalg.cholesky(cov)
    z = rng.standard_normal((size, 2)) @ chol.T
    return mean + z[:, 0] + 1j * z[:, 1]


def sample_outcome(st: GaussianState, meas: Measurement, rng: np.random.Generator):
    return sample_outcomes(st, meas, rng, 1)[0]
