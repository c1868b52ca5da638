"""Bayesian phase estimation with flat priors.

Coherent probes with heterodyne detection have closed forms throughout;
squeezed probes with heterodyne detection and coherent probes with
homodyne detection reduce to Bessel-function series; squeezed probes with
homodyne detection are handled purely numerically by the generic engine.

The squeezed-heterodyne series are stated as double sums over two
Jacobi-Anger indices.  One index is resummed in closed form here using
the addition theorem sum_k I_k(u) I_{n-k}(v) = I_n(u+v), which leaves a
single sum with all-positive terms.  The value is identical, but the
literal double sum loses up to e^{4 alpha |beta| tanh r} digits to
cancellation, which makes it unusable in double precision in part of the
supported parameter range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import specfun
from .bayes import (AverageVariance, Circle, GridDistribution,
                    average_posterior_variance)
from .measurement import Measurement, MeasurementKind
from .phasespace import ProbeSpec
from .specfun import DEFAULT_CONTROL, SeriesControl, TruncationError

__all__ = [
    "SeriesTruncation",
    "default_truncation",
    "PhaseTask",
    "phase_of_outcome",
    "HET_SUPPORT",
    "HOM_SUPPORT",
    "flat_prior",
    "coherent_het_likelihood",
    "coherent_het_outcome_density",
    "coherent_het_posterior",
    "coherent_het_posterior_variance",
    "coherent_het_average_variance",
    "squeezed_het_likelihood",
    "squeezed_het_outcome_density",
    "squeezed_het_posterior_variance",
    "squeezed_het_estimator",
    "squeezed_het_average_variance",
    "coherent_hom_likelihood",
    "squeezed_hom_likelihood",
    "coherent_hom_outcome_density",
    "coherent_hom_circular_moment",
    "HeterodynePhaseStrategy",
    "HomodynePhaseStrategy",
    "task_strategy",
    "average_variance_numeric",
]

HET_SUPPORT = Circle(-math.pi, math.pi)
HOM_SUPPORT = Circle(0.0, math.pi)


@dataclass(frozen=True)
class SeriesTruncation:
    """Symmetric index cutoff |n| <= n_max plus a declared tail bound."""

    n_max: int
    tail_tol: float = 1e-10

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.tail_tol <= 0:
            raise ValueError("tail_tol must be positive")


def default_truncation(*magnitudes: float) -> SeriesTruncation:
    """Cutoff heuristic: Bessel terms decay once the order passes the
    argument, so N = ceil(4 + 2 max(|args|)) leaves a negligible tail."""
    biggest = max([abs(m) for m in magnitudes], default=0.0)
    return SeriesTruncation(int(math.ceil(4.0 + 2.0 * biggest)))


def _sh_truncation(alpha: float, r: float, rho_max: float) -> SeriesTruncation:
    """Index cutoff for the resummed series: the n-th term couples I_n(u)
    with I_{2n}(v) at u = rho^2 tanh r, v = 2 alpha rho (1 - tanh r), so it
    dies as soon as either order outruns its argument; the smaller of the
    two scales bounds the sum.  The additive floor covers small arguments,
    where the factorial decay of I_n only reaches ~1e-10 past order ~14;
    the declared tail check still guards the result."""
    t = math.tanh(r)
    u_max = rho_max * rho_max * t
    v_max = 2.0 * alpha * rho_max * (1.0 - t)
    return SeriesTruncation(int(math.ceil(14.0 + 2.5 * min(u_max, v_max / 2.0 + 2.0))))


def phase_of_outcome(beta: complex) -> float:
    """phi_beta in the decomposition beta = |beta| e^{-i phi_beta}."""
    return -math.atan2(complex(beta).imag, complex(beta).real)


def _wrap(angle: float, support: Circle) -> float:
    return (angle - support.lo) % support.span + support.lo


def flat_prior(support: Circle, n: Optional[int] = None) -> GridDistribution:
    return GridDistribution.uniform(support, n)


@dataclass(frozen=True)
class PhaseTask:
    """Flat-prior phase estimation with a Gaussian probe.

    Heterodyne tasks live on [-pi, pi) and need a strictly positive
    displacement (a rotation-invariant probe carries no phase reference);
    probe squeezing, when present, is along the optimal direction psi=pi.
    Homodyne tasks live on [0, pi) and accept any squeezing angle.
    """

    probe: ProbeSpec
    measurement: Measurement

    def __post_init__(self):
        alpha = complex(self.probe.alpha)
        if alpha.imag != 0.0 or alpha.real < 0.0:
            raise ValueError("probe displacement must be real and >= 0")
        if self.measurement.kind is MeasurementKind.HETERODYNE:
            if alpha.real <= 0.0:
                raise ValueError("heterodyne phase estimation needs alpha > 0")
            if self.probe.s > 0.0 and not math.isclose(self.probe.psi, math.pi):
                raise ValueError("heterodyne probes are squeezed along psi = pi")

    @property
    def support(self) -> Circle:
        if self.measurement.kind is MeasurementKind.HETERODYNE:
            return HET_SUPPORT
        return HOM_SUPPORT


# ---------------------------------------------------------------------------
# coherent probe, heterodyne detection (closed forms)


def coherent_het_likelihood(alpha: float, beta: complex, thetas):
    """p(beta | theta) for a coherent probe: (1/pi) e^{-|e^{i theta} beta - alpha|^2}."""
    thetas = np.asarray(thetas, dtype=float)
    z = np.exp(1j * thetas) * complex(beta) - alpha
    return np.exp(-(z.real**2 + z.imag**2)) / math.pi


def coherent_het_outcome_density(alpha: float, beta: complex,
                                 ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """p(beta) = e^{-(alpha^2+|beta|^2)} I_0(2 alpha |beta|) / pi."""
    babs = abs(complex(beta))
    k = 2.0 * alpha * babs
    scaled = specfun.bessel_i_log_scaled(0, k, ctl)
    return math.exp(-(alpha - babs) ** 2) * scaled / math.pi


def coherent_het_posterior(alpha: float, beta: complex,
                           n: Optional[int] = None) -> GridDistribution:
    """Posterior e^{2 alpha |beta| cos(theta - phi_beta)} / (2 pi I_0)."""
    babs = abs(complex(beta))
    phi = phase_of_outcome(beta)
    return GridDistribution.from_function(
        HET_SUPPORT, lambda t: np.exp(2.0 * alpha * babs * (np.cos(t - phi) - 1.0)), n)


def coherent_het_posterior_variance(alpha: float, abs_beta: float,
                                    ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Circular posterior variance 0F1(2; alpha^2 |beta|^2) / (2 I_0 Gamma(2))."""
    k = 2.0 * alpha * abs_beta
    if k == 0.0:
        return 0.5
    # both factors grow like e^k; evaluate the ratio through scaled values
    # using 0F1(2; x^2) = I_1(2x)/x
    i1 = specfun.bessel_i_log_scaled(1, k, ctl)
    i0 = specfun.bessel_i_log_scaled(0, k, ctl)
    return i1 / (0.5 * k * i0 * 2.0 * specfun.gamma_fn(2.0))


def coherent_het_average_variance(alpha: float) -> float:
    """Average circular variance (1 - e^{-alpha^2}) / (2 alpha^2); 1/2 at alpha=0."""
    x = float(alpha) ** 2
    if x == 0.0:
        return 0.5
    return -math.expm1(-x) / (2.0 * x)


# ---------------------------------------------------------------------------
# squeezed probe, heterodyne detection (single-sum series)


def squeezed_het_likelihood(alpha: float, r: float, beta: complex, thetas):
    """p(beta | theta) for the probe D(alpha) S(-r) |0>."""
    thetas = np.asarray(thetas, dtype=float)
    z = np.exp(1j * thetas) * complex(beta) - alpha
    ch = math.cosh(r)
    return np.exp(-(math.exp(-r) * z.real**2 + math.exp(r) * z.imag**2) / ch) / (math.pi * ch)


def _sh_rows(alpha, r, rho, trunc, ctl):
    """Scaled Bessel rows for the resummed series at radial nodes rho.

    Returns (rows_u, rows_v) with rows_u[:, n] = e^{-u} I_n(u) at
    u = rho^2 tanh r and rows_v[:, k] = e^{-v} I_k(v) at
    v = 2 alpha rho (1 - tanh r); both argument families are nonnegative,
    so every term in the sums below is positive.
    """
    t = math.tanh(r)
    u = rho * rho * t
    v = 2.0 * alpha * rho * (1.0 - t)
    rows_u = specfun.bessel_i_scaled_rows(u, trunc.n_max, ctl)
    rows_v = specfun.bessel_i_scaled_rows(v, 2 * trunc.n_max + 3, ctl)
    return rows_u, rows_v


def _sh_sum(rows_u, rows_v, order_shift: int, n_max: int, weights=None):
    """sum_n I_n(u) I_{|2n + shift|}(v), scaled; optional per-order weights."""
    n = np.arange(-n_max, n_max + 1)
    fac_u = rows_u[:, np.abs(n)]
    fac_v = rows_v[:, np.abs(2 * n + order_shift)]
    terms = fac_u * fac_v if weights is None else fac_u * fac_v * weights[None, :]
    return terms, n


def _sh_check_tail(terms, totals, tail_tol):
    ring = np.abs(terms[:, 0]) + np.abs(terms[:, -1])
    bad = ring > tail_tol * np.maximum(np.abs(totals), 1e-300)
    if np.any(bad):
        raise TruncationError(
            "series tail exceeds the declared bound; increase the index cutoff")


def _sh_norm_sum(alpha, r, rho, trunc, ctl):
    rows_u, rows_v = _sh_rows(alpha, r, rho, trunc, ctl)
    terms, _ = _sh_sum(rows_u, rows_v, 0, trunc.n_max)
    k = terms.sum(axis=1)
    _sh_check_tail(terms, k, trunc.tail_tol)
    return k, rows_u, rows_v


def squeezed_het_outcome_density(alpha: float, r: float, beta: complex,
                                 trunc: Optional[SeriesTruncation] = None,
                                 ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """p(beta) for the squeezed probe as a Bessel series.

    Equals e^{-(1-t)(|beta|-alpha)^2} sum_n I_n(|beta|^2 t)
    I_{2n}(2 alpha |beta| (1-t)) / (pi cosh r) with t = tanh r; at r = 0
    only n = 0 survives and the coherent form is recovered.
    """
    babs = abs(complex(beta))
    if trunc is None:
        trunc = _sh_truncation(alpha, r, babs)
    rho = np.array([babs])
    k, _, _ = _sh_norm_sum(alpha, r, rho, trunc, ctl)
    t = math.tanh(r)
    return math.exp(-(1.0 - t) * (babs - alpha) ** 2) * float(k[0]) / (math.pi * math.cosh(r))


def squeezed_het_posterior_variance(alpha: float, r: float, abs_beta: float,
                                    trunc: Optional[SeriesTruncation] = None,
                                    ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Circular posterior variance at outcome radius |beta| (angle drops out)."""
    if trunc is None:
        trunc = _sh_truncation(alpha, r, abs_beta)
    rho = np.array([float(abs_beta)])
    k, rows_u, rows_v = _sh_norm_sum(alpha, r, rho, trunc, ctl)
    n = np.arange(-trunc.n_max, trunc.n_max + 1)
    bracket = (2.0 * rows_v[:, np.abs(2 * n)]
               - rows_v[:, np.abs(2 * n - 2)]
               - rows_v[:, np.abs(2 * n + 2)])
    var_terms = 0.5 * rows_u[:, np.abs(n)] * bracket
    return float(var_terms.sum(axis=1)[0] / k[0])


def squeezed_het_estimator(alpha: float, r: float, beta: complex,
                           trunc: Optional[SeriesTruncation] = None,
                           ctl: SeriesControl = DEFAULT_CONTROL) -> Optional[float]:
    """Phase estimator arg <e^{i theta}>: phi_beta when the moment series is
    positive, phi_beta + pi when negative, None when it vanishes."""
    babs = abs(complex(beta))
    if trunc is None:
        trunc = _sh_truncation(alpha, r, babs)
    rho = np.array([babs])
    k, rows_u, rows_v = _sh_norm_sum(alpha, r, rho, trunc, ctl)
    terms, _ = _sh_sum(rows_u, rows_v, 1, trunc.n_max)
    moment = float(terms.sum(axis=1)[0])
    if k[0] > 0:
        moment /= float(k[0])
    if abs(moment) < 1e-12:
        return None
    phi = phase_of_outcome(beta)
    if moment < 0.0:
        phi += math.pi
    return _wrap(phi, HET_SUPPORT)


def _sh_radial_extent(alpha: float, r: float) -> float:
    # the outcome density decays as e^{-(1 - tanh r)(rho - alpha)^2}
    return alpha + 7.0 / math.sqrt(1.0 - math.tanh(r))


def squeezed_het_average_variance(alpha: float, r: float,
                                  trunc: Optional[SeriesTruncation] = None,
                                  rel_tol: float = 1e-6,
                                  base_nodes: int = 512, max_level: int = 4,
                                  ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Average circular posterior variance by radial quadrature of the series.

    Step-halving trapezoid with one Richardson extrapolation; raises
    ToleranceError via the caller's tolerance if refinement stalls.
    """
    extent = _sh_radial_extent(alpha, r)
    if trunc is None:
        trunc = _sh_truncation(alpha, r, extent)
    t = math.tanh(r)
    n = np.arange(-trunc.n_max, trunc.n_max + 1)
    # keep the initial radial step comparable across extents
    base = base_nodes * max(1, math.ceil(extent / 8.0))

    def level_value(level):
        m = base * 2**level + 1
        rho = np.linspace(0.0, extent, m)
        rows_u, rows_v = _sh_rows(alpha, r, rho, trunc, ctl)
        bracket = (2.0 * rows_v[:, np.abs(2 * n)]
                   - rows_v[:, np.abs(2 * n - 2)]
                   - rows_v[:, np.abs(2 * n + 2)])
        var_terms = 0.5 * rows_u[:, np.abs(n)] * bracket
        s = var_terms.sum(axis=1)
        # tail measured against the normalization sum: V_post = s/k <= 1/2
        k = (rows_u[:, np.abs(n)] * rows_v[:, np.abs(2 * n)]).sum(axis=1)
        _sh_check_tail(var_terms, k, trunc.tail_tol)
        integrand = rho * np.exp(-(1.0 - t) * (rho - alpha) ** 2) * s / math.cosh(r)
        w = np.full(m, rho[1] - rho[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return float(w @ integrand)

    prev = level_value(0)
    for level in range(1, max_level + 1):
        cur = level_value(level)
        delta = cur - prev
        if abs(delta) / 3.0 <= max(rel_tol * abs(cur), 1e-13):
            return cur + delta / 3.0
        prev = cur
    raise TruncationError("radial quadrature for the average variance did not settle")


# ---------------------------------------------------------------------------
# coherent probe, homodyne detection (series); squeezed probe (numeric only)


def gamma_qq(r: float, phi) -> float | np.ndarray:
    """Doubled q-variance cosh 2r - cos(phi) sinh 2r of a squeezed state."""
    return np.cosh(2.0 * r) - np.cos(phi) * np.sinh(2.0 * r)


def coherent_hom_likelihood(alpha: float, q: float, thetas):
    """p(q | theta) = e^{-(q - sqrt2 alpha cos theta)^2} / sqrt(pi)."""
    thetas = np.asarray(thetas, dtype=float)
    return np.exp(-((q - math.sqrt(2.0) * alpha * np.cos(thetas)) ** 2)) / math.sqrt(math.pi)


def squeezed_hom_likelihood(alpha: float, r: float, phi_s: float, q: float, thetas):
    """p(q | theta) for the probe D(alpha) S(r e^{i phi_s}) |0>; the rotated
    covariance enters through gamma_qq(r, phi_s + 2 theta)."""
    thetas = np.asarray(thetas, dtype=float)
    g = gamma_qq(r, phi_s + 2.0 * thetas)
    mu = math.sqrt(2.0) * alpha * np.cos(thetas)
    return np.exp(-((q - mu) ** 2) / g) / np.sqrt(math.pi * g)


def _hom_rows(alpha, q, trunc, ctl):
    a = 2.0 * math.sqrt(2.0) * q * alpha
    b = -alpha * alpha
    rows_a = specfun.bessel_i_scaled_rows(a, 2 * trunc.n_max + 2, ctl)[0]
    rows_b = specfun.bessel_i_scaled_rows(b, trunc.n_max, ctl)[0]
    return rows_a, rows_b, abs(a), abs(b)


def coherent_hom_outcome_density(alpha: float, q: float,
                                 trunc: Optional[SeriesTruncation] = None,
                                 ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """p(q) = e^{-q^2-alpha^2} sum_m I_{2m}(2 sqrt2 q alpha) I_m(-alpha^2) / sqrt(pi)."""
    if trunc is None:
        trunc = default_truncation(2.0 * math.sqrt(2.0) * abs(q) * alpha, alpha * alpha)
    rows_a, rows_b, ea, eb = _hom_rows(alpha, q, trunc, ctl)
    m = np.arange(-trunc.n_max, trunc.n_max + 1)
    terms = rows_a[np.abs(2 * m)] * rows_b[np.abs(m)]
    total = float(terms.sum())
    ring = abs(terms[0]) + abs(terms[-1])
    if ring > trunc.tail_tol * max(abs(total), 1e-300):
        raise TruncationError("outcome-density series tail exceeds the declared bound")
    return math.exp(-q * q - alpha * alpha + ea + eb) / math.sqrt(math.pi) * total


def coherent_hom_circular_moment(alpha: float, q: float,
                                 trunc: Optional[SeriesTruncation] = None,
                                 ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """<e^{i theta}> under the posterior p(theta | q) on [0, pi].

    Real part: ratio of single Bessel sums; imaginary part: double sum
    with the quartic integer denominator.  The estimator is the argument
    of the returned complex number.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if trunc is None:
        trunc = default_truncation(2.0 * math.sqrt(2.0) * abs(q) * alpha, alpha * alpha)
    rows_a, rows_b, _, _ = _hom_rows(alpha, q, trunc, ctl)
    n = np.arange(-trunc.n_max, trunc.n_max + 1)
    norm = float((rows_a[np.abs(2 * n)] * rows_b[np.abs(n)]).sum())
    if abs(norm) < 1e-300:
        raise TruncationError("degenerate posterior: normalization sum vanished")
    re = float((rows_a[np.abs(2 * n + 1)] * rows_b[np.abs(n)]).sum()) / norm
    nm, nn = np.meshgrid(n, n, indexing="ij")
    num = 1.0 - 4.0 * nm.astype(float) ** 2 - 4.0 * nn.astype(float) ** 2
    den = ((2 * nn - 2 * nm - 1) * (2 * nn - 2 * nm + 1)
           * (2 * nn + 2 * nm + 1) * (2 * nn + 2 * nm - 1)).astype(float)
    dbl = rows_b[np.abs(nm)] * rows_a[np.abs(2 * nn)] * num / den
    im = 2.0 / math.pi * float(dbl.sum()) / norm
    return complex(re, im)


# ---------------------------------------------------------------------------
# strategies for the generic engine


def _trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    w = np.full(nodes.size, nodes[1] - nodes[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


class HeterodynePhaseStrategy:
    """Phase encoding on D(alpha) S(-r) |0> read out by heterodyne detection.

    Outcome quadrature runs over the radial coordinate only: the posterior
    is covariant under rotations of beta, so the angular integral
    contributes a factor 2 pi |beta| (checked by the rotational-covariance
    property tests).  Setting ``angular_symmetry=False`` integrates the
    full polar grid instead.
    """

    circular = True
    scheme = "outcome_grid"

    def __init__(self, alpha: float, r: float = 0.0, base_radial: int = 128,
                 angular_nodes: int = 256, angular_symmetry: bool = True):
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.alpha = float(alpha)
        self.r = float(r)
        self.base_radial = base_radial
        self.angular_nodes = angular_nodes
        self.angular_symmetry = angular_symmetry
        self.support = HET_SUPPORT

    def likelihood_matrix(self, thetas, outcomes):
        thetas = np.asarray(thetas, dtype=float)
        betas = np.asarray(outcomes, dtype=complex)
        z = np.exp(1j * thetas)[None, :] * betas[:, None] - self.alpha
        ch = math.cosh(self.r)
        return np.exp(-(math.exp(-self.r) * z.real**2
                        + math.exp(self.r) * z.imag**2) / ch) / (math.pi * ch)

    def sample_outcomes_given(self, thetas, rng):
        thetas = np.asarray(thetas, dtype=float)
        # Husimi moments of the rotated probe, sampled per theta
        mean_q = math.sqrt(2.0) * self.alpha * np.cos(thetas)
        mean_p = -math.sqrt(2.0) * self.alpha * np.sin(thetas)
        ch2, sh2 = math.cosh(2 * self.r), math.sinh(2 * self.r)
        phi = math.pi + 2.0 * thetas  # probe squeezing angle after rotation
        sqq = 0.5 * (ch2 - np.cos(phi) * sh2)
        spp = 0.5 * (ch2 + np.cos(phi) * sh2)
        sqp = 0.5 * np.sin(phi) * sh2
        a11 = sqq + 0.5
        a22 = spp + 0.5
        a12 = sqp
        # cholesky of [[a11, a12], [a12, a22]] per sample
        l11 = np.sqrt(a11)
        l21 = a12 / l11
        l22 = np.sqrt(a22 - l21**2)
        z = rng.standard_normal((thetas.size, 2))
        x = mean_q + l11 * z[:, 0]
        p = mean_p + l21 * z[:, 0] + l22 * z[:, 1]
        return (x + 1j * p) / math.sqrt(2.0)

    def outcome_nodes(self, level):
        extent = _sh_radial_extent(self.alpha, self.r)
        m = self.base_radial * max(1, math.ceil(extent / 8.0)) * 2**level + 1
        rho = np.linspace(0.0, extent, m)
        wr = _trapezoid_weights(rho)
        if self.angular_symmetry:
            return rho.astype(complex), 2.0 * math.pi * rho * wr
        k = self.angular_nodes
        ang = -math.pi + (np.arange(k) + 0.5) * 2.0 * math.pi / k
        wa = np.full(k, 2.0 * math.pi / k)
        betas = (rho[:, None] * np.exp(-1j * ang)[None, :]).ravel()
        weights = ((rho * wr)[:, None] * wa[None, :]).ravel()
        return betas, weights


class HomodynePhaseStrategy:
    """Phase encoding on D(alpha) S(r e^{i phi_s}) |0> read out by q-homodyne."""

    circular = True
    scheme = "outcome_grid"

    def __init__(self, alpha: float, r: float = 0.0, phi_s: float = 0.0,
                 base_nodes: int = 512):
        self.alpha = float(alpha)
        self.r = float(r)
        self.phi_s = float(phi_s)
        self.base_nodes = base_nodes
        self.support = HOM_SUPPORT

    def likelihood_matrix(self, thetas, outcomes):
        thetas = np.asarray(thetas, dtype=float)
        qs = np.real(np.asarray(outcomes))[:, None]
        g = gamma_qq(self.r, self.phi_s + 2.0 * thetas)[None, :]
        mu = (math.sqrt(2.0) * self.alpha * np.cos(thetas))[None, :]
        return np.exp(-((qs - mu) ** 2) / g) / np.sqrt(math.pi * g)

    def sample_outcomes_given(self, thetas, rng):
        thetas = np.asarray(thetas, dtype=float)
        g = gamma_qq(self.r, self.phi_s + 2.0 * thetas)
        mu = math.sqrt(2.0) * self.alpha * np.cos(thetas)
        return rng.normal(mu, np.sqrt(g / 2.0))

    def outcome_nodes(self, level):
        m = self.base_nodes * 2**level + 1
        extent = math.sqrt(2.0) * self.alpha + 6.0 * math.exp(abs(self.r)) / math.sqrt(2.0) + 1.0
        qs = np.linspace(-extent, extent, m)
        return qs, _trapezoid_weights(qs)


def task_strategy(task: PhaseTask):
    alpha = complex(task.probe.alpha).real
    if task.measurement.kind is MeasurementKind.HETERODYNE:
        return HeterodynePhaseStrategy(alpha, task.probe.s)
    return HomodynePhaseStrategy(alpha, task.probe.s, task.probe.psi)


def average_variance_numeric(task: PhaseTask, method: str = "quadrature",
                             samples: int = 100_000,
                             rng: Optional[np.random.Generator] = None,
                             grid_nodes: Optional[int] = None,
                             rel_tol: float = 1e-6) -> AverageVariance:
    """Average circular posterior variance via the generic engine."""
    strategy = task_strategy(task)
    prior = flat_prior(task.support, grid_nodes)
    return average_posterior_variance(strategy, prior, method=method,
                                      samples=samples, rng=rng, rel_tol=rel_tol)
