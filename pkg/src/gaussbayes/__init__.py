"""Bayesian parameter estimation with single-mode Gaussian probes and
homodyne/heterodyne detection: closed-form posteriors, Bessel-series
machinery, average-variance engines, and Van Trees bounds for
displacement, phase, and squeezing estimation."""

from . import bayes, displacement, harness, measurement, phase, phasespace, specfun, squeezing

__all__ = [
    "bayes",
    "displacement",
    "harness",
    "measurement",
    "phase",
    "phasespace",
    "specfun",
    "squeezing",
]

__version__ = "0.1.0"
