"""Exact binary hypothesis testing at finite support.

The central object is ``beta(eps|Q||W)``, the least Type-II error of a
randomized test of ``W`` against ``Q`` with Type-I error at most ``eps``,
together with the likelihood-ratio quantiles and the entropy spectrum
``h(gamma|W||Q) = int min(dW, gamma dQ)`` that determine it.
"""
from .beta import (
    BetaCurve,
    RandomizedTest,
    beta_biconjugate,
    beta_conjugate,
    beta_curve,
    beta_derivatives,
    beta_dual,
    beta_inverse,
    beta_spectral_ci,
    beta_spectral_si,
    change_of_measure,
    curve_conjugate,
    olr_test,
    quantile_bounds,
    scale_q,
)
from .extended import INF, NEG_INF, Infinite
from .measures import (
    DEFAULT_ATOM_CAP,
    DEFAULT_OMEGA,
    DiscreteMeasure,
    TestingPair,
    TiltedFamily,
    geometric_pair,
    load_pair,
    lumped_power,
    make_measure,
    make_pair,
    pair_from_weights,
    product_pair,
    swap,
    tilt,
)
from .spectrum import (
    LikelihoodSpectrum,
    adjoint_check,
    entropy_derivatives,
    entropy_spectrum,
    entropy_spectrum_integral,
    lr_cdf,
    quantile_lsc,
    quantile_usc,
)

__version__ = "0.1.0"

__all__ = [
    "adjoint_check",
    "beta_biconjugate",
    "beta_conjugate",
    "beta_curve",
    "beta_derivatives",
    "beta_dual",
    "beta_inverse",
    "beta_spectral_ci",
    "beta_spectral_si",
    "BetaCurve",
    "change_of_measure",
    "curve_conjugate",
    "DEFAULT_ATOM_CAP",
    "DEFAULT_OMEGA",
    "DiscreteMeasure",
    "entropy_derivatives",
    "entropy_spectrum",
    "entropy_spectrum_integral",
    "geometric_pair",
    "INF",
    "Infinite",
    "LikelihoodSpectrum",
    "load_pair",
    "lr_cdf",
    "lumped_power",
    "make_measure",
    "make_pair",
    "NEG_INF",
    "olr_test",
    "pair_from_weights",
    "product_pair",
    "quantile_bounds",
    "quantile_lsc",
    "quantile_usc",
    "RandomizedTest",
    "scale_q",
    "swap",
    "TestingPair",
    "tilt",
    "TiltedFamily",
]
