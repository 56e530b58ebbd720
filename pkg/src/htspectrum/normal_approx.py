"""Gaussian special functions and normal approximations of ``beta``.

Three groups of routines live here:

* ``gauss_pdf``, ``gauss_q``, ``gauss_q_inv`` and the Mills ratio
  ``R(t) = Q(t)/pdf(t)`` together with its elementary brackets;
* Berry-Esseen bounds for ``beta(eps|Q||W)`` of product pairs, both
  untilted (``be_*``) and after tilting to ``V_rho`` (``tilted_*``; these
  describe the swapped function ``beta(eps|W||Q)``);
* closed forms for the standard Gaussian ``W`` against Lebesgue measure
  ``Q`` on the real line (``gl_*``).

All of it is binary64.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

from scipy.special import erfcx, ndtri

from .errors import (
    DeltaTooLarge,
    DomainError,
    EpsilonOutsideValidity,
    GammaOutOfBracket,
    NonpositiveRho,
    NotAbsolutelyContinuous,
    NotProbability,
    PhiOutsideValidity,
)
from .measures import DEFAULT_OMEGA, TestingPair, log_fraction, tilt
from .oracle import quadrature

__all__ = [
    "SQRT_2PI",
    "default_omega",
    "gauss_pdf",
    "gauss_q",
    "gauss_q_inv",
    "mills_ratio",
    "mills_bounds_positive",
    "mills_bounds_extended",
    "BEStats",
    "be_stats",
    "be_upper",
    "be_lower",
    "be_bounds",
    "be_approx",
    "TiltedBEStats",
    "tilted_stats",
    "tilted_eps",
    "tilted_strassen_eps",
    "tilted_beta_window",
    "TiltedStrassen",
    "tilted_strassen",
    "gl_beta",
    "gl_quantile",
    "gl_entropy",
    "gl_dual",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT_HALF_PI = math.sqrt(0.5 * math.pi)


def default_omega() -> float:
    """Berry-Esseen constant: ``HTSPECTRUM_OMEGA`` if set, else 0.5606."""
    env = os.environ.get("HTSPECTRUM_OMEGA")
    if env:
        value = float(env)
        if not value > 0:
            raise DomainError(f"HTSPECTRUM_OMEGA must be positive, got {env!r}")
        return value
    return DEFAULT_OMEGA


# -- special functions ---------------------------------------------------------


def gauss_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / SQRT_2PI


def gauss_q(x: float) -> float:
    """Upper tail ``P[N(0,1) > x]``."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def gauss_q_inv(p: float) -> float:
    """Inverse of :func:`gauss_q` on ``(0, 1)``, polished by one Newton step."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"gauss_q_inv needs p in (0, 1), got {p!r}")
    x = -float(ndtri(p))
    d = gauss_pdf(x)
    if d > 0:
        x += (gauss_q(x) - p) / d
    return x


def mills_ratio(tau: float) -> float:
    """``Q(tau)/pdf(tau)``, evaluated through the scaled complementary error function."""
    return _SQRT_HALF_PI * float(erfcx(tau / math.sqrt(2.0)))


def mills_bounds_positive(tau: float) -> Tuple[float, float]:
    """Bracket of ``R(tau)`` valid for ``tau >= 0``."""
    return 2.0 / (tau + math.sqrt(tau * tau + 4.0)), 2.0 / (tau + math.sqrt(tau * tau + 8.0 / math.pi))


def mills_bounds_extended(tau: float) -> Tuple[float, float]:
    """Bracket of ``R(tau)`` valid for ``tau >= -1.3``."""
    return 2.0 / (3.0 + 2.0 * tau), 2.0 / (tau + math.sqrt(tau * tau + 1.1))


def _q_over_pdf(a: float, s: float) -> float:
    # Q(a)/pdf(s) without forming either factor when they under/overflow
    if a >= 0:
        return mills_ratio(a) * math.exp(0.5 * (s * s - a * a))
    return gauss_q(a) * SQRT_2PI * math.exp(0.5 * s * s)


# -- Berry-Esseen for product pairs --------------------------------------------


@dataclass(frozen=True)
class BEStats:
    """Summed moments of the log-likelihood ratio under ``W``."""

    kl: float
    sigma: float
    t3: float
    delta: float
    omega: float


def _letter_moments(letter: TestingPair) -> Tuple[float, float, float]:
    if letter.w_mass != 1:
        raise NotProbability(f"W has mass {letter.w_mass}, not 1")
    if any(wa > 0 and qa == 0 for wa, qa in zip(letter.w, letter.q)):
        raise NotAbsolutelyContinuous("W charges an atom Q does not")
    logs: dict = {}
    weights, values = [], []
    for wa, qa in zip(letter.w, letter.q):
        if wa == 0:
            continue
        r = wa / qa
        if r not in logs:
            logs[r] = log_fraction(r)
        weights.append(float(wa))
        values.append(logs[r])
    mean = math.fsum(p * x for p, x in zip(weights, values))
    if len(logs) == 1:
        return mean, 0.0, 0.0
    var = math.fsum(p * (x - mean) ** 2 for p, x in zip(weights, values))
    t3 = math.fsum(p * abs(x - mean) ** 3 for p, x in zip(weights, values))
    return mean, var, t3


def _delta(omega: float, sigma: float, t3: float) -> float:
    return omega * t3 / sigma**3 if sigma > 0 else 0.0


def be_stats(letters: Sequence[TestingPair], omega: Optional[float] = None) -> BEStats:
    omega = default_omega() if omega is None else float(omega)
    parts = [_letter_moments(letter) for letter in letters]
    kl = math.fsum(p[0] for p in parts)
    sigma = math.sqrt(math.fsum(p[1] for p in parts))
    t3 = math.fsum(p[2] for p in parts)
    return BEStats(kl, sigma, t3, _delta(omega, sigma, t3), omega)


StatsLike = Union[BEStats, Sequence[TestingPair]]


def _stats(obj: StatsLike, omega: Optional[float]) -> BEStats:
    return obj if isinstance(obj, BEStats) else be_stats(obj, omega)


def _be_side(st: BEStats, p: float) -> float:
    x = gauss_q_inv(p)
    return math.exp(-st.kl) * _q_over_pdf(st.sigma - x, st.sigma) / SQRT_2PI


def be_upper(letters: StatsLike, eps: float, omega: Optional[float] = None) -> float:
    """Upper bound on ``beta(eps|Q||W)``, valid for ``eps`` in ``(delta, 1)``."""
    st = _stats(letters, omega)
    if not st.delta < eps < 1.0:
        raise EpsilonOutsideValidity("upper", eps, st.delta, 1.0)
    return _be_side(st, eps - st.delta)


def be_lower(letters: StatsLike, eps: float, omega: Optional[float] = None) -> float:
    """Lower bound on ``beta(eps|Q||W)``, valid for ``eps`` in ``(0, 1 - delta)``."""
    st = _stats(letters, omega)
    if not 0.0 < eps < 1.0 - st.delta:
        raise EpsilonOutsideValidity("lower", eps, 0.0, 1.0 - st.delta)
    return _be_side(st, eps + st.delta)


def be_bounds(letters: StatsLike, eps: float, omega: Optional[float] = None) -> Tuple[Optional[float], Optional[float]]:
    """``(lower, upper)``; a side outside its validity interval is ``None``."""
    st = _stats(letters, omega)
    lower = upper = None
    if 0.0 < eps < 1.0 - st.delta:
        lower = _be_side(st, eps + st.delta)
    if st.delta < eps < 1.0:
        upper = _be_side(st, eps - st.delta)
    return lower, upper


def be_approx(letters: StatsLike, eps: float, omega: Optional[float] = None) -> Tuple[float, float]:
    """``(value, cap)`` with ``beta(eps|Q||W)`` in ``value * exp(+-cap)``.

    Requires ``eps`` in ``(delta, 1 - delta - Q(sigma))``.
    """
    st = _stats(letters, omega)
    hi = 1.0 - st.delta - gauss_q(st.sigma)
    if not st.delta < eps < hi:
        raise EpsilonOutsideValidity("strassen", eps, st.delta, hi)
    tau = gauss_q_inv(eps)
    value = mills_ratio(st.sigma - tau) / SQRT_2PI * math.exp(-st.kl + st.sigma * tau - 0.5 * tau * tau)
    cap = st.delta * (st.sigma + 0.5) * SQRT_2PI / min(1.0 - st.delta - eps, eps - st.delta)
    return value, cap


# -- tilted bounds: statements about beta(eps|W||Q) -----------------------------


@dataclass(frozen=True)
class TiltedBEStats:
    """Moments of the log-likelihood ratio under the tilted product ``V_rho``.

    ``w_ac`` and ``q_ac`` are the product masses of the mutually absolutely
    continuous parts of ``W`` and ``Q``.
    """

    rho: float
    kl_v_q: float
    kl_v_w: float
    sigma: float
    t3: float
    delta: float
    omega: float
    w_ac: float
    q_ac: float


def tilted_stats(letters: Sequence[TestingPair], rho: float, omega: Optional[float] = None) -> TiltedBEStats:
    omega = default_omega() if omega is None else float(omega)
    rho = float(rho)
    if not rho > 0:
        raise NonpositiveRho(f"rho must be positive, got {rho}")
    fams = [tilt(letter, rho, omega) for letter in letters]
    sigma = math.sqrt(math.fsum(f.sigma**2 for f in fams))
    t3 = math.fsum(f.t3 for f in fams)
    w_ac = math.prod(float(letter.w_ac_mass) for letter in letters)
    q_ac = math.prod(float(letter.q_ac_mass) for letter in letters)
    return TiltedBEStats(
        rho=rho,
        kl_v_q=math.fsum(f.kl_v_q for f in fams),
        kl_v_w=math.fsum(f.kl_v_w for f in fams),
        sigma=sigma,
        t3=t3,
        delta=_delta(omega, sigma, t3),
        omega=omega,
        w_ac=w_ac,
        q_ac=q_ac,
    )


def tilted_eps(stats: TiltedBEStats, phi: float) -> float:
    """Type-I level indexed by ``phi``; strictly decreasing in ``phi``."""
    if not 0.0 < phi < 1.0:
        raise DomainError(f"phi must lie in (0, 1), got {phi!r}")
    rs = stats.rho * stats.sigma
    return math.exp(-stats.kl_v_q) * _q_over_pdf(rs - gauss_q_inv(phi), rs) / SQRT_2PI


def _tilted_term(stats: TiltedBEStats, p: float) -> float:
    s = abs(1.0 - stats.rho) * stats.sigma
    x = gauss_q_inv(p)
    arg = s + x if stats.rho < 1 else s - x
    return math.exp(-stats.kl_v_w) * _q_over_pdf(arg, s) / SQRT_2PI


def tilted_beta_window(stats: TiltedBEStats, phi: float) -> Tuple[float, float, float]:
    """``(center, low, high)`` bracketing ``beta(tilted_eps(phi)|W||Q)``.

    The unknown shift ``D`` with ``|D| <= 2 delta`` is swept over its range;
    the expression is monotone in ``D`` so the endpoints give the extremes.
    """
    if stats.rho == 1.0:
        raise DomainError("the tilted window needs rho != 1")
    if not stats.delta < 0.25:
        raise DeltaTooLarge(f"delta={stats.delta} is not below 1/4")
    d2 = 2.0 * stats.delta
    if not d2 < phi < 1.0 - d2:
        raise PhiOutsideValidity(f"phi={phi} outside ({d2}, {1.0 - d2})")

    def at(p: float) -> float:
        term = _tilted_term(stats, p)
        return term if stats.rho < 1 else stats.w_ac - term

    vals = [at(phi - d2), at(phi), at(phi + d2)] if d2 > 0 else [at(phi)] * 3
    return vals[1], min(vals), max(vals)


def tilted_strassen_eps(stats: TiltedBEStats, gamma: float) -> float:
    return gamma * math.exp(-stats.kl_v_q)


def _gamma_bracket(stats: TiltedBEStats) -> Tuple[float, float]:
    rs = stats.rho * stats.sigma
    return _q_over_pdf(rs + 0.31, rs) / SQRT_2PI, _q_over_pdf(rs - 0.31, rs) / SQRT_2PI


@dataclass(frozen=True)
class TiltedStrassen:
    """Approximation of ``beta(eps|W||Q)`` at ``eps = gamma * exp(-KL(V||Q))``."""

    eps: float
    value: float
    xi_cap: float
    low: float
    high: float


def tilted_strassen(stats: TiltedBEStats, gamma: float) -> TiltedStrassen:
    if stats.rho == 1.0:
        raise DomainError("the tilted approximation needs rho != 1")
    if not stats.delta <= 0.125:
        raise DeltaTooLarge(f"delta={stats.delta} exceeds 1/8")
    lo, hi = _gamma_bracket(stats)
    if not lo <= gamma <= hi:
        raise GammaOutOfBracket(f"gamma={gamma} outside [{lo}, {hi}]")
    rho, sigma = stats.rho, stats.sigma
    theta = (mills_ratio(rho * sigma) / SQRT_2PI) ** ((1.0 - rho) / rho) * mills_ratio(abs(rho - 1.0) * sigma) / SQRT_2PI
    term = gamma ** ((rho - 1.0) / rho) * theta * math.exp(-stats.kl_v_w)
    cap = 0.54 / min(1.0, rho) + (abs(1.0 - rho) * sigma + 2.2) * 8.0 * SQRT_2PI * stats.delta
    if rho < 1:
        value, low, high = term, term * math.exp(-cap), term * math.exp(cap)
    else:
        value, low, high = stats.w_ac - term, stats.w_ac - term * math.exp(cap), stats.w_ac - term * math.exp(-cap)
    return TiltedStrassen(tilted_strassen_eps(stats, gamma), value, cap, low, high)


# -- standard Gaussian against Lebesgue measure --------------------------------


def _gl_eps(eps: float) -> float:
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    return eps


def gl_beta(eps: float) -> float:
    """Least Lebesgue length of an acceptance set of Gaussian mass ``1 - eps``."""
    return 2.0 * gauss_q_inv(0.5 * _gl_eps(eps))


def gl_quantile(eps: float) -> float:
    """Level ``eps`` quantile of the Gaussian density under the Gaussian law."""
    return gauss_pdf(gauss_q_inv(0.5 * _gl_eps(eps)))


def _gl_integrand(t: float) -> float:
    if t < SQRT_2PI:
        return 1.0
    return 2.0 * gauss_q(math.sqrt(2.0 * math.log(t / SQRT_2PI)))


def gl_entropy(gamma: float, tol: float = 1e-10) -> float:
    """``int min(1, gamma * pdf(x)) dx`` as ``int_0^gamma P[1/pdf(X) > t] dt``."""
    if gamma < 0:
        raise DomainError(f"gamma must be non-negative, got {gamma!r}")
    return quadrature(_gl_integrand, 0.0, float(gamma), tol, points=[SQRT_2PI])


def gl_dual(eps: float, tol: float = 1e-9) -> float:
    """``sup_gamma h(gamma) - gamma*eps`` by golden-section search on the concave objective."""
    _gl_eps(eps)

    def obj(g: float) -> float:
        return gl_entropy(g) - g * eps

    lo, hi = 0.0, 10.0 / eps + 10.0
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a = hi - inv_phi * (hi - lo)
    b = lo + inv_phi * (hi - lo)
    fa, fb = obj(a), obj(b)
    while hi - lo > tol * max(1.0, hi):
        if fa < fb:
            lo, a, fa = a, b, fb
            b = lo + inv_phi * (hi - lo)
            fb = obj(b)
        else:
            hi, b, fb = b, a, fa
            a = hi - inv_phi * (hi - lo)
            fa = obj(a)
    return max(fa, fb)
