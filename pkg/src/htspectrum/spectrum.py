"""Likelihood-ratio distribution, its quantiles and the entropy spectrum.

Everything here is exact rational arithmetic.  Atoms with equal likelihood
ratio are merged when the spectrum is built, so the distribution function
and both quantiles reduce to a binary search over the distinct values.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Tuple

from .errors import NegativeGamma, NonpositiveGamma
from .extended import INF, NEG_INF, ExtRational, Infinite
from .measures import TestingPair

__all__ = [
    "LikelihoodSpectrum",
    "build_spectrum",
    "lr_cdf",
    "quantile_lsc",
    "quantile_usc",
    "plateaus",
    "entropy_spectrum",
    "entropy_spectrum_split",
    "entropy_spectrum_integral",
    "entropy_derivatives",
    "adjoint_check",
    "cdf_rows",
    "entropy_rows",
]

ZERO = Fraction(0)


@dataclass(frozen=True)
class LikelihoodSpectrum:
    """Distinct finite values of ``dW~/dQ`` with their W- and Q-masses.

    ``cum_w[i]`` is ``W[l <= values[i]]`` and ``tail_q[i]`` is
    ``Q[l >= values[i]]``.  ``inf_w_mass`` is the W-mass where ``q == 0``
    (excluded from the distribution function) and ``q_only_mass`` the
    Q-mass where ``w == 0``.
    """

    values: Tuple[Fraction, ...]
    w_mass: Tuple[Fraction, ...]
    q_mass: Tuple[Fraction, ...]
    cum_w: Tuple[Fraction, ...]
    cum_q: Tuple[Fraction, ...]
    tail_q: Tuple[Fraction, ...]
    inf_w_mass: Fraction
    q_only_mass: Fraction

    @property
    def w_ac(self) -> Fraction:
        return self.cum_w[-1] if self.cum_w else ZERO

    @property
    def q_ac(self) -> Fraction:
        return self.cum_q[-1] if self.cum_q else ZERO

    def __len__(self) -> int:
        return len(self.values)


def build_spectrum(pair: TestingPair) -> LikelihoodSpectrum:
    wm: dict = {}
    qm: dict = {}
    inf_w = ZERO
    q_only = ZERO
    for wa, qa, r in zip(pair.w, pair.q, pair.lr_wq):
        if isinstance(r, Infinite):
            inf_w += wa
        elif wa == 0:
            q_only += qa
        else:
            wm[r] = wm.get(r, ZERO) + wa
            qm[r] = qm.get(r, ZERO) + qa
    values = tuple(sorted(wm))
    w_mass = tuple(wm[v] for v in values)
    q_mass = tuple(qm[v] for v in values)
    cum_w, cum_q = [], []
    sw = sq = ZERO
    for a, b in zip(w_mass, q_mass):
        sw += a
        sq += b
        cum_w.append(sw)
        cum_q.append(sq)
    tail = []
    s = ZERO
    for b in reversed(q_mass):
        s += b
        tail.append(s)
    tail.reverse()
    return LikelihoodSpectrum(values, w_mass, q_mass, tuple(cum_w), tuple(cum_q), tuple(tail), inf_w, q_only)


def lr_cdf(pair: TestingPair, tau) -> Fraction:
    """``W[dW~/dQ <= tau]``; the part of W singular to Q is never counted."""
    sp = pair.spectrum
    if isinstance(tau, Infinite):
        return sp.w_ac if tau is INF else ZERO
    i = bisect.bisect_right(sp.values, Fraction(tau))
    return sp.cum_w[i - 1] if i else ZERO


def quantile_lsc(pair: TestingPair, eps) -> ExtRational:
    """``inf{g : F(g) >= eps}``: ``-inf`` for ``eps <= 0``, ``+inf`` above ``||W~||``."""
    sp = pair.spectrum
    eps = Fraction(eps)
    if eps <= 0:
        return NEG_INF
    if eps > sp.w_ac:
        return INF
    return sp.values[bisect.bisect_left(sp.cum_w, eps)]


def quantile_usc(pair: TestingPair, eps) -> ExtRational:
    """``inf{g : F(g) > eps}``: ``-inf`` for ``eps < 0``, ``+inf`` from ``||W~||`` on."""
    sp = pair.spectrum
    eps = Fraction(eps)
    if eps < 0:
        return NEG_INF
    if eps >= sp.w_ac:
        return INF
    return sp.values[bisect.bisect_right(sp.cum_w, eps)]


def plateaus(pair: TestingPair) -> List[Tuple[Fraction, ExtRational, ExtRational]]:
    """Every ``eps`` where the two quantiles differ, as ``(eps, lower, upper)``.

    These are the levels at which the distribution function is flat; on
    ``[lower, upper)`` it equals ``eps``.  The list always starts at 0.
    """
    sp = pair.spectrum
    if not sp.values:
        return [(ZERO, NEG_INF, INF)]
    out = [(ZERO, NEG_INF, sp.values[0])]
    for i in range(len(sp.values) - 1):
        out.append((sp.cum_w[i], sp.values[i], sp.values[i + 1]))
    out.append((sp.w_ac, sp.values[-1], INF))
    return out


def _check_gamma(gamma) -> Fraction:
    gamma = Fraction(gamma)
    if gamma < 0:
        raise NegativeGamma(f"gamma must be non-negative, got {gamma}")
    return gamma


def entropy_spectrum(pair: TestingPair, gamma) -> Fraction:
    """``h(gamma|W||Q) = sum_x min(w(x), gamma q(x))``, atom by atom."""
    gamma = _check_gamma(gamma)
    return sum((min(wa, gamma * qa) for wa, qa in zip(pair.w, pair.q)), ZERO)


def entropy_spectrum_split(pair: TestingPair, gamma) -> Fraction:
    """``W~[l <= gamma] + gamma Q[l > gamma]`` from the merged spectrum."""
    gamma = _check_gamma(gamma)
    sp = pair.spectrum
    i = bisect.bisect_right(sp.values, gamma)
    below = sp.cum_w[i - 1] if i else ZERO
    above = sp.tail_q[i] if i < len(sp.values) else ZERO
    return below + gamma * above


def entropy_spectrum_integral(pair: TestingPair, gamma) -> Fraction:
    """``int_0^gamma Q[l > t] dt`` summed exactly over the steps of the integrand."""
    gamma = _check_gamma(gamma)
    sp = pair.spectrum
    total = ZERO
    prev = ZERO
    for v, level in zip(sp.values, sp.tail_q):
        if v >= gamma:
            return total + (gamma - prev) * level
        total += (v - prev) * level
        prev = v
    return total


def entropy_derivatives(pair: TestingPair, gamma) -> Tuple[Fraction, Fraction]:
    """One-sided derivatives ``(Q[l >= gamma], Q[l > gamma])`` of ``h(.|W||Q)``.

    At ``gamma == 0`` the left value is ``||Q||``, the slope of
    ``gamma -> sum min(w, gamma q)`` continued to negative ``gamma``.
    """
    gamma = _check_gamma(gamma)
    sp = pair.spectrum
    n = len(sp.values)
    lo = bisect.bisect_left(sp.values, gamma)
    hi = bisect.bisect_right(sp.values, gamma)
    left = sp.tail_q[lo] if lo < n else ZERO
    right = sp.tail_q[hi] if hi < n else ZERO
    if gamma == 0:
        left = pair.q_mass
    return left, right


def adjoint_check(pair: TestingPair, gamma) -> Tuple[Fraction, Fraction]:
    """``(h(gamma|Q||W), gamma h(1/gamma|W||Q))``; the two agree exactly."""
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise NonpositiveGamma(f"gamma must be positive, got {gamma}")
    return entropy_spectrum(pair.swapped, gamma), gamma * entropy_spectrum(pair, 1 / gamma)


def cdf_rows(pair: TestingPair) -> List[Tuple[Fraction, Fraction]]:
    """Jump points ``(tau, F(tau))`` of the distribution function."""
    sp = pair.spectrum
    return list(zip(sp.values, sp.cum_w))


def entropy_rows(pair: TestingPair, gammas: Iterable) -> List[Tuple[Fraction, Fraction, Fraction, Fraction]]:
    rows = []
    for g in gammas:
        g = Fraction(g)
        left, right = entropy_derivatives(pair, g)
        rows.append((g, entropy_spectrum(pair, g), left, right))
    return rows
