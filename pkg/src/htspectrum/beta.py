"""The optimal Type-II error function ``beta(eps|Q||W)`` and its companions.

``beta(eps|Q||W)`` is the least Q-probability of accepting ``W`` over all
randomized tests whose W-probability of rejecting ``W`` is at most ``eps``.
It is computed here in several independent ways (dual supremum, two
integral forms, piecewise-linear curve) that agree exactly on rationals.

The dual supremum only needs the candidates ``{0}`` and the distinct values
of ``dQ~/dW``: ``h(.|Q||W) - gamma*eps`` is piecewise linear in ``gamma``
with knots exactly there, so its supremum sits at one of them.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Mapping, Tuple, Union

from .errors import (
    DeltaOutOfRange,
    EpsilonOutOfRange,
    GammaOutOfBracket,
    NegativeEpsilon,
    NonpositiveLambda,
    NotEquivalent,
    NotMonotoneLink,
)
from .extended import INF, NEG_INF, ExtRational, Infinite, neg_reciprocal, reciprocal
from .measures import DiscreteMeasure, TestingPair, TiltedFamily, scale_pair
from .spectrum import entropy_spectrum, quantile_lsc, quantile_usc

__all__ = [
    "beta_dual",
    "beta_spectral_ci",
    "beta_spectral_si",
    "BetaCurve",
    "beta_curve",
    "beta_derivatives",
    "beta_conjugate",
    "curve_conjugate",
    "beta_biconjugate",
    "beta_inverse",
    "RandomizedTest",
    "olr_test",
    "scale_q",
    "change_of_measure",
    "quantile_bounds",
    "curve_rows",
]

ZERO = Fraction(0)


def _dual_table(pair: TestingPair) -> List[Tuple[Fraction, Fraction]]:
    # (gamma, h(gamma|Q||W)) at every candidate, h taken atom by atom
    table = pair._memo.get("dual")
    if table is None:
        swapped = pair.swapped
        gammas = [ZERO] + [1 / v for v in pair.spectrum.values]
        table = [(g, entropy_spectrum(swapped, g)) for g in gammas]
        pair._memo["dual"] = table
    return table


def beta_dual(pair: TestingPair, eps) -> ExtRational:
    """``sup_{gamma >= 0} h(gamma|Q||W) - gamma*eps``; ``+inf`` for ``eps < 0``."""
    eps = Fraction(eps)
    if eps < 0:
        return INF
    return max(h - g * eps for g, h in _dual_table(pair))


def _sweep(pair: TestingPair):
    # steps of tau -> W[dQ~/dW > tau]: (right end of the step, level)
    sp = pair.spectrum
    for j in range(len(sp.values) - 1, -1, -1):
        yield 1 / sp.values[j], sp.cum_w[j]


def beta_spectral_ci(pair: TestingPair, eps) -> Fraction:
    """``int_0^inf (W[dQ~/dW > t] - eps)^+ dt`` as an exact step sum."""
    eps = Fraction(eps)
    if eps < 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
    total = ZERO
    prev = ZERO
    for end, level in _sweep(pair):
        if level > eps:
            total += (end - prev) * (level - eps)
        prev = end
    return total


def _gamma_bracket(pair: TestingPair, eps: Fraction) -> Tuple[ExtRational, ExtRational]:
    lo = reciprocal(quantile_usc(pair, eps))
    lsc = quantile_lsc(pair, eps)
    hi = INF if lsc <= 0 else reciprocal(lsc)
    return lo, hi


def beta_spectral_si(pair: TestingPair, eps, gamma=None) -> Fraction:
    """``int_0^gamma (W[dQ~/dW > t] - eps) dt`` for an optimal ``gamma``.

    ``gamma`` defaults to ``1/F+(eps)`` and otherwise has to lie in
    ``[1/F+(eps), 1/max(F-(eps), 0)]``.
    """
    eps = Fraction(eps)
    if eps < 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
    lo, hi = _gamma_bracket(pair, eps)
    if gamma is None:
        gamma = lo
    elif not isinstance(gamma, Infinite):
        gamma = Fraction(gamma)
    if gamma < lo or gamma > hi:
        raise GammaOutOfBracket(f"gamma={gamma} outside [{lo}, {hi}]")
    total = ZERO
    prev = ZERO
    for end, level in _sweep(pair):
        if end >= gamma:
            return total + (gamma - prev) * (level - eps)
        total += (end - prev) * (level - eps)
        prev = end
    # beyond the last step the integrand is -eps; gamma can only be infinite here when eps == 0
    if gamma is INF:
        return total
    return total - (gamma - prev) * eps


@dataclass(frozen=True)
class BetaCurve:
    """Knots ``(eps_i, beta_i)`` of the convex piecewise-linear ``beta``."""

    breakpoints: Tuple[Tuple[Fraction, Fraction], ...]
    slopes: Tuple[Fraction, ...]

    @property
    def knot_eps(self) -> Tuple[Fraction, ...]:
        return tuple(e for e, _ in self.breakpoints)

    def __call__(self, eps) -> ExtRational:
        return self.evaluate(eps)

    def evaluate(self, eps) -> ExtRational:
        eps = Fraction(eps)
        if eps < 0:
            return INF
        xs = self.knot_eps
        if eps >= xs[-1]:
            return self.breakpoints[-1][1]
        j = bisect.bisect_right(xs, eps) - 1
        e0, b0 = self.breakpoints[j]
        return b0 + self.slopes[j] * (eps - e0)

    def derivatives(self, eps) -> Tuple[ExtRational, ExtRational]:
        """One-sided slopes read off the segments around ``eps``."""
        eps = Fraction(eps)
        if eps < 0:
            raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
        xs = self.knot_eps
        if eps > xs[-1]:
            return ZERO, ZERO
        j = bisect.bisect_right(xs, eps) - 1
        right = self.slopes[j] if j < len(self.slopes) else ZERO
        if eps == 0:
            return NEG_INF, right
        if xs[j] == eps:
            return self.slopes[j - 1], right
        return right, right


def beta_curve(pair: TestingPair) -> BetaCurve:
    sp = pair.spectrum
    q_ac = sp.q_ac
    points = [(ZERO, q_ac)]
    for cw, cq in zip(sp.cum_w, sp.cum_q):
        points.append((cw, q_ac - cq))
    slopes = tuple(-1 / v for v in sp.values)
    return BetaCurve(tuple(points), slopes)


def beta_derivatives(pair: TestingPair, eps) -> Tuple[ExtRational, ExtRational]:
    """``(-1/F-(eps), -1/F+(eps))``; the left slope at ``eps == 0`` is ``-inf``."""
    eps = Fraction(eps)
    if eps < 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
    right = neg_reciprocal(quantile_usc(pair, eps))
    if eps == 0:
        return NEG_INF, right
    return neg_reciprocal(quantile_lsc(pair, eps)), right


def beta_conjugate(pair: TestingPair, lam) -> ExtRational:
    """``sup_eps lam*eps - beta(eps)``, which is ``-h(-lam|Q||W)`` for ``lam <= 0``."""
    lam = Fraction(lam)
    if lam > 0:
        return INF
    return -entropy_spectrum(pair.swapped, -lam)


def curve_conjugate(curve: BetaCurve, lam) -> ExtRational:
    """The same conjugate taken directly over the knots of a curve."""
    lam = Fraction(lam)
    if lam > 0:
        return INF
    return max(lam * e - b for e, b in curve.breakpoints)


def beta_biconjugate(pair: TestingPair, eps) -> ExtRational:
    """``sup_{lam <= 0} lam*eps - beta*(lam)`` over the kinks of the conjugate."""
    eps = Fraction(eps)
    if eps < 0:
        return INF
    table = pair._memo.get("conjugate")
    if table is None:
        lams = [ZERO] + [-1 / v for v in pair.spectrum.values]
        table = [(lam, beta_conjugate(pair, lam)) for lam in lams]
        pair._memo["conjugate"] = table
    return max(lam * eps - c for lam, c in table)


def beta_inverse(pair: TestingPair, beta_value) -> ExtRational:
    """``beta(beta_value|W||Q)``, the inverse of ``beta(.|Q||W)`` on its strict range."""
    return beta_dual(pair.swapped, beta_value)


@dataclass(frozen=True)
class RandomizedTest:
    """A likelihood-ratio test: value 1 (reject ``W``) above ``gamma``,
    ``boundary_prob`` on the level set, 0 below."""

    __test__ = False

    gamma: Fraction
    atoms: tuple
    values: Tuple[Fraction, ...]
    accept_atoms: tuple
    boundary_atoms: tuple
    boundary_prob: Fraction
    typeI: Fraction
    typeII: Fraction

    def as_dict(self) -> dict:
        return {
            "gamma": str(self.gamma),
            "boundary_prob": str(self.boundary_prob),
            "accept_atoms": [str(a) for a in self.accept_atoms],
            "boundary_atoms": [str(a) for a in self.boundary_atoms],
            "typeI": str(self.typeI),
            "typeII": str(self.typeII),
        }

    def value_at(self, atom) -> Fraction:
        return dict(zip(self.atoms, self.values))[atom]


def olr_test(pair: TestingPair, eps, gamma=None) -> RandomizedTest:
    """Optimal test at level ``eps`` thresholding ``dQ~/dW`` at ``gamma``.

    ``gamma`` defaults to ``1/F+(eps)``; any value in
    ``[1/F+(eps), 1/F-(eps)]`` gives Type-I error ``eps`` and Type-II
    error ``beta_dual(pair, eps)``.
    """
    eps = Fraction(eps)
    w_ac = pair.spectrum.w_ac
    if not 0 < eps < w_ac:
        raise EpsilonOutOfRange(f"eps must lie in (0, {w_ac}), got {eps}")
    lo = reciprocal(quantile_usc(pair, eps))
    hi = reciprocal(quantile_lsc(pair, eps))
    gamma = lo if gamma is None else Fraction(gamma)
    if gamma < lo or gamma > hi:
        raise GammaOutOfBracket(f"gamma={gamma} outside [{lo}, {hi}]")
    above_w = eq_w = ZERO
    for wa, r in zip(pair.w, pair.lr_qw):
        if r > gamma:
            above_w += wa
        elif r == gamma:
            eq_w += wa
    p = (eps - above_w) / eq_w if eq_w else ZERO
    values, accept, boundary = [], [], []
    type1 = type2 = ZERO
    for a, wa, qa, r in zip(pair.atoms, pair.w, pair.q, pair.lr_qw):
        if r > gamma:
            t = Fraction(1)
            accept.append(a)
        elif r == gamma and eq_w:
            t = p
            boundary.append(a)
        else:
            t = ZERO
        values.append(t)
        type1 += t * wa
        type2 += (1 - t) * qa
    # Q-mass singular to W is always caught (ratio inf > gamma), so type2 is over Q~
    return RandomizedTest(gamma, pair.atoms, tuple(values), tuple(accept), tuple(boundary), p, type1, type2)


def scale_q(pair: TestingPair, lam, eps) -> ExtRational:
    """``beta(eps|lam*Q||W)``, which equals ``lam*beta(eps|Q||W)``."""
    lam = Fraction(lam)
    if lam <= 0:
        raise NonpositiveLambda(f"lambda must be positive, got {lam}")
    return beta_dual(scale_pair(pair, q_factor=lam), eps)


def _greedy_beta(v: List[float], q: List[float], eps: float) -> float:
    # fractional knapsack: reject where q/v is largest until the V-budget eps is spent
    order = sorted(range(len(v)), key=lambda i: q[i] / v[i], reverse=True)
    budget = eps
    caught = []
    for i in order:
        if budget <= 0:
            break
        take = min(1.0, budget / v[i])
        caught.append(take * q[i])
        budget -= take * v[i]
    return math.fsum(q) - math.fsum(caught)


def _link_direction(ratios: Mapping[Fraction, List[float]], rel_tol: float = 1e-9) -> int:
    reps = []
    for key in sorted(ratios):
        vals = ratios[key]
        lo, hi = min(vals), max(vals)
        if hi - lo > rel_tol * hi:
            raise NotMonotoneLink(f"dV/dQ not constant on the level set dW/dQ={key}")
        reps.append(math.fsum(vals) / len(vals))
    if all(a < b for a, b in zip(reps, reps[1:])):
        return 1
    if all(a > b for a, b in zip(reps, reps[1:])):
        return -1
    raise NotMonotoneLink("dV/dQ is not a monotone function of dW/dQ")


def change_of_measure(pair: TestingPair, V: Union[DiscreteMeasure, TiltedFamily], eps) -> Tuple[float, float]:
    """Transfer the optimal test at level ``eps`` to a measure ``V`` equivalent to ``W~``.

    Returns ``(eps_V, check)`` where ``eps_V`` is the V-probability of
    rejection.  If ``dV/dQ`` increases with ``dW/dQ`` the check is
    ``beta(eps_V|Q||V)``; if it decreases it is
    ``||Q~|| - beta(1 - eps_V|Q||V)``.  Either way it equals
    ``beta(eps|Q||W)``.  V-side arithmetic is binary64.
    """
    eps = Fraction(eps)
    if eps < 0:
        raise NegativeEpsilon(f"eps must be non-negative, got {eps}")
    vd = V.as_dict()
    index = {a: i for i, a in enumerate(pair.atoms)}
    common = {a for a, wa, qa in zip(pair.atoms, pair.w, pair.q) if wa > 0 and qa > 0}
    vsupp = {a for a, x in vd.items() if x > 0}
    if vsupp != common:
        raise NotEquivalent("support of V differs from the support of W~")
    atoms = [a for a in pair.atoms if a in common]
    ratios: dict = {}
    for a in atoms:
        i = index[a]
        ratios.setdefault(pair.lr_wq[i], []).append(float(vd[a]) / float(pair.q[i]))
    direction = _link_direction(ratios)

    v = [float(vd[a]) for a in atoms]
    q = [float(pair.q[index[a]]) for a in atoms]
    w_ac = pair.spectrum.w_ac
    if eps == 0:
        eps_v = 0.0
    elif eps >= w_ac:
        eps_v = math.fsum(v)
    else:
        test = olr_test(pair, eps)
        t = dict(zip(test.atoms, test.values))
        eps_v = math.fsum(float(t[a]) * x for a, x in zip(atoms, v))
    if direction > 0:
        return eps_v, _greedy_beta(v, q, eps_v)
    return eps_v, math.fsum(q) - _greedy_beta(v, q, math.fsum(v) - eps_v)


def quantile_bounds(pair: TestingPair, eps, delta) -> Tuple[Fraction, Fraction]:
    """``(lower, upper)`` around ``beta(eps|Q||W)`` from the quantiles.

    ``upper = (||W~|| - eps)^+ / F+(eps)`` and
    ``lower = delta*gamma + beta(eps + delta)`` with ``gamma = 1/F+(eps + delta)``,
    the tangent line at ``eps + delta`` read back at ``eps``.
    """
    eps = Fraction(eps)
    delta = Fraction(delta)
    w_ac = pair.spectrum.w_ac
    if eps <= 0:
        raise EpsilonOutOfRange(f"eps must be positive, got {eps}")
    if not 0 < delta < w_ac - eps:
        raise DeltaOutOfRange(f"delta must lie in (0, {w_ac - eps}), got {delta}")
    upper = max(w_ac - eps, ZERO) / quantile_usc(pair, eps)
    gamma = reciprocal(quantile_usc(pair, eps + delta))
    lower = delta * gamma + beta_dual(pair, eps + delta)
    return lower, upper


def curve_rows(pair: TestingPair, eps_values: Iterable) -> List[Tuple[Fraction, ExtRational, ExtRational, ExtRational]]:
    """Rows ``(eps, beta, dleft, dright)``."""
    rows = []
    for e in eps_values:
        e = Fraction(e)
        left, right = beta_derivatives(pair, e)
        rows.append((e, beta_dual(pair, e), left, right))
    return rows
