"""Random instances and the identity checks run by ``htspectrum verify``.

Every check draws its instances from a ``random.Random`` seeded by the
caller, so a report is a pure function of ``(seed, n_pairs)``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, List, Sequence, Tuple

from . import beta as B
from . import normal_approx as N
from . import oracle as O
from . import spectrum as S
from .errors import HTSpectrumError
from .extended import INF, NEG_INF, Infinite, reciprocal
from .measures import TestingPair, _pair_from_aligned, pair_from_weights, product_pair, scale_pair, tilt

__all__ = [
    "random_weight",
    "random_pair",
    "random_pair_on",
    "random_binary_letter",
    "eps_grid",
    "CheckResult",
    "Check",
    "CHECKS",
    "run_checks",
    "format_report",
]

ZERO = Fraction(0)
SLACK = 1e-12


def random_weight(rng: random.Random, max_den: int = 16, p_zero: float = 0.15) -> Fraction:
    if rng.random() < p_zero:
        return ZERO
    d = rng.randint(1, max_den)
    return Fraction(rng.randint(1, d), d)


def random_pair_on(rng: random.Random, n: int, max_den: int = 16) -> TestingPair:
    """Random rational ``(W, Q)`` on atoms ``0..n-1`` (atoms with both weights 0 drop out)."""
    return _pair_from_aligned(
        range(n),
        [random_weight(rng, max_den) for _ in range(n)],
        [random_weight(rng, max_den) for _ in range(n)],
    )


def random_pair(rng: random.Random, max_atoms: int = 12, max_den: int = 16) -> TestingPair:
    while True:
        pair = random_pair_on(rng, rng.randint(1, max_atoms), max_den)
        if len(pair):
            return pair


def random_binary_letter(rng: random.Random, max_den: int = 16) -> TestingPair:
    """Probability ``W`` and ``Q`` on two atoms, ``W << Q``, with distinct ratios."""
    while True:
        d = rng.randint(2, max_den)
        e = rng.randint(2, max_den)
        w = Fraction(rng.randint(1, d - 1), d)
        q = Fraction(rng.randint(1, e - 1), e)
        if w != q:
            return pair_from_weights(["0", "1"], [w, 1 - w], [q, 1 - q])


def eps_grid(top: Fraction, n: int = 99) -> List[Fraction]:
    """``n`` equally spaced rationals covering ``[0, top]``."""
    return [top * i / (n - 1) for i in range(n)]


def interior_grid(lo: float, hi: float, n: int = 99) -> List[float]:
    return [lo + (hi - lo) * (i + 1) / (n + 1) for i in range(n)]


# -- result plumbing -------------------------------------------------------------


@dataclass
class CheckResult:
    cases: int = 0
    failures: int = 0
    first_failure: str = ""

    def record(self, ok: bool, detail: Callable[[], str] = lambda: "") -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if not self.first_failure:
                self.first_failure = detail()

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    run: Callable[[random.Random, int], CheckResult]


def _pairs(rng: random.Random, n_pairs: int) -> Iterator[TestingPair]:
    for _ in range(n_pairs):
        yield random_pair(rng)


# -- spectrum ----------------------------------------------------------------------


def _spectrum_sandwich(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        for eps in eps_grid(pair.w_mass * Fraction(6, 5), 25):
            d = Fraction(rng.randint(1, 16), 64)
            a, b, c = S.quantile_lsc(pair, eps), S.quantile_usc(pair, eps), S.quantile_lsc(pair, eps + d)
            res.record(a <= b <= c, lambda: f"eps={eps}: {a}, {b}, {c}")
    return res


def _spectrum_flat_cdf(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        for eps, lo, hi in S.plateaus(pair):
            start = Fraction(-1) if lo is NEG_INF else lo
            stop = start + 10 if hi is INF else hi
            for g in (start, (start + stop) / 2):
                res.record(S.lr_cdf(pair, g) == eps, lambda: f"F({g}) != {eps}")
    return res


def _spectrum_bracketing(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        sp = pair.spectrum
        for eps in eps_grid(sp.w_ac, 25):
            lsc = S.quantile_lsc(pair, eps)
            usc = S.quantile_usc(pair, eps)
            below_lsc = sp.w_ac if lsc is INF else (ZERO if lsc is NEG_INF else S.lr_cdf(pair, lsc))
            strictly_below = sum((m for v, m in zip(sp.values, sp.w_mass) if v < usc), ZERO)
            res.record(below_lsc >= eps and strictly_below <= eps, lambda: f"eps={eps}")
    return res


def _spectrum_scaling(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        lam = Fraction(rng.randint(1, 16), rng.randint(1, 16))
        scaled = scale_pair(pair, q_factor=lam)
        for eps in eps_grid(pair.spectrum.w_ac, 15):
            for f in (S.quantile_lsc, S.quantile_usc):
                a, b = f(scaled, eps), f(pair, eps)
                expect = b if isinstance(b, Infinite) else b / lam
                res.record(a == expect, lambda: f"{f.__name__} eps={eps}")
    return res


def _spectrum_monotone_q(rng, n_pairs):
    res = CheckResult()
    for _ in range(n_pairs):
        n = rng.randint(1, 12)
        w = [random_weight(rng) for _ in range(n)]
        q0 = [random_weight(rng) for _ in range(n)]
        q1 = [x + random_weight(rng) for x in q0]
        p0 = _pair_from_aligned(range(n), w, q0)
        p1 = _pair_from_aligned(range(n), w, q1)
        # larger Q-weights can only move W-mass into the absolutely continuous part
        if p0.spectrum.w_ac != p1.spectrum.w_ac:
            continue
        for eps in eps_grid(p0.spectrum.w_ac, 15):
            for f in (S.quantile_lsc, S.quantile_usc):
                res.record(f(p1, eps) <= f(p0, eps), lambda: f"{f.__name__} eps={eps}")
    return res


def _spectrum_h_bound(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        h1 = S.entropy_spectrum(pair, 1)
        for _ in range(10):
            g = Fraction(rng.randint(1, 64), rng.randint(1, 16))
            h = S.entropy_spectrum(pair, g)
            res.record(g * h1 / max(1, g) <= h <= g * h1 / min(1, g), lambda: f"gamma={g}")
    return res


def _spectrum_concavity(rng, n_pairs):
    res = CheckResult()
    for _ in range(n_pairs):
        n = rng.randint(1, 12)
        w0, q0, w1, q1 = ([random_weight(rng) for _ in range(n)] for _ in range(4))
        g0 = Fraction(rng.randint(1, 32), rng.randint(1, 8))
        g1 = Fraction(rng.randint(1, 32), rng.randint(1, 8))
        a = Fraction(rng.randint(0, 8), 8)
        ga = a * g1 + (1 - a) * g0
        wa = [a * x + (1 - a) * y for x, y in zip(w1, w0)]
        qa = [(a * g1 * x + (1 - a) * g0 * y) / ga for x, y in zip(q1, q0)]
        h1 = S.entropy_spectrum(_pair_from_aligned(range(n), w1, q1), g1)
        h0 = S.entropy_spectrum(_pair_from_aligned(range(n), w0, q0), g0)
        hm = S.entropy_spectrum(_pair_from_aligned(range(n), wa, qa), ga)
        res.record(a * h1 + (1 - a) * h0 <= hm, lambda: f"alpha={a}")
    return res


def _spectrum_h_integral(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        g = Fraction(rng.randint(0, 64), rng.randint(1, 16))
        h = S.entropy_spectrum(pair, g)
        ok = h == S.entropy_spectrum_integral(pair, g) == S.entropy_spectrum_split(pair, g)
        res.record(ok, lambda: f"gamma={g}")
    return res


# -- beta ----------------------------------------------------------------------------


def _beta_forms(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        curve = B.beta_curve(pair)
        for eps in eps_grid(pair.w_mass, 99):
            vals = (B.beta_dual(pair, eps), B.beta_spectral_ci(pair, eps), B.beta_spectral_si(pair, eps), curve(eps))
            res.record(len(set(vals)) == 1, lambda: f"eps={eps}: {vals}")
    return res


def _beta_oracle(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        for eps in eps_grid(pair.w_mass, 99):
            res.record(B.beta_dual(pair, eps) == O.beta_envelope(pair, eps), lambda: f"eps={eps}")
    return res


def _open_grid(pair: TestingPair, n: int = 99) -> List[Fraction]:
    top = pair.spectrum.w_ac
    if top == 0:
        return []
    return [top * i / (n + 1) for i in range(1, n + 1)]


def _beta_biconjugate(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        curve = B.beta_curve(pair)
        for eps in _open_grid(pair):
            b = B.beta_dual(pair, eps)
            res.record(B.beta_biconjugate(pair, eps) == b, lambda: f"eps={eps}")
        for lam in (Fraction(-rng.randint(0, 64), rng.randint(1, 16)) for _ in range(10)):
            res.record(B.beta_conjugate(pair, lam) == B.curve_conjugate(curve, lam), lambda: f"lambda={lam}")
    return res


def _beta_round_trip(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        for eps in _open_grid(pair):
            res.record(B.beta_inverse(pair, B.beta_dual(pair, eps)) == eps, lambda: f"eps={eps}")
    return res


def _beta_derivative_link(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        curve = B.beta_curve(pair)
        knots = curve.knot_eps
        for j, s in enumerate(curve.slopes):
            mid = (knots[j] + knots[j + 1]) / 2
            res.record(s == -reciprocal(S.quantile_usc(pair, mid)), lambda: f"segment {j}")
        for e in knots[1:]:
            res.record(curve.derivatives(e) == B.beta_derivatives(pair, e), lambda: f"knot {e}")
    return res


def _beta_gamma_bracket(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        for eps in _open_grid(pair, 25):
            lo = reciprocal(S.quantile_usc(pair, eps))
            hi = reciprocal(S.quantile_lsc(pair, eps))
            h = pair.swapped
            target = B.beta_dual(pair, eps)
            for g in (lo, (lo + hi) / 2, hi):
                res.record(S.entropy_spectrum(h, g) - g * eps == target, lambda: f"eps={eps} gamma={g}")
            test = B.olr_test(pair, eps, hi)
            res.record(test.typeI == eps and test.typeII == target, lambda: f"olr eps={eps}")
    return res


def _beta_dominance(rng, n_pairs):
    res = CheckResult()
    for _ in range(n_pairs):
        n = rng.randint(1, 12)
        w = [random_weight(rng) for _ in range(n)]
        q1 = [random_weight(rng) for _ in range(n)]
        q0 = [x * Fraction(rng.randint(0, 4), 4) for x in q1]
        p0 = _pair_from_aligned(range(n), w, q0)
        p1 = _pair_from_aligned(range(n), w, q1)
        for eps in eps_grid(sum(w, ZERO), 25):
            res.record(B.beta_dual(p0, eps) <= B.beta_dual(p1, eps), lambda: f"eps={eps}")
    return res


def _beta_quantile_bounds(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        w_ac = pair.spectrum.w_ac
        for eps in _open_grid(pair, 25):
            delta = (w_ac - eps) * Fraction(rng.randint(1, 15), 16)
            lower, upper = B.quantile_bounds(pair, eps, delta)
            res.record(lower <= B.beta_dual(pair, eps) <= upper, lambda: f"eps={eps} delta={delta}")
    return res


# -- normal_approx -----------------------------------------------------------------


def _mills_brackets(rng, n_pairs):
    res = CheckResult()
    grid = [-1.3 + (40 + 1.3) * i / 9999 for i in range(10000)]
    prev = math.inf
    for t in grid:
        r = N.mills_ratio(t)
        lo, hi = N.mills_bounds_extended(t)
        res.record(lo <= r <= hi, lambda: f"extended tau={t}")
        if t >= 0:
            lo, hi = N.mills_bounds_positive(t)
            res.record(lo <= r * (1 + 1e-15) and r <= hi * (1 + 1e-15), lambda: f"positive tau={t}")
        res.record(r < prev, lambda: f"monotone tau={t}")
        prev = r
    for _ in range(200):
        t = rng.uniform(-1.3, 20)
        d = rng.uniform(0, 5)
        a, b = N.mills_ratio(t), N.mills_ratio(t + d)
        res.record(a >= b >= a * math.exp(-1.5 * d), lambda: f"multiplicative tau={t} delta={d}")
    return res


def _mills_extended_negative(rng, n_pairs):
    res = CheckResult()
    for i in range(1, 1001):
        t = -1.3 * i / 1001
        lo, hi = N.mills_bounds_extended(t)
        res.record(lo <= N.mills_ratio(t) <= hi, lambda: f"tau={t}")
    return res


def _q_inverse(rng, n_pairs):
    res = CheckResult()
    for i in range(1601):
        x = -8 + 16 * i / 1600
        p = N.gauss_q(x)
        # one ulp of p moves the inverse by ulp/pdf(x): that much error is forced by rounding p
        forced = 2.0 * math.ulp(p) / N.gauss_pdf(x)
        res.record(abs(N.gauss_q_inv(p) - x) <= 1e-12 * max(1.0, abs(x)) + forced, lambda: f"x={x}")
    for _ in range(200):
        p = rng.uniform(1e-12, 1 - 1e-12)
        res.record(abs(N.gauss_q(N.gauss_q_inv(p)) - p) <= 1e-14 * p + 1e-17, lambda: f"p={p}")
    return res


def _be_products(rng, n_letters: int, n_max: int) -> Iterator[Tuple[int, TestingPair, TestingPair]]:
    letters = [random_binary_letter(rng) for _ in range(n_letters)]
    for letter in letters:
        for n in range(1, n_max + 1):
            yield n, letter, product_pair([letter] * n)


def _be_sandwich(rng, n_pairs):
    res = CheckResult()
    for n, letter, prod in _be_products(rng, 5, 10):
        st = N.be_stats([letter] * n)
        for eps in interior_grid(0.0, 1.0):
            lower, upper = N.be_bounds(st, eps)
            if lower is None and upper is None:
                continue
            b = float(B.beta_dual(prod, Fraction(eps)))
            ok = (lower is None or b >= lower - SLACK) and (upper is None or b <= upper + SLACK)
            res.record(ok, lambda: f"n={n} eps={eps}: {lower} {b} {upper}")
            if st.delta < eps < 1 - st.delta - N.gauss_q(st.sigma):
                value, cap = N.be_approx(st, eps)
                cap = min(cap, 700.0)
                ok = value * math.exp(-cap) - SLACK <= b <= value * math.exp(cap) + SLACK
                res.record(ok, lambda: f"strassen n={n} eps={eps}")
    return res


RHOS = (0.25, 0.5, 0.75, 1.5, 2.0)


def _tilted_windows(rng, n_pairs):
    res = CheckResult()
    for n, letter, prod in _be_products(rng, 5, 10):
        for rho in RHOS:
            st = N.tilted_stats([letter] * n, rho)
            if st.delta < 0.25:
                for phi in interior_grid(2 * st.delta, 1 - 2 * st.delta, 19):
                    eps = N.tilted_eps(st, phi)
                    center, low, high = N.tilted_beta_window(st, phi)
                    b = float(B.beta_inverse(prod, Fraction(eps)))
                    res.record(low - SLACK <= b <= high + SLACK, lambda: f"n={n} rho={rho} phi={phi}")
            fam = tilt(prod, rho)
            for eps in _open_grid(prod, 3):
                eps_v, check = B.change_of_measure(prod, fam, eps)
                res.record(abs(check - float(B.beta_dual(prod, eps))) <= 1e-10, lambda: f"lemma n={n} rho={rho}")
    return res


def _gl_derivative(rng, n_pairs):
    res = CheckResult()
    h = 1e-6
    for eps in (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9):
        slope = (N.gl_beta(eps + h) - N.gl_beta(eps - h)) / (2 * h)
        res.record(abs(slope + 1 / N.gl_quantile(eps)) <= 1e-5 * max(1.0, abs(slope)), lambda: f"eps={eps}")
    for eps in (0.01, 0.05, 0.1, 0.25, 0.5):
        res.record(abs(N.gl_dual(eps) - N.gl_beta(eps)) <= 1e-6, lambda: f"dual eps={eps}")
    return res


# -- oracle ------------------------------------------------------------------------


def _oracle_deterministic(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        for eps in eps_grid(pair.w_mass, 25):
            res.record(O.npd_deterministic(pair, eps) >= B.beta_dual(pair, eps), lambda: f"eps={eps}")
    return res


def _oracle_vertices(rng, n_pairs):
    res = CheckResult()
    for pair in _pairs(rng, n_pairs):
        values = set(pair.spectrum.values)
        vs = O.envelope_vertices(pair)
        for (x0, y0), (x1, y1) in zip(vs, vs[1:]):
            res.record((x1 - x0) / (y0 - y1) in values, lambda: f"segment {(x0, y0)}-{(x1, y1)}")
    return res


CHECKS: Tuple[Check, ...] = (
    Check("spectrum", "quantile sandwich F-(e) <= F+(e) <= F-(e+d)", _spectrum_sandwich),
    Check("spectrum", "flat CDF on [F-(e), F+(e))", _spectrum_flat_cdf),
    Check("spectrum", "quantile bracketing", _spectrum_bracketing),
    Check("spectrum", "quantile scaling under Q -> lam*Q", _spectrum_scaling),
    Check("spectrum", "quantiles decrease as Q grows", _spectrum_monotone_q),
    Check("spectrum", "h(gamma) bounded by gamma*h(1)", _spectrum_h_bound),
    Check("spectrum", "h concave in (W, gamma*Q)", _spectrum_concavity),
    Check("spectrum", "h atomwise == split == integral", _spectrum_h_integral),
    Check("beta", "dual == ci == si == curve", _beta_forms),
    Check("beta", "dual == deterministic-test envelope", _beta_oracle),
    Check("beta", "biconjugate recovers beta", _beta_biconjugate),
    Check("beta", "inverse round trip", _beta_round_trip),
    Check("beta", "slopes and subdifferentials from quantiles", _beta_derivative_link),
    Check("beta", "every gamma in the bracket is optimal", _beta_gamma_bracket),
    Check("beta", "smaller Q gives smaller beta", _beta_dominance),
    Check("beta", "quantile bounds sandwich beta", _beta_quantile_bounds),
    Check("normal_approx", "Mills ratio brackets and monotonicity", _mills_brackets),
    Check("normal_approx", "extended Mills bound on (-1.3, 0)", _mills_extended_negative),
    Check("normal_approx", "gauss_q_inv inverts gauss_q", _q_inverse),
    Check("normal_approx", "Berry-Esseen sandwich and Strassen window", _be_sandwich),
    Check("normal_approx", "tilted window and change of measure", _tilted_windows),
    Check("normal_approx", "Gauss-Lebesgue dual and derivative", _gl_derivative),
    Check("oracle", "deterministic beta >= randomized beta", _oracle_deterministic),
    Check("oracle", "envelope slopes are -1/v", _oracle_vertices),
)


def run_checks(seed: int = 0, n_pairs: int = 100, checks: Sequence[Check] = CHECKS) -> List[Tuple[Check, CheckResult]]:
    out = []
    for i, check in enumerate(checks):
        rng = random.Random(f"{seed}:{i}")
        try:
            res = check.run(rng, n_pairs)
        except HTSpectrumError as exc:
            res = CheckResult(1, 1, f"raised {type(exc).__name__}: {exc}")
        out.append((check, res))
    return out


def format_report(results: Sequence[Tuple[Check, CheckResult]]) -> str:
    width = max(len(c.name) for c, _ in results)
    lines = [f"{'module':<14} {'identity':<{width}}  {'cases':>7}  result"]
    for check, res in results:
        status = "PASS" if res.passed else f"FAIL ({res.failures}): {res.first_failure}"
        lines.append(f"{check.module:<14} {check.name:<{width}}  {res.cases:>7}  {status}")
    failed = sum(not r.passed for _, r in results)
    lines.append(f"{len(results) - failed}/{len(results)} identities passed")
    return "\n".join(lines) + "\n"
