"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also written to the terminal when output is captured.
"""
import contextlib
import math
import random
import time
from fractions import Fraction

import pytest

from htspectrum import beta as B
from htspectrum import normal_approx as N
from htspectrum import spectrum as S
from htspectrum.extended import NEG_INF, neg_reciprocal
from htspectrum.measures import geometric_pair, lumped_power, pair_from_weights, product_pair, tilt
from htspectrum.oracle import beta_envelope
from htspectrum.verify import eps_grid, interior_grid, random_binary_letter, random_pair

F = Fraction
N_PAIRS = 1000
SLACK = 1e-12
RHOS = (0.25, 0.5, 0.75, 1.5, 2.0)


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(number, title):
        notes = []
        start = time.perf_counter()
        try:
            yield notes
        except BaseException:
            status = "FAIL"
            raise
        else:
            status = "PASS"
        finally:
            took = time.perf_counter() - start
            extra = f" [{'; '.join(notes)}]" if notes else ""
            with capsys.disabled():
                print(f"\nACCEPTANCE {number} {status}: {title} ({took:.1f}s){extra}")

    return run


@pytest.fixture(scope="module")
def sweep():
    rng = random.Random("acceptance")
    return [random_pair(rng) for _ in range(N_PAIRS)]


def _open(pair, n=99):
    top = pair.spectrum.w_ac
    return [top * i / (n + 1) for i in range(1, n + 1)] if top > 0 else []


@pytest.fixture(scope="module")
def letters():
    rng = random.Random("letters")
    out = []
    while len(out) < 5:
        letter = random_binary_letter(rng)
        if all(letter.w != o.w or letter.q != o.q for o in out):
            out.append(letter)
    return out


def test_1_spectral_identities(criterion, sweep):
    with criterion(1, "dual == ci == si == curve == envelope, exact") as notes:
        start = time.perf_counter()
        cases = 0
        for pair in sweep:
            curve = B.beta_curve(pair)
            for eps in eps_grid(pair.w_mass, 99):
                d = B.beta_dual(pair, eps)
                assert d == B.beta_spectral_ci(pair, eps) == B.beta_spectral_si(pair, eps), (pair, eps)
                assert d == curve(eps) == beta_envelope(pair, eps), (pair, eps)
                cases += 1
        took = time.perf_counter() - start
        notes.append(f"{cases} cases")
        assert took < 60, f"{took:.1f}s exceeds 60s"


def test_2_conjugate_and_inverse(criterion, sweep):
    with criterion(2, "biconjugate recovers beta; inverse round trip, exact") as notes:
        cases = 0
        for pair in sweep:
            for eps in eps_grid(pair.w_mass, 99):
                assert B.beta_biconjugate(pair, eps) == B.beta_dual(pair, eps), (pair, eps)
                cases += 1
            for eps in _open(pair):
                assert B.beta_inverse(pair, B.beta_dual(pair, eps)) == eps, (pair, eps)
                cases += 1
        notes.append(f"{cases} cases; round trip on the open range (0, ||W~||)")


def test_3_derivatives_and_quantiles(criterion, sweep):
    with criterion(3, "slopes -1/F+ and knot subdifferentials [-1/F-, -1/F+], exact") as notes:
        cases = 0
        for pair in sweep:
            curve = B.beta_curve(pair)
            knots = curve.knot_eps
            for j, s in enumerate(curve.slopes):
                mid = (knots[j] + knots[j + 1]) / 2
                assert s == neg_reciprocal(S.quantile_usc(pair, mid))
                cases += 1
            for e in knots:
                expect = (
                    NEG_INF if e == 0 else neg_reciprocal(S.quantile_lsc(pair, e)),
                    neg_reciprocal(S.quantile_usc(pair, e)),
                )
                assert curve.derivatives(e) == B.beta_derivatives(pair, e) == expect
                cases += 1
            for eps in eps_grid(pair.w_mass, 99):
                assert curve.derivatives(eps) == B.beta_derivatives(pair, eps)
                cases += 1
        notes.append(f"{cases} cases")


def test_4_gauss_lebesgue(criterion):
    with criterion(4, "Gaussian-Lebesgue closed form vs quadrature dual") as notes:
        worst = 0.0
        for eps in (0.01, 0.05, 0.1, 0.25, 0.5):
            err = abs(N.gl_dual(eps) - 2 * N.gauss_q_inv(eps / 2))
            worst = max(worst, err)
            assert err <= 1e-6, eps
            assert N.gl_beta(eps) == 2 * N.gauss_q_inv(eps / 2)
        h = 1e-6
        dworst = 0.0
        for eps in (0.01, 0.05, 0.1, 0.25, 0.5):
            slope = (N.gl_beta(eps + h) - N.gl_beta(eps - h)) / (2 * h)
            err = abs(slope + 1 / N.gl_quantile(eps))
            dworst = max(dworst, err)
            assert err <= 1e-5, eps
        notes.append(f"max dual error {worst:.2e}, max derivative error {dworst:.2e}")


def test_5_geometric(criterion):
    with criterion(5, "geometric model beta = ((1-eps)/2)^+ exact"):
        pair = geometric_pair()
        curve = B.beta_curve(pair)
        for eps in eps_grid(F(1), 99) + [F(11, 10), F(3, 2)]:
            expect = max((1 - eps) / 2, F(0))
            assert B.beta_dual(pair, eps) == expect
            assert curve(eps) == expect == beta_envelope(pair, eps)
            if eps <= 1:
                assert B.beta_spectral_ci(pair, eps) == B.beta_spectral_si(pair, eps) == expect


def test_6_berry_esseen(criterion, letters):
    with criterion(6, "Berry-Esseen sandwich and Strassen window, n = 1..10") as notes:
        start = time.perf_counter()
        bounds = strassen = 0
        worst = math.inf
        for letter in letters:
            for n in range(1, 11):
                prod = product_pair([letter] * n)
                st = N.be_stats([letter] * n)
                for eps in interior_grid(0.0, 1.0):
                    lower, upper = N.be_bounds(st, eps)
                    if lower is None and upper is None:
                        continue
                    b = float(B.beta_dual(prod, F(eps)))
                    if lower is not None:
                        worst = min(worst, b - lower)
                        assert b >= lower - SLACK, (n, eps)
                    if upper is not None:
                        worst = min(worst, upper - b)
                        assert b <= upper + SLACK, (n, eps)
                    bounds += 1
                    if st.delta < eps < 1 - st.delta - N.gauss_q(st.sigma):
                        value, cap = N.be_approx(st, eps)
                        cap = min(cap, 700.0)
                        assert value * math.exp(-cap) - SLACK <= b <= value * math.exp(cap) + SLACK
                        strassen += 1
        took = time.perf_counter() - start
        notes.append(f"{bounds} bound cases, min slack {worst:.3g}, {strassen} Strassen cases")
        assert took < 120


def test_7_tilted(criterion, letters):
    with criterion(7, "tilted windows, tilted Strassen, change of measure") as notes:
        windows = strassen = com = 0
        for letter in letters:
            for n in range(1, 11):
                prod = product_pair([letter] * n)
                for rho in RHOS:
                    st = N.tilted_stats([letter] * n, rho)
                    if st.delta < 0.25:
                        for phi in interior_grid(2 * st.delta, 1 - 2 * st.delta, 19):
                            _, low, high = N.tilted_beta_window(st, phi)
                            b = float(B.beta_inverse(prod, F(N.tilted_eps(st, phi))))
                            assert low - SLACK <= b <= high + SLACK, (n, rho, phi)
                            windows += 1
                    if st.delta <= 0.125:
                        strassen += _strassen_cases(st, prod)
                    fam = tilt(prod, rho)
                    for eps in _open(prod, 5):
                        _, check = B.change_of_measure(prod, fam, eps)
                        assert abs(check - float(B.beta_dual(prod, eps))) <= 1e-10, (n, rho, eps)
                        com += 1
        notes.append(f"{windows} window cases, {com} change-of-measure cases")
        notes.append(f"{strassen} tilted Strassen cases with delta <= 1/8 for n <= 10")
        # the iid letters give delta >= omega/sqrt(n), so check long products too
        long_windows = long_strassen = 0
        letter = pair_from_weights(["0", "1"], ["1/2", "1/2"], ["1/3", "2/3"])
        for n in (64, 128):
            prod = lumped_power(letter, n)
            for rho in RHOS:
                st = N.tilted_stats([letter] * n, rho)
                for phi in interior_grid(2 * st.delta, 1 - 2 * st.delta, 19):
                    _, low, high = N.tilted_beta_window(st, phi)
                    b = float(B.beta_inverse(prod, F(N.tilted_eps(st, phi))))
                    assert low - SLACK <= b <= high + SLACK, (n, rho, phi)
                    long_windows += 1
                if st.delta <= 0.125:
                    long_strassen += _strassen_cases(st, prod)
        assert long_strassen > 0
        notes.append(f"long products: {long_windows} window and {long_strassen} Strassen cases")


def _strassen_cases(st, prod):
    lo, hi = N._gamma_bracket(st)
    count = 0
    for gamma in interior_grid(lo, hi, 9):
        res = N.tilted_strassen(st, gamma)
        b = float(B.beta_inverse(prod, F(res.eps)))
        assert res.low - SLACK <= b <= res.high + SLACK, (st.rho, gamma)
        count += 1
    return count


def test_8_mills(criterion):
    with criterion(8, "Mills ratio bound families and R(0)") as notes:
        grid = [-1.3 + (40 + 1.3) * i / 9999 for i in range(10000)]
        prev = math.inf
        for t in grid:
            r = N.mills_ratio(t)
            lo, hi = N.mills_bounds_extended(t)
            assert lo <= r <= hi, t
            if t >= 0:
                lo, hi = N.mills_bounds_positive(t)
                assert lo <= r * (1 + 1e-15) and r <= hi * (1 + 1e-15), t
            assert r < prev, t
            prev = r
        rng = random.Random("mills")
        for _ in range(10000):
            t, d = rng.uniform(-1.3, 20), rng.uniform(0, 5)
            a, b = N.mills_ratio(t), N.mills_ratio(t + d)
            assert a >= b >= a * math.exp(-1.5 * d), (t, d)
        r0 = N.mills_ratio(0.0)
        assert abs(r0 - math.sqrt(math.pi / 2)) <= 1e-14
        assert abs(N.mills_bounds_positive(0.0)[1] - r0) <= 1e-14
        notes.append(
            f"upper bound 2/sqrt(8/pi) is tight at 0; extended upper there is "
            f"{N.mills_bounds_extended(0.0)[1]:.6f}"
        )


def test_9_quantile_bounds(criterion, sweep):
    with criterion(9, "quantile upper and tangent lower bounds bracket beta, exact") as notes:
        rng = random.Random("quantile-bounds")
        cases = 0
        for pair in sweep:
            w_ac = pair.spectrum.w_ac
            for eps in _open(pair):
                b = B.beta_dual(pair, eps)
                for _ in range(3):
                    delta = (w_ac - eps) * F(rng.randint(1, 15), 16)
                    lower, upper = B.quantile_bounds(pair, eps, delta)
                    assert lower <= b <= upper, (pair, eps, delta)
                    cases += 1
        notes.append(f"{cases} cases")
