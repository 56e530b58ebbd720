import math
from fractions import Fraction

import pytest
from hypothesis import given

from htspectrum.beta import beta_dual
from htspectrum.errors import NoConvergence, TooManyAtoms
from htspectrum.extended import INF
from htspectrum.measures import pair_from_weights
from htspectrum.normal_approx import SQRT_2PI, gauss_pdf, gauss_q, gl_beta
from htspectrum.oracle import (
    beta_envelope,
    envelope_vertices,
    enumerate_deterministic,
    lower_hull,
    npd_deterministic,
    quadrature,
)

from conftest import fractions_in, pairs

F = Fraction


def test_enumeration_of_pair_a(pair_a):
    pts = {(p.eps, p.beta) for p in enumerate_deterministic(pair_a)}
    assert pts == {(0, 1), (F(1, 2), F(1, 4)), (F(1, 2), F(3, 4)), (1, 0)}


def test_single_atom_and_cap():
    one = pair_from_weights(["x"], [1], ["1/2"])
    assert len(enumerate_deterministic(one)) == 2
    big = pair_from_weights([str(i) for i in range(21)], [1] * 21, [1] * 21)
    with pytest.raises(TooManyAtoms):
        enumerate_deterministic(big)
    with pytest.raises(TooManyAtoms):
        beta_envelope(big, F(1, 2))


def test_deterministic_beta_of_pair_a(pair_a):
    assert npd_deterministic(pair_a, F(1, 5)) == 1
    assert npd_deterministic(pair_a, F(1, 2)) == F(1, 4)
    assert npd_deterministic(pair_a, 1) == 0
    assert npd_deterministic(pair_a, -1) is INF


def test_envelope_examples(pair_a):
    assert beta_envelope(pair_a, F(1, 5)) == F(7, 10)
    assert beta_envelope(pair_a, F(1, 2)) == F(1, 4)
    singular = pair_from_weights(["x", "y"], [1, 0], [0, 1])
    assert all(beta_envelope(singular, F(k, 4)) == 0 for k in range(6))


def test_lower_hull_drops_collinear_points():
    assert lower_hull([(0, 4), (1, 2), (2, 0), (1, 5)]) == [(0, 4), (2, 0)]


@given(pairs(max_atoms=10), fractions_in(0, 3))
def test_envelope_matches_dual_and_lies_below_deterministic(pair, eps):
    env = beta_envelope(pair, eps)
    assert env == beta_dual(pair, eps)
    assert npd_deterministic(pair, eps) >= env


@given(pairs(max_atoms=10))
def test_vertex_slopes_are_reciprocal_ratios(pair):
    values = set(pair.spectrum.values)
    vs = envelope_vertices(pair)
    for (x0, y0), (x1, y1) in zip(vs, vs[1:]):
        assert (x1 - x0) / (y0 - y1) in values


def test_quadrature_basics():
    assert math.isclose(quadrature(lambda t: t, 0, 1), 0.5, abs_tol=1e-12)
    assert math.isclose(quadrature(gauss_pdf, 0, math.inf), 0.5, abs_tol=1e-10)
    assert math.isclose(quadrature(math.exp, 0, 1), math.e - 1, abs_tol=1e-12)
    assert math.isclose(quadrature(lambda t: abs(t - 0.3), 0, 1, points=[0.3]), 0.29, abs_tol=1e-12)
    assert quadrature(math.sin, 2, 2) == 0


def test_quadrature_budget():
    with pytest.raises(NoConvergence):
        quadrature(lambda t: math.sin(1 / t) / t, 1e-9, 1, tol=1e-14, budget=50)


def test_gauss_lebesgue_ci_integral():
    # int_0^inf (P[1/pdf(X) > t] - eps)^+ dt; the integrand is below eps past the root
    eps = 0.1

    def level(t):
        if t < SQRT_2PI:
            return 1.0
        return 2 * gauss_q(math.sqrt(2 * math.log(t / SQRT_2PI)))

    root = SQRT_2PI * math.exp(gl_beta(eps) ** 2 / 8)
    value = quadrature(lambda t: max(level(t) - eps, 0.0), 0, root, tol=1e-11, points=[SQRT_2PI])
    assert abs(value - gl_beta(eps)) <= 1e-6
