import json
import math
from fractions import Fraction

import pytest
from hypothesis import given

from htspectrum.errors import CapExceeded, DuplicateAtom, EmptyCommonSupport, LengthMismatch, NegativeWeight, SchemaError
from htspectrum.extended import INF
from htspectrum.measures import (
    geometric_truncated,
    load_pair,
    lumped_power,
    make_measure,
    make_pair,
    pair_from_weights,
    pair_to_json,
    parse_weight,
    product_pair,
    swap,
    tilt,
)
from htspectrum.beta import beta_dual
from htspectrum.spectrum import entropy_spectrum

from conftest import pairs


def test_parse_weight_forms():
    assert parse_weight("3/8") == Fraction(3, 8)
    assert parse_weight("0.1") == Fraction(1, 10)
    assert parse_weight(0.5) == Fraction(1, 2)
    assert parse_weight(2) == 2
    with pytest.raises(NegativeWeight):
        parse_weight("-1/2")
    for bad in (float("nan"), float("inf"), True, "abc", [1]):
        with pytest.raises(SchemaError):
            parse_weight(bad)


def test_measure_validation():
    with pytest.raises(LengthMismatch):
        make_measure(["a"], [1, 2])
    with pytest.raises(DuplicateAtom):
        make_measure(["a", "a"], [1, 2])


def test_pair_alignment_and_ratio(pair_a):
    assert pair_a.lr_wq == (Fraction(2), Fraction(2, 3))
    W = make_measure(["x", "y"], ["1/2", "1/2"])
    Q = make_measure(["y", "z"], ["1/3", "1/3"])
    p = make_pair(W, Q)
    assert p.atoms == ("x", "y", "z")
    assert p.lr_wq[0] is INF and p.lr_wq[2] == 0
    assert p.w_ac_mass == Fraction(1, 2) and p.q_ac_mass == Fraction(1, 3)


def test_zero_atoms_dropped():
    p = pair_from_weights(["a", "b"], [0, 1], [0, 1])
    assert p.atoms == ("b",)


def test_swap_twice_is_identity(pair_a):
    assert swap(swap(pair_a)) == pair_a
    assert pair_a.swapped.w == pair_a.q


def test_product_labels_and_cap(pair_a):
    p = product_pair([pair_a, pair_a, pair_a])
    assert len(p) == 8 and p.atoms[0] == ("a", "a", "a")
    assert p.w_mass == 1
    with pytest.raises(CapExceeded):
        product_pair([pair_a] * 5, atom_cap=16)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_lumped_power_preserves_beta(pair_a, n):
    full = product_pair([pair_a] * n)
    lumped = lumped_power(pair_a, n)
    assert len(lumped) == n + 1
    for k in range(11):
        eps = Fraction(k, 10)
        assert beta_dual(full, eps) == beta_dual(lumped, eps)
    assert entropy_spectrum(full, Fraction(3, 2)) == entropy_spectrum(lumped, Fraction(3, 2))


def test_tilt_is_probability_and_interpolates(pair_a):
    half = tilt(pair_a, 0.5)
    assert math.isclose(sum(half.v), 1.0)
    # v proportional to sqrt(w q)
    assert math.isclose(half.v[0] / half.v[1], math.sqrt(1 / 8) / math.sqrt(3 / 8))
    one = tilt(pair_a, 1.0)
    assert all(math.isclose(a, b) for a, b in zip(one.v, (0.5, 0.5)))
    assert math.isclose(one.kl_v_w, 0.0, abs_tol=1e-15)
    # closed-form divergences at rho = 1: KL(W||Q)
    assert math.isclose(one.kl_v_q, 0.5 * math.log(2) + 0.5 * math.log(2 / 3))


def test_tilt_constant_ratio_has_zero_spread():
    p = pair_from_weights(["a", "b", "c"], ["1/6", "1/3", "1/2"], ["1/12", "1/6", "1/4"])
    fam = tilt(p, 0.3)
    assert fam.sigma == 0.0 and fam.t3 == 0.0 and fam.delta == 0.0


def test_tilt_singular_pair():
    p = pair_from_weights(["a", "b"], [1, 0], [0, 1])
    with pytest.raises(EmptyCommonSupport):
        tilt(p, 0.5)


def test_geometric_truncation_converges_to_lumped(geometric):
    trunc = geometric_truncated(30)
    for k in (1, 3, 5, 9):
        eps = Fraction(k, 10)
        assert abs(beta_dual(trunc, eps) - beta_dual(geometric, eps)) < Fraction(1, 10**8)


def test_json_round_trip(tmp_path, pair_a):
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(pair_to_json(pair_a)))
    assert load_pair(path) == pair_a


def test_json_decimals_stay_exact(tmp_path):
    path = tmp_path / "pair.json"
    path.write_text('{"atoms": ["a", "b"], "w": [0.1, 0.9], "q": ["1/3", 0.5]}')
    p = load_pair(path)
    assert p.w == (Fraction(1, 10), Fraction(9, 10))


@pytest.mark.parametrize(
    "text",
    [
        '{"atoms": ["a"], "w": [1]}',
        '{"atoms": ["a"], "w": [NaN], "q": [1]}',
        '{"atoms": [1], "w": [1], "q": [1]}',
        '{"atoms": ["a"], "w": [1], "q": [1]',
        "[1, 2]",
    ],
)
def test_json_schema_errors(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(SchemaError):
        load_pair(path)


@given(pairs())
def test_ac_masses_bounded_by_totals(pair):
    assert pair.w_ac_mass <= pair.w_mass
    assert pair.q_ac_mass <= pair.q_mass
    assert (pair.w_ac_mass == 0) == (pair.q_ac_mass == 0)
