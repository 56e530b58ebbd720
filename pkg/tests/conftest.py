from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from htspectrum.measures import _pair_from_aligned, geometric_pair, pair_from_weights

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


@pytest.fixture
def pair_a():
    return pair_from_weights(["a", "b"], ["1/2", "1/2"], ["1/4", "3/4"])


@pytest.fixture
def geometric():
    return geometric_pair()


weights = st.one_of(
    st.just(Fraction(0)),
    st.integers(1, 16).flatmap(lambda d: st.integers(1, d).map(lambda n: Fraction(n, d))),
)


@st.composite
def pairs(draw, max_atoms=12, nonsingular=False):
    n = draw(st.integers(1, max_atoms))
    w = draw(st.lists(weights, min_size=n, max_size=n))
    q = draw(st.lists(weights, min_size=n, max_size=n))
    pair = _pair_from_aligned(range(n), w, q)
    if nonsingular and pair.w_ac_mass == 0:
        # force a shared atom
        pair = _pair_from_aligned(list(range(n)) + ["shared"], w + [Fraction(1, 3)], q + [Fraction(1, 5)])
    return pair


def fractions_in(lo, hi, max_den=64):
    return st.integers(1, max_den).flatmap(
        lambda d: st.integers(0, d).map(lambda k: Fraction(lo) + (Fraction(hi) - Fraction(lo)) * Fraction(k, d))
    )
