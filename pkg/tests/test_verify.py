import random
from fractions import Fraction

from htspectrum.verify import CHECKS, eps_grid, format_report, random_binary_letter, random_pair, run_checks


def test_registry_covers_every_module():
    assert {c.module for c in CHECKS} == {"spectrum", "beta", "normal_approx", "oracle"}


def test_small_run_passes():
    results = run_checks(seed=3, n_pairs=4)
    assert all(r.passed for _, r in results), format_report(results)
    assert all(r.cases > 0 for _, r in results)


def test_generators_are_small_rationals():
    rng = random.Random(5)
    for _ in range(50):
        pair = random_pair(rng)
        assert len(pair.atoms) <= 12
        assert all(x.denominator <= 16 for x in pair.w + pair.q)
        letter = random_binary_letter(rng)
        assert sum(letter.w) == 1 and all(q > 0 for q in letter.q)


def test_eps_grid_covers_interval():
    g = eps_grid(Fraction(3, 4), 5)
    assert g[0] == 0 and g[-1] == Fraction(3, 4) and len(g) == 5
