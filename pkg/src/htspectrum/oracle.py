"""Independent ground truth for the exact routines.

Nothing here imports from ``spectrum`` or ``beta``.  Deterministic tests are
enumerated over all subsets with integer arithmetic on a common denominator,
and the randomized optimum is read off the lower convex hull of those points:
at finite support every randomized test is a mixture of deterministic ones,
so the achievable region is exactly that convex hull.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import NoConvergence, TooManyAtoms
from .extended import INF, ExtRational
from .measures import TestingPair

__all__ = [
    "MAX_ENUM_ATOMS",
    "AchievablePoint",
    "enumerate_deterministic",
    "npd_deterministic",
    "lower_hull",
    "envelope_vertices",
    "beta_envelope",
    "quadrature",
]

MAX_ENUM_ATOMS = 20


@dataclass(frozen=True)
class AchievablePoint:
    """Errors of the deterministic test that rejects ``W`` exactly on ``subset``."""

    eps: Fraction
    beta: Fraction
    subset: int


def _integer_weights(pair: TestingPair) -> Tuple[int, List[int], List[int]]:
    n = len(pair.atoms)
    if n > MAX_ENUM_ATOMS:
        raise TooManyAtoms(f"{n} atoms; enumeration is limited to {MAX_ENUM_ATOMS}")
    den = 1
    for x in pair.w + pair.q:
        den = den * x.denominator // math.gcd(den, x.denominator)
    w = [int(x * den) for x in pair.w]
    q = [int(x * den) for x in pair.q]
    return den, w, q


def _subset_sums(weights: Sequence[int]) -> List[int]:
    # sums[mask] built from the mask with its lowest bit cleared
    sums = [0] * (1 << len(weights))
    for mask in range(1, len(sums)):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + weights[low.bit_length() - 1]
    return sums


def _integer_points(pair: TestingPair) -> Tuple[int, List[Tuple[int, int]]]:
    cached = pair._memo.get("oracle_points")
    if cached is None:
        den, w, q = _integer_weights(pair)
        xs = _subset_sums(w)
        qs = _subset_sums(q)
        total_q = sum(q)
        cached = (den, [(x, total_q - y) for x, y in zip(xs, qs)])
        pair._memo["oracle_points"] = cached
    return cached


def enumerate_deterministic(pair: TestingPair) -> List[AchievablePoint]:
    den, pts = _integer_points(pair)
    return [AchievablePoint(Fraction(x, den), Fraction(y, den), m) for m, (x, y) in enumerate(pts)]


def npd_deterministic(pair: TestingPair, eps) -> ExtRational:
    """Least Type-II error over deterministic tests with Type-I error at most ``eps``."""
    den, pts = _integer_points(pair)
    eps = Fraction(eps)
    if eps < 0:
        return INF
    limit = eps * den
    return Fraction(min(y for x, y in pts if x <= limit), den)


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Lower convex hull by the monotone chain, left to right."""
    hull: List[Tuple[int, int]] = []
    for p in sorted(set(points)):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def _envelope(pair: TestingPair) -> Tuple[int, List[Tuple[int, int]]]:
    cached = pair._memo.get("oracle_hull")
    if cached is None:
        den, pts = _integer_points(pair)
        hull = lower_hull(pts)
        # keep the non-increasing part: beyond the lowest vertex the envelope is flat
        k = min(range(len(hull)), key=lambda i: (hull[i][1], hull[i][0]))
        cached = (den, hull[: k + 1])
        pair._memo["oracle_hull"] = cached
    return cached


def envelope_vertices(pair: TestingPair) -> List[Tuple[Fraction, Fraction]]:
    den, hull = _envelope(pair)
    return [(Fraction(x, den), Fraction(y, den)) for x, y in hull]


def beta_envelope(pair: TestingPair, eps) -> ExtRational:
    """Lower convex envelope of the deterministic points, evaluated at ``eps``."""
    eps = Fraction(eps)
    if eps < 0:
        return INF
    den, hull = _envelope(pair)
    x = eps * den
    if x >= hull[-1][0]:
        return Fraction(hull[-1][1], den)
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        if x <= x1:
            return (y0 + (y1 - y0) * (x - x0) / (x1 - x0)) / den
    raise AssertionError("unreachable")


# -- quadrature ----------------------------------------------------------------

_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _gk15(f: Callable[[float], float], a: float, b: float) -> Tuple[float, float]:
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    kron = fc * _WGK[7]
    gauss = fc * _WG[3]
    for j in range(7):
        dx = h * _XGK[j]
        s = f(c - dx) + f(c + dx)
        kron += _WGK[j] * s
        if j % 2 == 1:
            gauss += _WG[j // 2] * s
    return kron * h, abs((kron - gauss) * h)


def _adaptive(f, a: float, b: float, tol: float, budget: int) -> Tuple[float, int]:
    value, err = _gk15(f, a, b)
    stack = [(a, b, value, err)]
    total = 0.0
    parts = []
    used = 1
    while stack:
        lo, hi, v, e = stack.pop()
        width = hi - lo
        if e <= tol * width / (b - a) or width < 1e-14 * max(1.0, abs(lo)):
            parts.append(v)
            continue
        used += 2
        if used > budget:
            raise NoConvergence(f"quadrature on [{a}, {b}] exceeded {budget} panels")
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        stack.append((lo, mid, v1, e1))
        stack.append((mid, hi, v2, e2))
    total = math.fsum(parts)
    return total, used


def quadrature(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    points: Optional[Sequence[float]] = None,
    budget: int = 20000,
) -> float:
    """Adaptive Gauss-Kronrod (7/15) integral of ``f`` over ``[a, b]``.

    ``b`` may be ``math.inf``; the tail is mapped onto ``[0, 1)`` by
    ``t -> a + t/(1 - t)``.  ``points`` are forced breakpoints where ``f``
    is not smooth.
    """
    if b < a:
        return -quadrature(f, b, a, tol, points, budget)
    if a == b:
        return 0.0
    if math.isinf(b):
        def g(t: float) -> float:
            s = 1.0 - t
            return f(a + t / s) / (s * s)

        cuts = sorted((p - a) / (1.0 + p - a) for p in (points or ()) if a < p)
        return quadrature(g, 0.0, 1.0, tol, cuts, budget)
    edges = [a] + sorted(p for p in (points or ()) if a < p < b) + [b]
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        part_tol = tol * (hi - lo) / (b - a)
        value, _ = _adaptive(f, lo, hi, part_tol, budget)
        total += value
    return total
