"""Finite-support measures, aligned testing pairs, products and tilting.

Weights are exact :class:`fractions.Fraction` values.  A :class:`TestingPair`
holds a null measure ``W`` and an alternative ``Q`` on a shared atom list,
together with the per-atom likelihood ratio ``dW~/dQ`` (``INF`` where
``q == 0 < w``).  Tilted measures leave the rationals and are binary64.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational, Real
from typing import TYPE_CHECKING, Hashable, Iterable, Mapping, Sequence

from .errors import (
    CapExceeded,
    DuplicateAtom,
    EmptyCommonSupport,
    LengthMismatch,
    NegativeWeight,
    SchemaError,
)
from .extended import INF, reciprocal

if TYPE_CHECKING:
    from .spectrum import LikelihoodSpectrum

DEFAULT_OMEGA = 0.5606
DEFAULT_ATOM_CAP = 1 << 20

Atom = Hashable


def parse_weight(value) -> Fraction:
    """Convert a weight given as ``"p/q"``, a decimal string or a number.

    Floats are converted exactly (their binary value).  Negative, NaN and
    infinite inputs are rejected.
    """
    if isinstance(value, bool):
        raise SchemaError(f"boolean is not a weight: {value!r}")
    if isinstance(value, str):
        text = value.strip()
        try:
            f = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"not a rational or decimal weight: {value!r}") from exc
    elif isinstance(value, Rational):
        f = Fraction(value)
    elif isinstance(value, Real):
        x = float(value)
        if not math.isfinite(x):
            raise SchemaError(f"non-finite weight: {value!r}")
        f = Fraction(x)
    else:
        raise SchemaError(f"unsupported weight type: {type(value).__name__}")
    if f < 0:
        raise NegativeWeight(f"negative weight {value!r}")
    return f


@dataclass(frozen=True)
class DiscreteMeasure:
    atoms: tuple
    weights: tuple

    @cached_property
    def total_mass(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def as_dict(self) -> dict:
        return dict(zip(self.atoms, self.weights))

    def __len__(self) -> int:
        return len(self.atoms)


def make_measure(atoms: Sequence[Atom], weights: Sequence) -> DiscreteMeasure:
    if len(atoms) != len(weights):
        raise LengthMismatch(f"{len(atoms)} atoms but {len(weights)} weights")
    seen = set()
    for a in atoms:
        if a in seen:
            raise DuplicateAtom(f"duplicate atom {a!r}")
        seen.add(a)
    return DiscreteMeasure(tuple(atoms), tuple(parse_weight(x) for x in weights))


@dataclass(frozen=True)
class TestingPair:
    """``(W, Q)`` on a shared atom list; atoms with ``w == q == 0`` are absent."""

    __test__ = False  # keep pytest from collecting this class

    atoms: tuple
    w: tuple
    q: tuple
    lr_wq: tuple
    w_ac_mass: Fraction
    q_ac_mass: Fraction
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def w_mass(self) -> Fraction:
        return sum(self.w, Fraction(0))

    @cached_property
    def q_mass(self) -> Fraction:
        return sum(self.q, Fraction(0))

    @cached_property
    def lr_qw(self) -> tuple:
        return tuple(reciprocal(x) for x in self.lr_wq)

    @cached_property
    def spectrum(self) -> "LikelihoodSpectrum":
        from .spectrum import build_spectrum

        return build_spectrum(self)

    @cached_property
    def swapped(self) -> "TestingPair":
        return swap(self)

    @property
    def W(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.atoms, self.w)

    @property
    def Q(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.atoms, self.q)

    def __len__(self) -> int:
        return len(self.atoms)


def _pair_from_aligned(atoms: Iterable, w: Iterable, q: Iterable) -> TestingPair:
    kept_atoms, kept_w, kept_q, lr = [], [], [], []
    w_ac = Fraction(0)
    q_ac = Fraction(0)
    for a, wa, qa in zip(atoms, w, q):
        if wa == 0 and qa == 0:
            continue
        kept_atoms.append(a)
        kept_w.append(wa)
        kept_q.append(qa)
        if qa == 0:
            lr.append(INF)
        else:
            lr.append(wa / qa)
            if wa > 0:
                w_ac += wa
                q_ac += qa
    return TestingPair(tuple(kept_atoms), tuple(kept_w), tuple(kept_q), tuple(lr), w_ac, q_ac)


def make_pair(W: DiscreteMeasure, Q: DiscreteMeasure) -> TestingPair:
    """Align ``W`` and ``Q`` on the union of their atoms (missing weight = 0).

    Atom order: ``W``'s atoms first, then atoms only ``Q`` carries.
    """
    wd = W.as_dict()
    qd = Q.as_dict()
    atoms = list(W.atoms) + [a for a in Q.atoms if a not in wd]
    zero = Fraction(0)
    return _pair_from_aligned(atoms, (wd.get(a, zero) for a in atoms), (qd.get(a, zero) for a in atoms))


def pair_from_weights(atoms: Sequence[Atom], w: Sequence, q: Sequence) -> TestingPair:
    return make_pair(make_measure(atoms, w), make_measure(atoms, q))


def swap(pair: TestingPair) -> TestingPair:
    """Exchange the roles of ``W`` and ``Q``."""
    return TestingPair(
        pair.atoms,
        pair.q,
        pair.w,
        tuple(reciprocal(x) for x in pair.lr_wq),
        pair.q_ac_mass,
        pair.w_ac_mass,
    )


def scale_pair(pair: TestingPair, w_factor=1, q_factor=1) -> TestingPair:
    wf = Fraction(w_factor)
    qf = Fraction(q_factor)
    if wf <= 0 or qf <= 0:
        raise NegativeWeight("scale factors must be positive")
    return _pair_from_aligned(pair.atoms, (x * wf for x in pair.w), (x * qf for x in pair.q))


def _tensor2(a: TestingPair, b: TestingPair, flatten_left: bool) -> tuple:
    atoms, w, q = [], [], []
    for la, wa, qa in zip(a.atoms, a.w, a.q):
        prefix = la if flatten_left else (la,)
        for lb, wb, qb in zip(b.atoms, b.w, b.q):
            atoms.append(prefix + (lb,))
            w.append(wa * wb)
            q.append(qa * qb)
    return atoms, w, q


def product_pair(pairs: Sequence[TestingPair], atom_cap: int = DEFAULT_ATOM_CAP) -> TestingPair:
    """Tensor product of pairs; atom labels are tuples of component labels.

    Iteration order is lexicographic in the component orders.
    """
    if not pairs:
        raise LengthMismatch("product of zero pairs")
    size = 1
    for p in pairs:
        size *= len(p)
    if size > atom_cap:
        raise CapExceeded(size, atom_cap)
    if len(pairs) == 1:
        return pairs[0]
    atoms, w, q = _tensor2(pairs[0], pairs[1], flatten_left=False)
    current = TestingPair(tuple(atoms), tuple(w), tuple(q), (), Fraction(0), Fraction(0))
    for p in pairs[2:]:
        atoms, w, q = _tensor2(current, p, flatten_left=True)
        current = TestingPair(tuple(atoms), tuple(w), tuple(q), (), Fraction(0), Fraction(0))
    return _pair_from_aligned(current.atoms, current.w, current.q)


def lumped_power(pair: TestingPair, n: int) -> TestingPair:
    """The ``n``-fold iid product reduced to type classes.

    Each atom is a count vector over the letter's atoms; its weight is the
    total product weight of all sequences of that type.  Every quantity
    that depends only on the joint law of ``(dW/dr, dQ/dr)`` (likelihood
    ratio distribution, entropy spectrum, beta, tilts) is preserved.
    """
    if n < 1:
        raise LengthMismatch("power must be at least 1")
    k = len(pair)
    atoms, w, q = [], [], []
    fact = [math.factorial(i) for i in range(n + 1)]
    for cut in itertools.combinations(range(n + k - 1), k - 1):
        counts = []
        prev = -1
        for c in cut:
            counts.append(c - prev - 1)
            prev = c
        counts.append(n + k - 2 - prev)
        coeff = fact[n]
        wv = Fraction(1)
        qv = Fraction(1)
        for c, wa, qa in zip(counts, pair.w, pair.q):
            coeff //= fact[c]
            if c:
                wv *= wa**c
                qv *= qa**c
        atoms.append(tuple(counts))
        w.append(coeff * wv)
        q.append(coeff * qv)
    return _pair_from_aligned(atoms, w, q)


def common_support(pair: TestingPair) -> list:
    """Indices of atoms where both ``w > 0`` and ``q > 0``."""
    return [i for i, (wa, qa) in enumerate(zip(pair.w, pair.q)) if wa > 0 and qa > 0]


def log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def _logsumexp(values: Sequence[float]) -> float:
    m = max(values)
    return m + math.log(math.fsum(math.exp(v - m) for v in values))


@dataclass(frozen=True)
class TiltedFamily:
    """Order-``rho`` tilted probability measure and its moment statistics.

    ``v`` is aligned with ``atoms`` (the common support).  Moments are of the
    log-likelihood ratio ``ln(dW~/dQ~)`` centred at its tilted mean.
    """

    rho: float
    atoms: tuple
    v: tuple
    log_normalizer: float
    kl_v_q: float
    kl_v_w: float
    mean_llr: float
    sigma: float
    t3: float
    delta: float
    omega: float

    def as_measure(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.atoms, tuple(Fraction(x) for x in self.v))

    def as_dict(self) -> dict:
        return dict(zip(self.atoms, self.v))


def tilt(pair: TestingPair, rho: float, omega: float = DEFAULT_OMEGA) -> TiltedFamily:
    idx = common_support(pair)
    if not idx:
        raise EmptyCommonSupport("W and Q are mutually singular")
    rho = float(rho)
    # tied likelihood ratios share one float log so spread is exactly zero
    lr_log: dict = {}
    llr, logv = [], []
    for i in idx:
        r = pair.lr_wq[i]
        if r not in lr_log:
            lr_log[r] = log_fraction(r)
        L = lr_log[r]
        lq = log_fraction(pair.q[i])
        llr.append(L)
        logv.append(rho * L + lq)
    log_norm = _logsumexp(logv)
    v = [math.exp(x - log_norm) for x in logv]
    total = math.fsum(v)
    v = [x / total for x in v]
    if len(lr_log) == 1:
        mean = llr[0]
        sigma = 0.0
        t3 = 0.0
    else:
        mean = math.fsum(vi * L for vi, L in zip(v, llr))
        var = math.fsum(vi * (L - mean) ** 2 for vi, L in zip(v, llr))
        sigma = math.sqrt(var)
        t3 = math.fsum(vi * abs(L - mean) ** 3 for vi, L in zip(v, llr))
    delta = omega * t3 / sigma**3 if sigma > 0 else 0.0
    return TiltedFamily(
        rho=rho,
        atoms=tuple(pair.atoms[i] for i in idx),
        v=tuple(v),
        log_normalizer=log_norm,
        kl_v_q=rho * mean - log_norm,
        kl_v_w=(rho - 1.0) * mean - log_norm,
        mean_llr=mean,
        sigma=sigma,
        t3=t3,
        delta=delta,
        omega=omega,
    )


def geometric_pair() -> TestingPair:
    """Geometric(1/2) on the positive integers vs. on the non-negative integers.

    The likelihood ratio is the constant 2 on ``k >= 1`` and ``Q`` alone
    charges ``k = 0``; every quantity here depends only on the likelihood
    ratio law, so the infinite support is lumped into two atoms.
    """
    return _pair_from_aligned(("k>=1", "k=0"), (Fraction(1), Fraction(0)), (Fraction(1, 2), Fraction(1, 2)))


def geometric_truncated(K: int) -> TestingPair:
    """Both geometric measures restricted to ``{0, ..., K}`` atom by atom."""
    atoms = list(range(K + 1))
    w = [Fraction(0)] + [Fraction(1, 2**k) for k in range(1, K + 1)]
    q = [Fraction(1, 2 ** (k + 1)) for k in range(K + 1)]
    return _pair_from_aligned(atoms, w, q)


# -- JSON schema -------------------------------------------------------------


def pair_from_json(obj: Mapping) -> TestingPair:
    """Parse ``{"atoms": [...], "w": [...], "q": [...]}``."""
    if not isinstance(obj, Mapping):
        raise SchemaError("measure pair must be a JSON object")
    missing = [k for k in ("atoms", "w", "q") if k not in obj]
    if missing:
        raise SchemaError(f"missing keys: {', '.join(missing)}")
    atoms, w, q = obj["atoms"], obj["w"], obj["q"]
    for name, val in (("atoms", atoms), ("w", w), ("q", q)):
        if not isinstance(val, list):
            raise SchemaError(f"{name!r} must be a list")
    if not all(isinstance(a, str) for a in atoms):
        raise SchemaError("atom labels must be strings")
    for val in w + q:
        if isinstance(val, float) and not math.isfinite(val):
            raise SchemaError(f"non-finite weight {val!r}")
    return pair_from_weights(atoms, w, q)


def _reject_constant(token: str):
    raise SchemaError(f"non-finite weight {token!r}")


def load_pair(path) -> TestingPair:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh, parse_float=Fraction, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    return pair_from_json(obj)


def pair_to_json(pair: TestingPair) -> dict:
    return {
        "atoms": [a if isinstance(a, str) else repr(a) for a in pair.atoms],
        "w": [str(x) for x in pair.w],
        "q": [str(x) for x in pair.q],
    }
