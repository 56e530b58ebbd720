"""Command-line frontend.

Exit status: 0 on success, 1 when ``verify`` finds a failing identity,
2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from . import beta as B
from . import normal_approx as N
from . import spectrum as S
from .errors import HTSpectrumError, SchemaError
from .extended import Infinite, format_ext
from .measures import DEFAULT_ATOM_CAP, TestingPair, load_pair, pair_from_json, product_pair
from .verify import format_report, run_checks

COMMANDS = (
    "beta-curve",
    "entropy-spectrum",
    "quantiles",
    "olr-test",
    "be-bounds",
    "tilted-bounds",
    "gauss-lebesgue",
    "verify",
)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    format: str = "csv"
    eps: Optional[List[Fraction]] = None
    gamma: Optional[Fraction] = None
    gamma_grid: Optional[List[Fraction]] = None
    phi_grid: Optional[List[Fraction]] = None
    rho: Optional[float] = None
    omega: Optional[float] = None
    atom_cap: int = DEFAULT_ATOM_CAP
    seed: int = 0
    n: int = 1
    pairs: int = 100


def parse_grid(spec: str) -> List[Fraction]:
    """``a:b:n`` -> ``n`` equally spaced rationals from ``a`` to ``b`` inclusive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must look like a:b:n, got {spec!r}")
    try:
        a, b, n = Fraction(parts[0]), Fraction(parts[1]), int(parts[2])
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad grid {spec!r}: {exc}") from exc
    if n < 1:
        raise UsageError("grid needs at least one point")
    if n == 1:
        return [a]
    if not a < b:
        raise UsageError(f"grid must be strictly increasing, got {spec!r}")
    return [a + (b - a) * i / (n - 1) for i in range(n)]


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (Fraction, Infinite)):
        return format_ext(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _json_cell(x):
    if x is None:
        return None
    if isinstance(x, (Fraction, Infinite)):
        return format_ext(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def render_table(header: Sequence[str], rows: Sequence[Sequence], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{h: _json_cell(v) for h, v in zip(header, row)} for row in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _load_letters(path: str) -> List[TestingPair]:
    """A pair file holds one pair object or a list of them."""
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh, parse_float=Fraction)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    items = obj if isinstance(obj, list) else [obj]
    try:
        return [pair_from_json(item) for item in items]
    except HTSpectrumError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def _need_input(cfg: RunConfig) -> str:
    if not cfg.input_path:
        raise UsageError(f"{cfg.command} needs --input")
    return cfg.input_path


def _load(cfg: RunConfig) -> TestingPair:
    path = _need_input(cfg)
    try:
        return load_pair(path)
    except HTSpectrumError as exc:
        if str(exc).startswith(str(path)):
            raise
        raise type(exc)(f"{path}: {exc}") from exc


def _check_eps(eps: Sequence[Fraction]) -> None:
    for e in eps:
        if e < 0:
            raise UsageError(f"eps must be non-negative, got {e}")


def _omega(cfg: RunConfig) -> float:
    return N.default_omega() if cfg.omega is None else cfg.omega


def cmd_beta_curve(cfg: RunConfig) -> str:
    pair = _load(cfg)
    eps = cfg.eps if cfg.eps is not None else list(B.beta_curve(pair).knot_eps)
    _check_eps(eps)
    return render_table(("eps", "beta", "dleft", "dright"), B.curve_rows(pair, eps), cfg.format)


def cmd_entropy_spectrum(cfg: RunConfig) -> str:
    pair = _load(cfg)
    gammas = cfg.gamma_grid
    if gammas is None:
        gammas = [Fraction(0)] + list(pair.spectrum.values)
    return render_table(("gamma", "h", "h_left", "h_right"), S.entropy_rows(pair, gammas), cfg.format)


def cmd_quantiles(cfg: RunConfig) -> str:
    pair = _load(cfg)
    if cfg.eps is None:
        return render_table(("tau", "F"), S.cdf_rows(pair), cfg.format)
    rows = [(e, S.quantile_lsc(pair, e), S.quantile_usc(pair, e)) for e in cfg.eps]
    return render_table(("eps", "lsc", "usc"), rows, cfg.format)


def cmd_olr_test(cfg: RunConfig) -> str:
    pair = _load(cfg)
    if not cfg.eps or len(cfg.eps) != 1:
        raise UsageError("olr-test needs exactly one --eps")
    test = B.olr_test(pair, cfg.eps[0], cfg.gamma)
    if cfg.format == "json":
        return json.dumps(test.as_dict(), indent=2) + "\n"
    return render_table(("atom", "test_value"), list(zip(test.atoms, test.values)), "csv")


def _product_letters(cfg: RunConfig) -> List[TestingPair]:
    if cfg.n < 1:
        raise UsageError("--n must be at least 1")
    return _load_letters(_need_input(cfg)) * cfg.n


def cmd_be_bounds(cfg: RunConfig) -> str:
    letters = _product_letters(cfg)
    prod = product_pair(letters, cfg.atom_cap)
    st = N.be_stats(letters, _omega(cfg))
    eps = cfg.eps if cfg.eps is not None else parse_grid("1/100:99/100:99")
    rows = []
    for e in eps:
        x = float(e)
        exact = float(B.beta_dual(prod, e))
        lower, upper = N.be_bounds(st, x)
        value = cap = None
        if st.delta < x < 1.0 - st.delta - N.gauss_q(st.sigma):
            value, cap = N.be_approx(st, x)
        rows.append((e, exact, lower, upper, value, cap))
    return render_table(("eps", "exact", "be_lower", "be_upper", "strassen", "strassen_cap"), rows, cfg.format)


def cmd_tilted_bounds(cfg: RunConfig) -> str:
    if cfg.rho is None:
        raise UsageError("tilted-bounds needs --rho")
    letters = _product_letters(cfg)
    prod = product_pair(letters, cfg.atom_cap)
    st = N.tilted_stats(letters, cfg.rho, _omega(cfg))
    phis = cfg.phi_grid if cfg.phi_grid is not None else parse_grid("1/20:19/20:19")
    rows = []
    for phi in phis:
        p = float(phi)
        e = N.tilted_eps(st, p)
        exact = float(B.beta_inverse(prod, Fraction(e)))
        try:
            _, low, high = N.tilted_beta_window(st, p)
        except HTSpectrumError:
            low = high = None
        rows.append((p, e, exact, low, high))
    return render_table(("phi", "eps_of_phi", "beta_exact", "window_low", "window_high"), rows, cfg.format)


def cmd_gauss_lebesgue(cfg: RunConfig) -> str:
    eps = cfg.eps if cfg.eps is not None else parse_grid("1/100:99/100:99")
    rows = []
    for e in eps:
        x = float(e)
        rows.append((x, N.gl_beta(x), N.gl_quantile(x), N.gl_dual(x)))
    return render_table(("eps", "beta", "quantile", "dual_sup"), rows, cfg.format)


def cmd_verify(cfg: RunConfig):
    if cfg.pairs < 1:
        raise UsageError("--pairs must be at least 1")
    results = run_checks(cfg.seed, cfg.pairs)
    ok = all(r.passed for _, r in results)
    return format_report(results), ok


HANDLERS = {
    "beta-curve": cmd_beta_curve,
    "entropy-spectrum": cmd_entropy_spectrum,
    "quantiles": cmd_quantiles,
    "olr-test": cmd_olr_test,
    "be-bounds": cmd_be_bounds,
    "tilted-bounds": cmd_tilted_bounds,
    "gauss-lebesgue": cmd_gauss_lebesgue,
}


def run(cfg: RunConfig) -> int:
    if cfg.command == "verify":
        text, ok = cmd_verify(cfg)
        status = 0 if ok else 1
    else:
        text = HANDLERS[cfg.command](cfg)
        status = 0
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", dest="input_path", help="measure-pair JSON file")
    common.add_argument("--output", dest="output_path", help="write here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--eps", action="append", help="a single level (repeatable)")
    common.add_argument("--eps-grid", help="levels a:b:n")
    common.add_argument("--gamma", help="threshold for olr-test")
    common.add_argument("--gamma-grid", help="thresholds a:b:n")
    common.add_argument("--phi-grid", help="tilted indices a:b:n")
    common.add_argument("--rho", type=float, help="tilting order")
    common.add_argument("--omega", type=float, help="Berry-Esseen constant (default 0.5606 or HTSPECTRUM_OMEGA)")
    common.add_argument("--atom-cap", type=int, default=DEFAULT_ATOM_CAP)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n", type=int, default=1, help="number of copies of the input letters in the product")
    common.add_argument("--pairs", type=int, default=100, help="random pairs per identity for verify")

    parser = argparse.ArgumentParser(prog="htspectrum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    eps: Optional[List[Fraction]] = None
    if ns.eps_grid and ns.eps:
        raise UsageError("give --eps or --eps-grid, not both")
    if ns.eps_grid:
        eps = parse_grid(ns.eps_grid)
    elif ns.eps:
        eps = [_parse_rational(e) for e in ns.eps]
    if eps is not None:
        _check_eps(eps)
    if ns.omega is not None and not ns.omega > 0:
        raise UsageError("--omega must be positive")
    if ns.atom_cap < 1:
        raise UsageError("--atom-cap must be at least 1")
    return RunConfig(
        command=ns.command,
        input_path=ns.input_path,
        output_path=ns.output_path,
        format=ns.format,
        eps=eps,
        gamma=_parse_rational(ns.gamma) if ns.gamma else None,
        gamma_grid=parse_grid(ns.gamma_grid) if ns.gamma_grid else None,
        phi_grid=parse_grid(ns.phi_grid) if ns.phi_grid else None,
        rho=ns.rho,
        omega=ns.omega,
        atom_cap=ns.atom_cap,
        seed=ns.seed,
        n=ns.n,
        pairs=ns.pairs,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return run(config_from_args(ns))
    except UsageError as exc:
        print(f"htspectrum: error: {exc}", file=sys.stderr)
        return 2
    except (HTSpectrumError, OSError) as exc:
        print(f"htspectrum: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
