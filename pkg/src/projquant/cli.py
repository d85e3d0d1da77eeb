"""Command-line driver.

Exit codes: 0 success, 2 parse/usage error, 3 resonance, 4 verification
failure, 5 nonterminating series.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .algebra import format_fraction
from .equivariance import check_equivariance, sl_generators
from .errors import (
    DegenerateCurvatureError,
    NonterminatingSeries,
    NotOperatorSymbol,
    ParseError,
    ProjquantError,
    ResonanceError,
    UsageError,
)
from .expr import parse_symbol
from .quantize import (
    Family,
    QContext,
    apply_series,
    coeff_q_recursive,
    coeff_s_recursive,
    is_resonant,
    normal_order,
)
from .sampling import random_polynomial_symbol
from .serialize import operator_to_json, symbol_to_json
from .sphere import build_metric, verify_geodesic, verify_length_element, verify_power_identity

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESONANCE = 3
EXIT_VERIFY = 4
EXIT_NONTERMINATING = 5

EXIT_CODES = {
    ParseError: EXIT_USAGE,
    UsageError: EXIT_USAGE,
    NotOperatorSymbol: EXIT_USAGE,
    DegenerateCurvatureError: EXIT_USAGE,
    ResonanceError: EXIT_RESONANCE,
    NonterminatingSeries: EXIT_NONTERMINATING,
}

DEFAULT_SEED = 20240101

# per-command default dimension
_DEFAULT_N = {"geodesic": 2, "power": 3, "length-element": 3}


def exit_code_for(exc: BaseException) -> int:
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    return EXIT_USAGE


@dataclass
class RunConfig:
    command: str
    n: int
    lam: Fraction
    mu: Fraction
    expr: Optional[str] = None
    truncation: Optional[int] = None
    format: str = "text"
    seed: int = DEFAULT_SEED
    k: Optional[int] = None
    degree: int = 2
    trials: int = 5
    alpha: Optional[Fraction] = None
    example: Optional[str] = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, default=None, help="dimension of the sphere")
    p.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(1, 2))
    p.add_argument("--mu", type=_rational, default=Fraction(1, 2))
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="projquant", description="Projectively equivariant quantization")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("quantize", "symbolize", "operator"):
        p = sub.add_parser(name)
        _common(p)
        p.add_argument("--expr", required=True)
        p.add_argument("--truncation", type=int, default=None)
    p = sub.add_parser("coeffs")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p = sub.add_parser("check-equivariance")
    _common(p)
    p.add_argument("--expr", default=None)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--trials", type=int, default=5)
    p = sub.add_parser("example")
    ex = p.add_subparsers(dest="example", required=True, parser_class=_Parser)
    for name in ("geodesic", "power", "length-element"):
        q = ex.add_parser(name)
        _common(q)
        if name == "power":
            q.add_argument("--alpha", type=_rational, required=True)
    return parser


_RATIONAL_FLAGS = ("--alpha", "--lambda", "--mu")


def _glue_negative_values(argv: Sequence[str]) -> List[str]:
    """Rewrite ``--alpha -1/2`` as ``--alpha=-1/2`` so argparse accepts it."""
    out: List[str] = []
    it = iter(argv)
    for arg in it:
        if arg in _RATIONAL_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and nxt[1:2].isdigit():
                out.append(f"{arg}={nxt}")
                continue
            out.append(arg)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(arg)
    return out


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(_glue_negative_values(argv))
    key = getattr(ns, "example", None) or ns.command
    n = ns.n if ns.n is not None else _DEFAULT_N.get(key, 1)
    if n < 1:
        raise UsageError("--n must be at least 1")
    truncation = getattr(ns, "truncation", None)
    if truncation is not None and truncation < 0:
        raise UsageError("--truncation must be nonnegative")
    return RunConfig(
        command=ns.command,
        n=n,
        lam=ns.lam,
        mu=ns.mu,
        expr=getattr(ns, "expr", None),
        truncation=truncation,
        format=ns.format,
        seed=ns.seed,
        k=getattr(ns, "k", None),
        degree=getattr(ns, "degree", 2),
        trials=getattr(ns, "trials", 5),
        alpha=getattr(ns, "alpha", None),
        example=getattr(ns, "example", None),
    )


# commands return (payload for json, lines for text, exit code)


def _context(cfg: RunConfig) -> QContext:
    return QContext(cfg.n, cfg.lam, cfg.mu)


def _cmd_series(cfg: RunConfig):
    ctx = _context(cfg)
    table = build_metric(cfg.n).table
    s = parse_symbol(cfg.expr, table)
    family = Family.S if cfg.command == "symbolize" else Family.Q
    result = apply_series(ctx, family, s, cfg.truncation)
    out = result.symbol.simplify()
    payload = {"command": cfg.command, "truncated": result.truncated}
    if cfg.command == "operator":
        op = normal_order(out)
        payload["operator"] = operator_to_json(op)
        lines = [str(op)]
    else:
        payload["symbol"] = symbol_to_json(out)
        payload["text"] = str(out)
        lines = [str(out)]
    if result.truncated:
        lines.append(f"# truncated after order {cfg.truncation}")
    return payload, lines, EXIT_OK


def _cmd_coeffs(cfg: RunConfig):
    ctx = _context(cfg)
    if cfg.k < 0:
        raise UsageError("--k must be nonnegative")
    rows = []
    for m in range(cfg.k + 1):
        rows.append((m, coeff_q_recursive(ctx, cfg.k, m), coeff_s_recursive(ctx, cfg.k, m)))
    payload = {
        "command": "coeffs",
        "k": cfg.k,
        "n": cfg.n,
        "lambda": format_fraction(ctx.lam),
        "mu": format_fraction(ctx.mu),
        "resonant": is_resonant(ctx),
        "entries": [{"m": m, "C": format_fraction(c), "Ctilde": format_fraction(t)} for m, c, t in rows],
    }
    lines = [f"k={cfg.k} n={cfg.n} lambda={format_fraction(ctx.lam)} mu={format_fraction(ctx.mu)}", "m C Ctilde"]
    lines += [f"{m} {format_fraction(c)} {format_fraction(t)}" for m, c, t in rows]
    return payload, lines, EXIT_OK


def _cmd_check(cfg: RunConfig):
    ctx = _context(cfg)
    table = build_metric(cfg.n).table
    if cfg.expr is not None:
        symbols = [parse_symbol(cfg.expr, table)]
    else:
        rng = random.Random(cfg.seed)
        symbols = [
            random_polynomial_symbol(rng, table, max_xi_degree=cfg.degree, max_x_degree=cfg.degree, terms=3)
            for _ in range(cfg.trials)
        ]
    checks = 0
    failure = None
    for s in symbols:
        for X in sl_generators(cfg.n):
            checks += 1
            r = check_equivariance(ctx, s, X)
            if not r.passed and failure is None:
                failure = {"symbol": str(s), "generator": X.label, "discrepancy": str(r.discrepancy)}
    status = "PASS" if failure is None else "FAIL"
    payload = {"command": "check-equivariance", "status": status, "checks": checks, "witness": failure}
    lines = [f"status: {status}", f"checks: {checks}"]
    if failure:
        lines += [f"witness.{k}: {v}" for k, v in failure.items()]
    return payload, lines, EXIT_OK if failure is None else EXIT_VERIFY


def _cmd_example(cfg: RunConfig):
    if cfg.example == "geodesic":
        report = verify_geodesic(_context(cfg))
    elif cfg.example == "power":
        report = verify_power_identity(cfg.n, cfg.alpha)
    else:
        if cfg.lam != cfg.mu:
            raise UsageError("length-element needs lambda = mu")
        report = verify_length_element(cfg.n, cfg.lam)
    payload = {"command": f"example {cfg.example}", "status": report.status, "witness": report.witness}
    payload.update(report.values)
    lines = [f"status: {report.status}"] + [f"{k}: {v}" for k, v in report.values.items()]
    if report.witness is not None:
        lines.append(f"witness: {report.witness}")
    return payload, lines, EXIT_OK if report.passed else EXIT_VERIFY


_COMMANDS = {
    "quantize": _cmd_series,
    "symbolize": _cmd_series,
    "operator": _cmd_series,
    "coeffs": _cmd_coeffs,
    "check-equivariance": _cmd_check,
    "example": _cmd_example,
}


def run(cfg: RunConfig):
    """Execute a config; returns ``(exit_code, output_text)``."""
    try:
        payload, lines, code = _COMMANDS[cfg.command](cfg)
    except ProjquantError as exc:
        return _error(exc, cfg.format)
    if cfg.format == "json":
        return code, json.dumps(payload, indent=2) + "\n"
    return code, "\n".join(lines) + "\n"


def _error(exc: ProjquantError, fmt: str):
    code = exit_code_for(exc)
    if fmt == "json":
        err = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
        witness = getattr(exc, "witness", None)
        if witness is not None:
            err["witness"] = [format_fraction(Fraction(v)) for v in witness]
        return code, json.dumps({"error": err}, indent=2) + "\n"
    return code, f"error: {type(exc).__name__}: {exc}\n"


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    fmt = "json" if "json" in [b for a, b in zip(argv, argv[1:]) if a == "--format"] + [
        a.split("=", 1)[1] for a in argv if a.startswith("--format=")
    ] else "text"
    try:
        cfg = parse_config(argv)
    except ProjquantError as exc:
        code, text = _error(exc, fmt)
        (sys.stdout if fmt == "json" else sys.stderr).write(text)
        return code
    code, text = run(cfg)
    (sys.stdout if code in (EXIT_OK, EXIT_VERIFY) or cfg.format == "json" else sys.stderr).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
