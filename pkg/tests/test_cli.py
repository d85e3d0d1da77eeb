import importlib
import json
import random
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from projquant import cli
from projquant.algebra import Poly
from projquant.errors import (
    DegenerateCurvatureError,
    NonterminatingSeries,
    NotOperatorSymbol,
    ParseError,
    ResonanceError,
    UsageError,
)
from projquant.expr import BaseRef, BinOp, Num, Pow, Var, format_symbol, parse, parse_symbol
from projquant.operators import DiffOperator
from projquant.sampling import random_radical_symbol
from projquant.serialize import (
    emit_json,
    operator_from_json,
    operator_to_json,
    symbol_from_json,
    symbol_to_json,
)
from projquant.sphere import build_metric
from projquant.symbols import BaseTable, RadicalSymbol

GOLDEN = Path(__file__).parent / "golden"

RUN_EXAMPLES = {
    "quantize_x1p1": ["quantize", "--n", "1", "--lambda", "1/2", "--mu", "1/2", "--expr", "x1*p1"],
    "coeffs_k1": ["coeffs", "--n", "1", "--lambda", "1/2", "--mu", "1/2", "--k", "1"],
    "geodesic_n2": ["example", "geodesic", "--n", "2", "--lambda", "1/2", "--mu", "1/2"],
}


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# expression language


def test_parse_ast_shape():
    ast = parse("x1*p1 + 1/2*nu")
    assert isinstance(ast, BinOp) and ast.op == "+"
    assert isinstance(ast.left, BinOp) and isinstance(ast.left.left, Var)
    assert isinstance(ast.right.left, Num) and ast.right.left.value == Fraction(1, 2)
    pw = parse("H^(-1/2)")
    assert isinstance(pw, Pow) and isinstance(pw.base, BaseRef) and pw.exponent == Fraction(-1, 2)


def test_elaborate_examples():
    T = BaseTable(1)
    s = parse_symbol("x1*p1 + 1/2*nu", T)
    assert s.to_poly() == Poly.monomial((1,), (1,)) + Poly.nu(1).scale(Fraction(1, 2))
    c3 = build_metric(3)
    h = parse_symbol("H^(-1/2)", c3.table)
    assert len(h.sectors) == 1 and h == c3.H_power(Fraction(-1, 2))
    assert parse_symbol("r2^2 - r2*r2", c3.table).is_zero()
    assert parse_symbol("-x1 + 2", T) == RadicalSymbol.from_poly(T, 2 - Poly.x(1, 1))
    assert parse_symbol("nu^(-2)*nu^2", T) == 1


@pytest.mark.parametrize(
    "text, col",
    [
        ("x1^(1/2)", 3),
        ("x1 +* 2", 5),
        ("(x1 + p1", 9),
        ("x1 $ 2", 4),
        ("x2", 1),
        ("(x1 + 1)^(-1)", 9),
    ],
)
def test_parse_errors_report_columns(text, col):
    with pytest.raises(ParseError) as info:
        parse_symbol(text, build_metric(1).table)
    assert info.value.column == col
    assert str(info.value).startswith(f"column {col}:")


def test_unknown_base_rejected():
    with pytest.raises(ParseError):
        parse_symbol("H^(1/2)", BaseTable(1))


def test_pretty_print_round_trip_on_canonical_output():
    c = build_metric(2)
    for text in ["x1*p1 + 1/2*nu", "(x1^2*p1 + nu)*H^(-1/2)", "3*nu^(-1)*r2^(1/3) - p2^2"]:
        s = parse_symbol(text, c.table)
        printed = format_symbol(s)
        again = parse_symbol(printed, c.table)
        assert again == s
        assert format_symbol(again) == printed


# JSON


def test_json_zero_and_monomial():
    T = BaseTable(1)
    assert symbol_to_json(RadicalSymbol.zero(T)) == {"sectors": []}
    obj = symbol_to_json(RadicalSymbol.from_poly(T, Poly.monomial((1,), (1,))))
    assert obj == {
        "sectors": [{"exponents": {}, "poly": [{"coeff": {"nu_pow": 0, "num": "1", "den": "1"}, "x": [1], "xi": [1]}]}]
    }


def test_json_radical_exponents():
    c = build_metric(3)
    obj = symbol_to_json(c.H_power(Fraction(-1, 2)))
    assert obj["sectors"][0]["exponents"] == {"H": "-1/2"}


def test_json_round_trip_random_symbols():
    rng = random.Random(cli.DEFAULT_SEED)
    for k in range(100):
        table = build_metric(1 + k % 3).table
        s = random_radical_symbol(rng, table)
        obj = symbol_to_json(s)
        text = emit_json(obj)
        back = symbol_from_json(json.loads(text), table)
        assert back == s
        assert emit_json(symbol_to_json(back)) == text
        # printer and JSON agree
        printed = parse_symbol(format_symbol(s), table)
        assert emit_json(symbol_to_json(printed)) == text


def test_operator_json_round_trip():
    c = build_metric(2)
    d1, d2 = DiffOperator.derivative(c.table, 1), DiffOperator.derivative(c.table, 2)
    op = d1.compose(d2).scale(c.density_factor(Fraction(1, 3))) + d1.scale(Fraction(-2, 5))
    back = operator_from_json(json.loads(emit_json(operator_to_json(op))), c.table)
    assert back == op


# golden files and determinism


@pytest.mark.parametrize("name", sorted(RUN_EXAMPLES))
@pytest.mark.parametrize("fmt", ["txt", "json"])
def test_golden(capsys, name, fmt):
    argv = RUN_EXAMPLES[name] + (["--format", "json"] if fmt == "json" else [])
    code, out, _ = run_cli(capsys, argv)
    assert code == 0
    assert out == (GOLDEN / f"{name}.{fmt}").read_text()


def test_run_examples_contents(capsys):
    _, out, _ = run_cli(capsys, RUN_EXAMPLES["quantize_x1p1"])
    assert out.strip() == "x1*p1 + 1/2*nu"
    _, out, _ = run_cli(capsys, RUN_EXAMPLES["coeffs_k1"])
    assert "1 1/2 -1/2" in out.splitlines()
    _, out, _ = run_cli(capsys, RUN_EXAMPLES["geodesic_n2"])
    assert "status: PASS" in out and "C: -9/16" in out


def test_byte_identical_reruns():
    argv = ["check-equivariance", "--n", "2", "--degree", "2", "--trials", "2", "--format", "json"]
    outs = [
        subprocess.run([sys.executable, "-m", "projquant", *argv], capture_output=True, check=True).stdout
        for _ in range(2)
    ]
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["status"] == "PASS"


def test_seed_changes_sampled_symbols():
    base = cli.parse_config(["check-equivariance", "--n", "1", "--trials", "1"])
    other = cli.parse_config(["check-equivariance", "--n", "1", "--trials", "1", "--seed", "3"])
    assert base.seed == cli.DEFAULT_SEED and other.seed == 3
    assert cli.run(base) == cli.run(base)


# commands and exit codes


def test_operator_command(capsys):
    code, out, _ = run_cli(capsys, ["operator", "--n", "1", "--expr", "x1*p1"])
    assert code == 0
    assert out.strip() == "(nu*x1)*d1 + (1/2*nu)"


def test_symbolize_command(capsys):
    code, out, _ = run_cli(capsys, ["symbolize", "--n", "1", "--expr", "x1*p1 + 1/2*nu"])
    assert code == 0 and out.strip() == "x1*p1"


def test_truncation_flag(capsys):
    argv = ["quantize", "--n", "1", "--lambda", "1/3", "--mu", "1/3", "--expr", "H^(1/3)", "--truncation", "1"]
    code, out, _ = run_cli(capsys, argv)
    assert code == 0 and out.splitlines()[-1] == "# truncated after order 1"
    code, out, _ = run_cli(capsys, argv + ["--format", "json"])
    assert json.loads(out)["truncated"] is True


def test_example_power_negative_alpha(capsys):
    code, out, _ = run_cli(capsys, ["example", "power", "--n", "3", "--alpha", "-1/2"])
    assert code == 0
    assert "divergence_vanishes: True" in out


def test_example_length_element(capsys):
    code, out, _ = run_cli(capsys, ["example", "length-element"])
    assert code == 0 and "fixed_point: True" in out


@pytest.mark.parametrize(
    "argv, code",
    [
        (["quantize", "--n", "1", "--expr", "x1^(1/2)"], 2),
        (["quantize", "--n", "0", "--expr", "x1"], 2),
        (["bogus"], 2),
        (["coeffs", "--n", "1", "--lambda", "one", "--k", "1"], 2),
        (["operator", "--n", "3", "--expr", "H^(-1/2)"], 2),
        (["example", "geodesic", "--n", "1"], 2),
        (["coeffs", "--n", "1", "--lambda", "0", "--mu", "1", "--k", "2"], 3),
        (["coeffs", "--n", "2", "--lambda", "0", "--mu", "4/3", "--k", "3"], 3),
        (["quantize", "--n", "1", "--lambda", "1/3", "--mu", "1/3", "--expr", "H^(1/3)"], 5),
    ],
)
def test_exit_codes(capsys, argv, code):
    got, out, err = run_cli(capsys, argv)
    assert got == code
    assert err.startswith("error: ") and out == ""


def test_verification_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(importlib.import_module("projquant.quantize"), "NORMAL_ORDER_SIGN", -1)
    code, out, _ = run_cli(capsys, ["check-equivariance", "--n", "1", "--expr", "x1^2*p1^2"])
    assert code == 4
    assert "status: FAIL" in out and "witness.generator: x1*E" in out


def test_json_error_output(capsys):
    code, out, err = run_cli(capsys, ["coeffs", "--n", "1", "--lambda", "0", "--mu", "1", "--k", "2", "--format", "json"])
    assert code == 3 and err == ""
    obj = json.loads(out)["error"]
    assert obj["type"] == "ResonanceError" and obj["exit_code"] == 3
    assert obj["witness"] == ["2", "2"]
    code, out, _ = run_cli(capsys, ["quantize", "--n", "1", "--expr", "x1 +* 2", "--format", "json"])
    assert code == 2 and json.loads(out)["error"]["type"] == "ParseError"
    code, out, _ = run_cli(capsys, ["bogus", "--format", "json"])
    assert code == 2 and json.loads(out)["error"]["type"] == "UsageError"


def test_exit_code_map_is_exhaustive():
    expected = {
        ParseError: 2,
        UsageError: 2,
        NotOperatorSymbol: 2,
        DegenerateCurvatureError: 2,
        ResonanceError: 3,
        NonterminatingSeries: 5,
    }
    assert cli.EXIT_CODES == expected
    assert {cli.EXIT_OK, cli.EXIT_USAGE, cli.EXIT_RESONANCE, cli.EXIT_VERIFY, cli.EXIT_NONTERMINATING} == {0, 2, 3, 4, 5}
