from fractions import Fraction

import pytest
import sympy
from hypothesis import strategies as st

from projquant.algebra import Poly
from projquant.symbols import BaseTable, RadicalSymbol
from projquant.sphere import build_metric

CONTEXTS = [
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(0), Fraction(1, 3)),
    (Fraction(1, 4), Fraction(1, 4)),
]

# PASS/FAIL lines collected by the acceptance suite
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def sympy_vars(n):
    xs = sympy.symbols(f"x1:{n + 1}")
    ps = sympy.symbols(f"p1:{n + 1}")
    return list(xs), list(ps), sympy.Symbol("nu")


def poly_to_sympy(p: Poly):
    xs, ps, nu = sympy_vars(p.n)
    gens = xs + ps
    expr = sympy.Integer(0)
    for nu_pow, exps, c in p.raw_terms():
        term = sympy.Rational(c.numerator, c.denominator) * nu ** nu_pow
        for g, e in zip(gens, exps):
            term *= g ** e
        expr += term
    return expr


def symbol_to_sympy(s: RadicalSymbol):
    expr = sympy.Integer(0)
    for e, p in s.sectors.items():
        term = poly_to_sympy(p)
        for q, base in zip(e, s.table.bases):
            if q:
                term *= poly_to_sympy(base.poly) ** sympy.Rational(q.numerator, q.denominator)
        expr += term
    return expr


@pytest.fixture
def plain1():
    return BaseTable(1)


@pytest.fixture
def chart1():
    return build_metric(1)


def polys(n, max_deg=2, max_terms=4, nu_range=(-1, 2)):
    """Hypothesis strategy for small polynomials in 2n variables."""
    exps = st.tuples(*[st.integers(0, max_deg)] * (2 * n))
    coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    term = st.tuples(exps, st.integers(*nu_range), coeff)

    def build(terms):
        p = Poly.zero(n)
        for e, k, c in terms:
            p = p + Poly.monomial(e[:n], e[n:], c).shift_nu(k)
        return p

    return st.lists(term, max_size=max_terms).map(build)
