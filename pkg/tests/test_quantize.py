import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from projquant.algebra import Poly
from projquant.errors import NonterminatingSeries, NotOperatorSymbol, ResonanceError
from projquant.quantize import (
    Family,
    QContext,
    apply_series,
    coeff_q_closed,
    coeff_q_recursive,
    coeff_s_closed,
    coeff_s_recursive,
    coeff_table,
    half_density_series,
    hypergeom_apply,
    invert_triangular,
    is_resonant,
    normal_order,
    pochhammer,
    quantization_series,
    quantize,
    resonance_witness,
    symbol_series,
    symbolize,
    unorder,
)
from projquant.sampling import monomial_symbols, random_polynomial_symbol
from projquant.sphere import build_metric
from projquant.symbols import BaseTable, RadicalSymbol, divergence

from conftest import CONTEXTS, polys

half = Fraction(1, 2)
HALF1 = QContext(1, half, half)


def sym(table, p):
    return RadicalSymbol.from_poly(table, p)


def relation_step_oracle(n, lam, mu, k, m):
    """C_m^k straight from the ratio C_{j+1}/C_j, written independently."""
    delta = mu - lam
    c = Fraction(1)
    for j in range(m):
        c *= Fraction(k - j - 1 + (n + 1) * lam) / ((j + 1) * (2 * k - j - 2 + (n + 1) * (1 - delta)))
    return c


def test_pochhammer():
    assert pochhammer(1, 3) == 6
    assert pochhammer(Fraction(7, 3), 0) == 1
    assert pochhammer(-2, 4) == 0


def test_coeff_q_closed_values():
    assert coeff_q_closed(HALF1, 0, 1) == half
    assert coeff_q_closed(HALF1, 0, 1) == relation_step_oracle(1, half, half, 1, 1)
    assert coeff_q_closed(HALF1, 0, 2) == Fraction(1, 12)
    for lam, mu in CONTEXTS:
        assert coeff_q_closed(QContext(2, lam, mu), Fraction(5, 3), 0) == 1


def test_coeff_q_recursive_values():
    ctx = QContext(2, 0, 0)
    assert coeff_q_recursive(ctx, 2, 1) == Fraction(1, 5)
    assert coeff_q_recursive(ctx, 2, 2) == 0
    assert coeff_q_recursive(ctx, 7, 0) == 1


def test_coeff_s_recursive_values():
    assert coeff_s_recursive(HALF1, 1, 1) == -half
    assert coeff_s_recursive(HALF1, 2, 2) == Fraction(1, 6)
    assert coeff_s_recursive(HALF1, 5, 0) == 1


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("lam, mu", CONTEXTS)
def test_coefficient_families_agree(n, lam, mu):
    ctx = QContext(n, lam, mu)
    inverted = invert_triangular(ctx, 10)
    qs, ss = quantization_series(ctx), symbol_series(ctx)
    for k in range(11):
        for m in range(k + 1):
            cq = coeff_q_recursive(ctx, k, m)
            assert cq == coeff_q_closed(ctx, k - m, m)
            assert cq == relation_step_oracle(n, lam, mu, k, m)
            assert cq == qs.coefficient(k - m, m)
            assert coeff_s_recursive(ctx, k, m) == inverted.s[k, m]
            assert coeff_s_recursive(ctx, k, m) == coeff_s_closed(ctx, k - m, m)
            assert ss.coefficient(k - m, m) == coeff_s_closed(ctx, k - m, m)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("lam, mu", CONTEXTS)
def test_two_over_two_form_matches_closed_form(n, lam, mu):
    # F(E+a, 2E+b-1; E+(b-1)/2, E+b/2 | Z) with Z = nu D / 4
    ctx = QContext(n, lam, mu)
    series = quantization_series(ctx)
    for E in [Fraction(j, 3) for j in range(0, 12)]:
        for m in range(6):
            try:
                expected = coeff_q_closed(ctx, E, m)
            except ResonanceError:
                continue
            assert series.coefficient(E, m) == expected


@pytest.mark.parametrize("n", [1, 2, 3])
def test_confluent_half_density(n):
    ctx = QContext(n, half, half)
    conf = half_density_series(n)
    for k in range(9):
        for m in range(k + 1):
            assert coeff_q_closed(ctx, k - m, m) == conf.coefficient(k - m, m)


def test_coeff_table_normalization():
    t = coeff_table(QContext(2, Fraction(1, 3), Fraction(1, 7)), 6)
    assert all(t.q[k, 0] == 1 and t.s[k, 0] == 1 for k in range(7))
    inv = invert_triangular(HALF1, 2)
    assert inv.s[1, 1] == -half and inv.s[2, 2] == Fraction(1, 6)
    assert all(inv.s[k, 0] == 1 for k in range(3))


def test_quantize_hand_values(plain1):
    xp = sym(plain1, Poly.monomial((1,), (1,)))
    nu = sym(plain1, Poly.nu(1))
    assert quantize(HALF1, xp) == xp + nu.scale(half)
    sq = sym(plain1, Poly.monomial((2,), (2,)))
    # C_1 at E=1 is 1/2, C_2 at E=0 is 1/12; D sq = 4 x p, D^2 sq = 4
    c1 = relation_step_oracle(1, half, half, 2, 1)
    c2 = relation_step_oracle(1, half, half, 2, 2)
    assert (c1, c2) == (half, Fraction(1, 12))
    expected = sq + (nu * xp).scale(4 * c1) + (nu * nu).scale(4 * c2)
    assert quantize(HALF1, sq) == expected
    assert quantize(HALF1, sq) == sq + (nu * xp).scale(2) + (nu * nu).scale(Fraction(1, 3))


def test_symbolize_hand_values(plain1):
    xp = sym(plain1, Poly.monomial((1,), (1,)))
    nu = sym(plain1, Poly.nu(1))
    assert symbolize(HALF1, xp + nu.scale(half)) == xp
    sq = sym(plain1, Poly.monomial((2,), (2,)))
    assert symbolize(HALF1, quantize(HALF1, sq)) == sq


def test_constant_is_fixed(plain1):
    c = RadicalSymbol.const(plain1, Fraction(-7, 3))
    assert quantize(HALF1, c) == c and symbolize(HALF1, c) == c


@pytest.mark.parametrize("n", [3, 5])
def test_power_of_H_fixed_by_quantization(n):
    chart = build_metric(n)
    s = chart.H_power(Fraction(1 - n, 4))
    for lam in (Fraction(0), half, Fraction(2, 3)):
        assert quantize(QContext(n, lam, lam), s) == s


def test_inverse_on_monomials_small():
    for n in (1, 2):
        table = BaseTable(n)
        for lam, mu in CONTEXTS:
            ctx = QContext(n, lam, mu)
            for s in monomial_symbols(table, 3, 3):
                assert symbolize(ctx, quantize(ctx, s)) == s
                assert quantize(ctx, symbolize(ctx, s)) == s


@settings(max_examples=40, deadline=None)
@given(polys(2, 3, 5))
def test_inverse_property_random(p):
    table = BaseTable(2)
    s = sym(table, p)
    ctx = QContext(2, Fraction(1, 3), Fraction(1, 5))
    assert symbolize(ctx, quantize(ctx, s)) == s
    assert quantize(ctx, symbolize(ctx, s)) == s


@pytest.mark.parametrize("n, order", [(1, 3), (2, 1)])
def test_inverse_on_radical_symbol(n, order):
    chart = build_metric(n)
    s = chart.H_power(Fraction(-1, 2)) * Poly.x(n, 1)
    ctx = QContext(n, half, half)
    q = quantize(ctx, s, truncation=order)
    # exact up to the truncation order: the nu^m parts for m <= order cancel
    back = symbolize(ctx, q, truncation=order)
    diff = (back - s).simplify()
    assert all(min(p.nu_powers()) > order for p in diff.sectors.values())


def test_nu_grading(plain1):
    rng = random.Random(7)
    ctx = QContext(1, Fraction(1, 3), Fraction(2, 3))
    for _ in range(10):
        s = random_polynomial_symbol(rng, plain1, max_xi_degree=4, max_x_degree=4)
        q = quantize(ctx, s).to_poly()
        pieces = q.split_nu()
        # the nu^m piece is the m-th series term, which has fiber degree k - m
        for m, piece in pieces.items():
            for d in piece.xi_degrees():
                assert d + m in s.to_poly().xi_degrees()
        assert max(q.xi_degrees(), default=0) <= max(s.to_poly().xi_degrees(), default=0)


def test_ordering_reproduces_summands(plain1):
    # Homogeneous input of degree k: term m is C_m^k nu^m D^m s.
    ctx = QContext(1, Fraction(1, 4), Fraction(3, 4))
    s = sym(plain1, Poly.monomial((3,), (3,)) + Poly.monomial((4,), (3,)))
    expected = RadicalSymbol.zero(plain1)
    term = s
    for m in range(4):
        expected = expected + term.shift_nu(m).scale(relation_step_oracle(1, ctx.lam, ctx.mu, 3, m))
        term = divergence(term)
    assert quantize(ctx, s) == expected


def test_override_coefficients(plain1):
    xp = sym(plain1, Poly.monomial((1,), (1,)))
    only_leading = hypergeom_apply(HALF1, Family.Q, xp, coeff=lambda k, m: Fraction(int(m == 0)))
    assert only_leading == xp


def test_truncation_and_nontermination():
    chart = build_metric(2)
    s = chart.H_power(Fraction(-1, 2))
    ctx = QContext(2, half, half)
    with pytest.raises(NonterminatingSeries):
        apply_series(ctx, Family.Q, s, max_steps=3)
    res = apply_series(ctx, Family.Q, s, truncation=1)
    assert res.truncated
    first = s + divergence(s).shift_nu(1).scale(coeff_q_closed(ctx, Fraction(-2), 1))
    assert res.symbol == first


# resonance


def test_is_resonant_examples():
    assert is_resonant(QContext(1, 0, 1))
    assert is_resonant(QContext(2, 0, Fraction(4, 3)))
    assert not is_resonant(QContext(2, 0, half))
    assert not is_resonant(QContext(2, 0, Fraction(5, 4)))


@pytest.mark.parametrize(
    "ctx, witness",
    [
        (QContext(1, 0, 1), (1, 1)),
        (QContext(2, 0, Fraction(4, 3)), (2, 2)),
        (QContext(2, Fraction(1, 3), Fraction(5, 3)), (2, 2)),
    ],
)
def test_resonance_raises_with_witness(ctx, witness):
    assert resonance_witness(ctx) == witness
    k, m = witness
    with pytest.raises(ResonanceError) as info:
        coeff_q_recursive(ctx, k, m)
        coeff_s_recursive(ctx, k, m)
    assert info.value.witness == witness


def test_resonance_only_at_needed_degrees():
    ctx = QContext(1, 0, 1)
    table = BaseTable(1)
    # degree 2 needs no vanishing denominator here
    s = sym(table, Poly.monomial((2,), (2,)))
    quantize(ctx, s)
    with pytest.raises(ResonanceError) as info:
        quantize(ctx, sym(table, Poly.monomial((1,), (1,))))
    assert info.value.witness == (1, 1)


def test_nonresonant_contexts_compute_everything():
    for n in (1, 2, 3):
        for lam, mu in CONTEXTS:
            ctx = QContext(n, lam, mu)
            assert not is_resonant(ctx) and resonance_witness(ctx) is None
            coeff_table(ctx, 12)


# normal ordering


def test_normal_order_examples(plain1):
    op = normal_order(sym(plain1, Poly.monomial((1,), (1,))))
    assert op.terms == {(1,): sym(plain1, Poly.x(1, 1) * Poly.nu(1))}
    one = normal_order(RadicalSymbol.const(plain1, 1))
    assert one.terms == {(0,): RadicalSymbol.const(plain1, 1)}


@settings(max_examples=50, deadline=None)
@given(polys(2, 3, 5))
def test_normal_order_round_trip(p):
    s = sym(BaseTable(2), p)
    assert unorder(normal_order(s)) == s


def test_normal_order_keeps_r2_powers():
    chart = build_metric(2)
    s = chart.H_delta(Fraction(1, 3))
    op = normal_order(s)
    assert op.order() == 2
    assert unorder(op) == s


def test_normal_order_rejects_fractional_fiber_powers():
    chart = build_metric(3)
    with pytest.raises(NotOperatorSymbol):
        normal_order(chart.H_power(-half))


def test_normal_order_accepts_cancellable_negative_power():
    chart = build_metric(2)
    s = chart.H * chart.H * chart.H_power(-1)
    assert normal_order(s) == normal_order(chart.H)
