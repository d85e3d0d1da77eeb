"""Projectively equivariant quantization and symbol maps.

Both maps act on a homogeneous part of fiber degree ``k`` as a finite (or
truncated) series ``sum_m c_m(k - m) * nu**m * D**m``; the coefficient is
evaluated at the degree *after* ``D**m`` has acted, i.e. ``D`` sits to the
right of the operator-valued parameters.

With ``a = (n+1)*lambda`` and ``b = (n+1)*(1 - delta)``:

* quantization: ``c_m(E) = (E + a)_m / ((2E + b + m - 1)_m * m!)``, the
  two-over-two hypergeometric series ``F(E+a, 2E+b-1; E+(b-1)/2, E+b/2 | nu D/4)``;
* symbol map: ``c_m(E) = (-1)**m (E + a)_m / ((2E + b)_m * m!)``, the
  confluent series ``F(E+a; 2E+b | -nu D)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .algebra import Fraction as _F, Poly, as_fraction
from .errors import NonterminatingSeries, NotOperatorSymbol, ResonanceError, UsageError
from .operators import DiffOperator
from .symbols import RadicalSymbol, decompose, divergence

# Normal ordering sends xi^beta to (NORMAL_ORDER_SIGN * nu)**|beta| d^beta.
# The sign must agree with the sign of nu in the quantization series for the
# composite map to intertwine the sl(n+1) actions.
NORMAL_ORDER_SIGN = 1

DEFAULT_MAX_STEPS = 24


@dataclass(frozen=True)
class QContext:
    """Dimension and density weights; ``delta = mu - lambda``."""

    n: int
    lam: Fraction
    mu: Fraction

    def __init__(self, n: int, lam, mu):
        if int(n) != n or n < 1:
            raise UsageError(f"n must be a positive integer, got {n}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "lam", as_fraction(lam))
        object.__setattr__(self, "mu", as_fraction(mu))

    @property
    def delta(self) -> Fraction:
        return self.mu - self.lam

    @property
    def a(self) -> Fraction:
        return (self.n + 1) * self.lam

    @property
    def b(self) -> Fraction:
        return (self.n + 1) * (1 - self.delta)


def pochhammer(a, m: int) -> Fraction:
    """Rising factorial ``a (a+1) ... (a+m-1)``."""
    a = as_fraction(a)
    out = Fraction(1)
    for j in range(m):
        out *= a + j
    return out


# resonance


def is_resonant(ctx: QContext) -> bool:
    """True iff ``delta = 1 + l/(n+1)`` for a nonnegative integer ``l``."""
    ell = (ctx.delta - 1) * (ctx.n + 1)
    return ell >= 0 and ell.denominator == 1


def resonance_witness(ctx: QContext) -> Optional[Tuple[int, int]]:
    """Smallest ``(k, m)`` whose quantization or symbol coefficient has a zero denominator."""
    if not is_resonant(ctx):
        return None
    ell = int((ctx.delta - 1) * (ctx.n + 1))
    for k in range(ell + 3):
        for m in range(1, k + 1):
            try:
                coeff_q_recursive(ctx, k, m)
                coeff_s_recursive(ctx, k, m)
            except ResonanceError:
                return (k, m)
    return None


# coefficients


@lru_cache(maxsize=None)
def coeff_q_closed(ctx: QContext, E, m: int) -> Fraction:
    """Closed-form quantization coefficient at Euler eigenvalue ``E``."""
    E = as_fraction(E)
    lower_start = 2 * E + ctx.b + m - 1
    for j in range(m):
        if lower_start + j == 0:
            raise ResonanceError(
                f"quantization coefficient C_{m}(E={E}) has a vanishing denominator "
                f"(delta={ctx.delta}, n={ctx.n})",
                witness=(E + m, m),
            )
    return pochhammer(E + ctx.a, m) / (pochhammer(lower_start, m) * factorial(m))


@lru_cache(maxsize=None)
def coeff_q_recursive(ctx: QContext, k, m: int) -> Fraction:
    """``C_m^k`` from the step ``C_{j+1}^k / C_j^k`` starting at ``C_0^k = 1``."""
    k = as_fraction(k)
    c = Fraction(1)
    for j in range(m):
        den = (j + 1) * (2 * k - j - 2 + ctx.b)
        if den == 0:
            raise ResonanceError(
                f"quantization recursion step {j}->{j + 1} at degree {k} divides by zero "
                f"(delta={ctx.delta}, n={ctx.n})",
                witness=(k, m),
            )
        c *= (k - j - 1 + ctx.a) / den
    return c


@lru_cache(maxsize=None)
def coeff_s_recursive(ctx: QContext, k, m: int) -> Fraction:
    """Symbol-map coefficient, chained ``m`` times from degree ``k - m``.

    The step is ``Ct_{j+1}^{d+1} = -(d + a) / ((j+1)(2d - j + b)) * Ct_j^d``.
    """
    k = as_fraction(k)
    d = k - m
    c = Fraction(1)
    for j in range(m):
        den = (j + 1) * (2 * d - j + ctx.b)
        if den == 0:
            raise ResonanceError(
                f"symbol recursion step {j}->{j + 1} at degree {d} divides by zero "
                f"(delta={ctx.delta}, n={ctx.n})",
                witness=(k, m),
            )
        c *= -(d + ctx.a) / den
        d += 1
    return c


def coeff_s_closed(ctx: QContext, E, m: int) -> Fraction:
    E = as_fraction(E)
    den = pochhammer(2 * E + ctx.b, m)
    if den == 0:
        raise ResonanceError("symbol coefficient has a vanishing denominator", witness=(E + m, m))
    return (-1) ** m * pochhammer(E + ctx.a, m) / (den * factorial(m))


@dataclass(frozen=True)
class HypergeometricSeries:
    """``F(upper; lower | scale * nu * D)`` with parameters affine in ``E``.

    Each parameter is a pair ``(slope, intercept)`` meaning ``slope*E + intercept``.
    """

    upper: Tuple[Tuple[Fraction, Fraction], ...]
    lower: Tuple[Tuple[Fraction, Fraction], ...]
    scale: Fraction

    def coefficient(self, E, m: int) -> Fraction:
        E = as_fraction(E)
        num = Fraction(1)
        for s, c in self.upper:
            num *= pochhammer(s * E + c, m)
        den = Fraction(factorial(m))
        for s, c in self.lower:
            den *= pochhammer(s * E + c, m)
        if den == 0:
            raise ResonanceError(f"hypergeometric coefficient at E={E}, m={m} is singular",
                                 witness=(E + m, m))
        return num / den * self.scale ** m


def quantization_series(ctx: QContext) -> HypergeometricSeries:
    a, b = ctx.a, ctx.b
    half = Fraction(1, 2)
    return HypergeometricSeries(
        upper=((_F(1), a), (_F(2), b - 1)),
        lower=((_F(1), half * b - half), (_F(1), half * b)),
        scale=Fraction(1, 4),
    )


def symbol_series(ctx: QContext) -> HypergeometricSeries:
    return HypergeometricSeries(upper=((_F(1), ctx.a),), lower=((_F(2), ctx.b),), scale=_F(-1))


def half_density_series(n: int) -> HypergeometricSeries:
    """Confluent form ``F(2E'; E' | nu D / 4)`` with ``E' = E + n/2``."""
    return HypergeometricSeries(
        upper=((_F(2), _F(n)),), lower=((_F(1), Fraction(n, 2)),), scale=Fraction(1, 4)
    )


@dataclass
class CoeffTable:
    """Coefficients ``C_m^k`` (quantization) and ``Ct_m^k`` (symbol map) keyed by ``(k, m)``."""

    context: QContext
    q: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)
    s: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    @property
    def max_degree(self) -> int:
        return max((k for k, _ in self.q), default=-1)


def coeff_table(ctx: QContext, max_degree: int) -> CoeffTable:
    table = CoeffTable(ctx)
    for k in range(max_degree + 1):
        for m in range(k + 1):
            table.q[k, m] = coeff_q_recursive(ctx, k, m)
            table.s[k, m] = coeff_s_recursive(ctx, k, m)
    return table


def invert_triangular(ctx: QContext, max_degree: int) -> CoeffTable:
    """Symbol-map coefficients by inverting the quantization matrix on towers.

    On the tower ``v_j = nu^j D^j s`` over a degree-``k`` symbol ``s``, the
    quantization map is unit lower triangular with entry ``C_i^{k-j}`` in
    row ``i + j``, column ``j``.  Column 0 of its inverse holds ``Ct_m^k``.
    The symbol-map recursion is not used.
    """
    table = CoeffTable(ctx)
    for k in range(max_degree + 1):
        size = k + 1
        mat = [[Fraction(0)] * size for _ in range(size)]
        for j in range(size):
            for i in range(size - j):
                mat[i + j][j] = coeff_q_recursive(ctx, k - j, i)
        # forward substitution for mat @ y = e_0
        y: List[Fraction] = []
        for r in range(size):
            acc = Fraction(1 if r == 0 else 0)
            for c in range(r):
                acc -= mat[r][c] * y[c]
            y.append(acc / mat[r][r])
        for m in range(size):
            table.q[k, m] = mat[m][0]
            table.s[k, m] = y[m]
    return table


# series engine


class Family(enum.Enum):
    Q = "quantize"
    S = "symbolize"


CoeffFn = Callable[[Fraction, int], Fraction]


def _family_coeff(ctx: QContext, family: Family) -> CoeffFn:
    if family is Family.Q:
        return lambda k, m: coeff_q_closed(ctx, k - m, m)
    return lambda k, m: coeff_s_recursive(ctx, k, m)


@dataclass
class SeriesResult:
    symbol: RadicalSymbol
    truncated: bool


def apply_series(
    ctx: QContext,
    family: Family,
    s: RadicalSymbol,
    truncation: Optional[int] = None,
    coeff: Optional[CoeffFn] = None,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> SeriesResult:
    """Evaluate the series on every homogeneous part of ``s``.

    ``coeff(k, m)`` overrides the coefficient family (``k`` is the degree of
    the part).  ``truncated`` reports whether a nonzero term was dropped.
    """
    if s.n != ctx.n:
        raise UsageError(f"symbol has n={s.n} but context has n={ctx.n}")
    coeff = coeff or _family_coeff(ctx, family)
    total = RadicalSymbol.zero(s.table)
    truncated = False
    for part in decompose(s):
        k = part.degree
        term = part.symbol
        m = 0
        while not term.is_zero():
            if truncation is not None and m > truncation:
                truncated = True
                break
            if truncation is None and m > max_steps:
                raise NonterminatingSeries(
                    f"divergence does not annihilate the degree-{k} part within {max_steps} steps; "
                    "supply a truncation order",
                    degree=k,
                    steps=max_steps,
                )
            c = coeff(k, m)
            if c:
                total = total + term.shift_nu(m).scale(c)
            term = divergence(term)
            m += 1
    return SeriesResult(total, truncated)


def hypergeom_apply(ctx, family, s, truncation=None, coeff=None) -> RadicalSymbol:
    return apply_series(ctx, family, s, truncation, coeff).symbol


def quantize(ctx: QContext, s: RadicalSymbol, truncation: Optional[int] = None) -> RadicalSymbol:
    return apply_series(ctx, Family.Q, s, truncation).symbol


def symbolize(ctx: QContext, s: RadicalSymbol, truncation: Optional[int] = None) -> RadicalSymbol:
    return apply_series(ctx, Family.S, s, truncation).symbol


# normal ordering


def normal_order(s: RadicalSymbol) -> DiffOperator:
    """Map a symbol polynomial in the fiber variables to its operator.

    ``P(x) xi^beta`` becomes ``(NORMAL_ORDER_SIGN * nu)**|beta| P(x) d^beta``.
    Radical exponents are allowed only on fiber-free bases.
    """
    table = s.table
    terms: Dict[Tuple[int, ...], RadicalSymbol] = {}
    for e, p in s.simplify().sectors.items():
        for q, base in zip(e, table.bases):
            if q and base.xi_degree:
                raise NotOperatorSymbol(
                    f"sector with {base.name}^({q}) is not polynomial in the fiber variables"
                )
        for beta, coeff_poly in p.split_xi().items():
            k = sum(beta)
            c = RadicalSymbol(table, {e: coeff_poly.shift_nu(k).scale(NORMAL_ORDER_SIGN ** k)})
            terms[beta] = terms[beta] + c if beta in terms else c
    return DiffOperator._raw(table, terms)


def unorder(op: DiffOperator) -> RadicalSymbol:
    """Inverse of :func:`normal_order`."""
    n = op.n
    total = RadicalSymbol.zero(op.table)
    for beta, c in op.terms.items():
        k = sum(beta)
        xi = Poly.monomial((0,) * n, beta)
        total = total + (c * xi).shift_nu(-k).scale(NORMAL_ORDER_SIGN ** k)
    return total
