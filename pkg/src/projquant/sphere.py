"""Round sphere in an affine (gnomonic) chart and the worked examples.

With ``r2 = 1 + |x|^2`` the inverse metric is ``g^{ij} = r2 (delta^{ij} + x^i x^j)``
and the geodesic Hamiltonian is ``H = g^{ij} xi_i xi_j``.  Both ``H`` and ``r2``
are declared radical bases so that fractional powers of them are symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Dict, List, Optional, Tuple

from .algebra import Poly, as_fraction, format_fraction
from .errors import DegenerateCurvatureError
from .operators import DiffOperator
from .quantize import QContext, is_resonant, normal_order, quantize
from .symbols import BaseTable, RadicalSymbol, divergence

Matrix = List[List[RadicalSymbol]]


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def determinant(mat: Matrix) -> RadicalSymbol:
    """Leibniz expansion; fine for the small n used here."""
    n = len(mat)
    total = None
    for perm in permutations(range(n)):
        term = mat[0][perm[0]]
        for i in range(1, n):
            term = term * mat[i][perm[i]]
        if _perm_sign(perm) < 0:
            term = -term
        total = term if total is None else total + term
    return total


class SphereChart:
    """Metric data of the round ``S^n`` as exact radical-coefficient symbols."""

    def __init__(self, n: int):
        self.n = n
        x = [Poly.x(n, i) for i in range(1, n + 1)]
        p = [Poly.xi(n, i) for i in range(1, n + 1)]
        one = Poly.const(n, 1)
        r2 = one
        for xi in x:
            r2 = r2 + xi * xi
        ginv_poly = [[(one if i == j else Poly.zero(n)) + x[i] * x[j] for j in range(n)] for i in range(n)]
        ginv_poly = [[r2 * c for c in row] for row in ginv_poly]
        H = Poly.zero(n)
        for i in range(n):
            for j in range(n):
                H = H + ginv_poly[i][j] * p[i] * p[j]
        self.r2_poly = r2
        self.H_poly = H
        self.table = BaseTable(n, [("H", H), ("r2", r2)])
        T = self.table
        self.ginv: Matrix = [[RadicalSymbol.from_poly(T, c) for c in row] for row in ginv_poly]
        r2_inv2 = RadicalSymbol.base_power(T, "r2", -2)
        self.g: Matrix = [
            [RadicalSymbol.from_poly(T, (r2 if i == j else Poly.zero(n)) - x[i] * x[j]) * r2_inv2 for j in range(n)]
            for i in range(n)
        ]
        self.det_g = determinant(self.g).simplify()
        self.christoffel = self._christoffel()
        self.trace_gamma = [
            sum((self.christoffel[j][i][j] for j in range(n)), RadicalSymbol.zero(T)).simplify()
            for i in range(n)
        ]

    @property
    def H(self) -> RadicalSymbol:
        return RadicalSymbol.from_poly(self.table, self.H_poly)

    @property
    def r2(self) -> RadicalSymbol:
        return RadicalSymbol.from_poly(self.table, self.r2_poly)

    @property
    def scalar_curvature(self) -> int:
        return self.n * (self.n - 1)

    def _christoffel(self):
        """``Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})``."""
        n = self.n
        dg = [[[self.g[a][b].partial(c) for c in range(n)] for b in range(n)] for a in range(n)]
        gamma = [[[None] * n for _ in range(n)] for _ in range(n)]
        for k in range(n):
            for i in range(n):
                for j in range(i, n):
                    acc = RadicalSymbol.zero(self.table)
                    for l in range(n):
                        inner = dg[j][l][i] + dg[i][l][j] - dg[i][j][l]
                        if not inner.is_zero():
                            acc = acc + self.ginv[k][l] * inner
                    acc = acc.scale(Fraction(1, 2)).simplify()
                    gamma[k][i][j] = gamma[k][j][i] = acc
        return gamma

    def density_factor(self, weight) -> RadicalSymbol:
        """``|det g|^(weight/2) = r2^(-(n+1) weight / 2)``."""
        return RadicalSymbol.base_power(self.table, "r2", -(self.n + 1) * as_fraction(weight) / 2)

    def H_delta(self, delta) -> RadicalSymbol:
        return self.H * self.density_factor(delta)

    def H_power(self, alpha) -> RadicalSymbol:
        return RadicalSymbol.base_power(self.table, "H", alpha)


@lru_cache(maxsize=None)
def build_metric(n: int) -> SphereChart:
    if n < 1:
        raise ValueError("n must be at least 1")
    return SphereChart(n)


def covariant_derivative(chart: SphereChart, w, i: int) -> DiffOperator:
    """``nabla_i = d_i - w Gamma^j_{ij}`` on ``w``-densities (0-based ``i``)."""
    w = as_fraction(w)
    op = DiffOperator.derivative(chart.table, i + 1)
    return op - DiffOperator.multiplication(chart.trace_gamma[i].scale(w))


def laplacian(chart: SphereChart, w, connection: bool = True) -> DiffOperator:
    """``g^{ij} nabla_i nabla_j`` on ``w``-densities.

    The second derivative acts on the density-valued covector ``nabla_j phi``:
    ``nabla_i nabla_j = d_i o nabla_j - Gamma^k_{ij} nabla_k - w Gamma^k_{ik} nabla_j``.
    ``connection=False`` drops every Christoffel term (flat limit).
    """
    n, T = chart.n, chart.table
    w = as_fraction(w)
    if not connection:
        nabla = [DiffOperator.derivative(T, i + 1) for i in range(n)]
    else:
        nabla = [covariant_derivative(chart, w, i) for i in range(n)]
    total = DiffOperator(T)
    for i in range(n):
        for j in range(n):
            if chart.ginv[i][j].is_zero():
                continue
            second = DiffOperator.derivative(T, i + 1).compose(nabla[j])
            if connection:
                for k in range(n):
                    if not chart.christoffel[k][i][j].is_zero():
                        second = second - nabla[k].scale(chart.christoffel[k][i][j])
                second = second - nabla[j].scale(chart.trace_gamma[i].scale(w))
            total = total + second.scale(chart.ginv[i][j])
    return total.simplify()


# reports


@dataclass
class Report:
    name: str
    passed: bool
    values: Dict[str, object] = field(default_factory=dict)
    witness: Optional[object] = None

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


def curvature_constant(ctx: QContext) -> Fraction:
    """``(n+1)^2 lambda (mu - 1) / ((n - 1)((1 - delta)(n + 1) + 1))``."""
    n = ctx.n
    den = (n - 1) * ((1 - ctx.delta) * (n + 1) + 1)
    if n == 1 or den == 0:
        raise DegenerateCurvatureError(
            f"curvature constant undefined for n={n}, delta={ctx.delta}"
        )
    return Fraction((n + 1) ** 2) * ctx.lam * (ctx.mu - 1) / den


def verify_geodesic(ctx: QContext) -> Report:
    """Check ``Q(H_delta) = -hbar^2 (Delta + C R)`` as exact operators.

    With ``nu = i hbar`` the right side is ``nu^2 |g|^(delta/2) (Delta_lambda + C R)``.
    """
    C = curvature_constant(ctx)
    chart = build_metric(ctx.n)
    R = chart.scalar_curvature
    lhs = normal_order(quantize(ctx, chart.H_delta(ctx.delta)))
    lap = laplacian(chart, ctx.lam)
    inner = lap + DiffOperator.multiplication(RadicalSymbol.const(chart.table, C * R))
    rhs = inner.scale(chart.density_factor(ctx.delta).shift_nu(2))
    diff = (lhs - rhs).simplify()
    values = {
        "n": ctx.n,
        "lambda": format_fraction(ctx.lam),
        "mu": format_fraction(ctx.mu),
        "C": format_fraction(C),
        "R": R,
        "CR": format_fraction(C * R),
        "resonant_context": is_resonant(ctx),
        "convention": "nu = i*hbar; xi^beta -> nu^|beta| d^beta; -hbar^2 = nu^2",
    }
    witness = None
    if not diff.is_zero():
        witness = {
            "".join(map(str, a)): str(c) for a, c in diff.terms.items()
        }
    return Report("geodesic", diff.is_zero(), values, witness)


def power_identity_coefficient(n: int, alpha) -> Fraction:
    alpha = as_fraction(alpha)
    return 2 * alpha * (4 * alpha + n - 1)


def verify_power_identity(n: int, alpha) -> Report:
    """``D(H^alpha) = 2 alpha (4 alpha + n - 1) H^(alpha-1) r2 <xi, x>``."""
    alpha = as_fraction(alpha)
    chart = build_metric(n)
    T = chart.table
    pairing = Poly.zero(n)
    for i in range(1, n + 1):
        pairing = pairing + Poly.x(n, i) * Poly.xi(n, i)
    coeff = power_identity_coefficient(n, alpha)
    lhs = divergence(chart.H_power(alpha))
    rhs = chart.H_power(alpha - 1) * RadicalSymbol.from_poly(T, chart.r2_poly * pairing).scale(coeff)
    identity_holds = (lhs - rhs).is_zero()
    vanishes = lhs.is_zero()
    predicted_vanish = alpha == 0 or alpha == Fraction(1 - n, 4)
    values = {
        "n": n,
        "alpha": format_fraction(alpha),
        "coefficient": format_fraction(coeff),
        "divergence_vanishes": vanishes,
        "fixed_point_exponent": format_fraction(Fraction(1 - n, 4)),
    }
    passed = identity_holds and vanishes == predicted_vanish
    witness = None if passed else str((lhs - rhs).simplify())
    return Report("power", passed, values, witness)


def verify_length_element(n: int = 3, lam=Fraction(1, 2), alpha=None) -> Report:
    """Check that ``H^alpha`` (default ``alpha = (1-n)/4``) is fixed by ``Q_{lam,lam}``."""
    alpha = Fraction(1 - n, 4) if alpha is None else as_fraction(alpha)
    ctx = QContext(n, lam, lam)
    chart = build_metric(n)
    s = chart.H_power(alpha)
    image = quantize(ctx, s, truncation=2)
    fixed = (image - s).is_zero()
    values = {
        "n": n,
        "lambda": format_fraction(ctx.lam),
        "alpha": format_fraction(alpha),
        "symbol": str(s),
        "quantized": str(image.simplify()),
        "fixed_point": fixed,
    }
    return Report("length-element", fixed, values, None if fixed else str((image - s).simplify()))
