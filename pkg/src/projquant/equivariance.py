"""Lie actions of polynomial vector fields and exact equivariance checks.

Weights act as follows (``div X = sum_i d_i X^i``):

* on ``w``-densities: ``L_X = X^i d_i + w div X``;
* on symbols of weight ``delta``: the cotangent lift
  ``X^i d_{x^i} - xi_j (d_i X^j) d_{xi_i}`` plus ``delta div X``;
* on operators ``F_lambda -> F_mu``: ``L_X A = L^mu_X o A - A o L^lambda_X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

from .algebra import Poly, as_fraction
from .errors import UsageError
from .operators import DiffOperator
from .quantize import QContext, normal_order, quantize, symbolize, unorder
from .symbols import BaseTable, RadicalSymbol, xi_var


class VectorField:
    """Polynomial vector field ``X^i d/dx^i`` on one affine chart."""

    __slots__ = ("components", "label")

    def __init__(self, components: Sequence[Poly], label: str = ""):
        components = tuple(components)
        if not components:
            raise UsageError("a vector field needs at least one component")
        n = len(components)
        for c in components:
            if c.nvars != 2 * n:
                raise UsageError("component lives in the wrong ring")
            if not c.is_xi_free():
                raise UsageError("vector field components must depend on x only")
        self.components = components
        self.label = label

    @property
    def n(self) -> int:
        return len(self.components)

    def divergence(self) -> Poly:
        total = Poly.zero(self.n)
        for i, c in enumerate(self.components):
            total = total + c.partial(i)
        return total

    def is_affine(self) -> bool:
        return all(c.x_degrees() <= {0, 1} for c in self.components)

    def bracket(self, other: "VectorField") -> "VectorField":
        """Lie bracket ``[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i``."""
        n = self.n
        out = []
        for i in range(n):
            c = Poly.zero(n)
            for j in range(n):
                c = c + self.components[j] * other.components[i].partial(j)
                c = c - other.components[j] * self.components[i].partial(j)
            out.append(c)
        return VectorField(out, f"[{self.label},{other.label}]")

    def __add__(self, other):
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def scale(self, c) -> "VectorField":
        return VectorField([p.scale(c) for p in self.components], self.label)

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    __hash__ = None

    def __repr__(self):
        return f"VectorField({self.label or list(map(str, self.components))})"


def sl_generators(n: int) -> List[VectorField]:
    """Translations, linear fields ``x^i d_j`` and quadratic fields ``x^i x^j d_j``."""
    if n < 1:
        raise UsageError("n must be at least 1")
    zero = Poly.zero(n)
    one = Poly.const(n, 1)
    gens = []
    for i in range(1, n + 1):
        comps = [zero] * n
        comps[i - 1] = one
        gens.append(VectorField(comps, f"d{i}"))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            comps = [zero] * n
            comps[j - 1] = Poly.x(n, i)
            gens.append(VectorField(comps, f"x{i}*d{j}"))
    for i in range(1, n + 1):
        xi = Poly.x(n, i)
        comps = [xi * Poly.x(n, j) for j in range(1, n + 1)]
        gens.append(VectorField(comps, f"x{i}*E"))
    return gens


def act_on_density_op(X: VectorField, w, table: Optional[BaseTable] = None) -> DiffOperator:
    """The first-order operator ``X^i d_i + w div X``."""
    table = table or BaseTable(X.n)
    w = as_fraction(w)
    terms = {}
    n = X.n
    for i, c in enumerate(X.components):
        if c:
            alpha = [0] * n
            alpha[i] = 1
            terms[tuple(alpha)] = RadicalSymbol.from_poly(table, c)
    div = X.divergence().scale(w)
    if div:
        terms[(0,) * n] = RadicalSymbol.from_poly(table, div)
    return DiffOperator(table, terms)


def act_on_symbol(X: VectorField, delta, s: RadicalSymbol) -> RadicalSymbol:
    """Lie derivative of a weight-``delta`` symbol along the cotangent lift of ``X``."""
    n = s.n
    if X.n != n:
        raise UsageError("vector field and symbol have different dimensions")
    delta = as_fraction(delta)
    total = RadicalSymbol.zero(s.table)
    for i, c in enumerate(X.components):
        if c:
            total = total + s.partial(i) * c
    for i in range(n):
        ds = s.partial(xi_var(n, i + 1))
        if ds.is_zero():
            continue
        # coefficient of d/dxi_i is -xi_j d_i X^j
        lift = Poly.zero(n)
        for j, c in enumerate(X.components):
            dc = c.partial(i)
            if dc:
                lift = lift + dc * Poly.xi(n, j + 1)
        if lift:
            total = total - ds * lift
    div = X.divergence()
    if delta and div:
        total = total + s * div.scale(delta)
    return total


def act_on_operator(X: VectorField, ctx: QContext, A: DiffOperator) -> DiffOperator:
    """``L^mu_X o A - A o L^lambda_X``."""
    left = act_on_density_op(X, ctx.mu, A.table)
    right = act_on_density_op(X, ctx.lam, A.table)
    return left.compose(A) - A.compose(right)


def compose(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    return A.compose(B)


@dataclass
class EquivarianceReport:
    generator: str
    passed: bool
    discrepancy: Optional[DiffOperator] = None

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


Quantizer = Callable[[QContext, RadicalSymbol], RadicalSymbol]


def check_equivariance(
    ctx: QContext,
    s: RadicalSymbol,
    X: VectorField,
    quantizer: Optional[Quantizer] = None,
) -> EquivarianceReport:
    """Compare ``Q(L_X s)`` with ``L_X Q(s)`` as exact operators."""
    quantizer = quantizer or quantize
    lhs = normal_order(quantizer(ctx, act_on_symbol(X, ctx.delta, s)))
    rhs = act_on_operator(X, ctx, normal_order(quantizer(ctx, s)))
    diff = lhs - rhs
    if diff.is_zero():
        return EquivarianceReport(X.label, True)
    return EquivarianceReport(X.label, False, diff)


def check_symbol_equivariance(ctx: QContext, A: DiffOperator, X: VectorField) -> EquivarianceReport:
    """Mirror check for the symbol map: ``sigma(L_X A) = L_X sigma(A)``."""
    lhs = symbolize(ctx, unorder(act_on_operator(X, ctx, A)))
    rhs = act_on_symbol(X, ctx.delta, symbolize(ctx, unorder(A)))
    diff = lhs - rhs
    if diff.is_zero():
        return EquivarianceReport(X.label, True)
    return EquivarianceReport(X.label, False, normal_order(diff))


def identity_quantizer(ctx: QContext, s: RadicalSymbol) -> RadicalSymbol:
    """Plain normal ordering: every series coefficient beyond order 0 is zero."""
    return s
