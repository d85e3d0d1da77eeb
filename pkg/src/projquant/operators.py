"""Differential operators with symbol-valued coefficients, normal ordered.

An operator is a finite map from a multi-index ``alpha`` to a fiber-free
coefficient ``a_alpha(x)``, read as ``sum a_alpha * d^alpha`` with every
derivative to the right of its coefficient.
"""

from __future__ import annotations

from itertools import product
from math import comb
from typing import Dict, Iterable, Tuple

from .algebra import Poly, Scalar, as_fraction
from .errors import UsageError
from .symbols import BaseTable, RadicalSymbol

MultiIndex = Tuple[int, ...]


def _xi_free(c: RadicalSymbol) -> bool:
    for e, p in c.sectors.items():
        if not p.is_xi_free():
            return False
        if any(q and b.xi_degree for q, b in zip(e, c.table.bases)):
            return False
    return True


class DiffOperator:
    __slots__ = ("table", "_t")
    __hash__ = None

    def __init__(self, table: BaseTable, terms: Dict[MultiIndex, RadicalSymbol] | None = None):
        self.table = table
        t = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != table.n or min(alpha) < 0:
                raise UsageError(f"bad multi-index {alpha}")
            if isinstance(c, Poly):
                c = RadicalSymbol.from_poly(table, c)
            elif not isinstance(c, RadicalSymbol):
                c = RadicalSymbol.const(table, c)
            if c.table != table:
                raise UsageError("coefficient over a different base table")
            if not _xi_free(c):
                raise UsageError("operator coefficients must not depend on the fiber variables")
            if alpha in t:
                c = t[alpha] + c
            if c.is_zero():
                t.pop(alpha, None)
            else:
                t[alpha] = c
        self._t = t

    @classmethod
    def _raw(cls, table, t):
        op = cls.__new__(cls)
        op.table = table
        op._t = {a: c for a, c in t.items() if not c.is_zero()}
        return op

    @classmethod
    def identity(cls, table: BaseTable) -> "DiffOperator":
        return cls.multiplication(RadicalSymbol.const(table, 1))

    @classmethod
    def multiplication(cls, c: RadicalSymbol) -> "DiffOperator":
        return cls._raw(c.table, {(0,) * c.table.n: c})

    @classmethod
    def derivative(cls, table: BaseTable, i: int) -> "DiffOperator":
        """``d/dx^i`` with 1-based ``i``."""
        alpha = [0] * table.n
        alpha[i - 1] = 1
        return cls._raw(table, {tuple(alpha): RadicalSymbol.const(table, 1)})

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def terms(self) -> Dict[MultiIndex, RadicalSymbol]:
        return dict(self._t)

    def order(self) -> int:
        return max((sum(a) for a in self._t), default=-1)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self._t.values())

    def _check(self, other: "DiffOperator"):
        if not isinstance(other, DiffOperator):
            raise UsageError(f"expected a DiffOperator, got {type(other).__name__}")
        if other.table != self.table:
            raise UsageError("operators over different base tables")

    def __add__(self, other):
        self._check(other)
        t = dict(self._t)
        for a, c in other._t.items():
            t[a] = t[a] + c if a in t else c
        return DiffOperator._raw(self.table, t)

    def __neg__(self):
        return DiffOperator._raw(self.table, {a: -c for a, c in self._t.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DiffOperator":
        """Multiply every coefficient by a rational, Scalar or coefficient symbol."""
        if isinstance(c, RadicalSymbol):
            return DiffOperator._raw(self.table, {a: c * v for a, v in self._t.items()})
        if not isinstance(c, Scalar):
            c = as_fraction(c)
        return DiffOperator._raw(self.table, {a: v * c for a, v in self._t.items()})

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """``self o other`` via the generalized Leibniz rule."""
        self._check(other)
        n = self.n
        t: Dict[MultiIndex, RadicalSymbol] = {}
        for beta, b in other._t.items():
            cache: Dict[MultiIndex, RadicalSymbol] = {(0,) * n: b}

            def deriv(gamma):
                got = cache.get(gamma)
                if got is None:
                    i = next(j for j, g in enumerate(gamma) if g)
                    lower = gamma[:i] + (gamma[i] - 1,) + gamma[i + 1:]
                    got = deriv(lower).partial(i)
                    cache[gamma] = got
                return got

            for alpha, a in self._t.items():
                for gamma in product(*(range(k + 1) for k in alpha)):
                    db = deriv(gamma)
                    if db.is_zero():
                        continue
                    mult = 1
                    for k, g in zip(alpha, gamma):
                        mult *= comb(k, g)
                    key = tuple(k - g + c for k, g, c in zip(alpha, gamma, beta))
                    term = (a * db).scale(mult)
                    t[key] = t[key] + term if key in t else term
        return DiffOperator._raw(self.table, t)

    __matmul__ = compose

    def apply(self, f: RadicalSymbol) -> RadicalSymbol:
        """Apply to a fiber-free function (used for sanity checks)."""
        total = RadicalSymbol.zero(self.table)
        for alpha, c in self._t.items():
            g = f
            for i, k in enumerate(alpha):
                for _ in range(k):
                    g = g.partial(i)
            total = total + c * g
        return total

    def simplify(self) -> "DiffOperator":
        return DiffOperator._raw(self.table, {a: c.simplify() for a, c in self._t.items()})

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        return f"DiffOperator({self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for alpha in sorted(self._t, key=lambda a: (-sum(a), tuple(-k for k in a))):
            d = "*".join(
                (f"d{i}" if k == 1 else f"d{i}^{k}") for i, k in enumerate(alpha, start=1) if k
            )
            c = str(self._t[alpha])
            parts.append(f"({c})*{d}" if d else f"({c})")
        return " + ".join(parts)


def multi_indices(n: int, degree: int) -> Iterable[MultiIndex]:
    """All multi-indices of length ``n`` and total ``degree``."""
    if n == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in multi_indices(n - 1, degree - first):
            yield (first,) + rest
