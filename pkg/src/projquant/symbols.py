"""Polynomial and radical symbols, the Euler and divergence operators.

A radical symbol is a finite sum ``sum_e P_e * prod_j B_j**e_j`` where the
``B_j`` are declared fiber-homogeneous polynomials (the *bases*) and the
exponents are rationals.  Ordinary polynomial symbols are the special case
with a single all-zero exponent vector.

Canonical form: sectors whose exponent vectors differ by an integer vector
are merged.  The merged sector is keyed by the componentwise minimum of the
exponents; a nonnegative integer part of that minimum is absorbed into the
polynomial.  Canonical forms are not unique (``H * H**(-1/2)`` and
``H**(1/2)`` both are canonical), so equality is decided by subtracting and
testing for zero, which needs no divisibility test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

from .algebra import Poly, Scalar, as_fraction
from .errors import UsageError

Exponents = Tuple[Fraction, ...]


@dataclass(frozen=True)
class Base:
    name: str
    poly: Poly
    xi_degree: int


class BaseTable:
    """Ordered, named collection of fiber-homogeneous radical bases."""

    def __init__(self, n: int, bases: Iterable[Tuple[str, Poly]] = ()):
        if n < 1:
            raise UsageError("n must be at least 1")
        self.n = n
        entries = []
        seen = set()
        for name, poly in bases:
            if name in seen:
                raise UsageError(f"duplicate base name {name!r}")
            seen.add(name)
            if poly.nvars != 2 * n:
                raise UsageError(f"base {name!r} lives in the wrong ring")
            if poly.nu_powers() - {0}:
                raise UsageError(f"base {name!r} must not depend on nu")
            degrees = poly.xi_degrees()
            if len(degrees) != 1:
                raise UsageError(f"base {name!r} is not homogeneous in the fiber variables")
            entries.append(Base(name, poly, degrees.pop()))
        self.bases: Tuple[Base, ...] = tuple(entries)
        self._power_cache: Dict[Tuple[int, int], Poly] = {}

    def __len__(self):
        return len(self.bases)

    def index(self, name: str) -> int:
        for j, b in enumerate(self.bases):
            if b.name == name:
                return j
        raise UsageError(f"unknown base {name!r}")

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(b.name for b in self.bases)

    def power(self, j: int, k: int) -> Poly:
        key = (j, k)
        p = self._power_cache.get(key)
        if p is None:
            p = self.bases[j].poly ** k
            self._power_cache[key] = p
        return p

    @property
    def zero_exponent(self) -> Exponents:
        return (Fraction(0),) * len(self.bases)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, BaseTable):
            return NotImplemented
        return self.n == other.n and self.bases == other.bases

    def __hash__(self):
        return hash((self.n, self.bases))

    def __repr__(self):
        return f"BaseTable(n={self.n}, bases={list(self.names)})"


def _frac_part(q: Fraction) -> Fraction:
    return q - math.floor(q)


def _canonical(table: BaseTable, contributions: Iterable[Tuple[Exponents, Poly]]):
    """Merge sector contributions into canonical sector form."""
    classes: Dict[Exponents, List[Tuple[Exponents, Poly]]] = {}
    for e, p in contributions:
        if p.is_zero():
            continue
        classes.setdefault(tuple(_frac_part(q) for q in e), []).append((e, p))
    out: Dict[Exponents, Poly] = {}
    for items in classes.values():
        lo = [min(col) for col in zip(*(e for e, _ in items))]
        key = tuple(q if q < 0 else _frac_part(q) for q in lo)
        total = None
        for e, p in items:
            for j, (a, b) in enumerate(zip(e, key)):
                shift = a - b
                if shift:
                    p = p * table.power(j, int(shift))
            total = p if total is None else total + p
        if total is not None and not total.is_zero():
            out[key] = total
    return out


class RadicalSymbol:
    """Immutable finite sum of polynomial multiples of rational base powers."""

    __slots__ = ("table", "_s")
    __hash__ = None

    def __init__(self, table: BaseTable, sectors: Dict[Sequence, Poly] | None = None):
        self.table = table
        contributions = []
        for e, p in (sectors or {}).items():
            e = tuple(as_fraction(q) for q in e)
            if len(e) != len(table):
                raise UsageError("exponent vector length does not match the base table")
            if p.nvars != 2 * table.n:
                raise UsageError("sector polynomial lives in the wrong ring")
            contributions.append((e, p))
        self._s = _canonical(table, contributions)

    @classmethod
    def _raw(cls, table, s):
        r = cls.__new__(cls)
        r.table = table
        r._s = s
        return r

    @classmethod
    def from_poly(cls, table: BaseTable, p: Poly) -> "RadicalSymbol":
        if p.nvars != 2 * table.n:
            raise UsageError("polynomial lives in the wrong ring")
        return cls._raw(table, {table.zero_exponent: p} if p else {})

    @classmethod
    def const(cls, table: BaseTable, value) -> "RadicalSymbol":
        return cls.from_poly(table, Poly.const(table.n, value))

    @classmethod
    def zero(cls, table: BaseTable) -> "RadicalSymbol":
        return cls._raw(table, {})

    @classmethod
    def base_power(cls, table: BaseTable, name: str, exponent) -> "RadicalSymbol":
        e = [Fraction(0)] * len(table)
        e[table.index(name)] = as_fraction(exponent)
        return cls(table, {tuple(e): Poly.const(table.n, 1)})

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def sectors(self) -> Dict[Exponents, Poly]:
        return dict(self._s)

    def is_zero(self) -> bool:
        return not self._s

    def __bool__(self):
        return bool(self._s)

    def is_polynomial(self) -> bool:
        return not self._s or set(self._s) == {self.table.zero_exponent}

    def to_poly(self) -> Poly:
        if not self.is_polynomial():
            raise UsageError("symbol has nonzero radical exponents")
        return self._s.get(self.table.zero_exponent, Poly.zero(self.n))

    def sector_offset(self, e: Exponents) -> Fraction:
        return sum((q * b.xi_degree for q, b in zip(e, self.table.bases)), Fraction(0))

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, RadicalSymbol):
            if other.table != self.table:
                raise UsageError("symbols over different base tables")
            return other
        if isinstance(other, Poly):
            return RadicalSymbol.from_poly(self.table, other)
        if isinstance(other, (int, Fraction, Scalar)):
            return RadicalSymbol.from_poly(self.table, Poly.const(self.n, other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other._s:
            return self
        if not self._s:
            return other
        if self.is_polynomial() and other.is_polynomial():
            return RadicalSymbol.from_poly(self.table, self.to_poly() + other.to_poly())
        return RadicalSymbol._raw(
            self.table, _canonical(self.table, list(self._s.items()) + list(other._s.items()))
        )

    __radd__ = __add__

    def __neg__(self):
        return RadicalSymbol._raw(self.table, {e: -p for e, p in self._s.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_polynomial() and other.is_polynomial():
            return RadicalSymbol.from_poly(self.table, self.to_poly() * other.to_poly())
        contributions = []
        for ea, pa in self._s.items():
            for eb, pb in other._s.items():
                contributions.append((tuple(a + b for a, b in zip(ea, eb)), pa * pb))
        return RadicalSymbol._raw(self.table, _canonical(self.table, contributions))

    __rmul__ = __mul__

    def scale(self, c) -> "RadicalSymbol":
        if isinstance(c, Scalar):
            return self * c
        c = as_fraction(c)
        if not c:
            return RadicalSymbol.zero(self.table)
        return RadicalSymbol._raw(self.table, {e: p.scale(c) for e, p in self._s.items()})

    def shift_nu(self, power: int) -> "RadicalSymbol":
        return RadicalSymbol._raw(self.table, {e: p.shift_nu(power) for e, p in self._s.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise UsageError("use base_power for negative powers")
        out = RadicalSymbol.const(self.table, 1)
        for _ in range(k):
            out = out * self
        return out

    def partial(self, var: int) -> "RadicalSymbol":
        """Chain rule: d(P B^e) = dP B^e + sum_j e_j P dB_j B^(e - 1_j)."""
        contributions = []
        for e, p in self._s.items():
            contributions.append((e, p.partial(var)))
            for j, q in enumerate(e):
                if not q:
                    continue
                db = self.table.bases[j].poly.partial(var)
                if db.is_zero():
                    continue
                shifted = e[:j] + (q - 1,) + e[j + 1:]
                contributions.append((shifted, (p * db).scale(q)))
        return RadicalSymbol._raw(self.table, _canonical(self.table, contributions))

    def simplify(self) -> "RadicalSymbol":
        """Cancel base factors against negative exponents where the division is exact."""
        out = []
        for e, p in self._s.items():
            e = list(e)
            for j, base in enumerate(self.table.bases):
                while e[j] < 0:
                    q = p.divide_exact(base.poly)
                    if q is None:
                        break
                    p, e[j] = q, e[j] + 1
            out.append((tuple(e), p))
        return RadicalSymbol._raw(self.table, _canonical(self.table, out))

    def evaluate_x(self, point) -> "RadicalSymbol":
        """Substitute a rational point for x; all exponents must be integers."""
        total = Poly.zero(self.n)
        for e, p in self._s.items():
            if any(q.denominator != 1 for q in e):
                raise UsageError("cannot evaluate fractional powers exactly")
            term = p.evaluate_x(point)
            for j, q in enumerate(e):
                b = self.table.bases[j].poly.evaluate_x(point)
                if q >= 0:
                    term = term * b ** int(q)
                else:
                    if not b.is_xi_free() or b.is_zero():
                        raise UsageError("cannot invert a fiber-dependent base")
                    c = b.constant_value().constant_value()
                    term = term.scale(Fraction(1) / c ** int(-q))
            total = total + term
        return RadicalSymbol.from_poly(self.table, total)

    # comparison

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    def __repr__(self):
        return f"RadicalSymbol({self})"

    def __str__(self):
        from .expr import format_symbol

        return format_symbol(self)


def rs_eq(a: RadicalSymbol, b: RadicalSymbol) -> bool:
    """Mathematical equality of two symbols over the same base table."""
    if a.table != b.table:
        raise UsageError("symbols over different base tables")
    return (a - b).is_zero()


def xi_var(n: int, i: int) -> int:
    """0-based variable index of ``xi_i`` (1-based ``i``)."""
    return n + i - 1


def euler(s: RadicalSymbol) -> RadicalSymbol:
    n = s.n
    total = RadicalSymbol.zero(s.table)
    for i in range(1, n + 1):
        total = total + s.partial(xi_var(n, i)) * Poly.xi(n, i)
    return total


def divergence(s: RadicalSymbol) -> RadicalSymbol:
    n = s.n
    total = RadicalSymbol.zero(s.table)
    for i in range(1, n + 1):
        total = total + s.partial(xi_var(n, i)).partial(i - 1)
    return total


@dataclass(frozen=True, eq=False)
class HomogeneousPart:
    degree: Fraction
    symbol: RadicalSymbol


def decompose(s: RadicalSymbol) -> List[HomogeneousPart]:
    """Split into parts of distinct total fiber degree, ascending."""
    groups: Dict[Fraction, List[Tuple[Exponents, Poly]]] = {}
    for e, p in s._s.items():
        offset = s.sector_offset(e)
        for d, piece in p.split_xi_degree().items():
            groups.setdefault(offset + d, []).append((e, piece))
    return [
        HomogeneousPart(degree, RadicalSymbol._raw(s.table, _canonical(s.table, items)))
        for degree, items in sorted(groups.items())
    ]
