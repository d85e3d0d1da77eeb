"""Exact scalars and sparse multivariate polynomials.

Scalars are Laurent polynomials in a single formal unit ``nu`` standing for
``i*hbar``; their coefficients are :class:`fractions.Fraction`.  Polynomials
live in ``2n`` commuting variables, ``x1..xn`` followed by ``p1..pn`` (the
fiber coordinates), with scalar coefficients.

Internally a :class:`Poly` is a flat ``dict`` keyed by ``(nu_pow, e_1, ...,
e_2n)``; multiplying two keys is componentwise addition, which keeps the
inner loops short.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Dict, Iterable, Iterator, Mapping, Tuple

from .errors import UsageError

Rational = Fraction

Key = Tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_fraction(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Scalar:
    """Laurent polynomial in ``nu`` with rational coefficients."""

    __slots__ = ("_c", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        c = {}
        if terms:
            for k, v in terms.items():
                v = as_fraction(v)
                if v:
                    c[int(k)] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: Dict[int, Fraction]) -> "Scalar":
        s = cls.__new__(cls)
        s._c = c
        s._hash = None
        return s

    @classmethod
    def const(cls, value) -> "Scalar":
        return cls({0: value})

    @classmethod
    def nu(cls, power: int = 1) -> "Scalar":
        return cls({power: 1})

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def is_zero(self) -> bool:
        return not self._c

    def is_constant(self) -> bool:
        return not self._c or (len(self._c) == 1 and 0 in self._c)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise UsageError(f"scalar {self} depends on nu")
        return self._c.get(0, Fraction(0))

    def __add__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        c = dict(self._c)
        for k, v in other._c.items():
            w = c.get(k, 0) + v
            if w:
                c[k] = w
            else:
                c.pop(k, None)
        return Scalar._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        c: Dict[int, Fraction] = {}
        for a, u in self._c.items():
            for b, v in other._c.items():
                c[a + b] = c.get(a + b, 0) + u * v
        return Scalar._raw({k: v for k, v in c.items() if v})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            if len(self._c) != 1:
                raise UsageError("only monomial scalars can be inverted")
            ((k, v),) = self._c.items()
            return Scalar._raw({k * e: v ** e})
        out = Scalar.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def __bool__(self):
        return bool(self._c)

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for k, v in sorted(self._c.items()):
            if k == 0:
                body = format_fraction(abs(v))
            else:
                nu = "nu" if k == 1 else (f"nu^{k}" if k > 0 else f"nu^({k})")
                body = nu if abs(v) == 1 else f"{format_fraction(abs(v))}*{nu}"
            parts.append(("-" if v < 0 else "+", body))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _as_scalar(value):
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Fraction)):
        return Scalar.const(value)
    return NotImplemented


def grlex_key(exps: Tuple[int, ...]):
    """Sort key for graded lexicographic order (ascending)."""
    return (sum(exps), exps)


class Poly:
    """Sparse polynomial in ``x1..xn, p1..pn`` with :class:`Scalar` coefficients.

    Values are immutable; every operation returns a new canonical polynomial
    with zero coefficients dropped.
    """

    __slots__ = ("nvars", "_t", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Tuple[int, ...], object] | None = None):
        if nvars < 2 or nvars % 2:
            raise UsageError(f"nvars must be a positive even number, got {nvars}")
        self.nvars = nvars
        t: Dict[Key, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or min(exps, default=0) < 0:
                raise UsageError(f"bad exponent vector {exps} for {nvars} variables")
            if not isinstance(coeff, Scalar):
                coeff = Scalar.const(coeff)
            for k, v in coeff._c.items():
                key = (k,) + exps
                w = t.get(key, 0) + v
                if w:
                    t[key] = w
                else:
                    t.pop(key, None)
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, t: Dict[Key, Fraction]) -> "Poly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p._t = t
        p._hash = None
        return p

    # constructors

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls._raw(2 * n, {})

    @classmethod
    def const(cls, n: int, value) -> "Poly":
        if isinstance(value, Scalar):
            return cls(2 * n, {(0,) * (2 * n): value})
        value = as_fraction(value)
        return cls._raw(2 * n, {(0,) * (2 * n + 1): value} if value else {})

    @classmethod
    def nu(cls, n: int, power: int = 1) -> "Poly":
        return cls._raw(2 * n, {(power,) + (0,) * (2 * n): Fraction(1)})

    @classmethod
    def var(cls, n: int, index: int) -> "Poly":
        """The variable with 0-based ``index`` (x's first, then p's)."""
        if not 0 <= index < 2 * n:
            raise UsageError(f"variable index {index} out of range for n={n}")
        key = [0] * (2 * n + 1)
        key[index + 1] = 1
        return cls._raw(2 * n, {tuple(key): Fraction(1)})

    @classmethod
    def x(cls, n: int, i: int) -> "Poly":
        """``x^i`` with 1-based ``i``."""
        return cls.var(n, i - 1)

    @classmethod
    def xi(cls, n: int, i: int) -> "Poly":
        """``xi_i`` (printed ``p<i>``) with 1-based ``i``."""
        return cls.var(n, n + i - 1)

    @classmethod
    def monomial(cls, xexp: Iterable[int], xiexp: Iterable[int], coeff=1) -> "Poly":
        xexp, xiexp = tuple(xexp), tuple(xiexp)
        if len(xexp) != len(xiexp):
            raise UsageError("x and xi exponent vectors differ in length")
        return cls(2 * len(xexp), {xexp + xiexp: coeff})

    # structure

    @property
    def n(self) -> int:
        return self.nvars // 2

    @property
    def terms(self) -> Dict[Tuple[int, ...], Scalar]:
        """Exponent vector -> nonzero Scalar coefficient."""
        out: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}
        for key, v in self._t.items():
            out.setdefault(key[1:], {})[key[0]] = v
        return {e: Scalar._raw(c) for e, c in out.items()}

    def raw_terms(self) -> Iterator[Tuple[int, Tuple[int, ...], Fraction]]:
        """Yield ``(nu_pow, exps, coeff)`` in serialization order.

        Monomials run in descending graded-lex order; within a monomial, nu
        powers ascend.
        """
        for key in sorted(self._t, key=lambda k: (_neg_grlex(k[1:]), k[0])):
            yield key[0], key[1:], self._t[key]

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def xi_degrees(self) -> set:
        n = self.n
        return {sum(k[1 + n:]) for k in self._t}

    def x_degrees(self) -> set:
        n = self.n
        return {sum(k[1:1 + n]) for k in self._t}

    def nu_powers(self) -> set:
        return {k[0] for k in self._t}

    def is_xi_free(self) -> bool:
        return self.xi_degrees() <= {0}

    def coefficient(self, exps: Tuple[int, ...]) -> Scalar:
        exps = tuple(exps)
        return Scalar._raw({k[0]: v for k, v in self._t.items() if k[1:] == exps})

    def constant_value(self) -> Scalar:
        return self.coefficient((0,) * self.nvars)

    def split_xi(self) -> Dict[Tuple[int, ...], "Poly"]:
        """Group by fiber monomial: ``{xi_exps: x-only Poly}``."""
        n = self.n
        groups: Dict[Tuple[int, ...], Dict[Key, Fraction]] = {}
        zeros = (0,) * n
        for key, v in self._t.items():
            groups.setdefault(key[1 + n:], {})[key[:1 + n] + zeros] = v
        return {b: Poly._raw(self.nvars, t) for b, t in groups.items()}

    def split_xi_degree(self) -> Dict[int, "Poly"]:
        n = self.n
        groups: Dict[int, Dict[Key, Fraction]] = {}
        for key, v in self._t.items():
            groups.setdefault(sum(key[1 + n:]), {})[key] = v
        return {d: Poly._raw(self.nvars, t) for d, t in groups.items()}

    def split_nu(self) -> Dict[int, "Poly"]:
        groups: Dict[int, Dict[Key, Fraction]] = {}
        for key, v in self._t.items():
            groups.setdefault(key[0], {})[(0,) + key[1:]] = v
        return {k: Poly._raw(self.nvars, t) for k, t in groups.items()}

    # arithmetic

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise UsageError(f"ring mismatch: {self.nvars} vs {other.nvars} variables")

    def _coerce(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, Scalar)):
            return Poly.const(self.n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self._t)
        for k, v in other._t.items():
            w = t.get(k, 0) + v
            if w:
                t[k] = w
            else:
                del t[k]
        return Poly._raw(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {k: -v for k, v in self._t.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self._t)
        for k, v in other._t.items():
            w = t.get(k, 0) - v
            if w:
                t[k] = w
            else:
                del t[k]
        return Poly._raw(self.nvars, t)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        t: Dict[Key, Fraction] = {}
        get = t.get
        for kb, vb in b.items():
            for ka, va in a.items():
                k = tuple([i + j for i, j in zip(ka, kb)])
                t[k] = get(k, 0) + va * vb
        return Poly._raw(self.nvars, {k: v for k, v in t.items() if v})

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        """Multiply by a rational or a Scalar."""
        if isinstance(c, Scalar):
            return self * Poly.const(self.n, c)
        c = as_fraction(c)
        if not c:
            return Poly._raw(self.nvars, {})
        return Poly._raw(self.nvars, {k: v * c for k, v in self._t.items()})

    def shift_nu(self, power: int) -> "Poly":
        """Multiply by ``nu**power``."""
        if not power:
            return self
        return Poly._raw(self.nvars, {(k[0] + power,) + k[1:]: v for k, v in self._t.items()})

    def __pow__(self, e: int):
        if e < 0:
            raise UsageError("negative powers of polynomials are not polynomials")
        out = Poly.const(self.n, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def partial(self, var: int) -> "Poly":
        """Formal partial derivative in the 0-based variable ``var``."""
        if not 0 <= var < self.nvars:
            raise UsageError(f"variable index {var} out of range for {self.nvars} variables")
        j = var + 1
        t: Dict[Key, Fraction] = {}
        for k, v in self._t.items():
            e = k[j]
            if e:
                t[k[:j] + (e - 1,) + k[j + 1:]] = v * e
        return Poly._raw(self.nvars, t)

    def euler(self) -> "Poly":
        """Multiply each term by its fiber degree."""
        n = self.n
        t = {}
        for k, v in self._t.items():
            d = sum(k[1 + n:])
            if d:
                t[k] = v * d
        return Poly._raw(self.nvars, t)

    def divide_exact(self, divisor: "Poly") -> "Poly | None":
        """Return ``self / divisor`` if the division is exact, else ``None``.

        The divisor must have nu-free coefficients.  Division runs slice by
        slice in the nu power, using graded-lex leading terms.
        """
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if divisor.nu_powers() != {0}:
            raise UsageError("divisor must not depend on nu")
        dterms = {k[1:]: v for k, v in divisor._t.items()}
        lead = max(dterms, key=grlex_key)
        lc = dterms[lead]
        quotient: Dict[Key, Fraction] = {}
        for nu_pow, piece in self.split_nu().items():
            rem = {k[1:]: v for k, v in piece._t.items()}
            while rem:
                top = max(rem, key=grlex_key)
                q_exps = tuple(a - b for a, b in zip(top, lead))
                if min(q_exps) < 0:
                    return None
                q = rem[top] / lc
                quotient[(nu_pow,) + q_exps] = q
                for e, v in dterms.items():
                    m = tuple(a + b for a, b in zip(q_exps, e))
                    w = rem.get(m, 0) - q * v
                    if w:
                        rem[m] = w
                    else:
                        rem.pop(m, None)
        return Poly._raw(self.nvars, quotient)

    def evaluate_x(self, point) -> "Poly":
        """Substitute rational values for ``x1..xn``; the fiber variables stay."""
        n = self.n
        point = [as_fraction(v) for v in point]
        if len(point) != n:
            raise UsageError(f"expected {n} coordinates, got {len(point)}")
        zeros = (0,) * n
        t: Dict[Key, Fraction] = {}
        for k, v in self._t.items():
            w = v
            for c, e in zip(point, k[1:1 + n]):
                if e:
                    w *= c ** e
            key = (k[0],) + zeros + k[1 + n:]
            t[key] = t.get(key, 0) + w
        return Poly._raw(self.nvars, {k: v for k, v in t.items() if v})

    # comparison

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._t == other._t
        if isinstance(other, (int, Fraction, Scalar)):
            return self._t == Poly.const(self.n, other)._t
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._t.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        from .expr import format_poly

        return format_poly(self)


def _neg_grlex(exps):
    return (-sum(exps), tuple(-e for e in exps))
