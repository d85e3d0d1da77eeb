"""Seeded generators of test symbols."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator, List

from .algebra import Poly
from .operators import multi_indices
from .symbols import BaseTable, RadicalSymbol


def exponent_vectors(n: int, max_degree: int) -> List[tuple]:
    out = []
    for d in range(max_degree + 1):
        out.extend(multi_indices(n, d))
    return out


def monomial_symbols(table: BaseTable, max_xi_degree: int, max_x_degree: int) -> Iterator[RadicalSymbol]:
    """Every ``x^a xi^b`` with ``|b| <= max_xi_degree`` and ``|a| <= max_x_degree``."""
    n = table.n
    for b in exponent_vectors(n, max_xi_degree):
        for a in exponent_vectors(n, max_x_degree):
            yield RadicalSymbol.from_poly(table, Poly.monomial(a, b))


def _rational(rng: random.Random) -> Fraction:
    num = rng.randint(-5, 5) or 1
    return Fraction(num, rng.choice((1, 1, 2, 3)))


def random_poly(
    rng: random.Random,
    n: int,
    max_xi_degree: int = 3,
    max_x_degree: int = 3,
    terms: int = 4,
    nu_powers=(0,),
) -> Poly:
    p = Poly.zero(n)
    for _ in range(terms):
        b = tuple(rng.choice(exponent_vectors(n, max_xi_degree)))
        a = tuple(rng.choice(exponent_vectors(n, max_x_degree)))
        nu = rng.choice(nu_powers)
        p = p + Poly.monomial(a, b, _rational(rng)).shift_nu(nu)
    return p


def random_polynomial_symbol(rng: random.Random, table: BaseTable, **kwargs) -> RadicalSymbol:
    return RadicalSymbol.from_poly(table, random_poly(rng, table.n, **kwargs))


def random_radical_symbol(rng: random.Random, table: BaseTable, sectors: int = 3) -> RadicalSymbol:
    """Random sum of polynomial multiples of rational base powers (nu powers may be negative)."""
    total = RadicalSymbol.zero(table)
    exps = [Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(-1), Fraction(1, 3), Fraction(-3, 4)]
    for _ in range(sectors):
        e = tuple(rng.choice(exps) for _ in table.bases)
        p = random_poly(rng, table.n, 2, 2, terms=3, nu_powers=(-1, 0, 1, 2))
        total = total + RadicalSymbol(table, {e: p})
    return total
