"""Stable JSON encoding of symbols, operators and reports.

Rationals are strings (``"num"`` / ``"den"`` or ``"p/q"`` for exponents);
polynomial terms follow the printer's order, so byte-identical inputs give
byte-identical output.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import Poly, format_fraction
from .errors import UsageError
from .operators import DiffOperator
from .symbols import BaseTable, RadicalSymbol


def _sorted_sectors(s: RadicalSymbol):
    zero = s.table.zero_exponent
    return sorted(s.sectors.items(), key=lambda item: (item[0] != zero, item[0]))


def poly_to_json(p: Poly):
    n = p.n
    return [
        {
            "coeff": {"nu_pow": nu, "num": str(c.numerator), "den": str(c.denominator)},
            "x": list(exps[:n]),
            "xi": list(exps[n:]),
        }
        for nu, exps, c in p.raw_terms()
    ]


def symbol_to_json(s: RadicalSymbol) -> dict:
    sectors = []
    for e, p in _sorted_sectors(s):
        exponents = {b.name: format_fraction(q) for b, q in zip(s.table.bases, e) if q}
        sectors.append({"exponents": exponents, "poly": poly_to_json(p)})
    return {"sectors": sectors}


def poly_from_json(terms, n: int) -> Poly:
    raw = {}
    for t in terms:
        x, xi = t["x"], t["xi"]
        if len(x) != n or len(xi) != n:
            raise UsageError(f"term has the wrong number of exponents for n={n}")
        c = t["coeff"]
        key = (int(c["nu_pow"]),) + tuple(x) + tuple(xi)
        raw[key] = raw.get(key, 0) + Fraction(int(c["num"]), int(c["den"]))
    p = Poly.zero(n)
    for key, v in raw.items():
        p = p + Poly.monomial(key[1:1 + n], key[1 + n:], v).shift_nu(key[0])
    return p


def symbol_from_json(obj, table: BaseTable) -> RadicalSymbol:
    total = RadicalSymbol.zero(table)
    for sector in obj["sectors"]:
        e = [Fraction(0)] * len(table)
        for name, q in sector["exponents"].items():
            e[table.index(name)] = Fraction(q)
        total = total + RadicalSymbol(table, {tuple(e): poly_from_json(sector["poly"], table.n)})
    return total


def operator_to_json(op: DiffOperator) -> dict:
    order = sorted(op.terms, key=lambda a: (-sum(a), tuple(-k for k in a)))
    return {"terms": [{"dx": list(a), "coeff": symbol_to_json(op.terms[a])} for a in order]}


def operator_from_json(obj, table: BaseTable) -> DiffOperator:
    return DiffOperator(
        table, {tuple(t["dx"]): symbol_from_json(t["coeff"], table) for t in obj["terms"]}
    )


def emit_json(value) -> str:
    if isinstance(value, RadicalSymbol):
        value = symbol_to_json(value)
    elif isinstance(value, DiffOperator):
        value = operator_to_json(value)
    return json.dumps(value, indent=2, ensure_ascii=False)
