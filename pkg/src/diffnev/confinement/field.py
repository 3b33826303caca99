"""Coefficient field Q(a0, a2, alpha): reduced rational functions with canonical form."""
from __future__ import annotations

from fractions import Fraction

from sympy import QQ
from sympy.polys.fields import FracElement, field

FIELD, A0, A2, ALPHA = field("a0,a2,alpha", QQ)
FieldElement = FracElement
ZERO = FIELD.zero
ONE = FIELD.one
SYMBOLS = {"a0": A0, "a2": A2, "alpha": ALPHA}


def fe(x) -> FieldElement:
    """Coerce ints, Fractions, strings like '7/3' or field elements into the field."""
    if isinstance(x, FracElement):
        if x.field != FIELD:
            raise TypeError("element of a different field")
        return x
    if isinstance(x, str):
        return FIELD.from_expr(_sympify(x))
    if isinstance(x, Fraction):
        return FIELD(QQ(x.numerator, x.denominator))
    if isinstance(x, int):
        return FIELD(x)
    raise TypeError(f"cannot coerce {type(x).__name__} into the coefficient field")


def _sympify(s):
    from sympy import Symbol, sympify
    return sympify(s, locals={k: Symbol(k) for k in SYMBOLS})


def canonical(x: FieldElement) -> str:
    """Canonical string: sympy prints the reduced numer/denom with a monic-content normalisation."""
    return str(fe(x))


def parse(s: str) -> FieldElement:
    return fe(s)


def specialize(x: FieldElement, **values) -> FieldElement:
    """Substitute symbols by rationals, e.g. specialize(x, a2=0); ZeroDivisionError if a denominator vanishes."""
    for name, v in values.items():
        v = Fraction(v)
        x = x.subs(SYMBOLS[name], QQ(v.numerator, v.denominator))
    return x


def singular_at(x: FieldElement, **values) -> bool:
    try:
        specialize(x, **values)
    except ZeroDivisionError:
        return True
    return False
