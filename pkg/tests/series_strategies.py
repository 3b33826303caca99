"""Shared hypothesis strategies and property checks for the exact series engine."""
from fractions import Fraction

from hypothesis import strategies as st

from diffnev.confinement.field import A0, A2, ALPHA, canonical, fe, parse
from diffnev.confinement.series import FormalSeries as F

ATOMS = [A0, A2, ALPHA, fe(1), fe(2), fe(-3), fe(Fraction(1, 2))]


@st.composite
def elements(draw, nonzero=False):
    x = draw(st.sampled_from(ATOMS))
    for _ in range(draw(st.integers(0, 2))):
        y = draw(st.sampled_from(ATOMS))
        x = draw(st.sampled_from([x + y, x * y, x - y]))
    if nonzero and x == 0:
        x = fe(1)
    return x


@st.composite
def series(draw, nonzero=False):
    v = draw(st.integers(-2, 2))
    n = draw(st.integers(1, 3))
    cs = [draw(elements()) for _ in range(n)]
    if nonzero and cs[0] == 0:
        cs[0] = fe(1)
    return F.make(v, cs, v + n)


def check_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert (x + y) + z == x + (y + z)
    assert x * y == y * x
    assert x + y == y + x
    assert (x * (y + z)).agrees_with(x * y + x * z)


def check_inverse_roundtrip(x):
    one = x * x.invert()
    assert one.agrees_with(F.constant(1, one.truncation_order))
    assert x.invert().invert() == x


def check_field_canonical_form(x, y):
    assert x - x == 0
    assert (x / y) * y == x
    assert parse(canonical(x)) == x


def check_series_canonical_form(x):
    assert F.from_json(x.to_json()) == x
    assert F.make(x.valuation, list(x.coefficients) + [0], x.truncation_order) == x
