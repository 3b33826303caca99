import pytest
from hypothesis import given, settings

from diffnev.confinement.field import A0, A2, ALPHA, specialize
from diffnev.confinement.series import FormalSeries as F
from diffnev.confinement.series import SeriesDomainError, TruncationError
from series_strategies import (check_field_canonical_form, check_inverse_roundtrip, check_ring_axioms,
                               check_series_canonical_form, elements, series)


def t(trunc=8):
    return F.monomial(1, 1, trunc)


def test_one_plus_t_times_one_minus_t():
    x = (1 + t()) * (1 - t())
    assert x == F.make(0, [1, 0, -1], 8)


def test_geometric_inverse():
    inv = (ALPHA * t() * (1 + t())).invert()
    assert inv.valuation == -1
    assert inv.truncation_order == 6
    assert [c for _, c in inv.items()] == [(-1) ** i / ALPHA for i in range(7)]


@pytest.mark.parametrize("delta", [1, -1])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_one_minus_w_squared(delta, k):
    w = delta + ALPHA * t(3 * k + 4) ** k
    got = 1 - w * w
    # direct polynomial expansion: 1 - (d + a t^k)^2 = -2 d a t^k - a^2 t^2k
    want = F.make(k, [-2 * delta * ALPHA] + [0] * (k - 1) + [-ALPHA ** 2], got.truncation_order)
    assert got == want


def test_truncation_propagation_rules():
    x = F.make(-1, [1, 2, 3], 2)
    y = F.make(1, [5, 7], 3)
    assert (x + y).truncation_order == 2
    assert (x * y).truncation_order == min(2 + 1, 3 - 1)
    assert x.invert().truncation_order == 2 - 2 * (-1)


def test_division_by_zero_series():
    with pytest.raises(SeriesDomainError):
        F.zero(4).invert()


def test_untrusted_coefficient():
    with pytest.raises(TruncationError):
        F.make(0, [1, 2], 2).coefficient(2)


def test_zero_is_canonical():
    x = F.make(0, [A0, 1], 3)
    z = x - x
    assert z.is_zero and z.valuation == z.truncation_order == 3


def test_json_roundtrip():
    x = F.make(-2, [A0 / ALPHA, 0, -A2 - 1], 4)
    assert F.from_json(x.to_json()) == x


@settings(max_examples=200)
@given(series(), series(), series())
def test_ring_axioms(x, y, z):
    check_ring_axioms(x, y, z)


@settings(max_examples=200)
@given(series(nonzero=True))
def test_inverse_roundtrip(x):
    check_inverse_roundtrip(x)


@settings(max_examples=200)
@given(elements(), elements(nonzero=True))
def test_field_canonical_form(x, y):
    check_field_canonical_form(x, y)


@settings(max_examples=200)
@given(series())
def test_series_canonical_form(x):
    check_series_canonical_form(x)


def test_specialize():
    x = (A0 + A2) / (2 * ALPHA)
    assert specialize(x, a2=0) == A0 / (2 * ALPHA)
    with pytest.raises(ZeroDivisionError):
        specialize(1 / A2, a2=0)
