import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from diffnev.asymptotics import WindowConfig, drop_outliers, radius_grid, windowed_extreme
from diffnev.catalog import specs as S
from diffnev.catalog.functions import INF
from diffnev.nevanlinna import (DegenerateInputError, characteristic, counting, deficiency_indices,
                                nevanlinna_sweep, order_estimate, order_from_series, proximity,
                                verify_valiron_mohonko)

EXP = S.ExpLinear(1)
SN = S.JacobiSN(0.5)
MOEBIUS = S.Rational((1, -1), (1, 1))


@pytest.mark.parametrize("r", [5.0, 12.5, 31.0, 50.0])
def test_exp_proximity_against_direct_quadrature(r):
    direct, _ = quad(lambda t: max(0.0, r * math.cos(t)), 0, 2 * math.pi, points=[math.pi / 2, 3 * math.pi / 2])
    direct /= 2 * math.pi
    assert direct == pytest.approx(r / math.pi, rel=1e-10)
    assert proximity(EXP, INF, r) == pytest.approx(direct, rel=0.01)
    assert characteristic(EXP, r) == pytest.approx(direct, rel=0.01)


def test_moebius_proximity_decays():
    assert proximity(MOEBIUS, INF, 100) <= 0.05


@settings(max_examples=25)
@given(r=st.floats(1.5, 30), a=st.complex_numbers(max_magnitude=3))
def test_proximity_nonnegative(r, a):
    assert proximity(SN, a, r) >= 0


@pytest.mark.parametrize("r", [1.5, 4.0, 17.0])
def test_moebius_counting_is_log_r(r):
    # n(t, 0) = 1 for t >= 1: N(r) = integral_1^r dt / t
    direct, _ = quad(lambda t: 1.0 / t, 1, r)
    assert counting(MOEBIUS, 0, r) == pytest.approx(direct, rel=1e-10)


def test_exp_counting_zero():
    for r in (3.0, 30.0):
        assert counting(EXP, 0, r) == 0


@pytest.mark.parametrize("r", [3.3, 11.0, 25.0])
def test_sn_poles_simple(r):
    assert counting(SN, INF, r) == pytest.approx(counting(SN, INF, r, reduced=True), abs=1e-12)


def test_rational_characteristic_grows_like_degree_log():
    f = S.Rational((1, 0, 1), (1, -3))          # degree 2, simple pole at 3
    nodes = 1 << 16
    th = 2 * np.pi * np.arange(nodes) / nodes
    for r in (20.0, 60.0, 100.0):
        z = r * np.exp(1j * th)
        m = float(np.mean(np.maximum(0, np.log(np.abs((z * z + 1) / (z - 3))))))
        direct = m + math.log(r / 3)
        assert characteristic(f, r) == pytest.approx(direct, abs=1e-5)
    gaps = [characteristic(f, r) - 2 * math.log(r) for r in (20.0, 60.0, 100.0)]
    assert max(gaps) - min(gaps) < 0.05


def test_characteristic_nondecreasing():
    r = radius_grid(2, 40, 20)
    for f in (SN, S.p_plus_exp()):
        T = [s.T for s in nevanlinna_sweep(f, [], r)]
        assert all(b >= a - 1e-6 for a, b in zip(T, T[1:]))


def test_order_exp():
    assert order_estimate(EXP, radius_grid(2, 50)).value == pytest.approx(1, abs=0.05)


def test_order_rational_flagged():
    est = order_estimate(MOEBIUS, radius_grid(2, 100))
    assert est.value == 0 and est.note == "logarithmic_growth"


def test_order_of_constant_is_degenerate():
    with pytest.raises(DegenerateInputError):
        order_from_series([1, 2, 3, 4], [0, 0, 0, 0])


def test_order_needs_enough_points():
    with pytest.raises(ValueError):
        order_estimate(EXP, radius_grid(2, 50, 5))


def test_exp_deficiency_at_zero():
    assert deficiency_indices(EXP, 0, radius_grid(5, 40)).delta.value == pytest.approx(1, abs=0.05)


def test_sn_ramification_at_one():
    assert deficiency_indices(SN, 1, radius_grid()).theta.value == pytest.approx(0.5, abs=0.1)


def test_rational_generic_value():
    # the a-point sits at |z| = 1.69, so N_bar / T approaches 1 only like 1 - 0.52 / log r
    rep = deficiency_indices(MOEBIUS, 0.3 + 0.4j, radius_grid(10, 1e6))
    assert rep.delta.value == pytest.approx(0, abs=0.05)
    assert rep.Theta.value == pytest.approx(0, abs=0.05)


def test_valiron_mohonko_identity_and_reciprocal():
    rep = verify_valiron_mohonko(EXP, (1, 0), (1,), radius_grid(5, 40))
    assert np.allclose(rep.ratios, 1, atol=1e-12)
    rep = verify_valiron_mohonko(SN, (1,), (1, 0), radius_grid())
    assert rep.degree == 1 and rep.tail_mean == pytest.approx(1, abs=0.1)


@pytest.mark.parametrize("f,targets", [(EXP, (1, -1)), (MOEBIUS, (0, 2)), (SN, (1, 0.3 + 0.2j))])
def test_first_main_theorem_bounded(f, targets):
    samples = nevanlinna_sweep(f, targets, radius_grid(2, 40, 16))
    for a in targets:
        gap = [s.T - s.entry(a).m - s.entry(a).N for s in samples]
        assert max(gap) - min(gap) <= 1.0


# --- window statistics ----------------------------------------------------------

@settings(max_examples=200)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=0, max_size=60))
def test_drop_outliers_budget(values):
    kept, dropped = drop_outliers(values)
    assert len(dropped) <= math.floor(0.1 * len(values))
    assert sorted(kept + dropped) == list(range(len(values)))


@settings(max_examples=100)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=12, max_size=40))
def test_window_extremes_ordered(values):
    r = list(range(1, len(values) + 1))
    lo = windowed_extreme(r, values, "liminf")
    hi = windowed_extreme(r, values, "limsup")
    assert lo.value <= hi.value + 1e-12
    assert len(lo.dropped_points) <= math.floor(0.1 * WindowConfig().top)


def test_window_estimate_of_constant_sequence():
    est = windowed_extreme(range(1, 21), [0.25] * 20, "limsup", complement=True)
    assert est.value == pytest.approx(0.75) and est.dispersion == 0
