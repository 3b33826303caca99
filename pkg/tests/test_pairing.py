import math

import numpy as np
import pytest
import sympy as sp

from diffnev.asymptotics import radius_grid
from diffnev.catalog import specs as S
from diffnev.catalog.elliptic import sn_periods
from diffnev.catalog.expansion import LocalExpansion
from diffnev.catalog.functions import INF
from diffnev.nevanlinna import characteristic, counting
from diffnev.pairing import (PeriodicFunctionError, classify_exceptional, difference_spec, n0_diagnostic,
                             n0_weight, n_pair_term, pair_count_at, pair_count_from_expansions, pair_indices,
                             pair_scan, paired_counting, periodicity_probe)

K = sn_periods(0.5)[0]
SN = S.JacobiSN(0.5)
G = S.p_plus_exp()
EXP = S.ExpLinear(1)


def _expansion(valuation, coeffs):
    c = np.array(coeffs, dtype=complex)
    return LocalExpansion(0j, valuation, c, np.full(len(c), 1e-16))


@pytest.mark.parametrize("method", ["difference", "direct"])
def test_lattice_pole_of_p_plus_exp(method):
    assert pair_count_at(G, 2j, 2, INF, method=method) == 4
    assert pair_count_at(G, 2 - 2j, 2j, INF, method=method) == 4


@pytest.mark.parametrize("method", ["difference", "direct"])
def test_sn_zero_quasi_period(method):
    assert pair_count_at(SN, 0, 2 * K, 0, method=method) == 1
    assert pair_count_at(SN, 2 * K, 2 * K, 0, method=method) == 1


def test_taylor_prefix_example():
    f = _expansion(0, [0.5, 1.0, 2.0, 3.0, 1.0])
    g = _expansion(0, [0.5, 1.0, 2.0, -1.0, 1.0])
    assert pair_count_from_expansions(f, g, 0.5, 1, 1, depth=4)[0] == 3


def test_pole_counted_once_in_n0():
    f = _expansion(-2, [3.0, 2.0, 1.0, 0.25, 7.0])
    g = _expansion(-2, [3.0, 2.0, 1.0, -0.5, 7.0])
    assert n0_weight(f, g, 2, 2, depth=3) == 1
    # principal parts differ: no contribution
    h = _expansion(-2, [3.0, 2.5, 1.0, 0.25, 7.0])
    assert n0_weight(f, h, 2, 2, depth=3) == 0


def test_missing_partner_gives_zero():
    # sn has zeros at 0 and 2K only along the real axis; 0 + K is not a zero
    assert pair_count_at(SN, 0, K, 0) == 0
    with pytest.raises(ValueError):
        pair_count_at(SN, 0.3, 2 * K, 0)


def test_difference_and_direct_routes_agree_on_scans():
    for f, c, t, r in ((G, 2, INF, 8), (SN, 2 * K, 0, 10), (SN, 2 * K, INF, 10), (G, 2, 1.0, 5)):
        scan = pair_scan(f, c, t, r)
        assert scan.records
        for rec in scan.records:
            assert pair_count_at(f, rec.base, c, t, method="direct") == rec.pair_count


def test_exp_has_no_pairs_at_zero():
    for r in (5.0, 20.0):
        s = paired_counting(EXP, 1, 0, r)
        assert s.n_c == 0 and s.N_c == 0 and s.N_tilde == 0


def test_injective_rational_has_no_pairs():
    f = S.Rational((1, 0))
    for a in (0, 1 + 2j, -3):
        assert paired_counting(f, 0.7, a, 10).n_c == 0


def test_counting_identity_and_signs():
    for f, c, t in ((G, 2, INF), (SN, 2 * K, 0), (SN, 2 * K, 1)):
        for r in (7.0, 15.0):
            s = paired_counting(f, c, t, r)
            assert s.N_c >= 0
            assert s.N_tilde == pytest.approx(counting(f, t, r) - s.N_c, abs=1e-9)


def test_n_pair_of_exp():
    assert n_pair_term(EXP, 1, 20) == 0


def test_n_pair_bound_for_p_plus_exp():
    d = difference_spec(G, 2)
    for r in (10.0, 20.0, 30.0):
        assert n_pair_term(G, 2, r) >= counting(d, 0, r) - 0.1 * characteristic(G, r)


def test_n_pair_rational_against_symbolic_difference():
    z = sp.symbols("z")
    f = (z - 1) / (z + 1)
    d = sp.cancel(f.subs(z, z + 1) - f)
    num, den = sp.fraction(d)
    zeros = sp.roots(sp.Poly(num, z)) if sp.Poly(num, z).degree() > 0 else {}
    poles = sp.roots(sp.Poly(den, z))

    def N(roots, r):
        return sum(m * math.log(r / abs(complex(w))) for w, m in roots.items() if abs(complex(w)) <= r)

    for r in (3.0, 9.0):
        expected = 2 * N({-1: 1}, r) - N(poles, r) + N(zeros, r)
        assert n_pair_term(S.Rational((1, -1), (1, 1)), 1, r) == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(math.log(2), abs=1e-12)


def test_periodicity_probe():
    P = S.WeierstrassP(1, 1j)
    assert periodicity_probe(P, 2) and periodicity_probe(P, 2 + 2j)
    assert not periodicity_probe(P, 0.7 + 0.3j)
    assert not periodicity_probe(G, 2)
    with pytest.raises(PeriodicFunctionError):
        n0_diagnostic(P, 2, 10)
    with pytest.raises(PeriodicFunctionError):
        pair_scan(SN, 4 * K, 0, 5)


def test_n0_vanishes_for_p_plus_exp():
    assert n0_diagnostic(G, 2, 20) == 0


def test_exp_generic_value_unpaired():
    est = pair_indices(EXP, 1, 0.4 + 0.3j, radius_grid(10, 40, 12))
    assert est.pi_c.value == pytest.approx(0, abs=0.1)


def test_classification_examples():
    assert classify_exceptional(EXP, 1, [1], 20)[0].label == "none"
    assert classify_exceptional(S.WeierstrassP(1, 1j), 0.7 + 0.3j, [INF], 20)[0].label != "exceptional_paired"
    labels = {c.target: c.label for c in classify_exceptional(SN, 2 * K, [0, INF, 1], 20)}
    assert labels[0] == labels[INF] == "exceptional_paired"
    assert labels[1] != "exceptional_paired"
