import pytest

from diffnev.asymptotics import radius_grid
from diffnev.catalog import specs as S
from diffnev.catalog.elliptic import sn_periods
from diffnev.harness import (ConfigurationError, Row, defect_relation_report, judge, picard_analogue_scan,
                             shared_ignoring_pairs, verify_logdiff, verify_thm2nd, verify_thm2nd2)

K = sn_periods(0.5)[0]
SN = S.JacobiSN(0.5)
EXP = S.ExpLinear(1)


def _rows(bad):
    return [Row(float(i), 2.0 if i in bad else 0.0, 1.0, 0.0) for i in range(16)]


def test_judge_outlier_budget():
    assert judge(_rows(set()))[0] == "holds"
    verdict, outliers, witness = judge(_rows({3}))
    assert verdict == "holds_with_outliers" and outliers == [3.0] and witness == []
    verdict, _, witness = judge(_rows({3, 9}))
    assert verdict == "fails" and [w.r for w in witness] == [3.0, 9.0]


@pytest.mark.parametrize("targets", [[1], [1, 1], [1, "inf"]])
def test_target_preconditions(targets):
    for fn in (verify_thm2nd, verify_thm2nd2):
        with pytest.raises(ConfigurationError):
            fn(SN, 2 * K, targets)


def test_logdiff_exponent_must_be_below_one():
    with pytest.raises(ConfigurationError):
        verify_logdiff(EXP, 1, delta_exp=1.0)


def test_sn_shift_quotient_is_constant():
    # sn(z + 2K) / sn(z) = -1, so the proximity of the quotient vanishes
    rep = verify_logdiff(SN, 2 * K)
    assert rep.holds and rep.tail["m_over_T"] < 1e-12


def test_exp_shift_quotient_decays():
    rep = verify_logdiff(EXP, 1, delta_exp=0.5, r_grid=radius_grid(10, 40, 16))
    assert rep.holds and rep.tail["m_over_T"] <= 0.1


def test_second_main_theorem_for_exp():
    assert verify_thm2nd(EXP, 1, [1, -1]).holds


def test_sn_pair_version_margin_is_about_T():
    rep = verify_thm2nd2(SN, 2 * K, [1, -1])
    assert rep.verdict == "holds"
    # lhs = T, rhs = N_tilde(inf) + N_tilde(1) + N_tilde(-1) = 0 + T + T
    for row in rep.rows[-4:]:
        assert (row.rhs - row.slack - row.lhs) / row.lhs == pytest.approx(1, abs=0.1)
    assert rep.tail["N_tilde_over_T[inf]"] == pytest.approx(0, abs=0.05)


def test_defect_sums():
    rep = defect_relation_report(SN, 2 * K, [0])
    assert rep.sum_delta_plus_pi == pytest.approx(2, abs=0.2)
    # log r convergence for a rational map needs large radii
    rep = defect_relation_report(S.Rational((1, -1), (1, 1)), 1, [0.3 + 0.4j, -2 + 1j], radius_grid(10, 1e6))
    assert rep.sum_delta_plus_pi == pytest.approx(0, abs=0.1)


def test_picard_scan_generic_shift():
    rep = picard_analogue_scan(S.WeierstrassP(1, 1j), 0.7 + 0.3j, ["inf"], 20)
    assert rep.count == 0 and rep.resolution == "consistent"


def test_share_identical_functions():
    rep = shared_ignoring_pairs(SN, SN, 2 * K, [-1, 0, 1, "inf", 0.3], 20)
    assert rep.shared_count == 5 and rep.five_value == "identical"


def test_share_sn_reciprocal_generic_value():
    rep = shared_ignoring_pairs(SN, S.Reciprocal(SN), 2 * K, [0.3], 20)
    assert rep.shared_count == 0 and rep.five_value == "hypothesis_not_met"
