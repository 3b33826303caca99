import pytest

from diffnev.confinement import (A0, A2, ALPHA, FitConfig, IrreducibilityError, check_explicit_solution,
                                 iterate_confinement, pole_pattern_conclusion, satisfies_equation,
                                 specialization_check, verify_coefficient_laws)
from diffnev.confinement.laws import closed_form, increment
from diffnev.confinement.series import FormalSeries as F


@pytest.mark.parametrize("delta", [1, -1])
@pytest.mark.parametrize("k", [1, 2])
def test_offset_one_leading_coefficient(trace_of, delta, k):
    tr = trace_of("case1", delta, k)
    s = tr.series[1]
    assert s.valuation == -k
    # hand expansion: RHS at delta + alpha t^k starts -(a0 + a2)/(2 delta alpha) t^-k
    assert s.leading == -(A0 + A2) / (2 * delta * ALPHA)


@pytest.mark.parametrize("delta", [1, -1])
@pytest.mark.parametrize("k", [1, 2])
def test_offsets_two_and_four(trace_of, delta, k):
    tr = trace_of("case1", delta, k)
    two, four = tr.series[2], tr.series[4]
    assert two.coefficient(0) == -A2 - delta
    assert two.coefficient(k) == -ALPHA
    assert all(two.coefficient(e) == 0 for e in range(1, k))
    assert four.coefficient(0) == delta
    assert four.coefficient(k) == ALPHA
    assert all(four.coefficient(e) == 0 for e in range(1, k))


@pytest.mark.parametrize("case", ["case1", "case2"])
def test_trace_satisfies_equation(trace_of, case):
    tr = trace_of(case, 1, 1, 17, None if case == "case1" else 5)
    assert tr.complete
    assert satisfies_equation(tr)


def test_case1_poles_at_all_odd_offsets(trace_of):
    tr = trace_of("case1", 1, 1)
    pat = tr.pattern()
    assert pat["pole_offsets"] == list(range(1, 18, 2))
    assert pat["delta_offsets"] == [0, 4, 8, 12, 16]


def test_closed_form_alignment_and_n0_flag(trace_of):
    tr = trace_of("case1", 1, 1)
    rep = verify_coefficient_laws(tr)
    assert rep.alignment["offset_of_n1"] == 1
    assert rep.closed_form_matches
    assert rep.n0_discrepancy
    # n = 1 value of the closed form is the offset +1 coefficient
    assert closed_form(1, tr) == -(A0 + A2) / (2 * ALPHA)


@pytest.mark.parametrize("delta", [1, -1])
def test_recurrence_magnitude(trace_of, delta):
    rep = verify_coefficient_laws(trace_of("case1", delta, 1))
    assert rep.recurrence_holds_up_to_sign
    assert rep.constant_terms_hold


def test_recurrence_sign_alternates(trace_of):
    c = trace_of("case1", 1, 1).leading_map()
    inc = increment(trace_of("case1", 1, 1))
    assert c[7] - c[3] == inc
    assert c[5] - c[1] == -inc


def test_increment_with_a2_zero():
    tr = iterate_confinement(False, 1, 1, 3)
    assert increment(tr) == A0 / (2 * ALPHA)


def test_pattern_conclusion(trace_of):
    v = pole_pattern_conclusion(trace_of("case1", 1, 1))
    assert v.confirmed
    assert v.implication["conclusion"] == "a2 = 0"


def test_case2_poles_step_two(trace_of):
    tr = trace_of("case2", 1, 1, 17, 5)
    assert tr.pattern()["pole_offsets"] == list(range(-1, 18, 2))
    assert not tr.events
    assert pole_pattern_conclusion(tr).confirmed


def test_case2_switch_event():
    # choosing w(z0+1) so that the backward pole coefficient cancels
    d = -(A0 + A2) / (2 * ALPHA)
    tr = iterate_confinement(True, 1, 1, 5, "case2", datum=d)
    assert tr.events and tr.events[0]["offset"] == -1


def test_reducible_rhs_rejected():
    from diffnev.confinement.trace import require_irreducible
    with pytest.raises(IrreducibilityError):
        require_irreducible(A2, -A2)


def test_confinement_at_a2_zero():
    tr = iterate_confinement(False, 1, 1, 4)
    assert tr.series[1].valuation == -1
    assert tr.series[3].valuation >= 0
    assert tr.series[2].coefficient(0) == -1


@pytest.mark.parametrize("delta", [1, -1])
@pytest.mark.parametrize("k", [1, 2])
def test_specialization_commutes_until_singular(delta, k):
    rep = specialization_check(delta, k, 5)
    assert rep.commutes
    assert rep.agreeing_offsets == [-1, 0, 1, 2]
    assert rep.first_singular_offset == 3


def test_trace_json(trace_of):
    d = trace_of("case1", 1, 1).to_json()
    two = [o for o in d["offsets"] if o["offset"] == 2][0]
    assert two["coefficients"][0] == "-a2 - 1"
    assert F.from_json(two) == trace_of("case1", 1, 1).series[2]


def test_bad_parameters():
    with pytest.raises(ValueError):
        iterate_confinement(True, 2, 1)
    with pytest.raises(ValueError):
        iterate_confinement(True, 1, 0)
    with pytest.raises(ValueError):
        verify_coefficient_laws(iterate_confinement(True, 1, 1, 5))


def test_explicit_fit_resolves():
    rep = check_explicit_solution(0.5, 1)
    assert rep.status == "resolved"
    assert rep.fresh_residual <= 1e-8
    assert rep.period4_gap > 1e-3


def test_explicit_fit_with_a2_nonzero_stays_unresolved():
    rep = check_explicit_solution(0.5, 1, a2=0.5, cfg=FitConfig(starts=6))
    assert rep.status == "unresolved"
    assert rep.fresh_residual > 1e-8


def test_explicit_fit_is_deterministic():
    a = check_explicit_solution(0.3, 7)
    b = check_explicit_solution(0.3, 7)
    assert a.constants == b.constants
