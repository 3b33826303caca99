"""Singularity-confinement iteration for w(z+1) + w(z-1) = (a2 w^2 + a0) / (1 - w^2).

Offsets j are integers: the series at offset j is the expansion of w(z0 + j) in t = z - z0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .field import A0, A2, ALPHA, ONE, ZERO, canonical, fe
from .series import FormalSeries, SeriesDomainError, TruncationError

CASES = ("case1", "case2")
DEFAULT_DATUM = Fraction(7, 3)


class IrreducibilityError(ValueError):
    pass


def rhs(w: FormalSeries, a2) -> FormalSeries:
    return (a2 * (w * w) + A0) / (1 - w * w)


def require_irreducible(a2, a0=A0):
    # (a2 w^2 + a0)/(1 - w^2) reduces exactly when a0 + a2 = 0
    if a0 + a2 == 0:
        raise IrreducibilityError("a0 + a2 vanishes: right-hand side is reducible")


@dataclass
class ConfinementTrace:
    case: str
    delta: int
    k: int
    a2_symbolic: bool
    truncation_order: int
    offsets: list
    series: dict
    datum: object
    leading: list = field(default_factory=list)      # (offset, coefficient) at pole offsets
    events: list = field(default_factory=list)
    complete: bool = True
    diagnostic: str = ""

    @property
    def a2(self):
        return A2 if self.a2_symbolic else ZERO

    @property
    def j_max(self) -> int:
        return max(self.offsets)

    def pole_offsets(self):
        return [j for j in self.offsets if self.series[j].valuation < 0]

    def value_offsets(self, value):
        v = fe(value)
        out = []
        for j in self.offsets:
            s = self.series[j]
            if s.valuation >= 0 and s.truncation_order > 0 and s.coefficient(0) == v:
                out.append(j)
        return out

    def pattern(self) -> dict:
        return {"pole_offsets": self.pole_offsets(),
                "delta_offsets": self.value_offsets(self.delta),
                "minus_delta_offsets": self.value_offsets(-self.delta)}

    def leading_map(self) -> dict:
        return dict(self.leading)

    def to_json(self) -> dict:
        return {
            "case": self.case, "delta": self.delta, "k": self.k, "a2_symbolic": self.a2_symbolic,
            "truncation_order": self.truncation_order, "datum": canonical(fe(self.datum)),
            "complete": self.complete, "diagnostic": self.diagnostic, "events": list(self.events),
            "offsets": [{"offset": j, **self.series[j].to_json()} for j in self.offsets],
            "leading": [{"offset": j, "coefficient": canonical(c)} for j, c in self.leading],
            "pattern": self.pattern(),
        }


def _datum(d):
    return fe(Fraction(d) if isinstance(d, (int, float, Fraction)) else d)


def _run(case, delta, k, a2, j_max, N, datum):
    t_k = FormalSeries.monomial(ALPHA, k, N)
    w0 = t_k + delta
    series = {0: w0}
    events = []
    if case == "case1":
        series[-1] = FormalSeries.constant(datum, N)
    else:
        series[1] = FormalSeries.monomial(datum, -k, N)
        series[-1] = rhs(w0, a2) - series[1]          # backward step
    first = 0 if case == "case1" else 1
    diagnostic = ""
    try:
        for j in range(first, j_max):
            series[j + 1] = rhs(series[j], a2) - series[j - 1]
    except (TruncationError, SeriesDomainError) as e:
        diagnostic = f"truncation collapse after offset {max(series)}: {e}"
    offsets = sorted(series)
    if case == "case2":
        for j in offsets:
            if j % 2 and series[j].valuation > -k:
                events.append({"offset": j, "event": "case_switch",
                               "detail": "leading pole coefficient vanished; restart as case1 from here"})
    return series, offsets, events, diagnostic


def _precise_enough(series, k):
    for j, s in series.items():
        need = -k + 1 if j % 2 else k + 1
        if s.truncation_order < need:
            return False
    return True


def iterate_confinement(a2_symbolic: bool = True, delta: int = 1, k: int = 1, j_max: int = 17,
                        case: str = "case1", truncation_order: int = None, datum=DEFAULT_DATUM,
                        truncation_cap: int = None) -> ConfinementTrace:
    """Exact iteration from w(z0) = delta + alpha t^k over offsets -1..j_max.

    case1: w(z0-1) is the finite value `datum`; w(z0+1) comes out as a pole of order k.
    case2: w(z0+1) = datum * t^-k and w(z0-1) is solved backwards.
    a2 is the field symbol when a2_symbolic, otherwise fixed to 0.
    """
    if delta not in (1, -1):
        raise ValueError("delta must be +1 or -1")
    if k < 1:
        raise ValueError("k must be a positive integer")
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}")
    if j_max < 2:
        raise ValueError("j_max must be at least 2")
    a2 = A2 if a2_symbolic else ZERO
    require_irreducible(a2)
    N = truncation_order or 3 * k + 4
    cap = truncation_cap or max(8 * (3 * k + 4), N)
    d = _datum(datum)
    while True:
        series, offsets, events, diag = _run(case, delta, k, a2, j_max, N, d)
        ok = not diag and _precise_enough(series, k)
        if ok or N >= cap:
            break
        N = min(2 * N, cap)
    if not ok and not diag:
        diag = f"truncation order {N} leaves untrusted leading terms"
    lead = [(j, series[j].leading) for j in offsets
            if j % 2 and not series[j].is_zero and series[j].valuation < 0]
    return ConfinementTrace(case, delta, k, a2_symbolic, N, offsets, series, d, lead, events,
                            complete=ok and max(offsets) == j_max, diagnostic=diag)


def substitution_residuals(trace: ConfinementTrace) -> dict:
    """series(j+1) + series(j-1) - RHS(series(j)) at every interior offset."""
    out = {}
    s = trace.series
    for j in trace.offsets:
        if j - 1 in s and j + 1 in s:
            out[j] = s[j + 1] + s[j - 1] - rhs(s[j], trace.a2)
    return out


def satisfies_equation(trace: ConfinementTrace) -> bool:
    return all(r.is_zero for r in substitution_residuals(trace).values())
