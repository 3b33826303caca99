"""Does setting a2 = 0 after the symbolic iteration agree with iterating at a2 = 0?"""
from __future__ import annotations

from dataclasses import dataclass

from .field import canonical
from .series import TruncationError
from .trace import ConfinementTrace, iterate_confinement


@dataclass
class SpecializationReport:
    agreeing_offsets: list
    first_singular_offset: object   # offset whose symbolic series has a pole at a2 = 0, or None
    mismatches: list

    @property
    def commutes(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {"agreeing_offsets": self.agreeing_offsets, "first_singular_offset": self.first_singular_offset,
                "mismatches": self.mismatches, "commutes": self.commutes}


def specialization_check(delta: int = 1, k: int = 1, j_max: int = 4, case: str = "case1",
                         truncation_order: int = None) -> SpecializationReport:
    """Compare coefficient by coefficient up to the first offset that is singular at a2 = 0.

    Beyond that offset the symbolic coefficients carry 1/a2 factors and the substitution is undefined.
    """
    sym = iterate_confinement(True, delta, k, j_max, case, truncation_order)
    fixed = iterate_confinement(False, delta, k, j_max, case, truncation_order or sym.truncation_order)
    agree, mismatches, singular = [], [], None
    for j in sym.offsets:
        try:
            s = sym.series[j].specialize(a2=0)
        except ZeroDivisionError:
            singular = j
            break
        f = fixed.series[j]
        n = min(s.truncation_order, f.truncation_order)
        try:
            ok = s.truncate(n) == f.truncate(n)
        except TruncationError:
            ok = False
        if ok:
            agree.append(j)
        else:
            mismatches.append({"offset": j, "specialized": str(s), "fixed": str(f)})
    return SpecializationReport(agree, singular, mismatches)
