"""Truncated formal Laurent series in t = z - z0 with exact field coefficients.

A series stores the coefficients of t^e for valuation <= e < truncation_order; everything
at or above truncation_order is unknown.  Propagation rules:

    add/sub   trunc = min(Nx, Ny)
    mul       trunc = min(Nx + vy, Ny + vx)
    invert    trunc = N - 2v          (relative precision N - v is preserved)
    div       x * invert(y)

The zero series is canonical with valuation = truncation_order and no coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass

from .field import ONE, ZERO, canonical, fe, specialize


class SeriesDomainError(ZeroDivisionError):
    pass


class TruncationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class FormalSeries:
    valuation: int
    coefficients: tuple
    truncation_order: int

    def __post_init__(self):
        if len(self.coefficients) != self.truncation_order - self.valuation:
            raise ValueError("coefficient count must equal truncation_order - valuation")
        if self.coefficients and self.coefficients[0] == 0:
            raise ValueError("leading coefficient must be nonzero (use FormalSeries.make)")

    # --- construction -------------------------------------------------------

    @staticmethod
    def make(start: int, coeffs, trunc: int) -> "FormalSeries":
        """Canonical series from coefficients of t^start, t^(start+1), ... (dropped at >= trunc)."""
        cs = [fe(c) for c in coeffs][: max(trunc - start, 0)]
        cs += [ZERO] * (trunc - start - len(cs))
        i = 0
        while i < len(cs) and cs[i] == 0:
            i += 1
        if i == len(cs):
            return FormalSeries(trunc, (), trunc)
        return FormalSeries(start + i, tuple(cs[i:]), trunc)

    @staticmethod
    def constant(c, trunc: int) -> "FormalSeries":
        return FormalSeries.make(0, [c], trunc)

    @staticmethod
    def monomial(c, e: int, trunc: int) -> "FormalSeries":
        return FormalSeries.make(e, [c], trunc)

    @staticmethod
    def zero(trunc: int) -> "FormalSeries":
        return FormalSeries(trunc, (), trunc)

    # --- access -------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def leading(self):
        if self.is_zero:
            raise TruncationError("no trusted coefficients")
        return self.coefficients[0]

    def coefficient(self, e: int):
        if e >= self.truncation_order:
            raise TruncationError(f"coefficient of t^{e} lies beyond truncation order {self.truncation_order}")
        if e < self.valuation:
            return ZERO
        return self.coefficients[e - self.valuation]

    def items(self):
        return [(self.valuation + i, c) for i, c in enumerate(self.coefficients)]

    def truncate(self, trunc: int) -> "FormalSeries":
        if trunc > self.truncation_order:
            raise TruncationError("cannot raise the truncation order")
        return FormalSeries.make(self.valuation, self.coefficients, trunc)

    # --- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FormalSeries):
            return other
        return FormalSeries.constant(other, self.truncation_order + abs(self.valuation))

    def __add__(self, other):
        y = self._coerce(other)
        n = min(self.truncation_order, y.truncation_order)
        lo = min(self.valuation, y.valuation, n)
        cs = []
        for e in range(lo, n):
            a = self.coefficient(e) if e >= self.valuation else ZERO
            b = y.coefficient(e) if e >= y.valuation else ZERO
            cs.append(a + b)
        return FormalSeries.make(lo, cs, n)

    __radd__ = __add__

    def __neg__(self):
        return FormalSeries(self.valuation, tuple(-c for c in self.coefficients), self.truncation_order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        y = self._coerce(other)
        n = min(self.truncation_order + y.valuation, y.truncation_order + self.valuation)
        v = self.valuation + y.valuation
        if self.is_zero or y.is_zero or v >= n:
            return FormalSeries.zero(n)
        cs = [ZERO] * (n - v)
        for i, a in enumerate(self.coefficients):
            if i >= n - v:
                break
            for j, b in enumerate(y.coefficients[: n - v - i]):
                cs[i + j] += a * b
        return FormalSeries.make(v, cs, n)

    __rmul__ = __mul__

    def invert(self) -> "FormalSeries":
        if self.is_zero:
            raise SeriesDomainError("division by the zero series")
        v, n = self.valuation, self.truncation_order
        L = n - v
        a = self.coefficients
        inv0 = ONE / a[0]
        b = [inv0]
        for m in range(1, L):
            s = ZERO
            for i in range(1, m + 1):
                s += a[i] * b[m - i]
            b.append(-s * inv0)
        return FormalSeries.make(-v, b, n - 2 * v)

    def __truediv__(self, other):
        return self * self._coerce(other).invert()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.invert()

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        out = FormalSeries.constant(ONE, self.truncation_order + abs(self.valuation) * max(k, 1))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return (self.valuation, self.truncation_order, self.coefficients) == (
            other.valuation, other.truncation_order, other.coefficients)

    def __hash__(self):
        return hash((self.valuation, self.truncation_order, self.coefficients))

    def agrees_with(self, other: "FormalSeries") -> bool:
        """Equal on the exponents both series know."""
        n = min(self.truncation_order, other.truncation_order)
        return self.truncate(n) == other.truncate(n)

    def specialize(self, **values) -> "FormalSeries":
        return FormalSeries.make(self.valuation, [specialize(c, **values) for c in self.coefficients],
                                 self.truncation_order)

    # --- output -------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "valuation": self.valuation,
            "truncation_order": self.truncation_order,
            "coefficients": [canonical(c) for c in self.coefficients],
        }

    @staticmethod
    def from_json(d: dict) -> "FormalSeries":
        return FormalSeries.make(d["valuation"], [fe(c) for c in d["coefficients"]], d["truncation_order"])

    def __str__(self):
        terms = [f"({canonical(c)})*t^{e}" for e, c in self.items() if c != 0]
        return " + ".join(terms + [f"O(t^{self.truncation_order})"])


# exact series operations named as in the public interface
def series_add(x, y):
    return x + y


def series_sub(x, y):
    return x - y


def series_mul(x, y):
    return x * y


def series_div(x, y):
    return x / y


def series_invert(x):
    return x.invert()
