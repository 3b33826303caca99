"""Vectorised evaluation of catalog functions and the MeromorphicFunction wrapper."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from . import specs as S
from .elliptic import sncndn, sn_periods, weierstrass_lattice

INF = "inf"
Target = Union[complex, str]

EXP_MAX = 700.0


class EvaluationRangeError(ArithmeticError):
    """Evaluation overflowed for reasons other than a pole (e.g. exp(exp z) far right)."""


def is_inf(t) -> bool:
    return isinstance(t, str) and t == INF


def as_target(t) -> Target:
    if is_inf(t) or t is None:
        return INF
    if isinstance(t, str):
        if t.lower() in ("inf", "infinity", "oo"):
            return INF
        return complex(t.replace(" ", ""))
    if isinstance(t, (list, tuple)):
        return complex(float(t[0]), float(t[1]))
    t = complex(t)
    if not (math.isfinite(t.real) and math.isfinite(t.imag)):
        return INF
    return t


def target_label(t: Target) -> str:
    if is_inf(t):
        return INF
    t = complex(t)
    if t.imag == 0:
        return repr(t.real)
    return f"{t.real!r}{t.imag:+}j"


def _poleify(w):
    w = np.asarray(w, dtype=complex)
    bad = ~np.isfinite(w)
    if np.any(bad):
        w = np.where(bad, np.inf, w)
    return w


def _exp(u):
    u = np.asarray(u, dtype=complex)
    if np.any(u.real > EXP_MAX):
        raise EvaluationRangeError("exponential overflow")
    return np.exp(u)


def evaluate_array(spec, z) -> np.ndarray:
    """Values of spec at z; poles are returned as +inf (real part)."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        return _poleify(_ev(spec, z))


def _ev(spec, z):
    if isinstance(spec, S.Rational):
        num = np.polyval(np.array(spec.num), z)
        den = np.polyval(np.array(spec.den), z)
        return np.where(den == 0, np.inf, num / np.where(den == 0, 1, den))
    if isinstance(spec, S.ExpLinear):
        return _exp(spec.lam * z)
    if isinstance(spec, S.ExpExp):
        return _exp(_exp(z))
    if isinstance(spec, S.WeierstrassP):
        return weierstrass_lattice(spec.w1, spec.w2).p(z)
    if isinstance(spec, S.JacobiSN):
        return sncndn(z, spec.k)[0]
    if isinstance(spec, S.Sum):
        out = np.zeros_like(z)
        for t in spec.terms:
            out = out + _poleify(_ev(t, z))
        return out
    if isinstance(spec, S.Product):
        out = np.ones_like(z)
        for t in spec.factors:
            out = out * _poleify(_ev(t, z))
        return out
    if isinstance(spec, S.Reciprocal):
        w = _poleify(_ev(spec.inner, z))
        return np.where(np.isinf(w), 0.0, np.where(w == 0, np.inf, 1.0 / np.where(w == 0, 1, w)))
    if isinstance(spec, S.Mobius):
        w = _poleify(_ev(spec.inner, z))
        at_inf = spec.a / spec.c if spec.c != 0 else np.inf
        fin = np.where(np.isinf(w), 0, w)
        den = spec.c * fin + spec.d
        val = np.where(den == 0, np.inf, (spec.a * fin + spec.b) / np.where(den == 0, 1, den))
        return np.where(np.isinf(w), at_inf, val)
    if isinstance(spec, S.Shift):
        return _ev(spec.inner, z + spec.h)
    if isinstance(spec, S.ScaleArg):
        return _ev(spec.inner, z * spec.s)
    if isinstance(spec, S.RationalOf):
        w = _poleify(_ev(spec.inner, z))
        fin = np.where(np.isinf(w), 0, w)
        num = np.polyval(np.array(spec.num), fin)
        den = np.polyval(np.array(spec.den), fin)
        dn, dd = len(spec.num) - 1, len(spec.den) - 1
        if dn > dd:
            at_inf = np.inf
        elif dn == dd:
            at_inf = spec.num[0] / spec.den[0]
        else:
            at_inf = 0.0
        val = np.where(den == 0, np.inf, num / np.where(den == 0, 1, den))
        return np.where(np.isinf(w), at_inf, val)
    raise S.SpecError(f"cannot evaluate {spec!r}")


def declared_order(spec) -> float:
    if isinstance(spec, S.Rational):
        return 0.0
    if isinstance(spec, S.ExpLinear):
        return 1.0
    if isinstance(spec, S.ExpExp):
        return math.inf
    if isinstance(spec, (S.WeierstrassP, S.JacobiSN)):
        return 2.0
    if isinstance(spec, S.Sum):
        return max(declared_order(t) for t in spec.terms)
    if isinstance(spec, S.Product):
        return max(declared_order(t) for t in spec.factors)
    return declared_order(spec.inner)


@dataclass(frozen=True)
class LatticeDescriptor:
    """Points base + m*t1 + n*t2 (t2 may be None for a single progression)."""
    base: complex
    t1: complex
    t2: Optional[complex]
    multiplicity: int
    target: Target


def default_lattices(spec) -> tuple:
    if isinstance(spec, S.JacobiSN):
        K, Kp = sn_periods(spec.k)
        k = spec.k
        return (
            LatticeDescriptor(0.0, 2 * K, 2j * Kp, 1, 0j),
            LatticeDescriptor(1j * Kp, 2 * K, 2j * Kp, 1, INF),
            LatticeDescriptor(K, 4 * K, 2j * Kp, 2, 1 + 0j),
            LatticeDescriptor(-K, 4 * K, 2j * Kp, 2, -1 + 0j),
            LatticeDescriptor(K + 1j * Kp, 4 * K, 2j * Kp, 2, complex(1 / k)),
            LatticeDescriptor(-K + 1j * Kp, 4 * K, 2j * Kp, 2, complex(-1 / k)),
        )
    if isinstance(spec, S.WeierstrassP):
        return (LatticeDescriptor(0.0, 2 * spec.w1, 2 * spec.w2, 2, INF),)
    return ()


@dataclass(frozen=True)
class MeromorphicFunction:
    spec: object
    order: float = field(default=None)
    lattices: tuple = field(default=None)

    def __post_init__(self):
        if self.order is None:
            object.__setattr__(self, "order", declared_order(self.spec))
        if self.lattices is None:
            object.__setattr__(self, "lattices", default_lattices(self.spec))

    @property
    def finite_order(self) -> bool:
        return math.isfinite(self.order)

    def __call__(self, z):
        return evaluate_array(self.spec, z)


def as_function(f) -> MeromorphicFunction:
    if isinstance(f, MeromorphicFunction):
        return f
    return MeromorphicFunction(f)


@dataclass(frozen=True)
class ExtendedComplexValue:
    """A finite value, or a pole marker with an optional order hint."""
    value: Optional[complex] = None
    pole_order: Optional[int] = None

    @property
    def is_pole(self) -> bool:
        return self.value is None

    def __post_init__(self):
        if self.value is not None:
            v = complex(self.value)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError("finite value must have finite coordinates")
        if self.pole_order is not None and self.pole_order < 1:
            raise ValueError("pole order hint must be >= 1")


POLE_THRESHOLD = 1e12


def _pole_order_hint(spec, z: complex) -> Optional[int]:
    eps = np.array([1e-4, 1e-5, 1e-6]) * (1 + abs(z))
    vals = np.abs(evaluate_array(spec, z + eps * np.exp(0.3j)))
    if not np.all(np.isfinite(vals)) or np.any(vals == 0):
        return None
    slopes = np.diff(np.log(vals)) / np.diff(np.log(1 / eps))
    if not np.all(slopes > 0.5):
        return None
    return max(1, int(round(float(np.median(slopes)))))


def evaluate(f, z: complex) -> ExtendedComplexValue:
    """Value of f at z, or a pole marker when z sits on (or numerically at) a pole."""
    f = as_function(f)
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("evaluate: z must be finite")
    w = complex(evaluate_array(f.spec, np.array([z]))[0])
    if math.isfinite(abs(w)) and abs(w) <= POLE_THRESHOLD:
        return ExtendedComplexValue(value=w)
    # probe: huge on a shrinking sequence and 1/f vanishing there
    order = _pole_order_hint(f.spec, z)
    if order is not None:
        return ExtendedComplexValue(pole_order=order)
    if not math.isfinite(abs(w)):
        # non-finite without pole growth: cancelling singularities; use the local expansion
        from .expansion import local_expansion
        ex = local_expansion(f, z, 1)
        if ex.valuation >= 0:
            return ExtendedComplexValue(value=complex(ex.coefficients[0]) if ex.valuation == 0 else 0j)
        return ExtendedComplexValue(pole_order=-ex.valuation)
    return ExtendedComplexValue(value=w)
