"""Tagged-union description of catalog functions and its JSON encoding.

Complex numbers are encoded as two-element arrays ``[re, im]``.  Every spec
is a frozen dataclass so it can key caches.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

import numpy as np


class SpecError(ValueError):
    """Malformed function description."""


def _c(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise SpecError(f"complex must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(x)


def _enc(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _trim(coeffs) -> tuple:
    """Coefficients highest degree first, leading zeros stripped."""
    cs = [complex(c) for c in coeffs]
    while len(cs) > 1 and cs[0] == 0:
        cs.pop(0)
    return tuple(cs)


@dataclass(frozen=True)
class Rational:
    """Ratio of polynomials; coefficients highest degree first (numpy.polyval order)."""
    num: tuple
    den: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "num", _trim(self.num))
        object.__setattr__(self, "den", _trim(self.den))
        if all(c == 0 for c in self.den):
            raise SpecError("rational: denominator is identically zero")
        if not np.all(np.isfinite(np.array(self.num + self.den))):
            raise SpecError("rational: non-finite coefficient")
        if len(self.num) > 1 and len(self.den) > 1:
            rn = np.roots(self.num)
            rd = np.roots(self.den)
            for a in rn:
                if np.min(np.abs(rd - a)) < 1e-9 * (1 + abs(a)):
                    raise SpecError("rational: numerator and denominator share a root")

    @property
    def degree(self) -> int:
        if all(c == 0 for c in self.num):
            return 0
        return max(len(self.num), len(self.den)) - 1


@dataclass(frozen=True)
class ExpLinear:
    """z -> exp(lam * z)."""
    lam: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        if self.lam == 0:
            raise SpecError("exp_linear: lambda must be nonzero")


@dataclass(frozen=True)
class ExpExp:
    """z -> exp(exp(z)); infinite order."""


@dataclass(frozen=True)
class WeierstrassP:
    """Weierstrass p-function with half-periods w1, w2 (periods 2*w1, 2*w2)."""
    w1: complex = 1.0
    w2: complex = 1j

    def __post_init__(self):
        object.__setattr__(self, "w1", complex(self.w1))
        object.__setattr__(self, "w2", complex(self.w2))
        if self.w1 == 0 or abs((self.w2 / self.w1).imag) < 1e-12:
            raise SpecError("weierstrass_p: w2/w1 must have nonzero imaginary part")


@dataclass(frozen=True)
class JacobiSN:
    """Jacobi sn(z, k) with real modulus 0 < k < 1."""
    k: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "k", float(self.k))
        if not 0.0 < self.k < 1.0:
            raise SpecError("jacobi_sn: modulus must satisfy 0 < k < 1")


@dataclass(frozen=True)
class Sum:
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise SpecError("sum: empty term list")


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise SpecError("product: empty factor list")


@dataclass(frozen=True)
class Reciprocal:
    inner: "FunctionSpec"


@dataclass(frozen=True)
class Mobius:
    """(a f + b) / (c f + d)."""
    inner: "FunctionSpec"
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.a * self.d - self.b * self.c) == 0:
            raise SpecError("mobius: determinant ad - bc vanishes")


@dataclass(frozen=True)
class Shift:
    """z -> f(z + h)."""
    inner: "FunctionSpec"
    h: complex

    def __post_init__(self):
        object.__setattr__(self, "h", complex(self.h))


@dataclass(frozen=True)
class ScaleArg:
    """z -> f(s z)."""
    inner: "FunctionSpec"
    s: complex

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        if self.s == 0:
            raise SpecError("scale_arg: scale must be nonzero")


@dataclass(frozen=True)
class RationalOf:
    """z -> P(f(z)) / Q(f(z)) for constant-coefficient polynomials P, Q."""
    inner: "FunctionSpec"
    num: tuple
    den: tuple = (1.0,)

    def __post_init__(self):
        r = Rational(self.num, self.den)  # validates reduced form
        object.__setattr__(self, "num", r.num)
        object.__setattr__(self, "den", r.den)

    @property
    def degree(self) -> int:
        return Rational(self.num, self.den).degree


FunctionSpec = Union[Rational, ExpLinear, ExpExp, WeierstrassP, JacobiSN, Sum, Product,
                     Reciprocal, Mobius, Shift, ScaleArg, RationalOf]


def constant(value: complex) -> Rational:
    return Rational((value,), (1.0,))


def difference(f: FunctionSpec, c: complex) -> Sum:
    """Exact difference f(z + c) - f(z) as a composite spec."""
    return Sum((Shift(f, c), Mobius(f, -1.0, 0.0, 0.0, 1.0)))


def p_plus_exp(w1: complex = 1.0, w2: complex = 1j) -> Sum:
    """The example g = p(z) + exp(z)."""
    return Sum((WeierstrassP(w1, w2), ExpLinear(1.0)))


# --- JSON -----------------------------------------------------------------

def to_json(spec: FunctionSpec) -> dict:
    if isinstance(spec, Rational):
        return {"type": "rational", "num": [_enc(c) for c in spec.num],
                "den": [_enc(c) for c in spec.den]}
    if isinstance(spec, ExpLinear):
        return {"type": "exp_linear", "lambda": _enc(spec.lam)}
    if isinstance(spec, ExpExp):
        return {"type": "exp_exp"}
    if isinstance(spec, WeierstrassP):
        return {"type": "weierstrass_p", "w1": _enc(spec.w1), "w2": _enc(spec.w2)}
    if isinstance(spec, JacobiSN):
        return {"type": "jacobi_sn", "k": spec.k}
    if isinstance(spec, Sum):
        return {"type": "sum", "terms": [to_json(t) for t in spec.terms]}
    if isinstance(spec, Product):
        return {"type": "product", "factors": [to_json(t) for t in spec.factors]}
    if isinstance(spec, Reciprocal):
        return {"type": "reciprocal", "inner": to_json(spec.inner)}
    if isinstance(spec, Mobius):
        return {"type": "mobius", "inner": to_json(spec.inner), "a": _enc(spec.a),
                "b": _enc(spec.b), "c": _enc(spec.c), "d": _enc(spec.d)}
    if isinstance(spec, Shift):
        return {"type": "shift", "inner": to_json(spec.inner), "h": _enc(spec.h)}
    if isinstance(spec, ScaleArg):
        return {"type": "scale_arg", "inner": to_json(spec.inner), "s": _enc(spec.s)}
    if isinstance(spec, RationalOf):
        return {"type": "rational_of", "inner": to_json(spec.inner),
                "num": [_enc(c) for c in spec.num], "den": [_enc(c) for c in spec.den]}
    raise SpecError(f"unknown spec {spec!r}")


def from_json(obj: Any) -> FunctionSpec:
    if not isinstance(obj, dict) or "type" not in obj:
        raise SpecError(f"spec must be an object with a 'type' tag: {obj!r}")
    t = obj["type"]
    try:
        if t == "rational":
            return Rational(tuple(_c(c) for c in obj["num"]),
                            tuple(_c(c) for c in obj.get("den", [1.0])))
        if t == "exp_linear":
            return ExpLinear(_c(obj.get("lambda", 1.0)))
        if t == "exp_exp":
            return ExpExp()
        if t == "weierstrass_p":
            return WeierstrassP(_c(obj.get("w1", 1.0)), _c(obj.get("w2", [0.0, 1.0])))
        if t == "jacobi_sn":
            return JacobiSN(float(obj["k"]))
        if t == "sum":
            return Sum(tuple(from_json(x) for x in obj["terms"]))
        if t == "product":
            return Product(tuple(from_json(x) for x in obj["factors"]))
        if t == "reciprocal":
            return Reciprocal(from_json(obj["inner"]))
        if t == "mobius":
            return Mobius(from_json(obj["inner"]), _c(obj["a"]), _c(obj["b"]),
                          _c(obj["c"]), _c(obj["d"]))
        if t == "shift":
            return Shift(from_json(obj["inner"]), _c(obj["h"]))
        if t == "scale_arg":
            return ScaleArg(from_json(obj["inner"]), _c(obj["s"]))
        if t == "rational_of":
            return RationalOf(from_json(obj["inner"]), tuple(_c(c) for c in obj["num"]),
                              tuple(_c(c) for c in obj.get("den", [1.0])))
    except KeyError as exc:
        raise SpecError(f"{t}: missing field {exc}") from None
    raise SpecError(f"unknown spec type {t!r}")
