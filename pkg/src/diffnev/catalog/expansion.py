"""Truncated numeric Laurent expansions of catalog functions.

Expansions are built analytically (closed forms, differential-equation
recurrences, series composition).  ``contour_expansion`` extracts
coefficients by trapezoid quadrature on a circle and is kept as an
independent route.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specs as S
from .elliptic import sncndn, sn_periods, weierstrass_lattice
from .functions import as_function, evaluate_array

EPS = 2.3e-16
STRIP_FACTOR = 1e4


class ExpansionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class LocalExpansion:
    center: complex
    valuation: int
    coefficients: np.ndarray
    errors: np.ndarray

    @property
    def truncation_order(self) -> int:
        return self.valuation + len(self.coefficients)

    def coeff(self, n: int) -> complex:
        i = n - self.valuation
        if i < 0:
            return 0j
        if i >= len(self.coefficients):
            raise ExpansionError(f"coefficient {n} beyond truncation order {self.truncation_order}")
        return complex(self.coefficients[i])

    def error(self, n: int) -> float:
        i = n - self.valuation
        if i < 0:
            return 0.0
        return float(self.errors[i])

    def __call__(self, z):
        t = np.asarray(z, dtype=complex) - self.center
        powers = np.arange(self.valuation, self.truncation_order)
        return np.power.outer(t, powers) @ self.coefficients


# --- numeric Laurent arithmetic ---------------------------------------------
#
# A series is (v, c, e): exponents v .. v+len(c)-1, coefficients c, absolute
# error estimates e.  Every stored coefficient is trusted.

def _ser(v, c, e=None):
    c = np.asarray(c, dtype=complex)
    if e is None:
        e = EPS * np.abs(c)
    return (int(v), c, np.asarray(e, dtype=float))


def _strip(s):
    v, c, e = s
    i = 0
    while i < len(c) and abs(c[i]) <= STRIP_FACTOR * e[i]:
        i += 1
    if i == len(c):
        return (v + len(c), c[:0], e[:0])
    return (v + i, c[i:], e[i:])


def _add(x, y):
    vx, cx, ex = x
    vy, cy, ey = y
    v = min(vx, vy)
    top = min(vx + len(cx), vy + len(cy))
    n = max(top - v, 0)
    c = np.zeros(n, complex)
    e = np.zeros(n)
    for (vs, cs, es) in (x, y):
        lo = vs - v
        m = max(0, min(len(cs), n - lo))
        c[lo:lo + m] += cs[:m]
        e[lo:lo + m] += es[:m] + EPS * np.abs(cs[:m])
    return _strip((v, c, e))


def _scale(x, a):
    v, c, e = x
    return (v, a * c, abs(a) * e + EPS * np.abs(a * c))


def _mul(x, y):
    vx, cx, ex = x
    vy, cy, ey = y
    n = min(len(cx), len(cy))
    if n == 0:
        return (vx + vy, cx[:0], ex[:0])
    c = np.convolve(cx[:n], cy[:n])[:n]
    ax, ay = np.abs(cx[:n]), np.abs(cy[:n])
    e = (np.convolve(ax, ey[:n])[:n] + np.convolve(ex[:n], ay)[:n]
         + 4 * EPS * np.convolve(ax, ay)[:n])
    return (vx + vy, c, e)


def _inv(x):
    x = _strip(x)
    v, c, e = x
    if len(c) == 0:
        raise ExpansionError("inverse of a series with no trusted nonzero coefficient")
    n = len(c)
    b = np.zeros(n, complex)
    eb = np.zeros(n)
    b[0] = 1.0 / c[0]
    eb[0] = abs(b[0]) * (e[0] / abs(c[0]) + EPS)
    # huge error bounds may overflow to inf; those coefficients are then simply untrusted
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(1, n):
            acc = np.dot(c[1:m + 1], b[m - 1::-1])
            b[m] = -acc / c[0]
            err = np.dot(np.abs(c[1:m + 1]), eb[m - 1::-1]) + np.dot(e[1:m + 1], np.abs(b[m - 1::-1]))
            eb[m] = (err + abs(acc) * e[0] / abs(c[0])) / abs(c[0]) + 4 * EPS * abs(b[m])
    eb[np.isnan(eb)] = np.inf
    return (-v, b, eb)


def _exp_series(x, n):
    v, c, e = x
    if v < 0:
        raise ExpansionError("exp of a series with a pole")
    full = np.zeros(n, complex)
    ef = np.zeros(n)
    m = min(n, v + len(c))
    full[v:m] = c[:m - v]
    ef[v:m] = e[:m - v]
    n = m
    a0 = full[0]
    if a0.real > 700:
        from .functions import EvaluationRangeError
        raise EvaluationRangeError("exponential overflow in expansion")
    y = np.zeros(n, complex)
    y[0] = np.exp(a0)
    ey = np.zeros(n)
    ey[0] = abs(y[0]) * (ef[0] + EPS)
    for k in range(1, n):
        j = np.arange(1, k + 1)
        y[k] = np.dot(j * full[1:k + 1], y[k - 1::-1]) / k
        ey[k] = (np.dot(j * ef[1:k + 1], np.abs(y[k - 1::-1]))
                 + np.dot(j * np.abs(full[1:k + 1]), ey[k - 1::-1])) / k + 4 * EPS * abs(y[k])
    return (0, y, ey)


def _poly_of(coeffs, s, n):
    """Horner evaluation of a constant-coefficient polynomial at series s."""
    out = _ser(0, [coeffs[0]] + [0] * (n - 1), [0.0] * n)
    for a in coeffs[1:]:
        out = _mul(out, s)
        out = _add(out, _ser(0, [a] + [0] * (n - 1), [0.0] * n))
    return out


def _taylor_poly(coeffs, z0, n):
    """Taylor coefficients (ascending) of the polynomial at z0."""
    p = np.poly1d(np.array(coeffs, dtype=complex))
    out = []
    fact = 1.0
    for k in range(n):
        out.append(p(z0) / fact)
        p = p.deriv()
        fact *= (k + 1)
        if p.order == 0 and p.coeffs[0] == 0:
            out.extend([0j] * (n - k - 1))
            break
    out = np.array(out[:n], complex)
    scale = np.polyval(np.abs(np.array(coeffs)), abs(z0)) + 1.0
    return _ser(0, out, EPS * 8 * scale * np.ones(n))


def _sn_series(k, z0, n):
    s, c, d = (complex(a[0]) for a in sncndn(np.array([z0]), k))
    if not np.isfinite(abs(s)) or abs(s) > 1e8:
        K, Kp = sn_periods(k)
        inner = _sn_series(k, z0 - 1j * Kp, n + 2)
        return _scale(_inv(_strip(inner)), 1.0 / k)
    a = np.zeros(n + 2, complex)
    a[0], a[1] = s, c * d
    for m in range(0, n):
        cube = np.convolve(np.convolve(a[:m + 1], a[:m + 1]), a[:m + 1])[m]
        a[m + 2] = (-(1 + k * k) * a[m] + 2 * k * k * cube) / ((m + 2) * (m + 1))
    scale = np.maximum(np.abs(a[:n]), EPS)
    e = 1e-15 * max(1.0, abs(s)) * np.ones(n) + 64 * EPS * scale * (np.arange(n) + 1)
    return _ser(0, a[:n], e)


def _wp_series(spec, z0, n):
    L = weierstrass_lattice(spec.w1, spec.w2)
    u, _ = L.reduce(np.array([z0]))
    u = complex(u[0])
    if abs(u) < 1e-10 * (1 + abs(z0)):
        # Laurent at a lattice point: t^-2 + sum_{m>=2} c_m t^(2m-2)
        m_max = n // 2 + 2
        cm = {2: L.g2 / 20.0, 3: L.g3 / 28.0}
        for m in range(4, m_max + 1):
            acc = sum(cm[j] * cm[m - j] for j in range(2, m - 1))
            cm[m] = 3.0 * acc / ((2 * m + 1) * (m - 3))
        c = np.zeros(n, complex)
        c[0] = 1.0
        for m in range(2, m_max + 1):
            idx = 2 * m - 2 + 2
            if idx < n:
                c[idx] = cm[m]
        return _ser(-2, c, EPS * np.abs(c) * 16)
    p0 = complex(L.p(np.array([z0]))[0])
    dp0 = complex(L.dp(np.array([z0]))[0])
    a = np.zeros(n + 2, complex)
    a[0], a[1] = p0, dp0
    for m in range(0, n):
        sq = np.convolve(a[:m + 1], a[:m + 1])[m]
        a[m + 2] = (6 * sq - (L.g2 / 2 if m == 0 else 0)) / ((m + 2) * (m + 1))
    e = 1e-14 * np.maximum(np.abs(a[:n]), 1e-300) * (np.arange(n) + 1) + 1e-15 * max(1.0, abs(p0))
    return _ser(0, a[:n], e)


def _series(spec, z0: complex, n: int):
    """Series of spec at z0 with roughly n trusted coefficients."""
    if isinstance(spec, S.Rational):
        num = _taylor_poly(spec.num, z0, n)
        den = _taylor_poly(spec.den, z0, n)
        return _strip(_mul(num, _inv(_strip(den))))
    if isinstance(spec, S.ExpLinear):
        lam = spec.lam
        if (lam * z0).real > 700:
            from .functions import EvaluationRangeError
            raise EvaluationRangeError("exponential overflow in expansion")
        base = np.exp(lam * z0)
        c = np.array([base * lam ** k / math.factorial(k) for k in range(n)], complex)
        return _ser(0, c, 4 * EPS * np.abs(c) * (np.arange(n) + 1))
    if isinstance(spec, S.ExpExp):
        inner = _series(S.ExpLinear(1.0), z0, n)
        return _exp_series(inner, n)
    if isinstance(spec, S.JacobiSN):
        return _strip(_sn_series(spec.k, z0, n))
    if isinstance(spec, S.WeierstrassP):
        return _wp_series(spec, z0, n)
    if isinstance(spec, S.Sum):
        out = None
        for t in spec.terms:
            s = _series(t, z0, n)
            out = s if out is None else _add(out, s)
        return _strip(out)
    if isinstance(spec, S.Product):
        out = None
        for t in spec.factors:
            s = _strip(_series(t, z0, n))
            out = s if out is None else _mul(out, s)
        return _strip(out)
    if isinstance(spec, S.Reciprocal):
        return _inv(_strip(_series(spec.inner, z0, n)))
    if isinstance(spec, S.Mobius):
        s = _strip(_series(spec.inner, z0, n))
        num = _add(_scale(s, spec.a), _ser(0, [spec.b] + [0] * (n - 1), [0.0] * n))
        den = _add(_scale(s, spec.c), _ser(0, [spec.d] + [0] * (n - 1), [0.0] * n))
        return _strip(_mul(_strip(num), _inv(_strip(den))))
    if isinstance(spec, S.Shift):
        return _series(spec.inner, z0 + spec.h, n)
    if isinstance(spec, S.ScaleArg):
        v, c, e = _series(spec.inner, z0 * spec.s, n)
        pw = spec.s ** np.arange(v, v + len(c), dtype=float)
        return (v, c * pw, e * np.abs(pw))
    if isinstance(spec, S.RationalOf):
        s = _strip(_series(spec.inner, z0, n))
        if s[0] < 0:
            # pole of the inner function: work with 1/f
            w = _inv(s)
            dn, dd = len(spec.num) - 1, len(spec.den) - 1
            D = max(dn, dd)
            num = _poly_of(_rev_pad(spec.num, D), w, n)
            den = _poly_of(_rev_pad(spec.den, D), w, n)
            return _strip(_mul(_strip(num), _inv(_strip(den))))
        num = _poly_of(spec.num, s, n)
        den = _poly_of(spec.den, s, n)
        return _strip(_mul(_strip(num), _inv(_strip(den))))
    raise S.SpecError(f"no expansion for {spec!r}")


def _rev_pad(coeffs, D):
    """Coefficients of w^D P(1/w), highest degree first."""
    return tuple(coeffs[::-1]) + (0,) * (D + 1 - len(coeffs))


def local_expansion(f, z0: complex, n_terms: int, method: str = "analytic") -> LocalExpansion:
    """Laurent expansion of f at z0 with at least n_terms trusted coefficients."""
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    f = as_function(f)
    z0 = complex(z0)
    if method == "contour":
        return contour_expansion(f, z0, n_terms)
    guard = n_terms + 8
    for _ in range(6):
        v, c, e = _strip(_series(f.spec, z0, guard))
        if len(c) >= n_terms:
            return LocalExpansion(z0, v, c[:n_terms].copy(), e[:n_terms].copy())
        guard *= 2
    raise ExpansionError(f"could not obtain {n_terms} trusted coefficients at {z0}")


def contour_expansion(f, z0: complex, n_terms: int, radius: float = None,
                      nodes: int = 256, tol: float = 1e-10, max_nodes: int = 1 << 15,
                      min_radius: float = 1e-8) -> LocalExpansion:
    """Coefficient extraction by the trapezoid rule on a circle around z0.

    The radius defaults to a quarter of the distance to the nearest pole other
    than z0 itself; the node count doubles until two estimates agree.
    """
    from .points import nearest_singularity_distance
    f = as_function(f)
    if radius is None:
        d = nearest_singularity_distance(f, z0)
        radius = 0.25 * d if math.isfinite(d) else 0.5
    if radius < min_radius:
        raise ExpansionError(f"no valid extraction circle around {z0} (radius {radius:g})")

    def coeffs(N):
        th = 2 * np.pi * np.arange(N) / N
        w = evaluate_array(f.spec, z0 + radius * np.exp(1j * th))
        if not np.all(np.isfinite(w)):
            raise ExpansionError(f"singularity on the extraction circle around {z0}")
        a = np.fft.fft(w) / N
        ks = np.fft.fftfreq(N, 1.0 / N).astype(int)
        return ks, a, float(np.max(np.abs(w)))

    N = nodes
    ks, a, M = coeffs(N)
    while True:
        ks2, a2, M = coeffs(2 * N)
        half = N // 2
        sel = lambda ks_, a_: {int(k): a_[i] for i, k in enumerate(ks_) if -half // 2 <= k < half // 2}
        d1, d2 = sel(ks, a), sel(ks2, a2)
        diff = max(abs(d1[k] - d2[k]) for k in d1)
        if diff <= tol * max(M, 1e-300) or 2 * N >= max_nodes:
            break
        N *= 2
        ks, a = ks2, a2
    coef = d2
    noise = max(diff, 1e-15 * M)
    kmin = min(coef)
    scaled = {k: coef[k] / radius ** k for k in coef}
    errs = {k: noise / radius ** k for k in coef}
    v = None
    for k in sorted(scaled):
        if abs(scaled[k]) > STRIP_FACTOR * errs[k] and abs(coef[k]) > 1e-9 * max(M, 1.0) * 1e-3:
            v = k
            break
    if v is None:
        raise ExpansionError(f"function vanishes to working precision around {z0}")
    ks_out = [k for k in range(v, v + n_terms)]
    if ks_out[-1] not in scaled:
        raise ExpansionError("not enough resolvable coefficients on the extraction circle")
    c = np.array([scaled[k] for k in ks_out], complex)
    e = np.array([errs[k] for k in ks_out])
    return LocalExpansion(z0, v, c, e)
