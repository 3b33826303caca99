"""Enumeration of a-points and poles in discs."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specs as S
from .elliptic import sn_periods
from .functions import (INF, LatticeDescriptor, Target, as_function, as_target,
                        default_lattices, evaluate_array, is_inf)
from .winding import (IncompleteEnumerationError, RefinementError, WindingConfig,
                      find_zeros)

LOC_TOL = 1e-7


@dataclass(frozen=True)
class PointRecord:
    location: complex
    multiplicity: int
    target: Target

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")
        if not math.isfinite(abs(self.location)):
            raise ValueError("location must be finite")


def _key(z):
    return (round(abs(z), 9), round(math.atan2(z.imag, z.real), 9) if z != 0 else 0.0)


def _is_constant(spec) -> bool:
    return isinstance(spec, S.Rational) and len(spec.num) == 1 and len(spec.den) == 1


# --- periods ----------------------------------------------------------------

def _in_lattice(v, W1, W2, tol=1e-9):
    M = np.array([[W1.real, W2.real], [W1.imag, W2.imag]])
    st = np.linalg.solve(M, [v.real, v.imag])
    return np.all(np.abs(st - np.rint(st)) < tol)


@lru_cache(maxsize=None)
def periods(spec):
    """Basis (W1, W2) of a period lattice of a doubly periodic spec, else None."""
    if isinstance(spec, S.JacobiSN):
        K, Kp = sn_periods(spec.k)
        return (complex(4 * K), complex(2j * Kp))
    if isinstance(spec, S.WeierstrassP):
        return (2 * spec.w1, 2 * spec.w2)
    if isinstance(spec, (S.Shift, S.Mobius, S.Reciprocal, S.RationalOf)):
        return periods(spec.inner)
    if isinstance(spec, S.ScaleArg):
        p = periods(spec.inner)
        return None if p is None else (p[0] / spec.s, p[1] / spec.s)
    if isinstance(spec, (S.Sum, S.Product)):
        parts = spec.terms if isinstance(spec, S.Sum) else spec.factors
        lat = None
        for t in parts:
            if _is_constant(t):
                continue
            p = periods(t)
            if p is None:
                return None
            if lat is None:
                lat = p
            elif not (_in_lattice(lat[0], *p) and _in_lattice(lat[1], *p)
                      and _in_lattice(p[0], *lat) and _in_lattice(p[1], *lat)):
                return None
        return lat
    return None


# --- lattices ---------------------------------------------------------------

def lattice_points(desc: LatticeDescriptor, center: complex, R: float):
    base, t1, t2 = complex(desc.base), complex(desc.t1), desc.t2
    out = []
    if t2 is None:
        d = t1
        k0 = ((center - base) * d.conjugate()).real / abs(d) ** 2
        span = R / abs(d) + 1
        for k in range(int(math.floor(k0 - span)), int(math.ceil(k0 + span)) + 1):
            z = base + k * d
            if abs(z - center) <= R:
                out.append(z)
        return out
    t2 = complex(t2)
    M = np.array([[t1.real, t2.real], [t1.imag, t2.imag]])
    Minv = np.linalg.inv(M)
    st = Minv @ np.array([(center - base).real, (center - base).imag])
    rs = R * np.linalg.norm(Minv, axis=1) + 1
    mm = np.arange(int(math.floor(st[0] - rs[0])), int(math.ceil(st[0] + rs[0])) + 1)
    nn = np.arange(int(math.floor(st[1] - rs[1])), int(math.ceil(st[1] + rs[1])) + 1)
    Mg, Ng = np.meshgrid(mm, nn, indexing="ij")
    Z = base + Mg.ravel() * t1 + Ng.ravel() * t2
    return [complex(z) for z in Z[np.abs(Z - center) <= R]]


def _target_eq(a, b) -> bool:
    if is_inf(a) or is_inf(b):
        return is_inf(a) and is_inf(b)
    return abs(complex(a) - complex(b)) <= 1e-12 * (1 + abs(complex(a)))


# --- closed forms -----------------------------------------------------------

def _cluster_roots(roots):
    roots = sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag))
    out = []
    for r in roots:
        for i, (c, m) in enumerate(out):
            if abs(c - r) <= 1e-5 * (1 + abs(c)):
                out[i] = ((c * m + r) / (m + 1), m + 1)
                break
        else:
            out.append((r, 1))
    return out


def _poly_roots(coeffs):
    cs = list(coeffs)
    while len(cs) > 1 and abs(cs[0]) == 0:
        cs.pop(0)
    if len(cs) == 1:
        return []
    return _cluster_roots(np.roots(np.array(cs, complex)))


def _rational_points(spec: S.Rational, t):
    if is_inf(t):
        return _poly_roots(spec.den)
    n, d = np.array(spec.num, complex), np.array(spec.den, complex)
    L = max(len(n), len(d))
    n = np.concatenate([np.zeros(L - len(n)), n])
    d = np.concatenate([np.zeros(L - len(d)), d])
    poly = n - complex(t) * d
    if np.all(np.abs(poly) <= 1e-14 * (1 + np.abs(n).max())):
        raise ValueError("function is identically equal to the target")
    return _poly_roots(poly)


def _exp_points(lam, t, center, R):
    if is_inf(t) or complex(t) == 0:
        return []
    desc = LatticeDescriptor(np.log(complex(t)) / lam, 2j * np.pi / lam, None, 1, t)
    return [(z, 1) for z in lattice_points(desc, center, R)]


def _expexp_points(t, center, R, max_points=200_000):
    if is_inf(t) or complex(t) == 0:
        return []
    la = np.log(complex(t))
    bound = math.exp(abs(center) + R)
    kmax = int((bound + abs(la)) / (2 * np.pi)) + 1
    if kmax > max_points:
        raise IncompleteEnumerationError(f"exp(exp z): about {kmax} values of log branch needed")
    out = []
    for k in range(-kmax, kmax + 1):
        Lk = la + 2j * np.pi * k
        if abs(Lk) == 0:
            continue
        desc = LatticeDescriptor(np.log(Lk), 2j * np.pi, None, 1, t)
        out.extend((z, 1) for z in lattice_points(desc, center, R))
    return out


# --- transforms of the target ----------------------------------------------

def _mobius_preimage(m: S.Mobius, t):
    """Value(s) of the inner function mapped to t by (a f + b)/(c f + d)."""
    a, b, c, d = m.a, m.b, m.c, m.d
    if is_inf(t):
        return INF if c == 0 else complex(-d / c)
    t = complex(t)
    den = a - c * t
    if den == 0:
        return INF
    return complex((d * t - b) / den)


def _rationalof_preimages(r: S.RationalOf, t):
    """[(inner value, multiplicity factor)] solving P(w)/Q(w) = t."""
    num = np.array(r.num, complex)
    den = np.array(r.den, complex)
    D = max(len(num), len(den)) - 1
    if is_inf(t):
        out = [(w, m) for w, m in _poly_roots(den)]
        if len(num) - 1 > len(den) - 1:
            out.append((INF, len(num) - len(den)))
        return out
    n = np.concatenate([np.zeros(D + 1 - len(num)), num])
    d = np.concatenate([np.zeros(D + 1 - len(den)), den])
    poly = n - complex(t) * d
    nz = np.flatnonzero(np.abs(poly) > 1e-14 * (1 + np.abs(poly).max()))
    if len(nz) == 0:
        raise ValueError("composite function is identically equal to the target")
    lead = nz[0]
    out = list(_poly_roots(poly[lead:]))
    if lead > 0:
        out.append((INF, int(lead)))
    return out


# --- the dispatcher ---------------------------------------------------------

def _round_key(center, R):
    return complex(round(center.real, 12), round(center.imag, 12)), float(R)


def points_in_disc(spec, target, center: complex, R: float, cfg: WindingConfig = None):
    """[(location, multiplicity)] of target-points of spec with |z - center| <= R."""
    t = as_target(target)
    c, R = _round_key(complex(center), R)
    return list(_points_cached(spec, t if is_inf(t) else complex(t), c, R, cfg or _DEFAULT_CFG))


_DEFAULT_CFG = WindingConfig()


@lru_cache(maxsize=4096)
def _points_cached(spec, t, center, R, cfg):
    pts = _points(spec, t, center, R, cfg)
    pts = [(complex(z), int(m)) for z, m in pts if abs(z - center) <= R]
    pts.sort(key=lambda p: _key(p[0] - center))
    return tuple(pts)


def _points(spec, t, center, R, cfg):
    for desc in default_lattices(spec):
        if _target_eq(desc.target, t):
            return [(z, desc.multiplicity) for z in lattice_points(desc, center, R)]
    if isinstance(spec, S.Rational):
        if _is_constant(spec):
            if not is_inf(t) and _target_eq(complex(spec.num[0] / spec.den[0]), t):
                raise ValueError("function is identically equal to the target")
            return []
        return _rational_points(spec, t)
    if isinstance(spec, S.ExpLinear):
        return _exp_points(spec.lam, t, center, R)
    if isinstance(spec, S.ExpExp):
        return _expexp_points(t, center, R)
    if isinstance(spec, S.Shift):
        inner = points_in_disc(spec.inner, t, center + spec.h, R, cfg)
        return [(z - spec.h, m) for z, m in inner]
    if isinstance(spec, S.ScaleArg):
        inner = points_in_disc(spec.inner, t, center * spec.s, R * abs(spec.s), cfg)
        return [(z / spec.s, m) for z, m in inner]
    if isinstance(spec, S.Reciprocal):
        tt = 0j if is_inf(t) else (INF if complex(t) == 0 else 1.0 / complex(t))
        return points_in_disc(spec.inner, tt, center, R, cfg)
    if isinstance(spec, S.Mobius):
        return points_in_disc(spec.inner, _mobius_preimage(spec, t), center, R, cfg)
    if isinstance(spec, S.RationalOf):
        out = []
        for w, mu in _rationalof_preimages(spec, t):
            out.extend((z, m * mu) for z, m in points_in_disc(spec.inner, w, center, R, cfg))
        return out
    if periods(spec) is not None:
        return _periodic_points(spec, t, center, R, cfg)
    if isinstance(spec, (S.Sum, S.Product)):
        if is_inf(t):
            return _composite_poles(spec, center, R, cfg)
        return _fallback_disc(spec, t, center, R, cfg)
    # a doubly periodic base function with a non-lattice target
    return _periodic_points(spec, t, center, R, cfg)


def _composite_poles(spec, center, R, cfg):
    from .expansion import ExpansionError, local_expansion
    parts = spec.terms if isinstance(spec, S.Sum) else spec.factors
    cands = []
    for i, p in enumerate(parts):
        for z, m in points_in_disc(p, INF, center, R + 1e-6, cfg):
            cands.append((z, m, i))
    cands.sort(key=lambda c: (c[0].real, c[0].imag))
    groups = []
    for z, m, i in cands:
        for g in groups:
            if abs(g[0] - z) <= LOC_TOL * (1 + abs(z)):
                g[1].append((m, i))
                break
        else:
            groups.append((z, [(m, i)]))
    out = []
    for z, members in groups:
        if isinstance(spec, S.Sum) and len(members) == 1:
            out.append((z, members[0][0]))
            continue
        try:
            ex = local_expansion(spec, z, 1)
        except ExpansionError:
            continue
        if ex.valuation < 0:
            out.append((z, -ex.valuation))
    return out


def _shifted_fun(spec, t):
    t = complex(t)

    def fun(z):
        return evaluate_array(spec, z) - t
    return fun


_JITTER = (0.01371, 0.02893, 0.00617, 0.04111, 0.03337)


def _fallback_rect(spec, t, rect, cfg, h0):
    """Target-points of spec in rect by winding counts, retrying on ambiguous grids."""
    x0, x1, y0, y1 = rect
    span = max(x1 - x0, y1 - y0)
    last = None
    for j, jit in enumerate(_JITTER):
        r = (x0 - jit * span, x1 + 0.7 * jit * span, y0 - 0.9 * jit * span, y1 + 1.1 * jit * span)
        pr = 0.5 * math.hypot(r[1] - r[0], r[3] - r[2])
        pc = 0.5 * (r[0] + r[1]) + 0.5j * (r[2] + r[3])
        poles = points_in_disc(spec, INF, pc, pr + 1e-9, cfg)
        try:
            return find_zeros(_shifted_fun(spec, t), r, poles, h0=h0 * (1 + 0.37 * jit), cfg=cfg)
        except RefinementError as exc:
            last = exc
    raise last


def _fallback_disc(spec, t, center, R, cfg):
    rect = (center.real - R, center.real + R, center.imag - R, center.imag + R)
    h0 = min(2.0, max(R / 4, 0.25))
    return [(z, m) for z, m in _fallback_rect(spec, t, rect, cfg, h0) if abs(z - center) <= R]


@lru_cache(maxsize=256)
def _cell_points(spec, t, cfg):
    """Target-points in the half-open cell {s W1 + u W2 : s, u in [0, 1)}."""
    W1, W2 = periods(spec)
    M = np.array([[W1.real, W2.real], [W1.imag, W2.imag]])
    Minv = np.linalg.inv(M)
    corners = [0, W1, W2, W1 + W2]
    marg = 0.0731 * max(abs(W1), abs(W2))
    xs = [c.real for c in corners]
    ys = [c.imag for c in corners]
    rect = (min(xs) - marg, max(xs) + marg, min(ys) - marg, max(ys) + marg)
    if is_inf(t):
        pc = 0.5 * (W1 + W2)
        raw = _composite_poles(spec, pc, 0.5 * abs(W1) + 0.5 * abs(W2) + 2 * marg, cfg) \
            if isinstance(spec, (S.Sum, S.Product)) else \
            points_in_disc(spec, INF, pc, 0.5 * abs(W1) + 0.5 * abs(W2) + 2 * marg, cfg)
    else:
        raw = _fallback_rect(spec, t, rect, cfg, h0=max(abs(W1), abs(W2)) / 4)
    cell = []
    for z, m in raw:
        st = Minv @ np.array([z.real, z.imag])
        st = st - np.floor(st)
        st = np.where(np.abs(st - 1) < 1e-9, 0.0, st)
        st = np.where(np.abs(st) < 1e-9, 0.0, st)
        zr = st[0] * W1 + st[1] * W2
        if any(abs(zr - c) <= 1e-6 * (1 + abs(c)) for c, _ in cell):
            continue
        cell.append((complex(zr), m))
    return tuple(cell)


def _periodic_points(spec, t, center, R, cfg):
    W1, W2 = periods(spec)
    cell = _cell_points(spec, t, cfg)
    if not is_inf(t):
        npoles = sum(m for _, m in _cell_points(spec, INF, cfg))
        nz = sum(m for _, m in cell)
        if npoles and nz != npoles:
            raise RefinementError(f"cell count mismatch: {nz} target-points vs {npoles} poles")
    out = []
    for z, m in cell:
        desc = LatticeDescriptor(z, W1, W2, m, t)
        out.extend((p, m) for p in lattice_points(desc, center, R))
    return out


# --- public API -------------------------------------------------------------

class _Store:
    """Largest enumeration per (spec, target) so grid sweeps enumerate once."""

    def __init__(self):
        self.data = {}

    def get(self, spec, t, r, cfg):
        key = (spec, "inf" if is_inf(t) else complex(t))
        hit = self.data.get(key)
        if hit is not None and hit[0] >= r:
            return [p for p in hit[1] if abs(p[0]) <= r]
        pts = points_in_disc(spec, t, 0j, r, cfg)
        self.data[key] = (r, pts)
        return pts


_store = _Store()


def enumerate_points(f, target, r: float, cfg: WindingConfig = None):
    """All target-points (or poles for target 'inf') of f in |z| <= r, sorted by (|z|, arg z)."""
    if r <= 0:
        raise ValueError("r must be positive")
    f = as_function(f)
    t = as_target(target)
    pts = _store.get(f.spec, t, float(r), cfg or _DEFAULT_CFG)
    if f.lattices != default_lattices(f.spec):
        for desc in f.lattices:
            if _target_eq(desc.target, t):
                pts = [(z, desc.multiplicity) for z in lattice_points(desc, 0j, r)]
    return [PointRecord(z, m, t) for z, m in pts]


def nearest_singularity_distance(f, z0: complex, exclude: float = 1e-9) -> float:
    f = as_function(f)
    for R in (2.0, 8.0, 32.0):
        pts = points_in_disc(f.spec, INF, complex(z0), R)
        d = [abs(z - z0) for z, _ in pts if abs(z - z0) > exclude * (1 + abs(z0))]
        if d:
            return min(d)
    return math.inf


def lattice_self_test(f, radius: float = 6.0, tol: float = 1e-8):
    """Check that every lattice descriptor agrees with evaluation near the origin."""
    f = as_function(f)
    report = []
    for desc in f.lattices:
        pts = lattice_points(desc, 0j, radius)
        vals = evaluate_array(f.spec, np.array(pts)) if pts else np.array([])
        if is_inf(desc.target):
            ok = bool(np.all(~np.isfinite(vals) | (np.abs(vals) > 1e8)))
        else:
            ok = bool(np.all(np.abs(vals - complex(desc.target)) <= tol * (1 + abs(complex(desc.target)))))
        report.append((desc, len(pts), ok))
    return report
