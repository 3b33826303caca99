"""Proximity, counting and characteristic functions, order and deficiency estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import AsymptoticEstimate, WindowConfig, drop_outliers, tail_mean, windowed_extreme
from .catalog import specs as S
from .catalog.functions import INF, as_function, as_target, evaluate_array, is_inf, target_label
from .catalog.points import enumerate_points


class QuadratureError(ArithmeticError):
    def __init__(self, msg, estimate, gauge):
        super().__init__(f"{msg} (estimate {estimate!r}, gauge {gauge!r})")
        self.estimate = estimate
        self.gauge = gauge


class DegenerateInputError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    n0: int = 256
    nmax: int = 1 << 19
    rtol: float = 1e-6
    atol: float = 1e-10
    eta_factor: float = 1e-4
    max_nudges: int = 1000


DEFAULT_QUAD = QuadratureConfig()
ORIGIN_TOL = 1e-12


# --- radius nudge -----------------------------------------------------------

def _near_circle(points, r, eta):
    return any(abs(abs(p.location) - r) < eta for p in points)


def effective_radius(f, targets, r: float, qcfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Smallest r + k*eta (k >= 0) keeping all poles and target-points at least eta off the circle."""
    f = as_function(f)
    eta = qcfg.eta_factor * r
    ts = [INF] + [as_target(t) for t in targets if not is_inf(as_target(t))]
    reach = r + 64 * eta
    pts = [p for t in ts for p in enumerate_points(f, t, reach)]
    for k in range(qcfg.max_nudges):
        rr = r + k * eta
        if rr + eta > reach:
            reach = rr + 64 * eta
            pts = [p for t in ts for p in enumerate_points(f, t, reach)]
        if not _near_circle(pts, rr, eta):
            return rr
    raise QuadratureError("no collision-free radius found", math.nan, math.nan)


# --- proximity --------------------------------------------------------------

def _log_plus(spec, t, z):
    w = evaluate_array(spec, z)
    with np.errstate(all="ignore"):
        if is_inf(t):
            a = np.abs(w)
        else:
            d = np.abs(w - t)
            a = np.where(d == 0, np.inf, 1.0 / np.where(d == 0, 1.0, d))
        return np.log(np.maximum(a, 1.0))


def circle_mean(g, r: float, qcfg: QuadratureConfig = DEFAULT_QUAD):
    """Trapezoid mean of g over |z| = r with node doubling; returns (mean, nodes)."""
    n = qcfg.n0
    th = 2 * np.pi * np.arange(n) / n
    est = float(np.mean(g(r * np.exp(1j * th))))
    while True:
        if n >= qcfg.nmax:
            raise QuadratureError("node cap reached", est, abs(est - prev))
        th = 2 * np.pi * (np.arange(n) + 0.5) / n
        new = 0.5 * (est + float(np.mean(g(r * np.exp(1j * th)))))
        n *= 2
        prev, est = est, new
        if not math.isfinite(est):
            raise QuadratureError("non-finite integrand on circle", est, math.inf)
        if abs(est - prev) <= max(qcfg.rtol * abs(est), qcfg.atol):
            return est, n


@dataclass(frozen=True)
class ProximityValue:
    value: float
    r_requested: float
    r_effective: float
    nodes: int


def proximity_detail(f, target, r: float, qcfg: QuadratureConfig = DEFAULT_QUAD, nudge: bool = True):
    f = as_function(f)
    t = as_target(target)
    if r <= 0:
        raise ValueError("r must be positive")
    re = effective_radius(f, [t], r, qcfg) if nudge else r
    val, n = circle_mean(lambda z: _log_plus(f.spec, t, z), re, qcfg)
    return ProximityValue(max(val, 0.0), r, re, n)


def proximity(f, target, r: float, qcfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """m(r, target): mean of log+ 1/|f - a| (log+ |f| for 'inf') over the circle |z| = r."""
    return proximity_detail(f, target, r, qcfg).value


# --- counting ---------------------------------------------------------------

def counting_from_points(points, r: float, reduced: bool = False) -> float:
    total = 0.0
    n0 = 0
    for p in points:
        a = abs(p.location)
        if a > r:
            continue
        w = 1 if reduced else p.multiplicity
        if a < ORIGIN_TOL:
            n0 += w
        else:
            total += w * math.log(r / a)
    return total + n0 * math.log(r)


def counting(f, target, r: float, reduced: bool = False) -> float:
    """N(r, a), or the reduced count when reduced is set."""
    if r <= 0:
        raise ValueError("r must be positive")
    return counting_from_points(enumerate_points(f, target, r), r, reduced)


def characteristic(f, r: float, qcfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    f = as_function(f)
    d = proximity_detail(f, INF, r, qcfg)
    return d.value + counting(f, INF, d.r_effective)


# --- per-radius samples -----------------------------------------------------

@dataclass(frozen=True)
class TargetEntry:
    target: object
    m: float
    N: float
    N_bar: float


@dataclass(frozen=True)
class NevanlinnaSample:
    r: float
    r_requested: float
    entries: tuple
    T: float

    def entry(self, target) -> TargetEntry:
        t = as_target(target)
        for e in self.entries:
            if target_label(e.target) == target_label(t):
                return e
        raise KeyError(target_label(t))

    def __post_init__(self):
        for e in self.entries:
            if min(e.m, e.N, e.N_bar) < 0 or e.N_bar > e.N + 1e-12:
                raise ValueError("invalid Nevanlinna sample entry")


def nevanlinna_sample(f, targets, r: float, qcfg: QuadratureConfig = DEFAULT_QUAD) -> NevanlinnaSample:
    """m, N, N_bar for each target and T, all at one shared collision-free radius."""
    f = as_function(f)
    ts = [INF] + [as_target(t) for t in targets if not is_inf(as_target(t))]
    re = effective_radius(f, ts, r, qcfg)
    entries = []
    for t in ts:
        m = max(circle_mean(lambda z: _log_plus(f.spec, t, z), re, qcfg)[0], 0.0)
        pts = enumerate_points(f, t, re)
        entries.append(TargetEntry(t, m, counting_from_points(pts, re), counting_from_points(pts, re, True)))
    T = entries[0].m + entries[0].N
    return NevanlinnaSample(re, r, tuple(entries), T)


def prefetch(f, targets, r_max: float, qcfg: QuadratureConfig = DEFAULT_QUAD):
    """Enumerate once at the largest radius a sweep will need; later calls filter the cached list."""
    reach = r_max * (1 + 80 * qcfg.eta_factor)
    for t in [INF] + [as_target(t) for t in targets if not is_inf(as_target(t))]:
        enumerate_points(f, t, reach)


def nevanlinna_sweep(f, targets, r_grid, qcfg: QuadratureConfig = DEFAULT_QUAD):
    prefetch(f, targets, max(r_grid), qcfg)
    return [nevanlinna_sample(f, targets, r, qcfg) for r in r_grid]


def characteristic_series(f, r_grid, qcfg: QuadratureConfig = DEFAULT_QUAD):
    """(effective radii, T values) over a grid."""
    samples = nevanlinna_sweep(f, [], r_grid, qcfg)
    return [s.r for s in samples], [s.T for s in samples]


SAMPLE_COLUMNS = ("r_requested", "r_effective", "target", "m", "N", "N_bar", "T")


def sample_rows(samples):
    rows = []
    for s in samples:
        for e in s.entries:
            rows.append((s.r_requested, s.r, target_label(e.target), e.m, e.N, e.N_bar, s.T))
    return rows


# --- asymptotics ------------------------------------------------------------

def _check_grid(r_grid, minimum=8):
    if len(r_grid) < minimum:
        raise ValueError(f"radius grid needs at least {minimum} points")
    if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise ValueError("radius grid must be increasing")


def order_from_series(r, T) -> AsymptoticEstimate:
    r = np.asarray(r, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(T <= 0):
        raise DegenerateInputError("T(r) vanishes on the grid (constant function)")
    h = len(r) // 2
    lr, lT = np.log(r[h:]), np.log(T[h:])
    A = np.vstack([lr, np.ones_like(lr)]).T
    coef, *_ = np.linalg.lstsq(A, lT, rcond=None)
    res_pow = lT - A @ coef
    # logarithmic growth T ~ a log r + b shows up as a straight line in (log r, T)
    coef_log, *_ = np.linalg.lstsq(A, T[h:], rcond=None)
    res_log = np.log(np.maximum(A @ coef_log, 1e-300)) - lT
    flat = bool(np.max(np.abs(res_log)) < np.max(np.abs(res_pow)) or abs(coef[0]) < 1e-9)
    value = 0.0 if flat else float(coef[0])
    disp = float(np.max(np.abs(res_log if flat else res_pow)))
    return AsymptoticEstimate("order", value, (float(r[h]), float(r[-1])), len(lr), disp,
                              note="logarithmic_growth" if flat else "")


def order_estimate(f, r_grid, qcfg: QuadratureConfig = DEFAULT_QUAD) -> AsymptoticEstimate:
    _check_grid(r_grid)
    r, T = characteristic_series(f, r_grid, qcfg)
    return order_from_series(r, T)


@dataclass(frozen=True)
class DeficiencyReport:
    target: object
    delta: AsymptoticEstimate
    theta: AsymptoticEstimate
    Theta: AsymptoticEstimate


def deficiency_from_samples(samples, target, wcfg: WindowConfig = WindowConfig()) -> DeficiencyReport:
    r = [s.r for s in samples]
    T = np.array([s.T for s in samples])
    if np.any(T <= 0):
        raise DegenerateInputError("T(r) vanishes on the grid")
    ent = [s.entry(target) for s in samples]
    m = np.array([e.m for e in ent])
    N = np.array([e.N for e in ent])
    Nb = np.array([e.N_bar for e in ent])
    return DeficiencyReport(
        as_target(target),
        windowed_extreme(r, m / T, "liminf", wcfg),
        windowed_extreme(r, (N - Nb) / T, "liminf", wcfg),
        windowed_extreme(r, Nb / T, "limsup", wcfg, complement=True),
    )


def deficiency_indices(f, target, r_grid, qcfg: QuadratureConfig = DEFAULT_QUAD,
                       wcfg: WindowConfig = WindowConfig()) -> DeficiencyReport:
    _check_grid(r_grid)
    samples = nevanlinna_sweep(f, [target], r_grid, qcfg)
    return deficiency_from_samples(samples, target, wcfg)


# --- composition degree check -----------------------------------------------

@dataclass(frozen=True)
class CompositionReport:
    degree: int
    radii: tuple
    ratios: tuple
    tail_mean: float
    dropped_points: tuple


def rational_degree(num, den) -> int:
    return max(len(num) - 1, len(den) - 1)


def verify_valiron_mohonko(f, num, den, r_grid, qcfg: QuadratureConfig = DEFAULT_QUAD,
                           wcfg: WindowConfig = WindowConfig()) -> CompositionReport:
    """Ratio T(r, R(f)) / T(r, f) for R = num/den (coefficients highest first) against deg R."""
    f = as_function(f)
    _check_grid(r_grid)
    g = S.RationalOf(f.spec, tuple(complex(c) for c in num), tuple(complex(c) for c in den))
    _, Tf = characteristic_series(f, r_grid, qcfg)
    rg, Tg = characteristic_series(g, r_grid, qcfg)
    ratios = np.array(Tg) / np.array(Tf)
    top = ratios[-wcfg.top:]
    kept, dropped = drop_outliers(top, wcfg)
    rtop = rg[-wcfg.top:]
    return CompositionReport(
        rational_degree(num, den), tuple(rg), tuple(float(x) for x in ratios),
        tail_mean(None, top[kept], wcfg.width), tuple(rtop[i] for i in dropped))
