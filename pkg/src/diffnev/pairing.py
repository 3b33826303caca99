"""c-separated pairs: pair counts, paired counting functions and pair indices."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .asymptotics import AsymptoticEstimate, WindowConfig, windowed_extreme
from .catalog import specs as S
from .catalog.expansion import STRIP_FACTOR, LocalExpansion, _series, local_expansion
from .catalog.functions import (INF, EvaluationRangeError, as_function, as_target, evaluate_array,
                                is_inf, target_label)
from .catalog.points import _in_lattice, enumerate_points, periods, points_in_disc
from .nevanlinna import ORIGIN_TOL, QuadratureConfig, DEFAULT_QUAD, counting_from_points, nevanlinna_sweep


class PeriodicFunctionError(ValueError):
    """f(z + c) is identically f(z), so the difference vanishes and pairing is undefined."""


class DepthExhaustedError(ArithmeticError):
    """All compared coefficients agree but f was not detected as c-periodic."""


@dataclass(frozen=True)
class PairConfig:
    depth: int = 12
    rel_tol: float = 1e-6
    noise_factor: float = 1e4
    match_tol: float = 1e-6
    probe_points: int = 64
    probe_radius: float = 10.0
    probe_tol: float = 1e-8
    probe_seed: int = 20240611
    exceptions: int = 2


DEFAULT_PAIR = PairConfig()


# --- periodicity ------------------------------------------------------------

def periodicity_probe(f, c: complex, cfg: PairConfig = DEFAULT_PAIR) -> bool:
    """True when f(z + c) = f(z) at every usable seeded sample point in |z| <= probe_radius."""
    f = as_function(f)
    c = complex(c)
    if c == 0:
        return True
    rng = np.random.default_rng(cfg.probe_seed)
    rad = cfg.probe_radius * np.sqrt(rng.random(cfg.probe_points))
    ang = 2 * np.pi * rng.random(cfg.probe_points)
    used = 0
    for z in rad * np.exp(1j * ang):
        try:
            a = complex(evaluate_array(f.spec, np.array([z]))[0])
            b = complex(evaluate_array(f.spec, np.array([z + c]))[0])
        except EvaluationRangeError:
            continue
        if not (math.isfinite(abs(a)) and math.isfinite(abs(b))) or max(abs(a), abs(b)) > 1e8:
            continue
        used += 1
        if abs(a - b) > cfg.probe_tol * (1 + abs(a)):
            return False
    return used > 0


def require_nonperiodic(f, c, cfg: PairConfig = DEFAULT_PAIR):
    if periodicity_probe(f, c, cfg):
        raise PeriodicFunctionError(f"f(z + {complex(c)}) == f(z) on all probe points")


def difference_spec(spec, c: complex):
    """f(z + c) - f(z) as a spec; c-periodic summands drop out and exponentials are rescaled.

    Dropping exactly cancelling terms avoids evaluating a large periodic part twice
    only to subtract it, which would bury a small remainder in rounding noise.
    """
    c = complex(c)

    def part(t):
        if isinstance(t, S.Rational) and len(t.num) == 1 and len(t.den) == 1:
            return None
        lat = periods(t)
        if lat is not None and _in_lattice(c, *lat):
            return None
        if isinstance(t, S.ExpLinear):
            return S.Mobius(t, complex(np.exp(t.lam * c) - 1), 0, 0, 1)
        return S.difference(t, c)

    terms = spec.terms if isinstance(spec, S.Sum) else (spec,)
    parts = [p for p in (part(t) for t in terms) if p is not None]
    if not parts:
        raise PeriodicFunctionError("every summand is c-periodic")
    return parts[0] if len(parts) == 1 else S.Sum(tuple(parts))


# --- coefficient comparison ---------------------------------------------------

def coefficients_equal(x: complex, y: complex, ex: float, ey: float, cfg: PairConfig = DEFAULT_PAIR,
                       extra: float = 0.0) -> bool:
    """Relative agreement, or agreement within the propagated numerical noise."""
    d = abs(x - y)
    return d <= cfg.rel_tol * max(abs(x), abs(y)) or d <= cfg.noise_factor * (ex + ey) + extra


def equal_prefix(ef: LocalExpansion, eg: LocalExpansion, start: int, depth: int,
                 cfg: PairConfig = DEFAULT_PAIR, loc_err: float = 0.0) -> int:
    """Number of equal initial coefficients of two expansions from exponent `start` (at most depth)."""
    m = 0
    for n in range(start, start + depth):
        x, y = ef.coeff(n), eg.coeff(n)
        # a location error dz moves c_n by about (n+1) c_{n+1} dz
        extra = 0.0
        if loc_err:
            try:
                extra = 10 * loc_err * (abs(n) + 1) * (abs(ef.coeff(n + 1)) + abs(eg.coeff(n + 1)))
            except ArithmeticError:
                extra = 0.0
        if not coefficients_equal(x, y, ef.error(n), eg.error(n), cfg, extra):
            break
        m += 1
    return m


def pair_count_from_expansions(ef: LocalExpansion, eg: LocalExpansion, target, p: int, q: int,
                               depth: int = 12, cfg: PairConfig = DEFAULT_PAIR, loc_err: float = 0.0):
    """Pair count from the expansions of f and of f(. + c) at the base point.

    Returns (count, exhausted, alternative) where alternative is the count under the
    reading in which m only runs over the analytic part (poles only; else equal to count).
    """
    if p < 1 or q < 1:
        return 0, False, 0
    t = as_target(target)
    if is_inf(t):
        if p != q:
            return min(p, q), False, min(p, q)
        m = equal_prefix(ef, eg, -p, depth, cfg, loc_err)
        alt = p + (m - p if m >= p else 0)
        return p + m, m == depth, alt
    m = equal_prefix(ef, eg, 0, depth, cfg, loc_err)
    if p != q:
        m = min(m, min(p, q))
    return m, m >= depth, m


def _loc_err(z0):
    return 1e-12 * (1 + abs(z0))


def _expansions(f, z0, c, n):
    ef = local_expansion(f, z0, n)
    eg = local_expansion(S.Shift(f.spec, complex(c)), z0, n)
    return ef, eg


def _multiplicity_at(f, t, z, cfg):
    tol = cfg.match_tol * (1 + abs(z))
    pts = points_in_disc(f.spec, t, complex(z), tol)
    return sum(m for w, m in pts if abs(w - z) <= tol)


def vanishing_run(dspec, z0: complex, start: int, depth: int, loc_err: float = 0.0):
    """Consecutive vanishing Laurent coefficients of dspec at z0 from exponent `start`.

    A coefficient d_k counts as zero when it is within the propagated rounding
    noise, or when it could be produced by moving z0 by loc_err, i.e.
    |d_k| <= 10 (|k|+1) |d_{k+1}| loc_err.  Returns (run, exhausted).
    """
    n = depth + abs(min(start, 0)) + 6
    v, c, e = _series(dspec, complex(z0), n)

    def coef(k):
        if k < v:
            return 0j, 0.0
        i = k - v
        if i >= len(c):
            raise DepthExhaustedError(f"expansion at {z0} has no trusted coefficient of order {k}")
        return complex(c[i]), float(e[i])

    run = 0
    for k in range(start, start + depth):
        ck, ek = coef(k)
        try:
            nxt = abs(coef(k + 1)[0])
        except DepthExhaustedError:
            nxt = 0.0
        if abs(ck) <= STRIP_FACTOR * ek + 10 * (abs(k) + 1) * nxt * loc_err:
            run += 1
        else:
            break
    return run, run >= depth


def pair_count_via_difference(dspec, z0, target, p: int, q: int, depth: int = 12, loc_err: float = 0.0):
    """Pair count from the expansion of Δ_c f at z0 (equal initial coefficients of f and
    f(. + c) are exactly the vanishing initial coefficients of their difference).

    Returns (count, alternative count, n0 weight, q).  For a finite target, q is
    re-derived: z0 + c is a target-point only if Δ_c f(z0) = 0.
    """
    t = as_target(target)
    if p < 1:
        return 0, 0, 0, 0
    if is_inf(t):
        if q < 1:
            return 0, 0, 0, 0
        if p != q:
            return min(p, q), min(p, q), 0, q
        run, exhausted = vanishing_run(dspec, z0, -p, depth, loc_err)
        if exhausted:
            raise DepthExhaustedError(f"all {depth} compared coefficients agree at {z0}")
        analytic = run - p if run >= p else 0
        return p + run, p + analytic, analytic, q
    run, exhausted = vanishing_run(dspec, z0, 0, depth, loc_err)
    if exhausted:
        raise DepthExhaustedError(f"all {depth} compared coefficients agree at {z0}")
    if run == 0 or q < 1:
        return 0, 0, 0, 0 if run == 0 else q
    count = min(run, min(p, q)) if p != q else run
    return count, count, 0, q


def pair_count_at(f, z0: complex, c: complex, target, depth: int = 12,
                  cfg: PairConfig = DEFAULT_PAIR, method: str = "difference") -> int:
    """Pair count of the target-point z0 of f with separation c (0 when z0 + c is not a target-point).

    method "difference" (default) reads the count off the expansion of Δ_c f;
    "direct" compares the expansions of f and f(. + c) coefficient by coefficient.
    """
    f = as_function(f)
    t = as_target(target)
    c = complex(c)
    z0 = complex(z0)
    p = _multiplicity_at(f, t, z0, cfg)
    if p < 1:
        raise ValueError(f"{z0} is not a {target_label(t)}-point of f")
    q = _multiplicity_at(f, t, z0 + c, cfg)
    try:
        if method == "difference":
            if q < 1:
                return 0
            return pair_count_via_difference(difference_spec(f.spec, c), z0, t, p, q, depth, _loc_err(z0))[0]
        if method != "direct":
            raise ValueError(f"unknown method {method!r}")
        if q < 1:
            return 0
        ef, eg = _expansions(f, z0, c, depth + 2)
        count, exhausted, _ = pair_count_from_expansions(ef, eg, t, p, q, depth, cfg, _loc_err(z0))
        if exhausted:
            raise DepthExhaustedError(f"all {depth} compared coefficients agree at {z0}")
        return count
    except (DepthExhaustedError, PeriodicFunctionError):
        if periodicity_probe(f, c, cfg):
            raise PeriodicFunctionError(f"f is c-periodic (c = {c})")
        raise


def n0_weight(ef: LocalExpansion, eg: LocalExpansion, p: int, q: int, depth: int = 12,
              cfg: PairConfig = DEFAULT_PAIR, loc_err: float = 0.0) -> int:
    """Contribution of one pole to n_0: zero unless principal parts coincide, then the
    number of equal initial analytic-part coefficients."""
    if p < 1 or p != q:
        return 0
    if equal_prefix(ef, eg, -p, p, cfg, loc_err) < p:
        return 0
    return equal_prefix(ef, eg, 0, depth, cfg, loc_err)


# --- scans --------------------------------------------------------------------

@dataclass(frozen=True)
class PairRecord:
    base: complex
    c: complex
    target: object
    p: int
    q: int
    pair_count: int
    alt_count: int = 0
    n0: int = 0

    def __post_init__(self):
        if self.pair_count >= 1 and (self.p < 1 or self.q < 1):
            raise ValueError("a positive pair count needs both points present")


def _partner_index(points, c, tol):
    if not points:
        return lambda z: None
    locs = np.array([p.location for p in points])
    tree = cKDTree(np.column_stack([locs.real, locs.imag]))

    def find(z):
        d, i = tree.query([z.real, z.imag])
        return points[int(i)] if d <= tol * (1 + abs(z)) else None
    return find


@dataclass
class PairScan:
    f: object
    c: complex
    target: object
    r: float
    records: list
    points: list

    def records_within(self, r):
        return [rec for rec in self.records if abs(rec.base) <= r]


def pair_scan(f, c: complex, target, r: float, cfg: PairConfig = DEFAULT_PAIR,
              with_n0: bool = False) -> PairScan:
    """Pair records for every target-point z0 with |z0| <= r (partners searched up to r + |c|)."""
    f = as_function(f)
    t = as_target(target)
    c = complex(c)
    require_nonperiodic(f, c, cfg)
    dspec = difference_spec(f.spec, c)
    pts = enumerate_points(f, t, r + abs(c) + 1e-9)
    find = _partner_index(pts, c, cfg.match_tol)
    recs = []
    for pt in pts:
        if abs(pt.location) > r:
            continue
        z0 = pt.location
        partner = find(z0 + c)
        q = partner.multiplicity if partner is not None else 0
        if q == 0:
            recs.append(PairRecord(z0, c, t, pt.multiplicity, 0, 0, 0, 0))
            continue
        count, alt, n0, q = pair_count_via_difference(dspec, z0, t, pt.multiplicity, q, cfg.depth, _loc_err(z0))
        recs.append(PairRecord(z0, c, t, pt.multiplicity, q, count, alt, n0 if with_n0 else 0))
    recs.sort(key=lambda rec: (abs(rec.base), math.atan2(rec.base.imag, rec.base.real)))
    return PairScan(f, c, t, r, recs, [p for p in pts if abs(p.location) <= r])


def _integrated(weights_locs, r):
    total, n0 = 0.0, 0
    for z, w in weights_locs:
        a = abs(z)
        if a > r or w == 0:
            continue
        if a < ORIGIN_TOL:
            n0 += w
        else:
            total += w * math.log(r / a)
    return total + n0 * math.log(r)


@dataclass(frozen=True)
class PairedCountingSample:
    r: float
    target: object
    n_c: int
    N_c: float
    N_tilde: float
    N: float
    readings_differ: int = 0


def paired_counting_from_scan(scan: PairScan, r: float) -> PairedCountingSample:
    if r > scan.r + 1e-12:
        raise ValueError("scan radius smaller than requested radius")
    recs = scan.records_within(r)
    n_c = sum(rec.pair_count for rec in recs)
    N_c = _integrated([(rec.base, rec.pair_count) for rec in recs], r)
    N = counting_from_points(scan.points, r)
    differ = sum(1 for rec in recs if rec.alt_count != rec.pair_count)
    return PairedCountingSample(r, scan.target, n_c, N_c, N - N_c, N, differ)


def paired_counting(f, c: complex, target, r: float, cfg: PairConfig = DEFAULT_PAIR) -> PairedCountingSample:
    return paired_counting_from_scan(pair_scan(f, c, target, r, cfg), r)


def n0_diagnostic(f, c: complex, r: float, cfg: PairConfig = DEFAULT_PAIR) -> float:
    """N_0(r, f): poles whose principal parts at z0 and z0 + c coincide, weighted by the
    number of equal initial analytic coefficients."""
    scan = pair_scan(f, c, INF, r, cfg, with_n0=True)
    return _integrated([(rec.base, rec.n0) for rec in scan.records], r)


def n_pair_term(f, c: complex, r: float, cfg: PairConfig = DEFAULT_PAIR) -> float:
    """2 N(r, f) - N(r, Δ_c f) + N(r, 1/Δ_c f)."""
    f = as_function(f)
    require_nonperiodic(f, c, cfg)
    d = difference_spec(f.spec, c)
    return (2 * counting_from_points(enumerate_points(f, INF, r), r)
            - counting_from_points(enumerate_points(d, INF, r), r)
            + counting_from_points(enumerate_points(d, 0j, r), r))


# --- indices ------------------------------------------------------------------

@dataclass(frozen=True)
class PairIndices:
    target: object
    pi_c: AsymptoticEstimate
    Pi_c: AsymptoticEstimate
    radii: tuple
    ratios_Nc: tuple
    ratios_Ntilde: tuple


def pair_series(f, c, target, r_grid, qcfg: QuadratureConfig = DEFAULT_QUAD, cfg: PairConfig = DEFAULT_PAIR,
                samples=None):
    """Paired counting samples aligned with Nevanlinna samples on the same effective radii."""
    if samples is None:
        samples = nevanlinna_sweep(f, [target], r_grid, qcfg)
    scan = pair_scan(f, c, target, max(s.r for s in samples), cfg)
    return samples, [paired_counting_from_scan(scan, s.r) for s in samples]


def pair_indices(f, c, target, r_grid, qcfg: QuadratureConfig = DEFAULT_QUAD, cfg: PairConfig = DEFAULT_PAIR,
                 wcfg: WindowConfig = WindowConfig(), samples=None) -> PairIndices:
    if len(r_grid) < 8:
        raise ValueError("radius grid needs at least 8 points")
    samples, pcs = pair_series(f, c, target, r_grid, qcfg, cfg, samples)
    r = [s.r for s in samples]
    T = np.array([s.T for s in samples])
    a = np.array([p.N_c for p in pcs]) / T
    b = np.array([p.N_tilde for p in pcs]) / T
    return PairIndices(as_target(target), windowed_extreme(r, a, "liminf", wcfg),
                       windowed_extreme(r, b, "limsup", wcfg, complement=True),
                       tuple(r), tuple(a.tolist()), tuple(b.tolist()))


# --- classification -------------------------------------------------------------

CLASSES = ("exceptional_paired", "lines_of_four_plus", "lines_of_three", "completely_paired", "none")


@dataclass(frozen=True)
class Classification:
    target: object
    label: str
    points: int
    exceptions: int
    unmatched_either_side: int
    run_lengths: tuple
    vacuous: bool


def classify_exceptional(f, c: complex, targets, r: float, cfg: PairConfig = DEFAULT_PAIR):
    """Classify each target by how its target-points recur under z -> z + c."""
    f = as_function(f)
    c = complex(c)
    out = []
    for target in targets:
        t = as_target(target)
        pts = enumerate_points(f, t, r + 4 * abs(c) + 1e-9)
        find = _partner_index(pts, c, cfg.match_tol)
        inner = [p for p in pts if abs(p.location) <= r]
        exceptions = 0
        unmatched = 0
        for p in inner:
            fw = find(p.location + c)
            if fw is None or fw.multiplicity < p.multiplicity:
                exceptions += 1
            bw = find(p.location - c)
            same = [x for x in (fw, bw) if x is not None and x.multiplicity == p.multiplicity]
            if not same:
                unmatched += 1
        runs = _run_lengths(inner, find, c, r + 4 * abs(c))
        if exceptions <= cfg.exceptions:
            label = "exceptional_paired"
        elif runs and min(runs) >= 4:
            label = "lines_of_four_plus"
        elif runs and all(x == 3 for x in runs):
            label = "lines_of_three"
        elif inner and unmatched == 0:
            label = "completely_paired"
        else:
            label = "none"
        out.append(Classification(t, label, len(inner), exceptions, unmatched, tuple(runs), not inner))
    return out


def _run_lengths(inner, find, c, reach):
    """Lengths of maximal c-progressions starting in the disc that end before the enumeration edge."""
    runs = []
    for p in inner:
        if find(p.location - c) is not None:
            continue
        n, z = 1, p.location
        truncated = False
        while True:
            nxt = find(z + c)
            if nxt is None:
                truncated = abs(z + c) > reach
                break
            n += 1
            z = nxt.location
            if n > 10_000:
                truncated = True
                break
        if not truncated:
            runs.append(n)
    return sorted(runs)


# --- csv helpers --------------------------------------------------------------

SCAN_COLUMNS = ("base_re", "base_im", "target", "p", "q", "pair_count")
COUNT_COLUMNS = ("r_requested", "r_effective", "target", "m", "N", "N_bar", "T", "n_c", "N_c", "N_tilde")


def scan_rows(scan: PairScan):
    return [(rec.base.real, rec.base.imag, target_label(rec.target), rec.p, rec.q, rec.pair_count)
            for rec in scan.records]


def count_rows(samples, pcs):
    rows = []
    for s, pc in zip(samples, pcs):
        e = s.entry(pc.target)
        rows.append((s.r_requested, s.r, target_label(pc.target), e.m, e.N, e.N_bar, s.T, pc.n_c, pc.N_c, pc.N_tilde))
    return rows
