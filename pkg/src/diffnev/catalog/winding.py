"""Argument-principle zero finding on rectangles.

Boxes are processed level by level so that all edge samples of a level go
through one vectorised evaluation.  The zero count of a box is its winding
number plus the (known) pole orders inside it.  Boxes holding one simple zero
are finished by Newton's method; everything else is subdivided until the box
holds a single zero or shrinks below the cluster floor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

SPLITS = (0.5, 0.4371, 0.5629, 0.3819, 0.6180, 0.4711)


class RefinementError(ArithmeticError):
    """Winding count could not be resolved at tolerance."""


class IncompleteEnumerationError(ArithmeticError):
    """Subdivision budget exhausted; ``partial`` holds what was found."""

    def __init__(self, msg, partial=()):
        super().__init__(msg)
        self.partial = list(partial)


@dataclass(frozen=True)
class WindingConfig:
    n0: int = 16
    nmax: int = 4096
    max_darg: float = 0.6
    cluster_floor: float = 1e-7
    pole_floor: float = 1e-13
    newton_iters: int = 50
    budget: int = 400_000
    merge_tol: float = 1e-6
    graze: float = 1e-3


def _segment_distance(a, b, P, tree=None):
    """Distance from each segment a->b to the nearest point of P (nearest 16 candidates)."""
    if len(P) == 0:
        return np.full(len(a), np.inf)
    if tree is None:
        tree = cKDTree(np.column_stack([P.real, P.imag]))
    mid = 0.5 * (a + b)
    k = min(16, len(P))
    _, idx = tree.query(np.column_stack([mid.real, mid.imag]), k=k)
    idx = np.asarray(idx).reshape(len(a), k)
    C = P[idx]
    d = b - a
    L2 = np.maximum(np.abs(d) ** 2, 1e-300)
    t = ((C - a[:, None]) * np.conj(d)[:, None]).real / L2[:, None]
    t = np.clip(t, 0.0, 1.0)
    return np.min(np.abs(a[:, None] + t * d[:, None] - C), axis=1)


def edge_arg_change(fun, a, b, cfg: WindingConfig, P=(), tree=None):
    """Total change of arg(fun) along straight edges a->b, with adaptive sampling.

    An edge is resolved when consecutive samples differ by less than
    ``max_darg`` in argument and by less than a factor e in modulus, and the
    sample spacing is well below the distance to every known pole.
    """
    E = len(a)
    total = np.zeros(E)
    ok = np.zeros(E, bool)
    P = np.asarray(P, dtype=complex)
    L = np.abs(b - a)
    dist = _segment_distance(a, b, P, tree)
    need = L / np.maximum(0.2 * dist, 1e-300)
    # long edges keep the sample density of an nmax-sampled edge of length 4 (capped at 2**21 nodes)
    cap = np.maximum(cfg.nmax * np.maximum(1.0, L / 4.0), np.minimum(4 * need, float(1 << 21)))
    cap = np.minimum(cap, float(1 << 21))
    # start each edge at the first power-of-two refinement that meets the pole-distance bound
    start = cfg.n0 * 2.0 ** np.ceil(np.log2(np.clip(need / cfg.n0, 1.0, 2.0 ** 40)))
    # an edge grazing a pole is rejected so the caller re-splits with other fractions
    start = np.where((start <= cap) & (dist >= cfg.graze * L), start, 0)
    for n_start in np.unique(start[start > 0]):
        grp = np.flatnonzero(start == n_start)
        tot_g, ok_g = _edges_from(fun, a[grp], b[grp], cfg, int(n_start), cap[grp])
        total[grp] = tot_g
        ok[grp] = ok_g
    return total, ok


def _edges_from(fun, a, b, cfg, n, cap):
    E = len(a)
    total = np.zeros(E)
    ok = np.zeros(E, bool)
    pending = np.arange(E)
    t = np.linspace(0.0, 1.0, n + 1)
    w = fun((a[:, None] + (b - a)[:, None] * t[None, :]).ravel()).reshape(E, n + 1)
    while pending.size:
        finite = np.all(np.isfinite(w) & (w != 0), axis=1)
        with np.errstate(all="ignore"):
            q = w[:, 1:] / w[:, :-1]
            d = np.angle(q)
            lm = np.abs(np.log(np.abs(q)))
        d_ok = np.max(np.where(np.isfinite(d), np.abs(d), 10.0), axis=1) < cfg.max_darg
        m_ok = np.max(np.where(np.isfinite(lm), lm, 10.0), axis=1) < 1.0
        resolved = finite & d_ok & m_ok
        total[pending[resolved]] = d[resolved].sum(axis=1)
        ok[pending[resolved]] = True
        retry = finite & ~resolved & (2 * n <= cap[pending])
        pending = pending[retry]
        w = w[retry]
        if not pending.size:
            break
        # only the new midpoints are evaluated on refinement
        tm = (np.arange(n) + 0.5) / n
        pa, pb = a[pending], b[pending]
        wm = fun((pa[:, None] + (pb - pa)[:, None] * tm[None, :]).ravel()).reshape(len(pending), n)
        w2 = np.empty((len(pending), 2 * n + 1), dtype=complex)
        w2[:, 0::2] = w
        w2[:, 1::2] = wm
        w = w2
        n *= 2
    return total, ok


def _deriv(fun, z, h):
    w = np.exp(0.5j * np.pi * np.arange(4))
    pts = z[:, None] + h[:, None] * w[None, :]
    vals = fun(pts.ravel()).reshape(pts.shape)
    return (vals * np.conj(w)[None, :]).sum(axis=1) / (4 * h)


def _newton(fun, z, size, cfg):
    z = z.astype(complex).copy()
    h = 1e-3 * size
    done = np.zeros(len(z), bool)
    for _ in range(cfg.newton_iters):
        act = ~done
        if not act.any():
            break
        with np.errstate(all="ignore"):
            v = fun(z[act])
            d = _deriv(fun, z[act], np.maximum(h[act], 1e-10 * (1 + np.abs(z[act]))))
            step = v / d
        step = np.where(np.isfinite(step), step, np.nan)
        z[act] = z[act] - step
        conv = np.abs(step) <= 1e-14 * (1 + np.abs(z[act])) + 1e-15 * size[act]
        idx = np.flatnonzero(act)
        done[idx[conv]] = True
        bad = ~np.isfinite(z)
        if bad.any():
            z[bad] = np.nan
            done[bad] = True
    return z, done & np.isfinite(z)


def find_zeros(fun, rect, poles=(), h0=np.inf, cfg: WindingConfig = None):
    """Zeros of fun inside rect = (x0, x1, y0, y1).

    poles: sequence of (location, order) for every pole of fun in (a
    neighbourhood of) rect.  Returns a list of (location, multiplicity).
    """
    cfg = cfg or WindingConfig()
    x0, x1, y0, y1 = map(float, rect)
    P = np.array([complex(p) for p, _ in poles], dtype=complex)
    Pord = np.array([int(o) for _, o in poles], dtype=int)
    tree = cKDTree(np.column_stack([P.real, P.imag])) if len(P) else None
    boxes = np.array([[x0, x1, y0, y1]])
    found = []
    # groups: (boxes array, parent box or None, attempt)
    groups = [(boxes, None, 0)]
    spent = 0
    while groups:
        allb = np.concatenate([g[0] for g in groups])
        gid = np.concatenate([np.full(len(g[0]), i) for i, g in enumerate(groups)])
        spent += len(allb)
        if spent > cfg.budget:
            raise IncompleteEnumerationError("subdivision budget exhausted", _merge(found, P, cfg))
        wind, good = _box_winding(fun, allb, P, cfg, tree)
        inside = _poles_inside(allb, P, Pord, tree)
        next_groups = []
        bad_groups = set(np.unique(gid[~good]).tolist())
        for i in bad_groups:
            boxes_i, parent, attempt = groups[i]
            if parent is None:
                raise RefinementError("winding ambiguous on the enclosing rectangle")
            if attempt + 1 >= len(SPLITS):
                raise RefinementError(f"winding ambiguous near box {parent}")
            next_groups.append((_split(parent, attempt + 1), parent, attempt + 1))
        keep = ~np.isin(gid, list(bad_groups))
        Z = np.rint(wind).astype(int) + inside
        if np.any(Z[keep] < 0):
            raise RefinementError("negative zero count: pole data inconsistent with winding")
        sel = keep & (Z > 0)
        b = allb[sel]
        Zs = Z[sel]
        npol = _poles_count(b, P, tree)
        size = np.maximum(b[:, 1] - b[:, 0], b[:, 3] - b[:, 2])
        centre = 0.5 * (b[:, 0] + b[:, 1]) + 0.5j * (b[:, 2] + b[:, 3])
        single = (Zs == 1) & (npol == 0) & (size < h0)
        to_split = ~single
        if single.any():
            z, conv = _newton(fun, centre[single], size[single], cfg)
            bs = b[single]
            ins = conv & (z.real >= bs[:, 0]) & (z.real <= bs[:, 1]) & (z.imag >= bs[:, 2]) & (z.imag <= bs[:, 3])
            for zz in z[ins]:
                found.append((complex(zz), 1))
            idx = np.flatnonzero(single)
            to_split[idx[~ins]] = True
        floor = np.where(npol > 0, cfg.pole_floor, cfg.cluster_floor) * (1 + np.abs(centre))
        for j in np.flatnonzero(to_split):
            if size[j] < floor[j]:
                if npol[j] > 0 and Zs[j] > 0:
                    raise RefinementError(f"zeros unresolvable next to a pole at {centre[j]}")
                found.append((complex(centre[j]), int(Zs[j])))
            else:
                next_groups.append((_split(b[j], 0), b[j], 0))
        groups = next_groups
    return _merge(found, P, cfg)


def _split(box, attempt):
    x0, x1, y0, y1 = box
    f = SPLITS[attempt]
    g = SPLITS[(attempt + 1) % len(SPLITS)]
    xm = x0 + f * (x1 - x0)
    ym = y0 + g * (y1 - y0)
    return np.array([[x0, xm, y0, ym], [xm, x1, y0, ym], [x0, xm, ym, y1], [xm, x1, ym, y1]])


def _box_winding(fun, b, P, cfg, tree=None):
    c00 = b[:, 0] + 1j * b[:, 2]
    c10 = b[:, 1] + 1j * b[:, 2]
    c11 = b[:, 1] + 1j * b[:, 3]
    c01 = b[:, 0] + 1j * b[:, 3]
    a = np.concatenate([c00, c10, c11, c01])
    e = np.concatenate([c10, c11, c01, c00])
    tot, ok = edge_arg_change(fun, a, e, cfg, P, tree)
    n = len(b)
    tot = tot.reshape(4, n).sum(axis=0)
    ok = ok.reshape(4, n).all(axis=0)
    w = tot / (2 * np.pi)
    ok &= np.abs(w - np.rint(w)) < 0.1
    if len(P):
        size = np.maximum(b[:, 1] - b[:, 0], b[:, 3] - b[:, 2])
        m = 1e-6 * size

        def near(bb, C, mm):
            px, py = C.real, C.imag
            near_x = ((np.abs(px - bb[:, 0:1]) < mm) | (np.abs(px - bb[:, 1:2]) < mm)) & (py > bb[:, 2:3] - mm) & (py < bb[:, 3:4] + mm)
            near_y = ((np.abs(py - bb[:, 2:3]) < mm) | (np.abs(py - bb[:, 3:4]) < mm)) & (px > bb[:, 0:1] - mm) & (px < bb[:, 1:2] + mm)
            return (near_x | near_y).any(axis=1)

        ok &= ~_over_candidates(b, P, tree, lambda sel, idx: near(b[sel], P[idx], m[sel, None]), 1.01)
    return w, ok


def _over_candidates(b, P, tree, fn, grow=1.0, k=32):
    """Evaluate fn(selected boxes, pole index array) using only the k poles nearest each box centre.

    Boxes whose k-th neighbour is closer than their half-diagonal fall back to all poles.
    """
    n = len(b)
    if tree is None or len(P) <= k:
        idx = np.broadcast_to(np.arange(len(P)), (n, len(P)))
        return fn(np.arange(n), idx)
    cen = np.column_stack([0.5 * (b[:, 0] + b[:, 1]), 0.5 * (b[:, 2] + b[:, 3])])
    half = 0.5 * np.hypot(b[:, 1] - b[:, 0], b[:, 3] - b[:, 2]) * grow
    dist, idx = tree.query(cen, k=k)
    local = np.flatnonzero(dist[:, -1] > half)
    dense = np.flatnonzero(dist[:, -1] <= half)
    res_local = fn(local, idx[local])
    res_dense = fn(dense, np.broadcast_to(np.arange(len(P)), (len(dense), len(P))))
    out = np.zeros(n, dtype=np.result_type(res_local, res_dense))
    out[local] = res_local
    out[dense] = res_dense
    return out


def _inside_mask(b, C):
    return ((C.real >= b[:, 0:1]) & (C.real < b[:, 1:2])
            & (C.imag >= b[:, 2:3]) & (C.imag < b[:, 3:4]))


def _poles_inside(b, P, Pord, tree=None):
    if len(P) == 0:
        return np.zeros(len(b), int)
    return _over_candidates(b, P, tree, lambda sel, idx: (_inside_mask(b[sel], P[idx]) * Pord[idx]).sum(axis=1))


def _poles_count(b, P, tree=None):
    if len(P) == 0:
        return np.zeros(len(b), int)
    return _over_candidates(b, P, tree, lambda sel, idx: _inside_mask(b[sel], P[idx]).sum(axis=1))


def _merge(found, P, cfg):
    """Merge numerically split multiple zeros (never across a nearby pole)."""
    found = sorted(found, key=lambda t: (t[0].real, t[0].imag))
    out = []
    used = [False] * len(found)
    for i, (z, m) in enumerate(found):
        if used[i]:
            continue
        group = [(z, m)]
        used[i] = True
        tol = cfg.merge_tol * (1 + abs(z))
        for j in range(i + 1, len(found)):
            zj, mj = found[j]
            if zj.real - z.real > tol:
                break
            if not used[j] and abs(zj - z) <= tol:
                if len(P) and np.min(np.abs(P - z)) <= 2 * tol:
                    continue
                group.append((zj, mj))
                used[j] = True
        mult = sum(g[1] for g in group)
        loc = sum(g[0] * g[1] for g in group) / mult
        out.append((complex(loc), mult))
    return out
