"""Finite-sample surrogates for liminf / limsup / order over a radius grid."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np


@dataclass(frozen=True)
class WindowConfig:
    width: int = 5
    top: int = 12
    max_drop_fraction: float = 0.1
    outlier_mads: float = 3.0


@dataclass(frozen=True)
class AsymptoticEstimate:
    """kind is 'liminf', 'limsup' or 'order'.

    For the complement-style indices (Theta, Pi_c) value already holds 1 - limsup.
    """
    kind: str
    value: float
    window: tuple
    sample_count: int
    dispersion: float
    dropped_points: tuple = ()
    note: str = ""

    def __post_init__(self):
        if self.kind not in ("liminf", "limsup", "order"):
            raise ValueError(f"unknown estimate kind {self.kind!r}")
        if not self.window[0] < self.window[1]:
            raise ValueError("window must satisfy r_min < r_max")
        if self.sample_count < 3:
            raise ValueError("need at least three samples")

    def to_json(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        d["dropped_points"] = list(self.dropped_points)
        return d


def radius_grid(r_min: float = 2.0, r_max: float = 40.0, count: int = 24, spacing: str = "geometric"):
    if r_min <= 0 or r_max <= r_min:
        raise ValueError("need 0 < r_min < r_max")
    if count < 2:
        raise ValueError("grid needs at least two points")
    if spacing == "geometric":
        g = np.geomspace(r_min, r_max, count)
    elif spacing == "linear":
        g = np.linspace(r_min, r_max, count)
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    return [float(x) for x in g]


def drop_outliers(values, cfg: WindowConfig = WindowConfig()):
    """Indices kept and indices dropped; at most max_drop_fraction of the points go."""
    v = np.asarray(values, dtype=float)
    budget = int(math.floor(cfg.max_drop_fraction * len(v)))
    if budget == 0 or len(v) < 3:
        return list(range(len(v))), []
    med = np.median(v)
    dev = np.abs(v - med)
    mad = max(float(np.median(dev)), 1e-12 * max(1.0, abs(med)))
    order = np.argsort(-dev, kind="stable")
    dropped = [int(i) for i in order[:budget] if dev[i] > cfg.outlier_mads * mad * 1.4826]
    kept = [i for i in range(len(v)) if i not in dropped]
    return kept, sorted(dropped)


def windowed_extreme(r, values, kind: str, cfg: WindowConfig = WindowConfig(), complement: bool = False):
    """liminf (min of window means) or limsup (max of window means) over the top of the grid."""
    r = [float(x) for x in r]
    v = np.asarray(values, dtype=float)
    if len(r) != len(v):
        raise ValueError("radius and value arrays differ in length")
    top = min(cfg.top, len(r))
    rs, vs = r[-top:], v[-top:]
    kept, dropped = drop_outliers(vs, cfg)
    rk = [rs[i] for i in kept]
    vk = vs[kept]
    w = min(cfg.width, len(vk))
    means = np.array([vk[i:i + w].mean() for i in range(len(vk) - w + 1)])
    if kind == "liminf":
        est = float(means.min())
    elif kind == "limsup":
        est = float(means.max())
    else:
        raise ValueError(kind)
    disp = float(means.max() - means.min())
    return AsymptoticEstimate(
        kind=kind,
        value=1.0 - est if complement else est,
        window=(rk[0], rk[-1]),
        sample_count=len(vk),
        dispersion=disp,
        dropped_points=tuple(rs[i] for i in dropped),
        note="one_minus" if complement else "",
    )


def tail_mean(r, values, width: int = 5):
    v = np.asarray(values, dtype=float)[-width:]
    return float(v.mean())
