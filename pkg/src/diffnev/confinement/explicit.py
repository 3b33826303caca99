"""Numerical fit of Mobius-of-sn solutions w = (A s + B)/(G s + D), s = sn(Omega z + C, k)."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import least_squares

from ..catalog.elliptic import sn

PARAM_NAMES = ("A", "B", "G", "D", "Omega", "a0")


@dataclass(frozen=True)
class FitConfig:
    starts: int = 32
    train_points: int = 40
    fresh_points: int = 100
    threshold: float = 1e-8
    period_gap: float = 1e-3
    phase: complex = 0.3 + 0.2j
    # hinge floors keeping the fit away from constant and reducible solutions
    min_spread: float = 0.1
    min_omega: float = 0.05
    min_irreducible: float = 0.05
    max_nfev: int = 3000


@dataclass
class ExplicitSolutionReport:
    status: str                  # "resolved" or "unresolved"
    k_modulus: float
    seed: int
    a2: float
    constants: dict
    phase: complex
    train_residual: float
    fresh_residual: float
    period4_gap: float
    starts_used: int
    reason: str = ""
    samples: list = field(default_factory=list)

    def to_json(self) -> dict:
        d = asdict(self)
        d["constants"] = {k: [v.real, v.imag] for k, v in self.constants.items()}
        d["phase"] = [self.phase.real, self.phase.imag]
        return d


def _unpack(x):
    return x[0::2] + 1j * x[1::2]


def _mobius(p, s):
    A, B, G, D = p[:4]
    return A * s + B, G * s + D


def evaluate(p, z, k_modulus, phase):
    P, Q = _mobius(p, sn(p[4] * np.asarray(z) + phase, k_modulus))
    with np.errstate(all="ignore"):
        return P / Q


def _residuals(x, Z, k_modulus, a2, cfg):
    p = _unpack(x)
    A, B, G, D, Om, a0 = p
    s0, sp, sm = (sn(Om * (Z + h) + cfg.phase, k_modulus) for h in (0, 1, -1))
    P0, Q0 = _mobius(p, s0)
    Pp, Qp = _mobius(p, sp)
    Pm, Qm = _mobius(p, sm)
    # polynomial form of w(z+1) + w(z-1) = (a2 w^2 + a0)/(1 - w^2), scaled termwise
    t1 = (Pp * Qm + Pm * Qp) * (Q0 ** 2 - P0 ** 2)
    t2 = (a2 * P0 ** 2 + a0 * Q0 ** 2) * Qp * Qm
    scale = ((np.abs(Pp * Qm) + np.abs(Pm * Qp)) * (np.abs(Q0) ** 2 + np.abs(P0) ** 2)
             + (abs(a2) * np.abs(P0) ** 2 + np.abs(a0 * Q0 ** 2)) * np.abs(Qp * Qm))
    r = (t1 - t2) / scale
    norm = A * D - B * G - 1
    with np.errstate(all="ignore"):
        w = P0 / Q0
    spread = float(np.std(w) / (1 + abs(np.mean(w)))) if np.all(np.isfinite(w)) else cfg.min_spread
    hinge = sum(max(0.0, float(np.log(floor / max(v, 1e-300))))
                for floor, v in ((cfg.min_spread, spread), (cfg.min_omega, abs(Om)),
                                 (cfg.min_irreducible, abs(a0 + a2))))
    out = np.concatenate([r.real, r.imag, [norm.real, norm.imag, hinge]])
    return np.where(np.isfinite(out), out, 1e6)


def _fresh_residual(p, Z, k_modulus, a2, phase):
    w = lambda h: evaluate(p, Z + h, k_modulus, phase)
    w0 = w(0)
    lhs = w(1) + w(-1)
    with np.errstate(all="ignore"):
        rhs = (a2 * w0 ** 2 + p[5]) / (1 - w0 ** 2)
        rel = np.abs(lhs - rhs) / (np.abs(lhs) + np.abs(rhs))
    return float(np.max(np.where(np.isfinite(rel), rel, np.inf)))


def check_explicit_solution(k_modulus: float, seed: int, a2: float = 0.0,
                            cfg: FitConfig = FitConfig()) -> ExplicitSolutionReport:
    """Seeded multistart least squares for (A, B, G, D, Omega, a0) at a fixed phase C.

    A fit is resolved when the relative residual at fresh points is <= threshold and
    w(z + 4) differs from w(z) by more than period_gap somewhere on the samples.
    """
    if not 0 < k_modulus < 1:
        raise ValueError("k_modulus must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    Z = rng.uniform(-1, 1, cfg.train_points) + 1j * rng.uniform(-0.5, 0.5, cfg.train_points)
    Zf = rng.uniform(-2, 2, cfg.fresh_points) + 1j * rng.uniform(-1, 1, cfg.fresh_points)
    best = None
    used = 0
    for _ in range(cfg.starts):
        used += 1
        x0 = rng.normal(size=12)
        with np.errstate(all="ignore"):
            sol = least_squares(_residuals, x0, args=(Z, k_modulus, a2, cfg), method="lm",
                                max_nfev=cfg.max_nfev, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        cost = float(np.max(np.abs(sol.fun)))
        if best is None or cost < best[0]:
            best = (cost, sol.x)
        if cost < cfg.threshold / 100:
            break
    cost, x = best
    p = _unpack(x)
    fresh = _fresh_residual(p, Zf, k_modulus, a2, cfg.phase)
    with np.errstate(all="ignore"):
        gap = np.abs(evaluate(p, Zf + 4, k_modulus, cfg.phase) - evaluate(p, Zf, k_modulus, cfg.phase))
    gap = float(np.max(gap[np.isfinite(gap)])) if np.any(np.isfinite(gap)) else 0.0
    ok = fresh <= cfg.threshold and gap > cfg.period_gap
    reason = "" if ok else (f"fresh residual {fresh:.3e} above {cfg.threshold:.0e}" if fresh > cfg.threshold
                            else f"w(z+4) - w(z) stays below {cfg.period_gap:.0e}")
    return ExplicitSolutionReport(
        "resolved" if ok else "unresolved", float(k_modulus), int(seed), float(a2),
        dict(zip(PARAM_NAMES, (complex(v) for v in p))), complex(cfg.phase),
        cost, fresh, gap, used, reason,
        samples=[[float(z.real), float(z.imag)] for z in Zf],
    )


RESIDUAL_COLUMNS = ("status", "k_modulus", "seed", "a2", "train_residual", "fresh_residual",
                    "period4_gap", "starts_used")


def residual_row(rep: ExplicitSolutionReport):
    return (rep.status, rep.k_modulus, rep.seed, rep.a2, rep.train_residual, rep.fresh_residual,
            rep.period4_gap, rep.starts_used)
