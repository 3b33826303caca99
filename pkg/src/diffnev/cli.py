"""Command-line front end: `diffnev <command> [config.json] [flags]`.

Exit codes: 0 success, 1 a verification failed, 2 configuration error, 3 numerical budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from importlib import resources
from pathlib import Path

COMMANDS = ("catalog", "nev", "pairs", "verify", "defects", "share", "confine")
THREAD_ENV = "DIFFNEV_THREADS"
EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def _apply_thread_override():
    n = os.environ.get(THREAD_ENV)
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = n


# --- config -------------------------------------------------------------------

def load_schema() -> dict:
    return json.loads(resources.files("diffnev").joinpath("config_schema.json").read_text())


def load_config(path) -> dict:
    import jsonschema
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as e:
        raise ConfigError(f"config does not match schema: {e.message}") from None
    g = cfg.get("r_grid")
    if g and g["max"] <= g["min"]:
        raise ConfigError("r_grid.max must exceed r_grid.min")
    return cfg


def _complex(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def _find(spec, cls):
    from dataclasses import fields, is_dataclass
    if isinstance(spec, cls):
        return spec
    if is_dataclass(spec):
        for fd in fields(spec):
            v = getattr(spec, fd.name)
            for item in (v if isinstance(v, tuple) else (v,)):
                if is_dataclass(item):
                    hit = _find(item, cls)
                    if hit is not None:
                        return hit
    return None


def resolve_shift(c, spec) -> complex:
    """Numbers pass through; strings like '2K', 'w1', '2w2', 'log2' refer to the function's constants."""
    if not isinstance(c, str):
        return _complex(c)
    from .catalog import specs as S
    from .catalog.elliptic import elliptic_K
    m = re.fullmatch(r"(-?[0-9]*\.?[0-9]*)(K|w1|w2|log2)", c)
    if not m:
        raise ConfigError(f"unrecognised shift {c!r}")
    coef = float(m.group(1)) if m.group(1) not in ("", "-") else (-1.0 if m.group(1) == "-" else 1.0)
    unit = m.group(2)
    if unit == "log2":
        return complex(coef * math.log(2.0))
    if unit == "K":
        sn = _find(spec, S.JacobiSN)
        if sn is None:
            raise ConfigError("shift in units of K needs a jacobi_sn component")
        return complex(coef * elliptic_K(sn.k))
    wp = _find(spec, S.WeierstrassP)
    if wp is None:
        raise ConfigError(f"shift in units of {unit} needs a weierstrass_p component")
    return coef * complex(wp.w1 if unit == "w1" else wp.w2)


class Experiment:
    def __init__(self, cfg: dict, base: Path):
        from .asymptotics import WindowConfig, radius_grid
        from .catalog import specs as S
        from .catalog.functions import INF
        from .nevanlinna import QuadratureConfig
        from .pairing import PairConfig
        self.cfg = cfg
        self.base = base
        self.spec = S.from_json(cfg["function"]) if "function" in cfg else None
        self.partner = S.from_json(cfg["partner"]) if "partner" in cfg else None
        self.c = resolve_shift(cfg["c"], self.spec) if "c" in cfg else None
        self.targets = [INF if t == "inf" else _complex(t) for t in cfg.get("targets", [])]
        g = cfg.get("r_grid")
        self.r_grid = radius_grid(g["min"], g["max"], g["count"], g.get("spacing", "geometric")) if g else None
        self.slack = cfg.get("slack_fraction", 0.05)
        tol = cfg.get("tolerances", {})
        try:
            self.qcfg = QuadratureConfig(**tol.get("quadrature", {}))
            self.pcfg = PairConfig(**tol.get("pairing", {}))
            self.wcfg = WindowConfig(**tol.get("window", {}))
        except TypeError as e:
            raise ConfigError(f"unknown tolerance override: {e}") from None
        self.seed = cfg.get("seed", 0)

    def need(self, *keys):
        missing = [k for k in keys if getattr(self, k) is None]
        if missing:
            raise ConfigError(f"config is missing {', '.join(missing)}")

    @property
    def finite_targets(self):
        from .catalog.functions import is_inf
        return [t for t in self.targets if not is_inf(t)]

    @property
    def r_scan(self) -> float:
        return float(self.cfg.get("r_scan", self.r_grid[-1] if self.r_grid else 20.0))


# --- commands ------------------------------------------------------------------

def cmd_catalog(ex: Experiment, out, args):
    from .catalog import specs as S
    from .catalog.functions import as_function
    entry = {"types": sorted(["rational", "exp_linear", "exp_exp", "weierstrass_p", "jacobi_sn", "sum", "product",
                              "reciprocal", "mobius", "shift", "scale_arg", "rational_of"])}
    if ex.spec is not None:
        f = as_function(ex.spec)
        entry["function"] = S.to_json(ex.spec)
        entry["declared_order"] = f.order
        entry["lattices"] = [{"base": complex(d.base), "t1": complex(d.t1),
                              "t2": None if d.t2 is None else complex(d.t2),
                              "multiplicity": d.multiplicity, "target": _label(d.target)} for d in f.lattices]
        entry["valid"] = True
    out.write_json("catalog.json", entry)
    return EXIT_OK


def cmd_nev(ex: Experiment, out, args):
    from .nevanlinna import deficiency_from_samples, nevanlinna_sweep, order_from_series, sample_rows, SAMPLE_COLUMNS
    ex.need("spec", "r_grid")
    samples = nevanlinna_sweep(ex.spec, ex.finite_targets, ex.r_grid, ex.qcfg)
    out.write_csv("nev_samples.csv", SAMPLE_COLUMNS, sample_rows(samples))
    report = {"order": order_from_series([s.r for s in samples], [s.T for s in samples]).to_json(),
              "deficiencies": []}
    for t in ex.finite_targets:
        d = deficiency_from_samples(samples, t, ex.wcfg)
        report["deficiencies"].append({"target": _label(t), "delta": d.delta.to_json(),
                                       "theta": d.theta.to_json(), "Theta": d.Theta.to_json()})
    out.write_json("asymptotics.json", report)
    return EXIT_OK


def _label(t):
    from .catalog.functions import target_label
    return target_label(t)


def cmd_pairs(ex: Experiment, out, args):
    from .catalog.functions import INF
    from .nevanlinna import nevanlinna_sweep
    from .pairing import (COUNT_COLUMNS, SCAN_COLUMNS, count_rows, pair_scan, paired_counting_from_scan,
                          require_nonperiodic)
    ex.need("spec", "c", "r_grid")
    require_nonperiodic(ex.spec, ex.c, ex.pcfg)
    targets = [INF] + ex.finite_targets
    samples = nevanlinna_sweep(ex.spec, ex.finite_targets, ex.r_grid, ex.qcfg)
    scan_out, count_out = [], []
    for t in targets:
        scan = pair_scan(ex.spec, ex.c, t, max(s.r for s in samples), ex.pcfg)
        scan_out += [row for row in _scan_rows(scan)]
        count_out += count_rows(samples, [paired_counting_from_scan(scan, s.r) for s in samples])
    out.write_csv("pair_scan.csv", SCAN_COLUMNS, scan_out)
    out.write_csv("paired_counting.csv", COUNT_COLUMNS, count_out)
    return EXIT_OK


def _scan_rows(scan):
    from .pairing import scan_rows
    return sorted(scan_rows(scan), key=lambda r: (r[2], r[0], r[1]))


def cmd_verify(ex: Experiment, out, args):
    from . import harness as H
    ex.need("spec", "c")
    theorems = [args.theorem] if args.theorem else ex.cfg.get("theorems", ["logdiff", "thm2nd", "thm2nd2"])
    ok = True
    for th in theorems:
        if th == "logdiff":
            rep = H.verify_logdiff(ex.spec, ex.c, ex.cfg.get("delta_exp", 0.5), ex.r_grid, ex.qcfg, ex.wcfg)
        elif th == "thm2nd":
            rep = H.verify_thm2nd(ex.spec, ex.c, ex.finite_targets, ex.r_grid, ex.slack, ex.qcfg, ex.pcfg)
        else:
            rep = H.verify_thm2nd2(ex.spec, ex.c, ex.finite_targets, ex.r_grid, ex.slack, ex.qcfg, ex.pcfg)
        out.write_json(f"verify_{th}.json", rep)
        ok &= rep.holds
    return EXIT_OK if ok else EXIT_FAILED


def cmd_defects(ex: Experiment, out, args):
    from . import harness as H
    ex.need("spec", "c")
    rep = H.defect_relation_report(ex.spec, ex.c, ex.finite_targets, ex.r_grid, ex.qcfg, ex.pcfg, ex.wcfg)
    out.write_json("defects.json", rep)
    pic = H.picard_analogue_scan(ex.spec, ex.c, ex.targets, ex.r_scan, ex.pcfg)
    out.write_json("picard.json", pic)
    return EXIT_OK


def cmd_share(ex: Experiment, out, args):
    from . import harness as H
    ex.need("spec", "partner", "c")
    rep = H.shared_ignoring_pairs(ex.spec, ex.partner, ex.c, ex.targets, ex.r_scan, ex.pcfg)
    out.write_json("share.json", rep)
    return EXIT_OK


def cmd_confine(ex: Experiment, out, args):
    from .confinement import (FitConfig, check_explicit_solution, iterate_confinement, pole_pattern_conclusion,
                              satisfies_equation, verify_coefficient_laws)
    from .confinement.explicit import RESIDUAL_COLUMNS, residual_row
    conf = ex.cfg.get("confine", {})
    cases = [args.case] if args.case else conf.get("cases", ["case1"])
    deltas = [args.delta] if args.delta is not None else conf.get("deltas", [1])
    ks = [args.k] if args.k is not None else conf.get("ks", [1])
    j_max = args.j_max or conf.get("j_max", 17)
    for case in cases:
        for d in deltas:
            for k in ks:
                tr = iterate_confinement(True, d, k, j_max, case, conf.get("truncation_order"))
                tag = f"{case}_d{'+' if d > 0 else '-'}1_k{k}"
                body = tr.to_json()
                body["satisfies_equation"] = satisfies_equation(tr)
                out.write_json(f"trace_{tag}.json", body)
                if j_max >= 13:
                    out.write_json(f"laws_{tag}.json", verify_coefficient_laws(tr))
                out.write_json(f"pattern_{tag}.json", pole_pattern_conclusion(tr))
    exp = conf.get("explicit")
    if exp is not None or args.explicit:
        exp = exp or {}
        fc = FitConfig(starts=exp.get("starts", FitConfig.starts))
        rep = check_explicit_solution(exp.get("k_modulus", 0.5), ex.seed, exp.get("a2", 0.0), fc)
        out.write_json("explicit_solution.json", rep)
        out.write_csv("explicit_residuals.csv", RESIDUAL_COLUMNS, [residual_row(rep)])
    return EXIT_OK


HANDLERS = {"catalog": cmd_catalog, "nev": cmd_nev, "pairs": cmd_pairs, "verify": cmd_verify,
            "defects": cmd_defects, "share": cmd_share, "confine": cmd_confine}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diffnev", description="Value distribution experiments for difference operators.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("config", nargs="?", help="JSON experiment config (optional for catalog and confine)")
    p.add_argument("--out", help="output directory (overrides the config's output_dir)")
    p.add_argument("--theorem", choices=("logdiff", "thm2nd", "thm2nd2"))
    p.add_argument("--case", choices=("case1", "case2"))
    p.add_argument("--delta", type=int, choices=(1, -1))
    p.add_argument("--k", type=int)
    p.add_argument("--j-max", dest="j_max", type=int)
    p.add_argument("--explicit", action="store_true", help="also fit the Mobius-of-sn solution (confine)")
    return p


def _output_dir(args, cfg, base: Path) -> Path:
    if args.out:
        return Path(args.out)
    return base / cfg.get("output_dir", f"out_{args.command}")


def main(argv=None) -> int:
    _apply_thread_override()
    args = build_parser().parse_args(argv)
    from .io import OutputTree
    try:
        if args.config:
            cfg = load_config(args.config)
            base = Path(args.config).resolve().parent
        elif args.command in ("catalog", "confine"):
            cfg, base = {}, Path.cwd()
        else:
            raise ConfigError(f"{args.command} needs a config file")
        ex = Experiment(cfg, base)
    except (ConfigError, ValueError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    out = OutputTree(_output_dir(args, cfg, base), args.command)
    notes = []
    try:
        code = HANDLERS[args.command](ex, out, args)
    except ArithmeticError as e:          # quadrature, enumeration, expansion and series budgets
        code = EXIT_NUMERIC
        notes.append(f"numerical budget exhausted: {type(e).__name__}: {e}")
    except ValueError as e:               # config-level problems found late (periodic c, bad targets)
        code = EXIT_CONFIG
        notes.append(f"configuration error: {type(e).__name__}: {e}")
    out.finish(code in (EXIT_OK, EXIT_FAILED), code, notes)
    for n in notes:
        print(n, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
