"""Experiment runs: solve the EP layer, evaluate every analysis item on the
time grid, write CSVs and a manifest."""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from .. import __version__
from ..background import Constant, Exponential
from ..coherent import (GaussianKlauder, Glauber, Squeezed, beta_min_aux, minimize_beta_nc,
                        uncertainties)
from ..ep import (DEFAULT_DSIGMA0, DEFAULT_SIGMA0, NUMERIC, derivative_defect, integrate_ep,
                  max_residual, pinney_superposition, write_ep_csv)
from ..errors import (ConfigError, DegeneracyError, DomainError, NonUnimodalError, QuadratureError,
                      SingularityError)
from ..expectations import UncertaintyRecord, eigenstate_uncertainties
from ..states import PhaseIntegral
from .config import family_to_dict

FLOAT_FMT = "%.12g"
EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2
NUMERIC_ERRORS = (SingularityError, DomainError, DegeneracyError, QuadratureError, NonUnimodalError,
                  ArithmeticError, ValueError)


def fmt(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return FLOAT_FMT % value


def write_csv(path, header, rows):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_manifest(path, data):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(_plain(data), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _plain(obj):
    """JSON-safe copy: numpy scalars to floats, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# -- EP layer --------------------------------------------------------------------


def solve_ep(cfg, times=None):
    """EP solution for ``cfg`` covering ``times`` (default: the config grid)."""
    if times is None:
        times = cfg.t_grid.values()
    bg = cfg.background
    method = cfg.ep_method
    if method == "auto":
        if cfg.chiellini is not None and cfg.ep_ics is None:
            method = "chiellini"
        elif _constant_a(bg) is not None and cfg.ep_ics is None:
            method = "pinney"
        else:
            method = "numeric"
    if method == "chiellini":
        return cfg.chiellini
    if method == "pinney":
        a_const = _constant_a(bg)
        if a_const is None:
            raise ConfigError("ep.method", "pinney superposition needs a constant a(t)")
        return pinney_superposition(bg.b_family, a_const, cfg.ep_c1, bg.constants,
                                    t_span=(float(times[0]), float(times[-1])))
    s0, ds0 = cfg.ep_ics if cfg.ep_ics is not None else (DEFAULT_SIGMA0, DEFAULT_DSIGMA0)
    return integrate_ep(bg.a_family, bg.b_family, s0, ds0, bg.constants, t_grid=times,
                        rtol=min(1e-10, cfg.ep_tolerance))


def _constant_a(bg):
    if bg.mode == "direct_ab":
        fam = bg.a_family_
        if isinstance(fam, Constant):
            return fam.value
        if isinstance(fam, Exponential) and fam.rate == 0:
            return fam.amplitude
        return None
    if isinstance(bg.theta_family, Constant):
        return float(bg.a(bg.t_start))
    return None


def ep_summary(sol, bg, times, tolerance):
    res = max_residual(sol, bg.a_family, bg.b_family, bg.constants, times)
    out = {"method": sol.kind, "params": dict(sol.params), "validity": list(sol.validity),
           "residual_max": res, "tolerance": tolerance}
    if sol.kind == NUMERIC:
        out["derivative_defect_max"] = float(np.max(
            derivative_defect(sol, bg.a_family, bg.b_family, bg.constants, times)))
    return out


# -- phases ----------------------------------------------------------------------


class TabulatedPhase:
    """Lambda(t) precomputed on a grid by accumulating quad over each step."""

    def __init__(self, ep, bg, times):
        self.base = PhaseIntegral(ep, bg)
        tau = bg.constants.tau

        def integrand(s):
            return float(bg.c(s)) - float(bg.a(s)) * math.sqrt(tau) / ep.sigma(s) ** 2

        values = {}
        acc = 0.0
        prev = self.base.t0
        for t in np.asarray(times, dtype=float):
            if t > prev:
                val, err = quad(integrand, prev, float(t), epsabs=1e-14, epsrel=1e-13, limit=200)
                if err > 1e-9 * max(1.0, abs(val)):
                    raise QuadratureError("phase integral did not converge", err)
                acc += val
                prev = float(t)
            values[float(t)] = acc
        self.values = values

    def lambda_of_t(self, t):
        t = float(t)
        if t in self.values:
            return self.values[t]
        return self.base.lambda_of_t(t)


# -- analysis items ----------------------------------------------------------------


def _state_spec(item):
    p = item.params
    if item.kind == "glauber":
        return Glauber(p["alpha"])
    if item.kind == "gk":
        return GaussianKlauder(p["n"], p["m0"], p["phi0"], p["s"])
    return None


def analysis_rows(item, times, ep, bg, phase):
    """Header and rows (t, record fields[, beta]) for one analysis item."""
    cols = UncertaintyRecord.columns()
    squeezed = item.kind == "squeezed"
    header = cols + (["beta"] if squeezed else [])
    rows = []
    records = []
    for t in times:
        t = float(t)
        beta = None
        if item.kind == "eigenstate":
            rec = eigenstate_uncertainties(item.params["n"], item.params["m"], t, ep, bg)
        elif squeezed:
            b = item.params["beta"]
            if b == "beta_min":
                beta = beta_min_aux(t, ep, bg)
            elif b == "optimize":
                beta = minimize_beta_nc(item.params["target"], t, ep, bg).beta
            else:
                beta = b
            rec = uncertainties(Squeezed(item.params["alpha"], beta), t, ep, bg)
        else:
            rec = uncertainties(_state_spec(item), t, ep, bg, phase)
        records.append(rec)
        row = [getattr(rec, c) for c in cols]
        if squeezed:
            row.append(beta)
        rows.append(row)
    return header, rows, records


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def record_checks(label, records, slack=1e-10):
    bad = [(r.t, r.violations(slack)) for r in records if r.violations(slack)]
    neg = [r.t for r in records
           if min(r.var_x, r.var_y, r.var_px, r.var_py, r.var_X, r.var_Y, r.var_PX, r.var_PY) < 0]
    checks = [Check(f"{label}: generalized bounds hold", not bad,
                    f"first violation at t={bad[0][0]:.12g}: {bad[0][1]}" if bad else "")]
    checks.append(Check(f"{label}: variances nonnegative", not neg,
                        f"first at t={neg[0]:.12g}" if neg else ""))
    return checks


@dataclass
class RunReport:
    exit_code: int
    output: Path
    manifest: dict
    checks: list = field(default_factory=list)


def describe_background(bg):
    out = {"mode": bg.mode, "validity": list(bg.validity)}
    if bg.mode == "theta_omega":
        out["theta"] = family_to_dict(bg.theta_family)
        out["omega"] = family_to_dict(bg.omega_family)
    else:
        out["a"] = family_to_dict(bg.a_family_)
        out["b"] = family_to_dict(bg.b_family_)
    return out


def run(cfg, output=None):
    """Execute ``cfg``; never raises for numerical failures, see ``exit_code``."""
    out = Path(output if output is not None else cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    times = cfg.t_grid.values()
    bg = cfg.background
    k = bg.constants
    manifest = {
        "version": __version__,
        "schema_version": 1,
        "constants": {"m": k.m, "hbar": k.hbar, "omega": k.omega, "tau": k.tau},
        "background": describe_background(bg),
        "t_grid": {"start": cfg.t_grid.start, "stop": cfg.t_grid.stop, "points": cfg.t_grid.points},
        "files": [],
        "status": "running",
    }
    checks = []
    try:
        ep = solve_ep(cfg, times)
        summary = ep_summary(ep, bg, times, cfg.ep_tolerance)
        manifest["ep"] = summary
        checks.append(Check("EP residual below tolerance", summary["residual_max"] <= cfg.ep_tolerance,
                            f"max {summary['residual_max']:.3e} vs {cfg.ep_tolerance:.3e}"))
        write_ep_csv(out / "ep.csv", ep, bg.a_family, bg.b_family, k, times, FLOAT_FMT)
        manifest["files"].append("ep.csv")
        phase = None
        if any(item.kind == "gk" for item in cfg.analysis):
            phase = TabulatedPhase(ep, bg, times)
        for i, item in enumerate(cfg.analysis):
            header, rows, records = analysis_rows(item, times, ep, bg, phase)
            name = f"analysis_{item.label(i)}.csv"
            write_csv(out / name, header, rows)
            manifest["files"].append(name)
            checks.extend(record_checks(item.label(i), records))
    except NUMERIC_ERRORS as exc:
        if isinstance(exc, ConfigError):
            raise
        manifest["status"] = "failed"
        manifest["error"] = {"type": type(exc).__name__, "message": str(exc),
                             "t": getattr(exc, "t_reached", getattr(exc, "t", None))}
        manifest["checks"] = [c.as_dict() for c in checks]
        write_manifest(out / "manifest.json", manifest)
        return RunReport(EXIT_NUMERIC, out, manifest, checks)
    ok = all(c.passed for c in checks)
    manifest["status"] = "ok" if ok else "check_failed"
    manifest["checks"] = [c.as_dict() for c in checks]
    write_manifest(out / "manifest.json", manifest)
    return RunReport(EXIT_OK if ok else EXIT_NUMERIC, out, manifest, checks)


def ep_solve(cfg, output=None):
    """EP layer only: ep.csv plus a manifest."""
    out = Path(output if output is not None else cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    times = cfg.t_grid.values()
    bg = cfg.background
    manifest = {"version": __version__, "background": describe_background(bg), "files": []}
    try:
        ep = solve_ep(cfg, times)
    except NUMERIC_ERRORS as exc:
        if isinstance(exc, ConfigError):
            raise
        manifest.update(status="failed", error={"type": type(exc).__name__, "message": str(exc)})
        write_manifest(out / "manifest.json", manifest)
        return RunReport(EXIT_NUMERIC, out, manifest)
    summary = ep_summary(ep, bg, times, cfg.ep_tolerance)
    ok = summary["residual_max"] <= cfg.ep_tolerance
    write_ep_csv(out / "ep.csv", ep, bg.a_family, bg.b_family, bg.constants, times, FLOAT_FMT)
    manifest.update(ep=summary, status="ok" if ok else "check_failed", files=["ep.csv"])
    write_manifest(out / "manifest.json", manifest)
    return RunReport(EXIT_OK if ok else EXIT_NUMERIC, out, manifest)


def records_for(cfg):
    """In-memory (item label, header, rows) for every analysis item; used by sweeps."""
    times = cfg.t_grid.values()
    ep = solve_ep(cfg, times)
    phase = TabulatedPhase(ep, cfg.background, times) if any(i.kind == "gk" for i in cfg.analysis) else None
    out = []
    for i, item in enumerate(cfg.analysis):
        header, rows, _ = analysis_rows(item, times, ep, cfg.background, phase)
        out.append((f"{i:02d}_{item.kind}", header, rows))
    return times, out
