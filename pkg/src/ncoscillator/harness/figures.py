"""Canned figure targets: data series as CSV, optional Agg-rendered PNG.

Every figure uses alpha = 5, beta = 2, gamma = 2 and m = hbar = tau = omega = 1.
Panel (a) is the exponential background theta = 5 e^{-2t}, Omega = 2 e^{2t};
panel (b) the sinusoidal one theta = 5 sin 2t, Omega = 2 sin t.  Both are
integrated numerically from sigma(0) = sqrt(5/3), sigma'(0) = -sqrt(5/3).
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..background import BackgroundSpec, Exponential, PhysicalConstants, Sinusoidal
from ..coherent import (GaussianKlauder, Glauber, Squeezed, beta_min_aux, beta_scan_minimizer,
                        minimize_beta_nc, uncertainties)
from ..ep import chiellini_exponential, integrate_ep, max_residual
from ..expectations import eigenstate_uncertainties
from .runner import Check, TabulatedPhase, write_csv, write_manifest

FIGURE_IDS = ("fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b",
              "fig5a", "fig5b", "fig6a", "fig6b")
ALPHA, BETA, GAMMA = 5.0, 2.0, 2.0
MU = math.sqrt(5.0 / 3.0)
KAPPA = 0.25
CONSTANTS = PhysicalConstants(1.0, 1.0, 1.0, 1.0)
SPANS = {"a": (0.0, 2.0), "b": (0.0, 10.0)}
EIGEN_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1), (2, 2))
GK_WIDTHS = (0.5, 0.75)
FIG6_BETA = -1.88203
FIG6_TIME = 4.0
SCAN_POINTS = 10001


def background(panel):
    if panel == "a":
        return BackgroundSpec.theta_omega(Exponential(ALPHA, -GAMMA), Exponential(BETA, GAMMA), CONSTANTS)
    if panel == "b":
        return BackgroundSpec.theta_omega(Sinusoidal(ALPHA, GAMMA), Sinusoidal(BETA, GAMMA / 2.0), CONSTANTS)
    raise ValueError(f"unknown panel {panel!r}")


def panel_solution(panel, points):
    bg = background(panel)
    times = np.linspace(*SPANS[panel], points)
    ep = integrate_ep(bg.a_family, bg.b_family, MU, -MU, CONSTANTS, t_grid=times)
    return bg, ep, times


@dataclass
class Series:
    name: str
    t: np.ndarray
    columns: dict


@dataclass
class FigureResult:
    fig_id: str
    files: list
    manifest: dict
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)


def _fig1(panel, points):
    series = []
    info = {}
    checks = []
    if panel == "a":
        a_fam, b_fam, closed = chiellini_exponential(ALPHA, BETA, GAMMA, CONSTANTS)
        tc = closed.validity[1]
        tt = np.linspace(0.0, tc, points)
        s, ds, _ = closed.evaluate(tt)
        res = max_residual(closed, a_fam, b_fam, CONSTANTS, tt)
        series.append(Series("closed_form", tt, {"sigma": s, "dsigma": ds}))
        info["closed_form"] = {"mu": closed.params["mu"], "kappa": closed.params["kappa"],
                               "t_c": tc, "residual_max": res}
        checks.append(Check("closed form EP residual < 1e-12", res < 1e-12, f"{res:.3e}"))
    bg, ep, times = panel_solution(panel, points)
    s, ds, _ = ep.evaluate(times)
    series.append(Series("numeric", times, {"sigma": s, "dsigma": ds}))
    res = max_residual(ep, bg.a_family, bg.b_family, CONSTANTS, times)
    info["numeric"] = {"residual_max": res, "sigma_min": float(np.min(s))}
    checks.append(Check("numeric EP residual < 1e-6", res < 1e-6, f"{res:.3e}"))
    return series, info, checks


_EIGEN_TARGETS = {"2": ("prod_XY", "bound_XY"), "3": ("prod_PxPy", "bound_PP"), "4": ("prod_XPx", "bound_XP")}


def _fig_eigen(num, panel, points):
    prod, bound = _EIGEN_TARGETS[num]
    bg, ep, times = panel_solution(panel, points)
    cols = {}
    bounds = None
    ok = True
    for n, m in EIGEN_PAIRS:
        recs = [eigenstate_uncertainties(n, m, t, ep, bg) for t in times]
        vals = np.array([getattr(r, prod) for r in recs])
        bounds = np.array([getattr(r, bound) for r in recs])
        cols[f"n{n}_m{m}"] = vals
        ok = ok and bool(np.all(vals >= np.abs(bounds) - 1e-12))
    cols["bound"] = bounds
    return ([Series("", times, cols)], {"pairs": [list(p) for p in EIGEN_PAIRS], "product": prod},
            [Check(f"{prod} dominates |{bound}| for every pair", ok)])


def _fig5(panel, points):
    bg, ep, times = panel_solution(panel, points)
    phase = TabulatedPhase(ep, bg, times)
    glauber, squeezed, betas = [], [], []
    gk = {s: [] for s in GK_WIDTHS}
    for t in times:
        glauber.append(uncertainties(Glauber(0j), t, ep, bg).prod_xpx)
        b = beta_min_aux(t, ep, bg)
        betas.append(b)
        squeezed.append(uncertainties(Squeezed(0j, b), t, ep, bg).prod_xpx)
        for s in GK_WIDTHS:
            gk[s].append(uncertainties(GaussianKlauder(0, 0.0, 0.0, s), t, ep, bg, phase).prod_xpx)
    cols = {"glauber": np.array(glauber), "squeezed_beta_min": np.array(squeezed),
            "beta_min": np.array(betas)}
    for s in GK_WIDTHS:
        cols[f"gk_s{s:g}"] = np.array(gk[s])
    cols["bound"] = np.full(times.shape, CONSTANTS.hbar / 2.0)
    reduced = bool(np.all(cols["squeezed_beta_min"] <= cols["glauber"] + 1e-12))
    above = all(bool(np.all(v >= CONSTANTS.hbar / 2.0 - 1e-12)) for k, v in cols.items()
                if k not in ("beta_min", "bound"))
    checks = [Check("squeezing at beta_min never raises dx dpx", reduced),
              Check("all dx dpx series respect hbar/2", above)]
    return [Series("", times, cols)], {"gk": {"n": 0, "m0": 0, "phi0": 0, "s": list(GK_WIDTHS)}}, checks


def fig6_optimum(target="XPx", points=400):
    """beta* at t = 4 on the sinusoidal background, against the grid scan."""
    bg, ep, _ = panel_solution("b", points)
    opt = minimize_beta_nc(target, FIG6_TIME, ep, bg)
    scan_beta, scan_val = beta_scan_minimizer(target, FIG6_TIME, ep, bg, points=SCAN_POINTS)
    return opt, scan_beta, scan_val


def _fig6(panel, points):
    target, prod, bound = ("XPx", "prod_XPx", "bound_XP") if panel == "a" else ("XY", "prod_XY", "bound_XY")
    bg, ep, times = panel_solution("b", points)
    opt = minimize_beta_nc(target, FIG6_TIME, ep, bg)
    scan_beta, _ = beta_scan_minimizer(target, FIG6_TIME, ep, bg, points=SCAN_POINTS)
    cols = {"glauber": [], "squeezed_beta_quoted": [], "squeezed_beta_star": [], "bound": []}
    for t in times:
        cols["glauber"].append(getattr(uncertainties(Glauber(0j), t, ep, bg), prod))
        cols["squeezed_beta_quoted"].append(getattr(uncertainties(Squeezed(0j, FIG6_BETA), t, ep, bg), prod))
        rec = uncertainties(Squeezed(0j, opt.beta), t, ep, bg)
        cols["squeezed_beta_star"].append(getattr(rec, prod))
        cols["bound"].append(getattr(rec, bound))
    cols = {k: np.array(v) for k, v in cols.items()}
    at4 = {
        "glauber": getattr(uncertainties(Glauber(0j), FIG6_TIME, ep, bg), prod),
        "squeezed_beta_quoted": getattr(uncertainties(Squeezed(0j, FIG6_BETA), FIG6_TIME, ep, bg), prod),
        "squeezed_beta_star": opt.value,
    }
    rel = abs(opt.beta - FIG6_BETA) / abs(FIG6_BETA)
    info = {"target": target, "t_marker": FIG6_TIME, "beta_quoted": FIG6_BETA, "beta_star": opt.beta,
            "beta_scan": scan_beta, "scan_points": SCAN_POINTS, "values_at_marker": at4}
    checks = [Check("beta* equals the grid-scan minimizer within 1e-4", abs(opt.beta - scan_beta) <= 1e-4,
                    f"{opt.beta:.8g} vs {scan_beta:.8g}")]
    if panel == "a":
        info["relative_deviation_from_quoted"] = rel
        info["within_10_percent_of_quoted"] = rel <= 0.1
        if rel > 0.1:
            info["deviation_note"] = (
                f"beta*={opt.beta:.6g} differs from the quoted {FIG6_BETA}; no initial data for sigma "
                "reproduces the quoted value, so the grid-scan consistency check is used instead")
    return [Series("", times, cols)], info, checks


def _render(fig_id, series, info, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for ser in series:
        for name, vals in ser.columns.items():
            if name in ("dsigma", "beta_min"):
                continue
            label = f"{ser.name} {name}".strip()
            style = "--" if name == "bound" or ser.name == "closed_form" else "-"
            ax.plot(ser.t, vals, style, label=label, lw=1.2)
    if fig_id.startswith("fig6"):
        ax.axvline(FIG6_TIME, color="grey", lw=0.8, ls=":")
        for key, val in info["values_at_marker"].items():
            ax.plot([FIG6_TIME], [val], "o", ms=4)
    ax.set_xlabel("t")
    ax.set_title(fig_id)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def reproduce_figure(fig_id, output, points=400, plot=True):
    if fig_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure {fig_id!r}; choose from {list(FIGURE_IDS)}")
    out = Path(output)
    out.mkdir(parents=True, exist_ok=True)
    num, panel = fig_id[3], fig_id[4]
    if num == "1":
        series, info, checks = _fig1(panel, points)
    elif num in _EIGEN_TARGETS:
        series, info, checks = _fig_eigen(num, panel, points)
    elif num == "5":
        series, info, checks = _fig5(panel, points)
    else:
        series, info, checks = _fig6(panel, points)
    files = []
    for ser in series:
        name = f"{fig_id}_{ser.name}.csv" if ser.name else f"{fig_id}.csv"
        keys = list(ser.columns)
        rows = [[t] + [ser.columns[k][i] for k in keys] for i, t in enumerate(ser.t)]
        write_csv(out / name, ["t"] + keys, rows)
        files.append(name)
    if plot:
        _render(fig_id, series, info, out / f"{fig_id}.png")
        files.append(f"{fig_id}.png")
    manifest = {
        "figure": fig_id, "version": __version__, "points": points,
        "constants": {"alpha": ALPHA, "beta": BETA, "gamma": GAMMA, "kappa": KAPPA, "mu": MU,
                      "m": 1.0, "hbar": 1.0, "omega": 1.0, "tau": 1.0},
        "background": "exponential" if (panel == "a" and num != "6") else "sinusoidal",
        "t_span": list(SPANS["b" if num == "6" else panel]),
        "initial_conditions": [MU, -MU],
        "files": files, "info": info, "checks": [c.as_dict() for c in checks],
    }
    write_manifest(out / f"{fig_id}_manifest.json", manifest)
    files.append(f"{fig_id}_manifest.json")
    return FigureResult(fig_id, files, manifest, checks)
