"""Experiment configuration: parsing, validation and object construction.

A config is a YAML (or JSON) mapping::

    schema_version: 1
    constants: {m: 1, hbar: 1, omega: 1, tau: 1}
    background:
      mode: theta_omega            # or direct_ab, chiellini_exponential, chiellini_rational
      theta: {family: exponential, amplitude: 5, rate: -2}
      omega: {family: exponential, amplitude: 2, rate: 2}
    ep: {method: auto, ics: [1.29, -1.29], tolerance: 1.0e-10}
    analysis:
      - {kind: eigenstate, n: 0, m: 0}
      - {kind: glauber, alpha: [2, 1]}
      - {kind: squeezed, alpha: [0, 0], beta: 0.5}        # or beta: beta_min / optimize
      - {kind: gk, n: 0, m0: 0, phi0: 0, s: 0.5}
    t_grid: {start: 0, stop: 1.5, points: 200}
    output: out/run

Validation errors carry the dotted path of the offending field.
"""

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..background import (BackgroundSpec, Constant, Exponential, PhysicalConstants, Rational,
                          Sinusoidal, cutoff_time)
from ..errors import ConfigError, ConstraintError, DomainError
from ..ep import chiellini_exponential, chiellini_rational

SCHEMA_VERSION = 1
BACKGROUND_MODES = ("theta_omega", "direct_ab", "chiellini_exponential", "chiellini_rational")
EP_METHODS = ("auto", "chiellini", "pinney", "numeric")
ANALYSIS_KINDS = ("eigenstate", "glauber", "squeezed", "gk")
SQUEEZE_TARGETS = ("XPx", "XY", "PxPy", "xpx")

_FAMILY_FIELDS = {
    "constant": ("value",),
    "exponential": ("amplitude", "rate"),
    "sinusoidal": ("amplitude", "frequency"),
    "rational": ("coefficient", "gamma", "mu", "power"),
}
_FAMILY_TYPES = {"constant": Constant, "exponential": Exponential, "sinusoidal": Sinusoidal,
                 "rational": Rational}


def _number(raw, path, positive=False, integer=False, allow_zero=True):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(path, f"expected a number, got {raw!r}")
    val = float(raw)
    if not math.isfinite(val):
        raise ConfigError(path, "must be finite")
    if integer and val != int(val):
        raise ConfigError(path, "must be an integer")
    if positive and not (val > 0 or (allow_zero and val == 0)):
        raise ConfigError(path, "must be positive" if not allow_zero else "must be nonnegative")
    return int(val) if integer else val


def _mapping(raw, path):
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected a mapping")
    return raw


def _family(raw, path):
    raw = _mapping(raw, path)
    name = raw.get("family")
    if name not in _FAMILY_FIELDS:
        raise ConfigError(f"{path}.family", f"unknown family {name!r}; choose from {sorted(_FAMILY_FIELDS)}")
    extra = set(raw) - set(_FAMILY_FIELDS[name]) - {"family"}
    if extra:
        raise ConfigError(path, f"unexpected keys {sorted(extra)}")
    args = []
    for key in _FAMILY_FIELDS[name]:
        if key not in raw:
            raise ConfigError(f"{path}.{key}", "missing")
        args.append(_number(raw[key], f"{path}.{key}"))
    return _FAMILY_TYPES[name](*args)


def family_to_dict(fam):
    for name, cls in _FAMILY_TYPES.items():
        if type(fam) is cls:
            out = {"family": name}
            for key in _FAMILY_FIELDS[name]:
                out[key] = getattr(fam, key)
            return out
    raise TypeError(f"not a config family: {fam!r}")


@dataclass(frozen=True)
class AnalysisItem:
    kind: str
    params: dict

    def label(self, index):
        p = self.params
        if self.kind == "eigenstate":
            return f"{index:02d}_eigenstate_n{p['n']}_m{p['m']}"
        if self.kind == "gk":
            return f"{index:02d}_gk_n{p['n']}_s{p['s']:g}"
        return f"{index:02d}_{self.kind}"


@dataclass(frozen=True)
class TGrid:
    start: float
    stop: float
    points: int

    def values(self):
        import numpy as np

        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ExperimentConfig:
    constants: PhysicalConstants
    background: BackgroundSpec
    ep_method: str
    ep_ics: tuple
    ep_tolerance: float
    ep_c1: float
    analysis: tuple
    t_grid: TGrid
    output: str
    chiellini: dict = field(default=None)
    raw: dict = field(default=None, repr=False, compare=False)


def load_config(path):
    """Read a YAML/JSON file and validate it."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError("<file>", f"parse error: {exc}") from exc
    return parse_config(raw)


def _background(raw, constants):
    raw = _mapping(raw, "background")
    mode = raw.get("mode")
    if mode not in BACKGROUND_MODES:
        raise ConfigError("background.mode", f"unknown mode {mode!r}; choose from {list(BACKGROUND_MODES)}")
    chiellini = None
    try:
        if mode == "theta_omega":
            bg = BackgroundSpec.theta_omega(_family(raw.get("theta"), "background.theta"),
                                            _family(raw.get("omega"), "background.omega"), constants)
        elif mode == "direct_ab":
            bg = BackgroundSpec.direct_ab(_family(raw.get("a"), "background.a"),
                                          _family(raw.get("b"), "background.b"), constants)
        elif mode == "chiellini_exponential":
            args = [_number(raw.get(k), f"background.{k}") for k in ("alpha", "beta", "gamma")]
            a_fam, b_fam, sol = chiellini_exponential(*args, constants=constants)
            bg = BackgroundSpec.direct_ab(a_fam, b_fam, constants)
            chiellini = sol
        else:
            n = _number(raw.get("n"), "background.n", integer=True)
            alpha, beta, mu = (_number(raw.get(k), f"background.{k}") for k in ("alpha", "beta", "mu"))
            gamma = raw.get("gamma")
            if gamma is not None:
                gamma = _number(gamma, "background.gamma")
            a_fam, b_fam, sol = chiellini_rational(n, alpha, beta, mu, gamma, constants)
            bg = BackgroundSpec.direct_ab(a_fam, b_fam, constants)
            chiellini = sol
    except (ConstraintError, DomainError) as exc:
        raise ConfigError("background", str(exc)) from exc
    return bg, chiellini


def _analysis(raw):
    if not isinstance(raw, list) or not raw:
        raise ConfigError("analysis", "expected a nonempty list")
    items = []
    for i, entry in enumerate(raw):
        path = f"analysis.{i}"
        entry = _mapping(entry, path)
        kind = entry.get("kind")
        if kind not in ANALYSIS_KINDS:
            raise ConfigError(f"{path}.kind", f"unknown kind {kind!r}; choose from {list(ANALYSIS_KINDS)}")
        if kind == "eigenstate":
            params = {k: _number(entry.get(k), f"{path}.{k}", positive=True, integer=True) for k in ("n", "m")}
        elif kind == "glauber":
            params = {"alpha": _complex(entry.get("alpha", [0, 0]), f"{path}.alpha")}
        elif kind == "squeezed":
            params = {"alpha": _complex(entry.get("alpha", [0, 0]), f"{path}.alpha")}
            beta = entry.get("beta", 0.0)
            if beta == "optimize":
                target = entry.get("target", "XPx")
                if target not in SQUEEZE_TARGETS:
                    raise ConfigError(f"{path}.target", f"choose from {list(SQUEEZE_TARGETS)}")
                params.update(beta="optimize", target=target)
            elif beta == "beta_min":
                params["beta"] = "beta_min"
            else:
                params["beta"] = _number(beta, f"{path}.beta")
        else:
            params = {
                "n": _number(entry.get("n", 0), f"{path}.n", positive=True, integer=True),
                "m0": _number(entry.get("m0", 0), f"{path}.m0", positive=True),
                "phi0": _number(entry.get("phi0", 0), f"{path}.phi0"),
                "s": _number(entry.get("s"), f"{path}.s", positive=True, allow_zero=False),
            }
        items.append(AnalysisItem(kind, params))
    return tuple(items)


def _complex(raw, path):
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return complex(float(raw), 0.0)
    if isinstance(raw, list) and len(raw) == 2:
        return complex(_number(raw[0], f"{path}.0"), _number(raw[1], f"{path}.1"))
    raise ConfigError(path, "expected a number or [re, im]")


def parse_config(raw):
    raw = _mapping(raw, "<root>")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    known = {"schema_version", "constants", "background", "ep", "analysis", "t_grid", "output"}
    extra = set(raw) - known
    if extra:
        raise ConfigError("<root>", f"unexpected keys {sorted(extra)}")

    craw = _mapping(raw.get("constants", {}), "constants")
    try:
        constants = PhysicalConstants(**{k: _number(craw.get(k, 1.0), f"constants.{k}")
                                         for k in ("m", "hbar", "omega", "tau")})
    except DomainError as exc:
        raise ConfigError("constants", str(exc)) from exc
    if set(craw) - {"m", "hbar", "omega", "tau"}:
        raise ConfigError("constants", f"unexpected keys {sorted(set(craw) - {'m', 'hbar', 'omega', 'tau'})}")

    bg, chiellini = _background(raw.get("background"), constants)

    eraw = _mapping(raw.get("ep", {}), "ep")
    method = eraw.get("method", "auto")
    if method not in EP_METHODS:
        raise ConfigError("ep.method", f"unknown method {method!r}; choose from {list(EP_METHODS)}")
    if method == "chiellini" and chiellini is None:
        raise ConfigError("ep.method", "chiellini needs a chiellini_* background mode")
    ics = eraw.get("ics")
    if ics is not None:
        if not isinstance(ics, list) or len(ics) != 2:
            raise ConfigError("ep.ics", "expected [sigma0, dsigma0]")
        ics = (_number(ics[0], "ep.ics.0"), _number(ics[1], "ep.ics.1"))
        if not ics[0] > 0:
            raise ConfigError("ep.ics.0", "sigma0 must be positive")
    tol = _number(eraw.get("tolerance", 1e-10), "ep.tolerance", positive=True, allow_zero=False)
    c1 = _number(eraw.get("c1", 1.0), "ep.c1")

    traw = _mapping(raw.get("t_grid"), "t_grid")
    grid = TGrid(_number(traw.get("start", 0.0), "t_grid.start"),
                 _number(traw.get("stop"), "t_grid.stop"),
                 _number(traw.get("points", 200), "t_grid.points", integer=True))
    if grid.points < 2:
        raise ConfigError("t_grid.points", "need at least 2 points")
    if not grid.stop > grid.start:
        raise ConfigError("t_grid.stop", "must exceed t_grid.start")
    tc = cutoff_time(bg)
    if tc is not None and grid.stop > tc * (1 + 1e-12):
        raise ConfigError("t_grid.stop", f"t={grid.stop:.12g} lies past the cutoff time t_c={tc:.12g}")
    if grid.start < bg.t_start:
        raise ConfigError("t_grid.start", f"must be >= {bg.t_start}")

    output = raw.get("output", "out")
    if not isinstance(output, str) or not output:
        raise ConfigError("output", "expected a directory path")

    return ExperimentConfig(constants, bg, method, ics, tol, c1, _analysis(raw.get("analysis")),
                            grid, output, chiellini, copy.deepcopy(raw))


def set_path(raw, dotted, value):
    """Return a copy of ``raw`` with the field at ``dotted`` replaced."""
    out = copy.deepcopy(raw)
    keys = dotted.split(".")
    node = out
    for i, key in enumerate(keys):
        last = i == len(keys) - 1
        if isinstance(node, list):
            try:
                idx = int(key)
                node[idx]
            except (ValueError, IndexError) as exc:
                raise ConfigError(".".join(keys[:i + 1]), "no such list index") from exc
            if last:
                node[idx] = value
            else:
                node = node[idx]
        elif isinstance(node, dict):
            if key not in node:
                raise ConfigError(".".join(keys[:i + 1]), "no such field")
            if last:
                node[key] = value
            else:
                node = node[key]
        else:
            raise ConfigError(".".join(keys[:i + 1]), "path descends into a scalar")
    return out
