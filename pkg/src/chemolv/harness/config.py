"""Scenario configuration files.

Grammar: INI-style sections holding ``key = value`` pairs; ``#`` and ``;``
start comments. Recognised sections and keys are listed in ``SCHEMA``;
anything else is rejected. Values are floats unless noted::

    [scenario]
    name = amplitude-verify      ; see SCENARIOS

    [params]
    a = 0.2          ; shorthand for a1 = a2
    chi = 20         ; shorthand for chi1 = chi2
    eps = 0.05       ; chi = chi_star + eps (symmetric only)
    a1, a2, chi1, chi2, d1, d2, b1, b2, L

    [grid]
    N = 200          ; cells per axis (int), or
    dx = 0.01        ; cell width, N = L / dx
    dim = 1

    [scheme]
    dt, t_end, tol_neg, elliptic_tol
    dissipation = local          ; local | global
    factorization = compensated  ; compensated | direct (2D only)
    snapshot_times = 0, 50, 200  ; comma separated
    stride = 10                  ; record diagnostics every n steps (int)

    [initial]
    kind = perturbation          ; perturbation | segregated | compact | gaussian | constant
    A0, s1, s2, sigma1_sq, sigma2_sq, noise
    I1 = 45, 55
    I2 = 48, 52
    center = 15, 15
    seed = 0                     ; int

    [output]
    dir = runs/amp
    front_level = 0.5
    front_side_u = left          ; left | right
    front_side_v = right
    slope_window = 5, 20
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..core import Params
from ..errors import InvalidArgument
from ..stability import chi_star
from ..timestepper import DISSIPATION_MODES, FACTORIZATIONS, SchemeConfig

SCENARIOS = ("amplitude-verify", "pattern-1d", "traveling-wave", "front-propagation",
             "pattern-2d", "gaussian-2d", "custom")
INITIAL_KINDS = ("perturbation", "segregated", "compact", "gaussian", "constant")

_F, _I, _S, _L = float, int, str, "list"

SCHEMA = {
    "scenario": {"name": _S},
    "params": {k: _F for k in ("a", "chi", "eps", "a1", "a2", "chi1", "chi2",
                               "d1", "d2", "b1", "b2", "L")},
    "grid": {"N": _I, "dx": _F, "dim": _I},
    "scheme": {"dt": _F, "t_end": _F, "tol_neg": _F, "elliptic_tol": _F,
               "dissipation": _S, "factorization": _S, "snapshot_times": _L, "stride": _I},
    "initial": {"kind": _S, "A0": _F, "s1": _F, "s2": _F, "I1": _L, "I2": _L,
                "sigma1_sq": _F, "sigma2_sq": _F, "center": _L, "noise": _F, "seed": _I},
    "output": {"dir": _S, "front_level": _F, "front_side_u": _S, "front_side_v": _S,
               "slope_window": _L},
}

# desk-scale presets; user values override
PRESETS = {
    "amplitude-verify": {
        "params": {"a": 0.2, "eps": 0.05, "L": 2.0},
        "grid": {"dx": 0.01, "dim": 1},
        "scheme": {"dt": 0.01, "t_end": 200.0, "stride": 10},
        "initial": {"kind": "perturbation", "A0": 1e-2},
    },
    "pattern-1d": {
        "params": {"a": 0.2, "chi": 20.0, "L": 30.0},
        "grid": {"dx": 0.1, "dim": 1},
        "scheme": {"dt": 0.05, "t_end": 200.0, "stride": 10},
        "initial": {"kind": "perturbation", "A0": 1e-2},
    },
    "traveling-wave": {
        "params": {"a": 2.0, "chi1": 20.0, "chi2": 80.0, "L": 100.0},
        "grid": {"dx": 0.1, "dim": 1},
        "scheme": {"dt": 0.05, "t_end": 60.0, "stride": 10},
        "initial": {"kind": "segregated", "s1": 10.0, "s2": 90.0},
        "output": {"front_side_u": "left", "front_side_v": "right"},
    },
    "front-propagation": {
        "params": {"a": 0.2, "chi": 20.0, "L": 100.0},
        "grid": {"dx": 0.1, "dim": 1},
        "scheme": {"dt": 0.05, "t_end": 10.0, "stride": 10},
        "initial": {"kind": "compact", "I1": [45.0, 55.0], "I2": [48.0, 52.0]},
        "output": {"front_side_u": "right", "front_side_v": "right"},
    },
    "pattern-2d": {
        "params": {"a": 0.5, "chi": 4.7, "L": 30.0},
        "grid": {"dx": 0.1, "dim": 2},
        "scheme": {"dt": 0.05, "t_end": 200.0, "stride": 20},
        "initial": {"kind": "perturbation", "A0": 0.05},
    },
    "gaussian-2d": {
        "params": {"a": 2.0, "chi": 100.0, "L": 30.0},
        "grid": {"dx": 0.1, "dim": 2},
        "scheme": {"dt": 0.05, "t_end": 200.0, "stride": 20,
                   "snapshot_times": [0.1, 1, 5, 10, 30, 60, 120, 200]},
        "initial": {"kind": "gaussian", "sigma1_sq": 0.25, "sigma2_sq": 1.0 / 9.0},
    },
    "custom": {},
}


class ConfigError(InvalidArgument):
    pass


@dataclass
class InitialSpec:
    kind: str
    A0: float = 1e-2
    s1: float | None = None
    s2: float | None = None
    I1: tuple | None = None
    I2: tuple | None = None
    sigma1_sq: float | None = None
    sigma2_sq: float | None = None
    center: tuple | None = None
    noise: float = 0.0
    seed: int = 0


@dataclass
class ScenarioConfig:
    name: str
    params: Params
    N: int
    scheme: SchemeConfig
    initial: InitialSpec
    eps: float | None = None
    stride: int = 1
    output_dir: str | None = None
    front_level: float = 0.5
    front_sides: tuple = ("left", "right")
    slope_window: tuple = (5.0, 20.0)
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return self.params.dim

    def with_eps(self, eps):
        """Copy with ``chi = chi_star + eps`` (symmetric parameters only)."""
        raw = {s: dict(v) for s, v in self.raw.items()}
        raw.setdefault("params", {})
        raw["params"]["eps"] = eps
        for k in ("chi", "chi1", "chi2"):
            raw["params"].pop(k, None)
        return build_config(raw)


def _convert(section, key, text):
    kind = SCHEMA[section][key]
    try:
        if kind == _L:
            return [float(p) for p in text.replace(";", ",").split(",") if p.strip()]
        if kind == _I:
            return int(text)
        if kind == _F:
            return float(text)
        return text.strip()
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {text!r}") from exc


def parse_config_text(text):
    """Parse config text into ``{section: {key: value}}`` with schema checks."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                   comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    raw = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        raw[section] = {}
        for key, val in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            raw[section][key] = _convert(section, key, val)
    return raw


def load_config(source):
    """Load a ``ScenarioConfig`` from a path or from config text."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and "[" not in source):
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text()
    else:
        text = source
    return build_config(parse_config_text(text))


def _merged(raw):
    name = raw.get("scenario", {}).get("name", "custom")
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario name {name!r}; expected one of {SCENARIOS}")
    merged = {s: dict(v) for s, v in PRESETS[name].items()}
    for section, values in raw.items():
        merged.setdefault(section, {}).update(values)
    merged.setdefault("scenario", {})["name"] = name
    user = raw.get("params", {})
    has_chi = any(k in user for k in ("chi", "chi1", "chi2"))
    if has_chi and "eps" in user:
        raise ConfigError("[params] give either eps or chi, not both")
    params = merged.setdefault("params", {})
    if has_chi:
        params.pop("eps", None)
    elif "eps" in user:
        for k in ("chi", "chi1", "chi2"):
            params.pop(k, None)
    # a user shorthand replaces preset per-species values, and vice versa
    for short, pair in (("chi", ("chi1", "chi2")), ("a", ("a1", "a2"))):
        if short in user:
            for k in pair:
                if k not in user:
                    params.pop(k, None)
        elif any(k in user for k in pair) and short in params:
            for k in pair:
                params.setdefault(k, params[short])
            params.pop(short)
    return name, merged


def _need(section, key, merged):
    try:
        return merged[section][key]
    except KeyError:
        raise ConfigError(f"missing required key {key!r} in [{section}]") from None


def build_config(raw):
    name, m = _merged(raw)
    p = m.get("params", {})
    g = m.get("grid", {})
    s = m.get("scheme", {})
    ini = m.get("initial", {})
    out = m.get("output", {})

    L = _need("params", "L", m)
    dim = int(g.get("dim", 1))
    if "N" in g:
        N = int(g["N"])
    elif "dx" in g:
        if not g["dx"] > 0:
            raise ConfigError("[grid] dx must be positive")
        N = int(round(L / g["dx"]))
        if not math.isclose(N * g["dx"], L, rel_tol=1e-9):
            raise ConfigError(f"[grid] dx={g['dx']} does not divide L={L}")
    else:
        raise ConfigError("[grid] needs N or dx")
    if N < 2:
        raise ConfigError(f"[grid] N must be at least 2, got {N}")

    a1 = p.get("a1", p.get("a"))
    a2 = p.get("a2", p.get("a"))
    if a1 is None or a2 is None:
        raise ConfigError("[params] needs a or a1/a2")
    eps = p.get("eps")
    if eps is not None:
        if a1 != a2 or p.get("d1", 1.0) != 1.0 or p.get("d2", 1.0) != 1.0 \
                or p.get("b1", 1.0) != 1.0 or p.get("b2", 1.0) != 1.0:
            raise ConfigError("[params] eps needs symmetric parameters")
        try:
            cs, _ = chi_star(a1, L, dim)
        except InvalidArgument as exc:
            raise ConfigError(f"[params] eps: {exc}") from exc
        chi1 = chi2 = cs + eps
        if chi1 < 0:
            raise ConfigError(f"[params] eps={eps} gives negative chi")
    else:
        chi1 = p.get("chi1", p.get("chi"))
        chi2 = p.get("chi2", p.get("chi"))
        if chi1 is None or chi2 is None:
            raise ConfigError("[params] needs chi, chi1/chi2 or eps")
    try:
        params = Params(a1=a1, a2=a2, chi1=chi1, chi2=chi2, d1=p.get("d1", 1.0),
                        d2=p.get("d2", 1.0), b1=p.get("b1", 1.0), b2=p.get("b2", 1.0),
                        L=L, dim=dim)
    except InvalidArgument as exc:
        raise ConfigError(f"[params] {exc}") from exc

    dt = _need("scheme", "dt", m)
    t_end = _need("scheme", "t_end", m)
    if not dt > 0:
        raise ConfigError(f"[scheme] dt must be positive, got {dt}")
    if not t_end >= dt:
        raise ConfigError(f"[scheme] t_end must be at least dt, got {t_end}")
    dissipation = s.get("dissipation", "local")
    if dissipation not in DISSIPATION_MODES:
        raise ConfigError(f"[scheme] dissipation must be one of {DISSIPATION_MODES}")
    factorization = s.get("factorization", "compensated")
    if factorization not in FACTORIZATIONS:
        raise ConfigError(f"[scheme] factorization must be one of {FACTORIZATIONS}")
    scheme = SchemeConfig(dt=dt, t_end=t_end, tol_neg=s.get("tol_neg", 1e-8),
                          snapshot_times=tuple(s.get("snapshot_times", ())),
                          elliptic_tol=s.get("elliptic_tol", 1e-10), dissipation=dissipation,
                          factorization=factorization)
    stride = int(s.get("stride", 1))
    if stride < 1:
        raise ConfigError("[scheme] stride must be >= 1")

    kind = ini.get("kind")
    if kind is None:
        raise ConfigError("missing required key 'kind' in [initial]")
    if kind not in INITIAL_KINDS:
        raise ConfigError(f"[initial] kind must be one of {INITIAL_KINDS}")
    required = {"segregated": ("s1", "s2"), "compact": ("I1", "I2"),
                "gaussian": ("sigma1_sq", "sigma2_sq"), "perturbation": ("A0",)}
    for key in required.get(kind, ()):
        _need("initial", key, m)
    for key in ("I1", "I2", "center"):
        if key in ini and len(ini[key]) != 2:
            raise ConfigError(f"[initial] {key} needs two numbers")
    initial = InitialSpec(kind=kind, **{k: (tuple(v) if isinstance(v, list) else v)
                                        for k, v in ini.items() if k != "kind"})

    sides = (out.get("front_side_u", "left"), out.get("front_side_v", "right"))
    for side in sides:
        if side not in ("left", "right"):
            raise ConfigError(f"[output] front side must be left or right, got {side!r}")
    window = tuple(out.get("slope_window", (5.0, 20.0)))
    if len(window) != 2:
        raise ConfigError("[output] slope_window needs two numbers")

    return ScenarioConfig(name=name, params=params, N=N, scheme=scheme, initial=initial,
                          eps=eps, stride=stride, output_dir=out.get("dir"),
                          front_level=out.get("front_level", 0.5), front_sides=sides,
                          slope_window=window, raw=raw)
