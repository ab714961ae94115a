"""Run configuration files.

Flat ``key = value`` lines; ``#`` starts a comment.  Coefficient keys repeat,
one ``exponent re im`` triple per line::

    domain = annulus        # disk | annulus | circles
    R = 2                   # annulus 1 < |z| < R
    radius = 1              # disk radius
    center = 0 0            # disk center (re im)
    circle = 0 0 3          # circle domain: cx cy r, repeated; first is outer
    h = 1 1 0               # h(z) gets 1*z^1
    g = 2 0.5 0             # g(z) gets 0.5*z^2
    h_t = 0 0 0             # sweep: per-unit-t slope added to h
    g_t = 2 0.5 0           # sweep: per-unit-t slope added to g
    validity_h = 0 inf      # optional validity annulus for h (same for g)

Budgets: ``grid``, ``refinements``, ``rel_tol``, ``margin``,
``injectivity_grid``, ``trace_n``, ``piece_n``, ``trials``, ``seed``; sweep
range: ``t_min``, ``t_max``, ``steps``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .domains import Annulus, Circle, CircleDomain, Disk, Domain
from .errors import ConfigError, HarmqcError
from .harmonic import HarmonicMap
from .series import LaurentSeries

REPEATED = {"h", "g", "h_t", "g_t", "circle"}
SCALARS = {
    "domain": str, "R": float, "radius": float, "center": None,
    "validity_h": None, "validity_g": None,
    "grid": int, "refinements": int, "rel_tol": float, "margin": float,
    "injectivity_grid": int, "trace_n": int, "piece_n": int, "trials": int, "seed": int,
    "t_min": float, "t_max": float, "steps": int, "circle_id": int,
}


@dataclass(frozen=True)
class SweepSpec:
    t_min: float
    t_max: float
    steps: int

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ConfigError("sweep needs t_min < t_max")
        if self.steps < 2:
            raise ConfigError("sweep needs steps >= 2")

    def values(self) -> list:
        return [self.t_min + (self.t_max - self.t_min) * k / (self.steps - 1)
                for k in range(self.steps)]


@dataclass
class RunConfig:
    domain: Domain
    h: list
    g: list
    h_t: list = field(default_factory=list)
    g_t: list = field(default_factory=list)
    validity_h: Optional[tuple] = None
    validity_g: Optional[tuple] = None
    grid: int = 64
    refinements: int = 6
    rel_tol: float = 1e-3
    margin: float = 1e-6
    injectivity_grid: int = 200
    trace_n: int = 256
    piece_n: int = 192
    trials: int = 10_000
    seed: int = 0
    circle_id: int = 0
    sweep: Optional[SweepSpec] = None

    def __post_init__(self):
        for name in ("grid", "refinements", "injectivity_grid", "trace_n", "piece_n"):
            if getattr(self, name) < (0 if name == "refinements" else 2):
                raise ConfigError(f"budget {name} must be positive")
        if not (self.rel_tol > 0 and 0 < self.margin < 0.5):
            raise ConfigError("rel_tol and margin must be positive (margin < 0.5)")
        if self.trials < 0:
            raise ConfigError("trials must be nonnegative")

    def series(self, triples, validity) -> LaurentSeries:
        ks = [k for k, _, _ in triples]
        if validity is None:
            r_in = sys.float_info.min if ks and min(ks) < 0 else 0.0
            validity = (r_in, math.inf)
        try:
            return LaurentSeries.from_triples(triples, *validity)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def harmonic_map(self, t: Optional[float] = None, check: bool = True) -> HarmonicMap:
        """The configured map; with ``t``, the sweep family member ``(h + t h_t, g + t g_t)``."""
        h = self.series(self.h, self.validity_h)
        g = self.series(self.g, self.validity_g)
        if t is not None:
            h = h + t * self.series(self.h_t, self.validity_h)
            g = g + t * self.series(self.g_t, self.validity_g)
        return HarmonicMap(h, g, self.domain, self.margin, check)


def _floats(key, value, n):
    parts = value.split()
    if len(parts) != n:
        raise ConfigError(f"{key}: expected {n} numbers, got {value!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"{key}: not numeric: {value!r}") from None


def _triple(key, value):
    k, re, im = _floats(key, value, 3)
    if k != int(k):
        raise ConfigError(f"{key}: exponent must be an integer, got {k}")
    return int(k), re, im


def parse_config(text: str) -> RunConfig:
    raw: dict = {}
    rep: dict = {k: [] for k in REPEATED}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in REPEATED:
            rep[key].append(value)
        elif key in SCALARS:
            if key in raw:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            raw[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    kw = {}
    for key, value in raw.items():
        conv = SCALARS[key]
        if conv is None or key == "domain":
            continue
        try:
            kw[key] = conv(value)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {value!r}") from None
    try:
        domain = _parse_domain(raw, rep["circle"], kw)
    except ConfigError:
        raise
    except HarmqcError as exc:
        raise ConfigError(f"domain: {exc}") from exc
    for key in ("R", "radius"):
        kw.pop(key, None)

    for key in ("validity_h", "validity_g"):
        if key in raw:
            kw[key] = tuple(_floats(key, raw[key], 2))
    sweep_keys = [k for k in ("t_min", "t_max", "steps") if k in kw]
    sweep = None
    if sweep_keys:
        if len(sweep_keys) != 3:
            raise ConfigError("sweep needs all of t_min, t_max, steps")
        sweep = SweepSpec(kw.pop("t_min"), kw.pop("t_max"), kw.pop("steps"))
    if not rep["h"]:
        raise ConfigError("at least one 'h' coefficient is required")
    return RunConfig(
        domain=domain,
        h=[_triple("h", v) for v in rep["h"]],
        g=[_triple("g", v) for v in rep["g"]],
        h_t=[_triple("h_t", v) for v in rep["h_t"]],
        g_t=[_triple("g_t", v) for v in rep["g_t"]],
        sweep=sweep,
        **kw,
    )


def _parse_domain(raw, circles, kw) -> Domain:
    kind = raw.get("domain", "disk").strip().lower()
    if kind == "disk":
        cx, cy = _floats("center", raw["center"], 2) if "center" in raw else (0.0, 0.0)
        return Disk(kw.get("radius", 1.0), complex(cx, cy))
    if kind == "annulus":
        if "R" not in kw:
            raise ConfigError("annulus domain needs R")
        return Annulus(kw["R"])
    if kind == "circles":
        cs = []
        for v in circles:
            x, y, r = _floats("circle", v, 3)
            cs.append(Circle(complex(x, y), r))
        return CircleDomain(tuple(cs))
    raise ConfigError(f"unknown domain {kind!r}")


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return parse_config(text)
