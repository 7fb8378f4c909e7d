"""Run configuration: a flat key=value document with bracketed map blocks.

The format is deliberately primitive so parsing stays dependency-free and
outputs stay bit-stable:

    preset = cantor
    # or an inline system:
    domain = 0 1
    map {
      type = piecewise-linear
      vertices = 0:0 0.6:0.2 1:0.8
    }
    map {
      type = quadratic
      coeffs = -1 2 0
    }
    weights = 0.5 0.5
    tol = 1e-4
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import IfsLabError
from .maps import Ifs, PiecewiseMonotoneMap, piecewise_linear, quadratic_map
from .presets import PRESETS, get_preset
from .stochastic import TransitionMatrix


class ConfigError(IfsLabError):
    """Malformed or inconsistent run configuration (CLI exit code 2)."""


@dataclass
class RunConfig:
    preset: Optional[str] = None
    domain: Optional[tuple[float, float]] = None
    map_specs: list[dict] = field(default_factory=list)
    weights: Optional[list[float]] = None
    matrix_path: Optional[str] = None
    tol: float = 1e-4
    w1_tol: float = 1e-8
    merge_eps: float = 1e-12
    max_depth: int = 16
    max_iter: int = 200
    n_samples: int = 10_000
    n_bins: int = 1024
    prefix_len: int = 40
    seed: int = 20240801
    x0: Optional[float] = None
    interval_j: Optional[tuple[float, float]] = None
    conley_eps: float = 0.05
    v_eps: float = 0.1
    v0_eps: float = 0.01
    mass_tol: float = 1e-9
    budget: Optional[float] = None

    def validate(self) -> None:
        if (self.preset is None) == (not self.map_specs):
            raise ConfigError("give exactly one of: preset, inline map blocks")
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {self.preset!r}; available: {', '.join(sorted(PRESETS))}"
            )
        if self.map_specs and self.domain is None:
            raise ConfigError("inline maps need a domain")
        for name in ("tol", "w1_tol", "merge_eps", "conley_eps", "v_eps", "v0_eps"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        for name in ("max_depth", "max_iter", "n_samples", "n_bins", "prefix_len"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")

    def build_ifs(self) -> Ifs:
        self.validate()
        if self.preset is not None:
            return get_preset(self.preset)
        maps = [self._build_map(spec) for spec in self.map_specs]
        try:
            return Ifs(self.domain, tuple(maps))
        except IfsLabError as exc:
            raise ConfigError(str(exc)) from exc

    def _build_map(self, spec: dict) -> PiecewiseMonotoneMap:
        kind = spec.get("type")
        try:
            if kind == "piecewise-linear":
                return piecewise_linear(_parse_vertices(spec["vertices"]))
            if kind == "quadratic":
                a, b, c = _parse_floats(spec["coeffs"])
                return quadratic_map(a, b, c, self.domain)
        except KeyError as exc:
            raise ConfigError(f"map block missing key {exc}") from exc
        except IfsLabError as exc:
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"unknown map type {kind!r}")

    def get_weights(self, k: int) -> list[float]:
        if self.weights is None:
            return [1.0 / k] * k
        if len(self.weights) != k:
            raise ConfigError(f"{len(self.weights)} weights for {k} maps")
        return self.weights

    def load_matrix(self) -> Optional[TransitionMatrix]:
        if self.matrix_path is None:
            return None
        try:
            with open(self.matrix_path) as fh:
                return TransitionMatrix.from_csv(fh.read())
        except (OSError, ValueError, IfsLabError) as exc:
            raise ConfigError(f"cannot load matrix: {exc}") from exc


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def _parse_vertices(text: str) -> list[tuple[float, float]]:
    out = []
    for token in text.split():
        try:
            x, y = token.split(":")
            out.append((float(x), float(y)))
        except ValueError as exc:
            raise ConfigError(f"bad vertex {token!r}, expected x:y") from exc
    return out


_INT_KEYS = {"max_depth", "max_iter", "n_samples", "n_bins", "prefix_len", "seed"}
_FLOAT_KEYS = {
    "tol", "w1_tol", "merge_eps", "x0",
    "conley_eps", "v_eps", "v0_eps", "mass_tol", "budget",
}
_PAIR_KEYS = {"domain", "interval_j"}


def parse_config_text(text: str) -> RunConfig:
    cfg = RunConfig()
    current_map: Optional[dict] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "map {":
            if current_map is not None:
                raise ConfigError(f"line {lineno}: nested map block")
            current_map = {}
            continue
        if line == "}":
            if current_map is None:
                raise ConfigError(f"line {lineno}: stray '}}'")
            cfg.map_specs.append(current_map)
            current_map = None
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if current_map is not None:
            current_map[key] = value
            continue
        _assign(cfg, key, value, lineno)
    if current_map is not None:
        raise ConfigError("unterminated map block")
    return cfg


def _assign(cfg: RunConfig, key: str, value: str, lineno: int) -> None:
    key = key.replace("-", "_")
    if key == "preset":
        cfg.preset = value
    elif key == "weights":
        cfg.weights = _parse_floats(value)
    elif key == "matrix":
        cfg.matrix_path = value
    elif key in _PAIR_KEYS:
        pair = _parse_floats(value)
        if len(pair) != 2:
            raise ConfigError(f"line {lineno}: {key} needs two numbers")
        setattr(cfg, key, (pair[0], pair[1]))
    elif key in _INT_KEYS:
        try:
            setattr(cfg, key, int(value))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {key} must be an integer") from exc
    elif key in _FLOAT_KEYS:
        try:
            setattr(cfg, key, float(value))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {key} must be a number") from exc
    else:
        raise ConfigError(f"line {lineno}: unknown key {key!r}")


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
