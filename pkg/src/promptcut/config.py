"""Flat key-value tool configuration.

Config files are plain ``key = value`` lines (``#`` comments allowed)
covering every tunable default; CLI flags override file values.  A short
hash of the effective configuration is stamped into every output file so
results can be traced back to their settings.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .graphcut import EnergyParams
from .pointgen import PointGenConfig
from .refine import RefineConfig


@dataclass(frozen=True)
class ToolConfig:
    # shared
    seed: int = 0
    # point generation
    tau: float = 0.5
    area_threshold_abs: float = 16.0
    area_threshold_rel: float = 0.005
    morph_radius: int = 1
    kmeans_max_iter: int = 50
    kmeans_tol: float = 1e-4
    # mask refinement
    gmm_components: int = 5
    gmm_max_iter: int = 20
    gmm_tol: float = 1e-5
    gmm_reg_eps: float = 1e-4
    gamma: float = 50.0
    lam: float = 1.0
    max_outer_iters: int = 5
    epsilon: float = 0.001
    erosion_scale: float = 0.02
    band_scale: float = 3.0

    def pointgen(self) -> PointGenConfig:
        return PointGenConfig(
            seed=self.seed,
            tau=self.tau,
            area_threshold_abs=self.area_threshold_abs,
            area_threshold_rel=self.area_threshold_rel,
            morph_radius=self.morph_radius,
            kmeans_max_iter=self.kmeans_max_iter,
            kmeans_tol=self.kmeans_tol,
        )

    def refine(self) -> RefineConfig:
        return RefineConfig(
            components=self.gmm_components,
            seed=self.seed,
            max_outer_iters=self.max_outer_iters,
            epsilon=self.epsilon,
            erosion_scale=self.erosion_scale,
            band_scale=self.band_scale,
            gmm_max_iter=self.gmm_max_iter,
            gmm_tol=self.gmm_tol,
            gmm_reg_eps=self.gmm_reg_eps,
            energy=EnergyParams(gamma=self.gamma, lam=self.lam),
        )

    def hash(self) -> str:
        canonical = ",".join(f"{k}={v!r}" for k, v in sorted(asdict(self).items()))
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def parse_value(raw: str, target_type: type):
    raw = raw.strip()
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    return raw


def load_config(path: str | Path | None, overrides: dict | None = None) -> ToolConfig:
    """Read a config file (if given) and apply non-None overrides."""
    values: dict = {}
    known = {f.name: f.type for f in fields(ToolConfig)}
    types = {f.name: type(getattr(ToolConfig(), f.name)) for f in fields(ToolConfig)}
    if path is not None:
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (part.strip() for part in line.split("=", 1))
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = parse_value(raw, types[key])
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return ToolConfig(**values)
