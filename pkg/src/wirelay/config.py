"""Project configuration: TOML or JSON, validated at load."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError
from .strain import DEFAULT_POISSON_RATIO, DEFAULT_YOUNGS_MODULUS, VARIANTS

DEFAULT_WD = 0.015  # m, strip width


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ProjectConfig:
    mesh_path: str = None
    frames: tuple = ()  # (name, path) pairs
    synthetic: SyntheticSpec = None
    youngs_modulus: float = DEFAULT_YOUNGS_MODULUS
    poisson_ratio: float = DEFAULT_POISSON_RATIO
    energy_variant: str = "paper-literal"
    # eta: a density in Pa, or "auto" for the length/energy crossing
    # calibration on the scenario at hand (see pipeline.calibrate_eta).
    eta: object = "auto"
    eta_sweep: tuple = None  # explicit sweep grid; default derives one
    wd: float = DEFAULT_WD
    unit_scale: float = 1.0
    seam_glue_path: str = None
    solver_cap: int = 16
    prefer_exact: bool = True
    out_dir: str = "out"

    def with_overrides(self, **kw) -> "ProjectConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


def _validate(cfg: ProjectConfig, base: Path) -> ProjectConfig:
    if cfg.synthetic is None and cfg.mesh_path is None:
        raise ConfigError("config needs either meshPath or synthetic")
    if cfg.mesh_path is not None:
        p = (base / cfg.mesh_path).resolve() if not Path(cfg.mesh_path).is_absolute() else Path(cfg.mesh_path)
        if not p.exists():
            raise ConfigError(f"mesh file not found: {p}")
        cfg = replace(cfg, mesh_path=str(p))
        frames = []
        for name, fp in cfg.frames:
            q = (base / fp).resolve() if not Path(fp).is_absolute() else Path(fp)
            if not q.exists():
                raise ConfigError(f"frames source not found: {q}")
            frames.append((name, str(q)))
        if not frames:
            raise ConfigError("config with meshPath needs at least one frames entry")
        cfg = replace(cfg, frames=tuple(frames))
    if cfg.wd <= 0:
        raise ConfigError("wd must be positive")
    if not 0 <= cfg.poisson_ratio < 0.5:
        raise ConfigError("poissonRatio must lie in [0, 0.5)")
    if cfg.youngs_modulus <= 0:
        raise ConfigError("youngsModulus must be positive")
    if cfg.energy_variant not in VARIANTS:
        raise ConfigError(f"energyVariant must be one of {VARIANTS}")
    if cfg.eta != "auto":
        try:
            eta = float(cfg.eta)
        except (TypeError, ValueError):
            raise ConfigError("eta must be a number or 'auto'")
        if eta < 0:
            raise ConfigError("eta must be >= 0")
        cfg = replace(cfg, eta=eta)
    if cfg.eta_sweep is not None:
        grid = tuple(float(x) for x in cfg.eta_sweep)
        if len(grid) < 2 or any(x <= 0 for x in grid):
            raise ConfigError("etaSweep must list at least 2 positive etas")
        cfg = replace(cfg, eta_sweep=grid)
    if cfg.solver_cap < 2:
        raise ConfigError("solver cap must be at least 2")
    return cfg


def _from_dict(data: dict) -> ProjectConfig:
    syn = None
    if "synthetic" in data:
        s = data["synthetic"]
        syn = SyntheticSpec(kind=s["kind"], params=dict(s.get("params", {})))
    frames = []
    for entry in data.get("frames", []):
        if isinstance(entry, dict):
            frames.append((entry["name"], entry["path"]))
        else:
            name, path = entry
            frames.append((name, path))
    material = data.get("material", {})
    solver = data.get("solver", {})
    return ProjectConfig(
        mesh_path=data.get("meshPath"),
        frames=tuple(frames),
        synthetic=syn,
        youngs_modulus=float(material.get("youngsModulus", DEFAULT_YOUNGS_MODULUS)),
        poisson_ratio=float(material.get("poissonRatio", DEFAULT_POISSON_RATIO)),
        energy_variant=data.get("energyVariant", "paper-literal"),
        eta=data.get("eta", "auto"),
        eta_sweep=data.get("etaSweep"),
        wd=float(data.get("wd", DEFAULT_WD)),
        unit_scale=float(data.get("unitScale", 1.0)),
        seam_glue_path=data.get("seamGluePath"),
        solver_cap=int(solver.get("cap", 16)),
        prefer_exact=bool(solver.get("preferExact", True)),
        out_dir=data.get("outDir", "out"),
    )


def load_config(path) -> ProjectConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    if path.suffix in (".toml", ".tml"):
        try:
            import tomllib  # py311+
        except ModuleNotFoundError:
            import tomli as tomllib
        data = tomllib.loads(text)
    elif path.suffix == ".json":
        data = json.loads(text)
    else:
        raise ConfigError(f"config must be .toml or .json, got {path.suffix}")
    try:
        cfg = _from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return _validate(cfg, path.parent)
