"""Run configuration: YAML schema and validation.

Top-level keys (schema_version 1):

    schema_version: 1          required
    seed: <uint64>             master seed (default 20260821)
    workers: <int>             thread count for check jobs (default 1)
    out_dir: <path>            report directory (default "reports")
    format: records|csv|both   artifact formats (default "both")
    checks: [name, ...]        subset of the check registry (default: all)
    invert_roles: false        negative control (swap comparison scales)
    refinement_study: false    emit refinement.csv (grid-resolution study)
    export_paths: false        emit raw .paths files per sweep point
    export_count: 1024         paths per export file
    tail_curve_points: 25      tail-curve resolution (0 disables the CSV)
    sweep: {...}               SweepConfig fields: H, K, T, n, M, z_crit,
                               p_moments, drifts (list of {a, b}),
                               floor_levels, anchor_fracs, a_levels,
                               u_levels, t_levels, hinge_g_level,
                               horizons, rescale_factors

Unknown keys anywhere are errors, so typos cannot silently change a run.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields as dc_fields, replace

import yaml

from .errors import ConfigError
from .estimators import DriftSpec
from .harness import CHECKS, SweepConfig

SCHEMA_VERSION = 1

_RUN_KEYS = {
    "schema_version",
    "seed",
    "workers",
    "out_dir",
    "format",
    "checks",
    "invert_roles",
    "refinement_study",
    "export_paths",
    "export_count",
    "tail_curve_points",
    "sweep",
}
_FORMATS = ("records", "csv", "both")


@dataclass
class RunConfig:
    """Everything one CLI run needs."""

    sweep: SweepConfig = field(default_factory=SweepConfig)
    checks: tuple = tuple(CHECKS)
    out_dir: str = "reports"
    format: str = "both"
    workers: int = 1
    refinement_study: bool = False
    export_paths: bool = False
    export_count: int = 1024
    tail_curve_points: int = 25

    def validate(self) -> None:
        self.sweep.validate()
        if self.format not in _FORMATS:
            raise ConfigError(f"format must be one of {_FORMATS}, got {self.format!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ConfigError(
                f"unknown checks {unknown}; available: {sorted(CHECKS)}"
            )
        if not self.checks:
            raise ConfigError("checks must not be empty")
        if self.export_count < 1:
            raise ConfigError(f"export_count must be >= 1, got {self.export_count}")
        if self.tail_curve_points < 0:
            raise ConfigError(
                f"tail_curve_points must be >= 0, got {self.tail_curve_points}"
            )


def _as_tuple(value, key: str) -> tuple:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{key} must be a list, got {type(value).__name__}")
    return tuple(value)


def _build_sweep(raw: dict, seed, invert_roles: bool) -> SweepConfig:
    allowed = {f.name for f in dc_fields(SweepConfig)} - {"seed", "invert_roles"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown sweep keys {sorted(unknown)}; allowed: {sorted(allowed)}")
    kwargs = {}
    for key, value in raw.items():
        if key == "drifts":
            drifts = []
            for i, d in enumerate(_as_tuple(value, "sweep.drifts")):
                if not isinstance(d, dict) or set(d) != {"a", "b"}:
                    raise ConfigError(
                        f"sweep.drifts[{i}] must be a mapping with keys a, b, got {d!r}"
                    )
                try:
                    drifts.append(DriftSpec(a=float(d["a"]), b=float(d["b"])))
                except (TypeError, ValueError) as err:
                    raise ConfigError(f"sweep.drifts[{i}]: {err}") from err
            kwargs[key] = tuple(drifts)
        elif isinstance(getattr(SweepConfig, key, None), tuple):
            kwargs[key] = _as_tuple(value, f"sweep.{key}")
        else:
            kwargs[key] = value
    try:
        sweep = SweepConfig(**kwargs)
    except TypeError as err:
        raise ConfigError(f"bad sweep configuration: {err}") from err
    if seed is not None:
        sweep = replace(sweep, seed=int(seed))
    sweep = replace(sweep, invert_roles=bool(invert_roles))
    return sweep


def load_config(path) -> RunConfig:
    """Parse and validate a YAML run configuration."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    except yaml.YAMLError as err:
        raise ConfigError(f"config {path} is not valid YAML: {err}") from err
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping at top level")

    unknown = set(raw) - _RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}; allowed: {sorted(_RUN_KEYS)}")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )

    sweep_raw = raw.get("sweep", {})
    if not isinstance(sweep_raw, dict):
        raise ConfigError("sweep must be a mapping")
    sweep = _build_sweep(
        sweep_raw, raw.get("seed"), raw.get("invert_roles", False)
    )

    cfg = RunConfig(
        sweep=sweep,
        checks=_as_tuple(raw.get("checks", tuple(CHECKS)), "checks"),
        out_dir=str(raw.get("out_dir", "reports")),
        format=str(raw.get("format", "both")),
        workers=int(raw.get("workers", 1)),
        refinement_study=bool(raw.get("refinement_study", False)),
        export_paths=bool(raw.get("export_paths", False)),
        export_count=int(raw.get("export_count", 1024)),
        tail_curve_points=int(raw.get("tail_curve_points", 25)),
    )
    cfg.validate()
    return cfg
