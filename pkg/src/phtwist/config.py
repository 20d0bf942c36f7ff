"""Run configuration: JSON in, validated dataclass out."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .foliations import PROFILES

SCHEMA_VERSION = 1
CONFIG_ENV = "PHTWIST_CONFIG"


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid configuration:\n  " + "\n  ".join(problems))


@dataclass
class Config:
    matrix: list = field(default_factory=lambda: [[3, 1], [2, 1]])
    bump_radius: float = 0.08
    bump_strength: float = 1.75
    push_steps: int = 200
    alpha_profile: str = "logsine"
    flat_lo: float = 0.1
    flat_hi: float = 0.9
    twist_enabled: bool = True
    c_max: float = 2.0
    threshold: float = 0.05
    n_grid: int = 256
    t_grid: int = 64
    pair_resolution: int = 4096
    sweep_n: list = field(default_factory=lambda: [16 * 2**k for k in range(9)])
    center_grid: int = 128
    integrator_atol: float = 1e-10
    integrator_h_max: float = 0.05
    cocycle_samples: int = 512
    cocycle_n_range: int = 4
    da_samples: int = 100
    da_iterates: int = 60
    ftle_samples: int = 50
    ftle_time: float = 50.0
    seed: int = 0
    out_dir: str = "out"

    def validate(self) -> "Config":
        problems = []

        def need(ok, name, msg):
            if not ok:
                problems.append(f"{name}: {msg} (got {getattr(self, name)!r})")

        m = np.asarray(self.matrix)
        if m.shape != (2, 2) or not np.all(np.equal(np.mod(m, 1), 0)):
            problems.append(f"matrix: must be a 2x2 integer matrix (got {self.matrix!r})")
        else:
            mi = m.astype(int)
            det = int(mi[0, 0] * mi[1, 1] - mi[0, 1] * mi[1, 0])
            fixed = abs(int((mi[0, 0] - 1) * (mi[1, 1] - 1) - mi[0, 1] * mi[1, 0]))
            need(det == 1, "matrix", "determinant must be 1")
            need(abs(int(mi[0, 0] + mi[1, 1])) > 2, "matrix", "must be hyperbolic (|trace| > 2)")
            need(fixed == 2, "matrix", "|det(m - I)| must be 2 (exactly two fixed points)")
        need(0 < self.bump_radius < 0.25, "bump_radius", "must lie in (0, 0.25)")
        need(self.bump_strength > 0, "bump_strength", "must be positive")
        need(self.push_steps >= 1, "push_steps", "must be >= 1")
        need(self.alpha_profile in PROFILES, "alpha_profile", f"must be one of {sorted(PROFILES)}")
        need(0 < self.flat_lo < self.flat_hi < 1, "flat_lo", "need 0 < flat_lo < flat_hi < 1")
        need(isinstance(self.twist_enabled, bool), "twist_enabled", "must be a boolean")
        need(self.c_max >= 0, "c_max", "must be >= 0")
        need(0 <= self.threshold <= 1, "threshold", "must lie in [0, 1]")
        need(self.n_grid >= 32, "n_grid", "must be >= 32")
        need(self.t_grid >= 2, "t_grid", "must be >= 2")
        need(self.pair_resolution >= 16, "pair_resolution", "must be >= 16")
        need(isinstance(self.sweep_n, list) and len(self.sweep_n) > 0
             and all(isinstance(n, (int, float)) and n > 0 for n in self.sweep_n),
             "sweep_n", "must be a non-empty list of positive numbers")
        need(self.center_grid >= 2, "center_grid", "must be >= 2")
        need(self.integrator_atol > 0, "integrator_atol", "must be positive")
        need(0 < self.integrator_h_max <= 1, "integrator_h_max", "must lie in (0, 1]")
        need(self.cocycle_samples >= 1, "cocycle_samples", "must be >= 1")
        need(self.cocycle_n_range >= 1, "cocycle_n_range", "must be >= 1")
        need(self.da_samples >= 1 and self.da_iterates >= 1, "da_samples", "sample counts must be >= 1")
        need(self.ftle_samples >= 1 and self.ftle_time > 0, "ftle_samples", "FTLE settings must be positive")
        need(isinstance(self.seed, int), "seed", "must be an integer")
        if problems:
            raise ConfigError(problems)
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f.name for f in fields(cls)}
        data = {k: v for k, v in data.items() if k != "schemaVersion"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"{k}: unknown key" for k in unknown])
        return cls(**data).validate()

    @classmethod
    def load(cls, path: str | os.PathLike | None = None) -> "Config":
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls().validate()
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError([f"{path}: not valid JSON ({exc})"]) from exc
        if not isinstance(data, dict):
            raise ConfigError([f"{path}: top level must be an object"])
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {"schemaVersion": SCHEMA_VERSION, **asdict(self)}

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    # -- builders ----------------------------------------------------------
    def da_map(self):
        from .torus import DAMap, DaParams, LinearModel

        model = LinearModel(tuple(tuple(int(v) for v in row) for row in self.matrix))
        return DAMap(DaParams(model, self.bump_radius, self.bump_strength, self.push_steps))

    def foliations(self):
        from .foliations import ModelFoliations, make_profile

        return ModelFoliations(make_profile(self.alpha_profile))

    def twist(self):
        from .twist import TwistProfile

        return TwistProfile(self.flat_lo, self.flat_hi, self.twist_enabled)
