"""Experiment configuration: one JSON document, unknown keys rejected."""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from typing import Union

__all__ = ["ExperimentConfig", "ConfigError", "load_config", "default_config"]


class ConfigError(ValueError):
    pass


@dataclass
class KernelConfig:
    d: int = 1
    tau: int = 4
    scale: float = 1.0


@dataclass
class GridConfig:
    N: list = field(default_factory=lambda: [16, 32, 64])
    R: Union[str, float] = "schedule"


@dataclass
class TimeConfig:
    n: list = field(default_factory=lambda: [64, 256, 1024])
    T: float = 1.0


@dataclass
class MonteCarloConfig:
    samples: int = 500
    seed: int = 20240601
    batch: int = 50
    zero_noise: bool = False


@dataclass
class EvalConfig:
    count: int = 41
    interval: list = field(default_factory=lambda: [-2.0, 2.0])


@dataclass
class IotaConfig:
    N_max: int = 512
    c1: float = 1.0
    c2: float = 5.0


@dataclass
class SnapshotConfig:
    N: int = 32
    n: int = 256
    x: list = field(default_factory=lambda: [-1.0, -0.5, 0.5, 1.0])
    steps: list = field(default_factory=lambda: [2, 8, 32, 128])


_SECTIONS = {
    "kernel": KernelConfig,
    "grid": GridConfig,
    "time": TimeConfig,
    "mc": MonteCarloConfig,
    "eval_points": EvalConfig,
    "iota": IotaConfig,
    "snapshot": SnapshotConfig,
}


@dataclass
class ExperimentConfig:
    """Settings shared by the ``rmse``, ``iota`` and ``snapshot`` experiments.

    ``reference`` picks the solution the errors are measured against:
    ``"published"`` (the closed form used for the reported tables) or
    ``"exact"``. ``method`` is ``"collocation"`` or ``"oracle"``; the latter
    replaces the solver by the reference itself and must give zero error.
    """

    model: str = "tanh-drift"
    reference: str = "published"
    method: str = "collocation"
    outputs: str = "out"
    kernel: KernelConfig = field(default_factory=KernelConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    mc: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    eval_points: EvalConfig = field(default_factory=EvalConfig)
    iota: IotaConfig = field(default_factory=IotaConfig)
    snapshot: SnapshotConfig = field(default_factory=SnapshotConfig)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if key in _SECTIONS:
                sec = _SECTIONS[key]
                if not isinstance(value, dict):
                    raise ConfigError(f"section {key!r} must be an object")
                bad = set(value) - {f.name for f in fields(sec)}
                if bad:
                    raise ConfigError(f"unknown keys in {key!r}: {sorted(bad)}")
                kwargs[key] = sec(**value)
            else:
                kwargs[key] = value
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def copy(self, **overrides) -> "ExperimentConfig":
        new = copy.deepcopy(self)
        for k, v in overrides.items():
            setattr(new, k, v)
        return new

    @property
    def N_list(self) -> list[int]:
        return [int(v) for v in (self.grid.N if isinstance(self.grid.N, list) else [self.grid.N])]

    @property
    def n_list(self) -> list[int]:
        return [int(v) for v in (self.time.n if isinstance(self.time.n, list) else [self.time.n])]

    def validate(self) -> None:
        k = self.kernel
        if k.d < 1 or k.tau < 1 or not k.scale > 0:
            raise ConfigError(f"invalid kernel settings {k}")
        if self.reference not in ("published", "exact"):
            raise ConfigError(f"reference must be 'published' or 'exact', got {self.reference!r}")
        if self.method not in ("collocation", "oracle"):
            raise ConfigError(f"method must be 'collocation' or 'oracle', got {self.method!r}")
        if not (self.grid.R == "schedule" or isinstance(self.grid.R, (int, float)) and self.grid.R > 0):
            raise ConfigError("grid.R must be 'schedule' or a positive number")
        if any(N < 2 for N in self.N_list) or any(n < 1 for n in self.n_list):
            raise ConfigError("grid.N entries must be >= 2 and time.n entries >= 1")
        if self.mc.samples < 1 or self.mc.batch < 1:
            raise ConfigError("mc.samples and mc.batch must be positive")
        if not 0 <= self.mc.seed < 2**64:
            raise ConfigError("mc.seed must be an unsigned 64-bit integer")
        lo, hi = self.eval_points.interval
        if not lo < hi or self.eval_points.count < 1:
            raise ConfigError("eval_points needs lo < hi and count >= 1")
        if self.iota.N_max < 2:
            raise ConfigError("iota.N_max must be >= 2")


def load_config(path=None) -> ExperimentConfig:
    if path is None:
        return default_config()
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def default_config() -> ExperimentConfig:
    text = resources.files("zakai_rbf").joinpath("configs/default.json").read_text()
    return ExperimentConfig.from_dict(json.loads(text))
