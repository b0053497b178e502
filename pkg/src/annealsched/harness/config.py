"""Experiment configuration: one JSON document, every default filled in."""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

OUTPUT_ENV_VAR = "ANNEALSCHED_OUTPUT_DIR"
PROBLEM_KINDS = ("sat3", "maxcut")
METHODS = ("linear", "bfgs", "mcts")
DEFAULT_T_GRID = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    """``count`` generated instances with seeds ``seed, seed + 1, ...``."""

    n: int
    count: int = 1
    seed: int = 0

    def seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.count)]


@dataclass(frozen=True)
class OptimizerSettings:
    grid_size: int = 40
    grid_lo: float = -0.2
    grid_hi: float = 0.2
    mcts_budget: int = 5000
    uct_constant: float = math.sqrt(2)
    target_fidelity: float = 0.99
    stall_window: int = 20
    stall_tolerance: float = 0.01
    bfgs_max_fev: int = 10_000
    num_starts: int = 10
    noise_scale: float = 0.05
    fd_step: float = 1e-3
    gtol: float = 1e-6


@dataclass(frozen=True)
class ExperimentConfig:
    problem_kind: str = "sat3"
    instance_sources: tuple = ()
    methods: tuple[str, ...] = METHODS
    T_grid: tuple[float, ...] = DEFAULT_T_GRID
    M_values: tuple[int, ...] = (5,)
    dt: float = 0.05
    driver_sign: int = 1
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    master_seed: int = 0
    output: str = ""
    threads: int = 1

    def __post_init__(self):
        if self.problem_kind not in PROBLEM_KINDS:
            raise ConfigError(f"problem_kind must be one of {PROBLEM_KINDS}")
        if not self.instance_sources:
            raise ConfigError("instance_sources is empty")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ConfigError(f"methods must be a nonempty subset of {METHODS}")
        if not self.T_grid or any(not t > 0 for t in self.T_grid):
            raise ConfigError("T_grid must be nonempty with positive times")
        if not self.M_values or any(m < 1 for m in self.M_values):
            raise ConfigError("M_values must be nonempty with positive integers")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.driver_sign not in (1, -1):
            raise ConfigError("driver_sign must be +1 or -1")
        if self.threads < 1:
            raise ConfigError("threads must be positive")
        opt = self.optimizer
        if opt.mcts_budget < 1 or opt.bfgs_max_fev < 1 or opt.num_starts < 1 or opt.grid_size < 2:
            raise ConfigError("optimizer budgets, num_starts and grid_size must be positive")

    # -- (de)serialization ---------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        try:
            if "optimizer" in kwargs:
                opt = kwargs["optimizer"]
                bad = set(opt) - {f.name for f in fields(OptimizerSettings)}
                if bad:
                    raise ConfigError(f"unknown optimizer keys: {sorted(bad)}")
                kwargs["optimizer"] = OptimizerSettings(**opt)
            if "instance_sources" in kwargs:
                kwargs["instance_sources"] = tuple(
                    _parse_source(s) for s in kwargs["instance_sources"]
                )
            for key, conv in (("methods", str), ("T_grid", float), ("M_values", int)):
                if key in kwargs:
                    kwargs[key] = tuple(conv(v) for v in kwargs[key])
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["instance_sources"] = [
            asdict(s) if isinstance(s, GeneratorSpec) else s for s in self.instance_sources
        ]
        for key in ("methods", "T_grid", "M_values"):
            out[key] = list(out[key])
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def output_dir(self) -> Path:
        return Path(self.output or os.environ.get(OUTPUT_ENV_VAR, "results"))


def _parse_source(src):
    if isinstance(src, str):
        return src
    if isinstance(src, dict):
        bad = set(src) - {"n", "count", "seed"}
        if bad or "n" not in src:
            raise ConfigError(f"generator spec needs 'n' (and optional count, seed): {src}")
        spec = GeneratorSpec(**{k: int(v) for k, v in src.items()})
        if spec.count < 1:
            raise ConfigError("generator count must be positive")
        return spec
    raise ConfigError(f"instance source must be a path or a generator spec, got {src!r}")


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return ExperimentConfig.from_dict(data)
