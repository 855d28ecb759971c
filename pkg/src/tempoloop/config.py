"""Experiment configuration: a flat JSON object with units spelled out in the keys."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .exceptions import ConfigError, TempoloopError
from .growth import GrowthParams
from .micro import MicroConfig, SurrogateChannelFlow
from .parareal import VARIANTS, PararealConfig


@dataclass
class ExperimentConfig:
    alpha_per_second: float = 3e-8
    sigma0: float = 400.0
    delta_tau_seconds: float = 0.02
    cycle_length_seconds: float = 1.0
    relaxation_rate_per_second: float = 2.0
    v_mean: float = 1.0
    sigma_scale: float = 1.0
    eps_p: float = 1e-3
    max_cycles: int = 20
    forcing: str = "pulsatile"
    T_end_days: float = 300.0
    dt_fine_days: float = 0.3
    c0: float = 0.0
    eps_par: float = 1e-3
    relative_stop: bool = False
    max_iterations: int = 20
    fixed_iterations: list | None = None
    variants: list = field(default_factory=lambda: list(VARIANTS))
    process_counts: list = field(default_factory=lambda: [10, 20, 30, 40, 50, 60, 70])
    output_dir: str = "results"
    emit_trajectories: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        for v in self.variants:
            if v not in VARIANTS:
                raise ConfigError(f"unknown variant {v!r}; expected one of {VARIANTS}")
        if not self.process_counts:
            raise ConfigError("process_counts must not be empty")
        if any(not isinstance(P, int) or isinstance(P, bool) for P in self.process_counts):
            raise ConfigError(f"process_counts must be integers, got {self.process_counts!r}")
        if len(set(self.process_counts)) != len(self.process_counts):
            raise ConfigError("process_counts must not repeat")
        if self.fixed_iterations is not None and len(self.fixed_iterations) not in (1, len(self.process_counts)):
            raise ConfigError("fixed_iterations needs one entry or one per process count")
        try:
            self.growth_params()
            self.micro_config()
            for P in self.process_counts:
                self.parareal_config(P, self.variants[0] if self.variants else "standard")
        except (TempoloopError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    def growth_params(self):
        return GrowthParams(alpha=self.alpha_per_second, sigma0=self.sigma0)

    def micro_config(self):
        return MicroConfig(
            delta_tau=self.delta_tau_seconds,
            cycle_length=self.cycle_length_seconds,
            relaxation_rate=self.relaxation_rate_per_second,
            v_mean=self.v_mean,
            sigma_scale=self.sigma_scale,
            eps_p=self.eps_p,
            max_cycles=self.max_cycles,
            forcing=self.forcing,
        )

    def micro(self):
        return SurrogateChannelFlow(self.micro_config(), self.growth_params())

    def iterations_for(self, P):
        if self.fixed_iterations is None:
            return None
        if len(self.fixed_iterations) == 1:
            return self.fixed_iterations[0]
        return self.fixed_iterations[self.process_counts.index(P)]

    def parareal_config(self, P, variant, threads=1):
        return PararealConfig(
            P=P,
            T_end=self.T_end_days,
            dt_fine=self.dt_fine_days,
            eps_par=self.eps_par,
            variant=variant,
            max_iterations=self.max_iterations,
            relative_stop=self.relative_stop,
            fixed_iterations=self.iterations_for(P),
            c0=self.c0,
            threads=threads,
        )

    @property
    def N_l(self):
        return round(self.T_end_days / self.dt_fine_days)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def dumps(cfg):
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return ExperimentConfig.from_dict(data)


def load(path):
    try:
        with open(path) as fh:
            return loads(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def dump(cfg, path):
    with open(path, "w") as fh:
        fh.write(dumps(cfg))
