"""Periodic micro-scale problem: one cardiac cycle at frozen foam cell concentration.

The fluid-structure problem is replaced by a scalar relaxation surrogate

    dv/dtau = -lambda * (v - v_in(tau)),

integrated with backward Euler over one cycle. Its wall shear stress grows
as the lumen narrows, which feeds back into the averaged growth rate.
"""
from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field

from .exceptions import DomainError, LumenClosureError, NonConvergenceError
from .growth import GrowthParams, growth_rate

FORCINGS = ("pulsatile", "constant")


@dataclass(frozen=True)
class MicroState:
    """Flow state carried between cycles, macro steps and parareal intervals.

    ``tau`` is the phase within the cycle at which the state applies.
    """

    v: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.v):
            raise DomainError(f"micro state must be finite, got v={self.v!r}")

    def to_dict(self):
        return {"v": float.hex(self.v), "tau": float.hex(self.tau)}

    @classmethod
    def from_dict(cls, d):
        return cls(v=float.fromhex(d["v"]), tau=float.fromhex(d["tau"]))


@dataclass(frozen=True)
class MicroConfig:
    delta_tau: float = 0.02
    cycle_length: float = 1.0
    relaxation_rate: float = 2.0
    v_mean: float = 1.0
    sigma_scale: float = 1.0
    eps_p: float = 1e-3
    max_cycles: int = 20
    forcing: str = "pulsatile"

    def __post_init__(self):
        if not (self.delta_tau > 0 and self.cycle_length > 0):
            raise DomainError("delta_tau and cycle_length must be positive")
        n = round(self.cycle_length / self.delta_tau)
        if n < 1 or abs(n * self.delta_tau - self.cycle_length) > 1e-12 * self.cycle_length:
            raise DomainError(
                f"cycle_length={self.cycle_length!r} is not an integer multiple "
                f"of delta_tau={self.delta_tau!r}"
            )
        if not self.relaxation_rate > 0:
            raise DomainError("relaxation_rate must be positive")
        if not self.eps_p > 0:
            raise DomainError("eps_p must be positive")
        if self.max_cycles < 1:
            raise DomainError("max_cycles must be >= 1")
        if self.forcing not in FORCINGS:
            raise DomainError(f"forcing must be one of {FORCINGS}, got {self.forcing!r}")

    @property
    def N_s(self):
        return round(self.cycle_length / self.delta_tau)


@dataclass(frozen=True)
class AveragedGrowth:
    gamma_bar: float
    cycles_used: int
    residual: float = 0.0
    candidates: tuple = field(default=(), repr=False)

    @property
    def micro_problems_solved(self):
        return self.cycles_used


def inflow(tau, cfg):
    """Pulsating inflow velocity ``v_mean * (1 + sin(2 pi tau / cycle_length))``."""
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau!r}")
    if cfg.forcing == "constant":
        return cfg.v_mean
    return cfg.v_mean * (1.0 + math.sin(2.0 * math.pi * tau / cfg.cycle_length))


def wall_shear(v, c_s, cfg):
    """Scalar wall shear stress magnitude; a narrower lumen raises it at fixed flux."""
    if c_s >= 1.0:
        raise LumenClosureError(c_s, "wall shear evaluation")
    if c_s < 0:
        raise DomainError(f"c_s must be >= 0, got {c_s!r}")
    if v < 0:
        raise DomainError(f"velocity must be >= 0, got {v!r}")
    opening = 1.0 - c_s
    return cfg.sigma_scale * v / (opening * opening)


class MicroPropagator(abc.ABC):
    """Solver for the periodic micro problem at a frozen concentration.

    Implementations provide :meth:`run_cycle`; the periodicity loop is shared.
    Implementations must be free of mutable shared state so that distinct
    micro problems can run on distinct threads.
    """

    eps_p = 1e-3
    max_cycles = 20

    @abc.abstractmethod
    def run_cycle(self, w0, c_s):
        """Integrate one cycle from ``w0``; return ``(end_state, gamma_candidate)``."""

    def periodic_average(self, w0, c_s):
        """Repeat cycles until the averaged growth rate stops changing.

        The relative change between consecutive candidates is tested against
        ``eps_p``, so at least two cycles are always run.
        """
        w = w0
        candidates = []
        residual = math.inf
        for _ in range(self.max_cycles):
            w, gamma = self.run_cycle(w, c_s)
            candidates.append(gamma)
            if len(candidates) >= 2:
                residual = abs(gamma - candidates[-2]) / abs(gamma)
                if residual < self.eps_p:
                    return AveragedGrowth(gamma, len(candidates), residual, tuple(candidates)), w
        raise NonConvergenceError(
            f"micro problem at c_s={c_s!r} not periodic after {self.max_cycles} cycles "
            f"(relative residual {residual:.3e}, eps_p={self.eps_p:g})",
            c_s=c_s,
            residual=residual,
        )


class SurrogateChannelFlow(MicroPropagator):
    """Relaxation surrogate for the pulsatile channel flow, backward Euler in tau."""

    def __init__(self, cfg=None, gp=None):
        self.cfg = cfg if cfg is not None else MicroConfig()
        self.gp = gp if gp is not None else GrowthParams()
        self.eps_p = self.cfg.eps_p
        self.max_cycles = self.cfg.max_cycles
        h = self.cfg.delta_tau * self.cfg.relaxation_rate
        # v_m = v_{m-1} + beta * (v_in - v_{m-1}) is the backward Euler update;
        # this form keeps a fixed point v = v_in exact in floating point.
        self._beta = h / (1.0 + h)
        self._forcing = tuple(
            inflow(m * self.cfg.delta_tau, self.cfg) for m in range(1, self.cfg.N_s + 1)
        )

    def run_cycle(self, w0, c_s):
        if c_s >= 1.0:
            raise LumenClosureError(c_s, "micro cycle")
        cfg, gp, beta = self.cfg, self.gp, self._beta
        v = w0.v
        rates = []
        for v_in in self._forcing:
            v = v + beta * (v_in - v)
            rates.append(growth_rate(wall_shear(v, c_s, cfg), c_s, gp))
        return MicroState(v, w0.tau), math.fsum(rates) / len(rates)


def run_cycle(w0, c_s, cfg, gp):
    return SurrogateChannelFlow(cfg, gp).run_cycle(w0, c_s)


def periodic_average(w0, c_s, cfg, gp):
    """Functional form of :meth:`MicroPropagator.periodic_average` for the surrogate."""
    return SurrogateChannelFlow(cfg, gp).periodic_average(w0, c_s)
