"""Macro-scale growth law for the foam cell concentration.

Times on the macro scale are in days, rates in 1/second. The conversion
uses exactly 86400 seconds per day.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import DomainError, LumenClosureError

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class GrowthParams:
    """Parameters of the foam cell ODE.

    ``sigma0`` is the reference wall shear stress; the interface measure of
    the wall norm is folded into it.
    """

    alpha: float = 1e-7
    sigma0: float = 1.0
    seconds_per_day: float = SECONDS_PER_DAY

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if not self.sigma0 > 0:
            raise DomainError(f"sigma0 must be positive, got {self.sigma0!r}")
        if self.seconds_per_day != SECONDS_PER_DAY:
            raise DomainError("seconds_per_day is fixed at 86400")


@dataclass(frozen=True)
class FoamCellState:
    c_s: float
    t: float = 0.0

    def __post_init__(self):
        if self.c_s < 0 or not math.isfinite(self.c_s):
            raise DomainError(f"foam cell concentration must be >= 0, got {self.c_s!r}")


def growth_rate(sigma_ws, c_s, p):
    """Pointwise growth rate ``alpha / (1 + c_s) / (1 + sigma_ws**2 / sigma0**2)`` in 1/s."""
    if c_s < 0:
        raise DomainError(f"c_s must be >= 0, got {c_s!r}")
    if sigma_ws < 0:
        raise DomainError(f"wall shear magnitude must be >= 0, got {sigma_ws!r}")
    ratio = sigma_ws / p.sigma0
    return p.alpha / (1.0 + c_s) / (1.0 + ratio * ratio)


def growth_function(x_hat, y_hat, c_s):
    """Spatial growth profile of the vessel wall, peaked at ``(0, +-1)``."""
    if abs(y_hat) > 2:
        raise DomainError(f"|y_hat| must be <= 2, got {y_hat!r}")
    return 1.0 + c_s * math.exp(-x_hat * x_hat) * (2.0 - abs(y_hat))


def euler_increment(c_s, gamma_bar, dt_days):
    # Shared by the two-scale step and the micro-free coarse sweeps so both
    # round identically.
    return c_s + dt_days * SECONDS_PER_DAY * gamma_bar


def macro_euler_step(state, gamma_bar, dt_days):
    """Advance ``state`` by one forward Euler step of ``dt_days`` days."""
    if not dt_days > 0:
        raise DomainError(f"dt_days must be positive, got {dt_days!r}")
    if gamma_bar < 0:
        raise DomainError(f"gamma_bar must be >= 0, got {gamma_bar!r}")
    c_new = euler_increment(state.c_s, gamma_bar, dt_days)
    if c_new >= 1.0:
        raise LumenClosureError(c_new, f"macro step at t={state.t + dt_days!r} days")
    return FoamCellState(c_new, state.t + dt_days)
