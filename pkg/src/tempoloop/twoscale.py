"""Serial two-scale integrator: one periodic micro problem per macro step."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .exceptions import DomainError, LumenClosureError
from .growth import FoamCellState, macro_euler_step
from .micro import MicroState


@dataclass(frozen=True)
class MacroGrid:
    """Uniform macro grid on ``[t_start, t_end]`` (days) with step ``dt``."""

    t_start: float
    t_end: float
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        span = self.t_end - self.t_start
        if span < 0:
            raise DomainError("t_end must not precede t_start")
        n = round(span / self.dt)
        if abs(n * self.dt - span) > 1e-12 * max(abs(span), abs(self.dt)):
            raise DomainError(f"interval length {span!r} is not a multiple of dt={self.dt!r}")

    @classmethod
    def from_steps(cls, t_start, dt, n):
        return cls(t_start, t_start + n * dt, dt)

    @property
    def N(self):
        return round((self.t_end - self.t_start) / self.dt)

    def times(self):
        n = self.N
        ts = [self.t_start + i * self.dt for i in range(n + 1)]
        ts[-1] = self.t_end
        return ts


@dataclass
class TrajectorySegment:
    """Macro trajectory over one grid.

    ``gamma_values[n]`` and ``cycles[n]`` belong to the step ending at
    ``times[n + 1]``; ``micro_states[n]`` is the micro state at ``times[n]``.
    """

    times: list
    c_values: list
    gamma_values: list = field(default_factory=list)
    cycles: list = field(default_factory=list)
    micro_states: list = field(default_factory=list)

    @property
    def end_micro_state(self):
        return self.micro_states[-1]

    @property
    def c_end(self):
        return self.c_values[-1]

    @property
    def micro_problems(self):
        """Periodic micro problems solved, one per macro step."""
        return len(self.gamma_values)

    @property
    def cycles_total(self):
        return sum(self.cycles)

    def pairs(self):
        """``(c_s, gamma_bar)`` pairs: each rate with the concentration it was computed at."""
        return list(zip(self.c_values[:-1], self.gamma_values))


def propagate(c0, w0, grid, micro):
    """Advance ``c0`` over ``grid`` with the two-scale algorithm.

    The micro state returned by each periodic solve warm-starts the next one.
    """
    if not 0 <= c0 < 1:
        raise DomainError(f"initial concentration must lie in [0, 1), got {c0!r}")
    times = grid.times()
    seg = TrajectorySegment(times=times, c_values=[c0], micro_states=[w0])
    # grid.dt, not differences of the time stamps, so that split runs match bit for bit
    state = FoamCellState(c0, times[0])
    w = w0
    for n in range(1, len(times)):
        avg, w = micro.periodic_average(w, state.c_s)
        try:
            state = macro_euler_step(state, avg.gamma_bar, grid.dt)
        except LumenClosureError as exc:
            raise LumenClosureError(exc.c_s, f"two-scale step ending at t={times[n]!r} days") from None
        seg.c_values.append(state.c_s)
        seg.gamma_values.append(avg.gamma_bar)
        seg.cycles.append(avg.cycles_used)
        seg.micro_states.append(w)
    return seg


def serial_reference(micro, T_end, dt, c0=0.0, w0=None):
    """Fine serial run over ``[0, T_end]``: the baseline for errors and speedups."""
    return propagate(c0, w0 if w0 is not None else MicroState(), MacroGrid(0.0, T_end, dt), micro)


def write_trajectory_csv(segment, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t_days", "c_s", "gamma_bar", "cycles_used"])
        writer.writerow([repr(segment.times[0]), repr(segment.c_values[0]), "", 0])
        for t, c, g, r in zip(segment.times[1:], segment.c_values[1:], segment.gamma_values, segment.cycles):
            writer.writerow([repr(t), repr(c), repr(g), r])
