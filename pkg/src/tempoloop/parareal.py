"""Parareal iteration on the macro scale with three coarse propagators.

``standard``
    one two-scale macro step per coarse interval (one micro problem each);
``reuse``
    forward Euler on the fine grid with the growth rates stored by the
    latest fine sweep, indexed by time step;
``interpolation``
    forward Euler on the fine grid with growth rates interpolated from an
    ordered ``(c_s, gamma_bar)`` table that accumulates every fine result.

Only the initialization solves micro problems on the coarse level for the
last two variants.
"""
from __future__ import annotations

import bisect
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .exceptions import DomainError, LumenClosureError, TempoloopError
from .growth import euler_increment
from .micro import MicroState
from .twoscale import MacroGrid, propagate, serial_reference

logger = logging.getLogger(__name__)

VARIANTS = ("standard", "reuse", "interpolation")

# Keys closer than this are treated as the same concentration.
KEY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PararealConfig:
    """Parareal schedule.

    With ``relative_stop`` the criterion on ``c(T_end)`` is divided by
    ``|c(T_end)|``. ``fixed_iterations`` disables the criterion and runs
    exactly that many iterations.
    """

    P: int
    T_end: float = 300.0
    dt_fine: float = 0.3
    eps_par: float = 1e-3
    variant: str = "standard"
    max_iterations: int = 20
    relative_stop: bool = False
    fixed_iterations: int | None = None
    c0: float = 0.0
    threads: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.P < 1:
            raise DomainError(f"P must be >= 1, got {self.P!r}")
        MacroGrid(0.0, self.T_end, self.dt_fine)
        if self.N_l < self.P:
            raise DomainError(f"P={self.P} exceeds the number of fine steps N_l={self.N_l}")
        if not self.eps_par > 0:
            raise DomainError("eps_par must be positive")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        if self.fixed_iterations is not None and self.fixed_iterations < 0:
            raise DomainError("fixed_iterations must be >= 0")
        if self.threads < 1:
            raise DomainError("threads must be >= 1")

    @property
    def N_l(self):
        return round(self.T_end / self.dt_fine)

    @property
    def N_p(self):
        return -(-self.N_l // self.P)

    def step_bounds(self):
        """Fine step index at each interface; interval sizes differ by at most one."""
        return [p * self.N_l // self.P for p in range(self.P + 1)]

    def interface_times(self):
        return [b * self.dt_fine for b in self.step_bounds()]


class GrowthTable:
    """Ordered ``(c_s, gamma_bar)`` samples queried by piecewise-linear interpolation.

    Outside the sampled range the two nearest entries are extrapolated linearly.
    """

    def __init__(self, pairs=()):
        self.keys = []
        self.values = []
        self.extend(pairs)

    def __len__(self):
        return len(self.keys)

    def __iter__(self):
        return iter(zip(self.keys, self.values))

    def add(self, c_s, gamma_bar):
        i = bisect.bisect_left(self.keys, c_s)
        for j in (i - 1, i):
            if 0 <= j < len(self.keys) and abs(self.keys[j] - c_s) <= KEY_TOLERANCE:
                self.keys[j] = c_s
                self.values[j] = gamma_bar
                return
        self.keys.insert(i, c_s)
        self.values.insert(i, gamma_bar)

    def extend(self, pairs):
        for c_s, gamma_bar in pairs:
            self.add(c_s, gamma_bar)

    def __call__(self, c_query):
        return interpolate_growth(self, c_query)


def interpolate_growth(table, c_query):
    keys, values = table.keys, table.values
    n = len(keys)
    if n < 2:
        raise DomainError(f"interpolation needs at least 2 table entries, got {n}")
    i = bisect.bisect_left(keys, c_query)
    if i < n and keys[i] == c_query:
        return values[i]
    # bracket [lo, lo + 1], clamped to the end pairs for extrapolation
    lo = min(max(i - 1, 0), n - 2)
    c_lo, c_hi = keys[lo], keys[lo + 1]
    return ((c_hi - c_query) * values[lo] + (c_query - c_lo) * values[lo + 1]) / (c_hi - c_lo)


def coarse_reuse(c_start, gammas, dt):
    """Euler sweep driven by stored growth rates, one per fine step."""
    cs = [c_start]
    c = c_start
    for g in gammas:
        c = euler_increment(c, g, dt)
        if c >= 1.0:
            raise LumenClosureError(c, "re-usage coarse sweep")
        cs.append(c)
    return cs


def coarse_interpolation(c_start, table, n_steps, dt):
    """Euler sweep with growth rates interpolated at the current concentration."""
    cs = [c_start]
    c = c_start
    for _ in range(n_steps):
        c = euler_increment(c, interpolate_growth(table, c), dt)
        if c >= 1.0:
            raise LumenClosureError(c, "interpolation coarse sweep")
        cs.append(c)
    return cs


def coarse_standard(c, w, t_from, t_to, micro):
    """One two-scale step over ``[t_from, t_to]``; returns ``(c_next, segment)``."""
    seg = propagate(c, w, MacroGrid(t_from, t_to, t_to - t_from), micro)
    return seg.c_end, seg


@dataclass
class CostLedger:
    """Micro problem counts observed during a run.

    ``fine_parallel`` adds, per fine sweep, the largest number of micro
    problems on any one interval: the wall time of that sweep on P processes.
    """

    P: int
    N_l: int
    fine_micro: int = 0
    fine_parallel: int = 0
    coarse_micro: int = 0
    iterations: int = 0

    @property
    def serial_equivalent(self):
        return self.fine_parallel + self.coarse_micro

    @property
    def speedup(self):
        return speedup(self.N_l, self.serial_equivalent)

    @property
    def efficiency(self):
        return self.speedup / self.P

    def snapshot(self):
        return CostLedger(self.P, self.N_l, self.fine_micro, self.fine_parallel,
                          self.coarse_micro, self.iterations)


def serial_equivalent_cost(variant, k_par, N_l, P):
    """Serial-equivalent micro problem count of ``k_par`` iterations on ``P`` processes."""
    fine = k_par * -(-N_l // P)
    if variant == "standard":
        return fine + (k_par + 1) * P
    if variant in ("reuse", "interpolation"):
        return fine + P
    raise DomainError(f"unknown variant {variant!r}")


def speedup(N_l, micro_problems):
    return N_l / micro_problems


def optimal_process_count(k_par, N_l, P_max=None):
    """Process count minimising ``k_par * ceil(N_l / P) + P``; ties go to the smaller P."""
    return min(optimal_process_counts(k_par, N_l, P_max))


def optimal_process_counts(k_par, N_l, P_max=None):
    """All process counts attaining the minimal micro-free cost; the ceiling makes ties common."""
    P_max = N_l if P_max is None else P_max
    costs = {P: k_par * -(-N_l // P) + P for P in range(1, P_max + 1)}
    low = min(costs.values())
    return [P for P, c in costs.items() if c == low]


def optimal_process_estimate(k_par, N_l):
    """Minimiser ``sqrt(k_par * N_l)`` of the cost with the ceiling dropped."""
    return math.sqrt(k_par * N_l)


@dataclass
class PararealIterate:
    k: int
    c_at_interfaces: list
    interface_micro_states: list
    fine_segments: list = field(default_factory=list)
    coarse_values: list = field(default_factory=list)
    coarse_path: list = field(default_factory=list)


@dataclass
class IterationRecord:
    k: int
    c_end: float
    error_vs_serial: float
    ledger: CostLedger


@dataclass
class PararealResult:
    config: PararealConfig
    iterate: PararealIterate
    ledger: CostLedger
    history: list
    converged: bool
    reference: object = None

    @property
    def k_par(self):
        return self.ledger.iterations

    @property
    def c_end(self):
        return self.iterate.c_at_interfaces[-1]

    @property
    def error(self):
        return self.history[-1].error_vs_serial

    @property
    def speedup(self):
        return self.ledger.speedup

    @property
    def efficiency(self):
        return self.ledger.efficiency

    def trajectory(self):
        """Fine-grid times and concentrations of the last fine sweep, with corrected interfaces."""
        if not self.iterate.fine_segments:
            return list(self.config.interface_times()), list(self.iterate.c_at_interfaces)
        times, cs = [], []
        for p, seg in enumerate(self.iterate.fine_segments):
            times.extend(seg.times[:-1])
            cs.append(self.iterate.c_at_interfaces[p])
            cs.extend(seg.c_values[1:-1])
        times.append(self.config.interface_times()[-1])
        cs.append(self.iterate.c_at_interfaces[-1])
        return times, cs


class Parareal:
    """Parareal driver bound to one micro propagator.

    The micro propagator must be deterministic and safe for concurrent use.
    """

    def __init__(self, config, micro, w0=None):
        self.config = config
        self.micro = micro
        self.w0 = w0 if w0 is not None else MicroState()
        self.bounds = config.step_bounds()
        self.T = config.interface_times()
        self.table = GrowthTable()
        self.ledger = CostLedger(config.P, config.N_l)
        self._coarse_states = []
        self._gammas = []

    def _grid(self, p):
        return MacroGrid(self.T[p], self.T[p + 1], self.config.dt_fine)

    def initialize(self):
        """Serial coarse two-scale run with one macro step per interval."""
        cfg = self.config
        cs = [cfg.c0]
        states = [self.w0]
        pairs = []
        for p in range(cfg.P):
            c_next, seg = coarse_standard(cs[p], states[p], self.T[p], self.T[p + 1], self.micro)
            self.ledger.coarse_micro += seg.micro_problems
            pairs.extend(seg.pairs())
            cs.append(c_next)
            states.append(seg.end_micro_state)
        self._coarse_states = states[:-1]
        if cfg.variant == "interpolation":
            self.table.extend(pairs)
        return PararealIterate(
            k=0,
            c_at_interfaces=cs,
            interface_micro_states=states[:-1],
            coarse_values=cs[1:],
        )

    def _fine_task(self, args):
        p, c, w = args
        try:
            return propagate(c, w, self._grid(p), self.micro)
        except TempoloopError as exc:
            raise exc.add_context(interval=p)

    def fine_sweep(self, iterate):
        """Fine two-scale runs on all intervals from the current interface values."""
        tasks = [
            (p, iterate.c_at_interfaces[p], iterate.interface_micro_states[p])
            for p in range(self.config.P)
        ]
        if self.config.threads > 1:
            with ThreadPoolExecutor(max_workers=self.config.threads) as pool:
                segments = list(pool.map(self._fine_task, tasks))
        else:
            segments = [self._fine_task(t) for t in tasks]
        counts = [seg.micro_problems for seg in segments]
        self.ledger.fine_micro += sum(counts)
        self.ledger.fine_parallel += max(counts)
        # merged after the sweep, in (p, q) order, whatever the execution order
        for seg in segments:
            if self.config.variant == "interpolation":
                self.table.extend(seg.pairs())
        self._gammas = [seg.gamma_values for seg in segments]
        return segments

    def _coarse(self, p, c):
        """Coarse propagator on interval ``p``: ``(value at T_{p+1}, fine-grid path or None)``."""
        variant = self.config.variant
        if variant == "standard":
            c_next, seg = coarse_standard(c, self._coarse_states[p], self.T[p], self.T[p + 1], self.micro)
            self.ledger.coarse_micro += seg.micro_problems
            return c_next, None
        if variant == "reuse":
            path = coarse_reuse(c, self._gammas[p], self.config.dt_fine)
        else:
            n = self.bounds[p + 1] - self.bounds[p]
            path = coarse_interpolation(c, self.table, n, self.config.dt_fine)
        return path[-1], path

    def parareal_iterate(self, iterate):
        """One parareal iteration: fine sweep, then the sequential correction."""
        P = self.config.P
        segments = self.fine_sweep(iterate)
        old = iterate.c_at_interfaces
        new = [old[0]]
        coarse_values = []
        coarse_path = []
        for p in range(P):
            c_coarse, path = self._coarse(p, new[p])
            if self.config.variant == "standard":
                # same operator as last iteration, so its stored value is reused
                c_coarse_old = iterate.coarse_values[p]
            else:
                # operator changed with the new fine data; re-evaluate (no micro cost)
                c_coarse_old = self._coarse(p, old[p])[0]
            c_next = c_coarse + segments[p].c_end - c_coarse_old
            if c_next >= 1.0:
                raise LumenClosureError(c_next, f"parareal correction at interface p={p + 1}")
            new.append(c_next)
            coarse_values.append(c_coarse)
            if path is not None:
                coarse_path.extend(path[:-1] if p < P - 1 else path)
        # w^{(k+1)}(T_p) is the end state of interval p-1 in this sweep
        states = [self.w0] + [seg.end_micro_state for seg in segments[:-1]]
        self.ledger.iterations += 1
        return PararealIterate(
            k=iterate.k + 1,
            c_at_interfaces=new,
            interface_micro_states=states,
            fine_segments=segments,
            coarse_values=coarse_values,
            coarse_path=coarse_path,
        )

    def run(self, reference=None):
        """Iterate until the stopping criterion on ``c(T_end)`` holds.

        ``reference`` is the serial fine trajectory used for the error
        column; it is computed when not given.
        """
        cfg = self.config
        if reference is None:
            reference = serial_reference(self.micro, cfg.T_end, cfg.dt_fine, cfg.c0, self.w0)
        c_star = reference.c_end

        try:
            it = self.initialize()
        except TempoloopError as exc:
            raise exc.add_context(variant=cfg.variant, P=cfg.P, k=0)
        history = [IterationRecord(0, it.c_at_interfaces[-1],
                                   abs(it.c_at_interfaces[-1] - c_star), self.ledger.snapshot())]
        limit = cfg.fixed_iterations if cfg.fixed_iterations is not None else cfg.max_iterations
        converged = False
        while it.k < limit:
            try:
                nxt = self.parareal_iterate(it)
            except TempoloopError as exc:
                raise exc.add_context(variant=cfg.variant, P=cfg.P, k=it.k + 1)
            change = abs(nxt.c_at_interfaces[-1] - it.c_at_interfaces[-1])
            if cfg.relative_stop:
                change /= abs(nxt.c_at_interfaces[-1])
            it = nxt
            history.append(IterationRecord(it.k, it.c_at_interfaces[-1],
                                           abs(it.c_at_interfaces[-1] - c_star), self.ledger.snapshot()))
            logger.debug("variant=%s P=%d k=%d change=%.3e", cfg.variant, cfg.P, it.k, change)
            if cfg.fixed_iterations is None and change < cfg.eps_par:
                converged = True
                break
        if cfg.fixed_iterations is not None:
            converged = True
        return PararealResult(cfg, it, self.ledger, history, converged, reference)


def initialize(config, micro, w0=None):
    """Coarse initialization; returns ``(iterate, table, ledger)``."""
    driver = Parareal(config, micro, w0)
    return driver.initialize(), driver.table, driver.ledger


def run(config, micro, w0=None, reference=None):
    return Parareal(config, micro, w0).run(reference)
