import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import discrete_periodic_start, fine_cycle_averages, gamma_point

from tempoloop.exceptions import DomainError, LumenClosureError, NonConvergenceError
from tempoloop.growth import GrowthParams, growth_rate
from tempoloop.micro import (
    MicroConfig,
    MicroState,
    SurrogateChannelFlow,
    inflow,
    periodic_average,
    run_cycle,
    wall_shear,
)

GP = GrowthParams(alpha=3e-8, sigma0=400.0)
CFG = MicroConfig()


@pytest.mark.parametrize("tau, expected", [(0.0, 1.0), (0.25, 2.0), (0.75, 0.0)])
def test_inflow_examples(tau, expected):
    assert inflow(tau, CFG) == pytest.approx(expected, abs=1e-15)


@given(st.floats(0, 100))
def test_inflow_periodic_and_nonnegative(tau):
    assert inflow(tau, CFG) >= 0
    assert inflow(tau + 1.0, CFG) == pytest.approx(inflow(tau, CFG), abs=1e-9)


@pytest.mark.parametrize("v, c, expected", [(1.0, 0.0, 1.0), (1.0, 0.5, 4.0), (0.0, 0.9, 0.0)])
def test_wall_shear_examples(v, c, expected):
    assert wall_shear(v, c, CFG) == pytest.approx(expected, rel=1e-15)


def test_wall_shear_closure():
    with pytest.raises(LumenClosureError):
        wall_shear(1.0, 1.0, CFG)
    with pytest.raises(DomainError):
        wall_shear(-1.0, 0.2, CFG)


def test_config_validation():
    assert CFG.N_s == 50
    with pytest.raises(DomainError):
        MicroConfig(delta_tau=0.03)
    with pytest.raises(DomainError):
        MicroConfig(relaxation_rate=0.0)
    with pytest.raises(DomainError):
        MicroConfig(max_cycles=0)
    with pytest.raises(DomainError):
        MicroConfig(forcing="square")


@given(st.floats(-1e6, 1e6), st.floats(0, 1))
def test_state_roundtrip_bit_exact(v, tau):
    w = MicroState(v, tau)
    back = MicroState.from_dict(w.to_dict())
    assert back == w
    assert math.copysign(1, back.v) == math.copysign(1, w.v)


def test_stiff_limit_follows_forcing():
    cfg = MicroConfig(relaxation_rate=1e12)
    w, g = run_cycle(MicroState(inflow(0.0, cfg)), 0.3, cfg, GP)
    forced = [inflow(m * cfg.delta_tau, cfg) for m in range(1, cfg.N_s + 1)]
    expected = math.fsum(growth_rate(wall_shear(v, 0.3, cfg), 0.3, GP) for v in forced) / cfg.N_s
    assert g == pytest.approx(expected, rel=1e-9)
    assert w.v == pytest.approx(forced[-1], abs=1e-9)


def test_constant_forcing_fixed_point():
    cfg = MicroConfig(forcing="constant", v_mean=1.7)
    w, g = run_cycle(MicroState(1.7), 0.2, cfg, GP)
    assert w.v == 1.7
    assert g == pytest.approx(growth_rate(wall_shear(1.7, 0.2, cfg), 0.2, GP), rel=1e-15)
    avg, w2 = periodic_average(MicroState(1.7), 0.2, cfg, GP)
    assert avg.cycles_used == 2
    assert avg.residual == 0.0


def test_cold_cycle_matches_fine_oracle(gold):
    _, g = run_cycle(MicroState(0.0), 0.0, CFG, GP)
    assert g == pytest.approx(gold["run_cycle_gamma_cold"], rel=1e-6)


def test_golden_cold_cycle_reproducible():
    averages, _ = fine_cycle_averages(0.0, 0.0, 1, alpha=3e-8, sigma0=400.0)
    from tempoloop import golden
    assert averages[0] == pytest.approx(golden.load()["run_cycle_gamma_cold"], rel=1e-13)


def test_periodic_average_cold_start(gold):
    avg, w = periodic_average(MicroState(0.0), 0.0, CFG, GP)
    assert avg.cycles_used in (2, 3)
    assert avg.micro_problems_solved == avg.cycles_used
    assert 0 < avg.gamma_bar <= GP.alpha
    assert avg.gamma_bar == pytest.approx(gold["periodic_gamma_c0"], rel=1e-6)


def test_periodic_average_matches_discrete_orbit():
    # exact periodic orbit of the backward Euler recurrence, computed in closed form
    forcing = [inflow(m * CFG.delta_tau, CFG) for m in range(1, CFG.N_s + 1)]
    v0 = discrete_periodic_start(CFG.relaxation_rate, CFG.delta_tau, forcing)
    a = 1.0 / (1.0 + CFG.relaxation_rate * CFG.delta_tau)
    v, rates = v0, []
    for f in forcing:
        v = a * v + (1 - a) * f
        rates.append(gamma_point(v, 0.4, GP.alpha, GP.sigma0))
    exact = math.fsum(rates) / len(rates)
    avg, w = periodic_average(MicroState(v0), 0.4, CFG, GP)
    assert avg.cycles_used == 2
    assert avg.gamma_bar == pytest.approx(exact, rel=1e-13)
    assert w.v == pytest.approx(v0, rel=1e-12)


def test_cycle_changes_contract_like_relaxation():
    # stronger coupling than the defaults so the transient is far above round-off
    gp = GrowthParams(alpha=3e-8, sigma0=2.0)
    micro = SurrogateChannelFlow(CFG, gp)
    w, seq = MicroState(0.0), []
    for _ in range(8):
        w, g = micro.run_cycle(w, 0.0)
        seq.append(g)
    diffs = [seq[i + 1] - seq[i] for i in range(len(seq) - 1)]
    ratios = [diffs[i + 1] / diffs[i] for i in range(len(diffs) - 1)]
    a_n = (1.0 / (1.0 + CFG.relaxation_rate * CFG.delta_tau)) ** CFG.N_s
    assert ratios[-1] == pytest.approx(a_n, rel=1e-3)
    assert 0.5 * math.exp(-2.0) <= ratios[-1] <= 1.5 * math.exp(-2.0)


def test_warm_start_converges_in_two_cycles():
    micro = SurrogateChannelFlow(CFG, GrowthParams(alpha=3e-8, sigma0=2.0))
    first, w = micro.periodic_average(MicroState(0.0), 0.3)
    assert first.cycles_used >= 3
    second, _ = micro.periodic_average(w, 0.3)
    assert second.cycles_used == 2


def test_deterministic():
    a = periodic_average(MicroState(0.0), 0.25, CFG, GP)
    b = periodic_average(MicroState(0.0), 0.25, CFG, GP)
    assert a == b


def test_nonconvergence_reports_concentration():
    cfg = MicroConfig(eps_p=1e-15, max_cycles=3)
    with pytest.raises(NonConvergenceError) as info:
        periodic_average(MicroState(0.0), 0.1, cfg, GrowthParams(alpha=3e-8, sigma0=1.0))
    assert info.value.c_s == 0.1
    assert info.value.residual > 0
    assert "c_s=0.1" in str(info.value)


def test_run_cycle_rejects_closed_lumen():
    with pytest.raises(LumenClosureError):
        run_cycle(MicroState(0.0), 1.0, CFG, GP)
