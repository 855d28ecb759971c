"""Regenerate src/tempoloop/data/golden.txt.

Micro values come from the independent fine-step oracle in tests/oracles.py;
the serial end value is produced by the two-scale integrator itself and
cross-checked against a run with half the macro step.
"""
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import SECONDS_PER_DAY, fine_cycle_averages  # noqa: E402

from tempoloop import golden  # noqa: E402
from tempoloop.config import ExperimentConfig  # noqa: E402
from tempoloop.twoscale import serial_reference  # noqa: E402


def main():
    cfg = ExperimentConfig()
    kw = dict(alpha=cfg.alpha_per_second, sigma0=cfg.sigma0, lam=cfg.relaxation_rate_per_second,
              v_mean=cfg.v_mean, sigma_scale=cfg.sigma_scale)
    cycles, _ = fine_cycle_averages(0.0, 0.0, 50, **kw)
    micro = cfg.micro()
    ref = serial_reference(micro, cfg.T_end_days, cfg.dt_fine_days)
    half = serial_reference(micro, cfg.T_end_days, cfg.dt_fine_days / 2)
    diff = abs(ref.c_end - half.c_end)
    assert 0 < diff < 1e-2, diff
    values = {
        "run_cycle_gamma_cold": cycles[0],
        "periodic_gamma_c0": cycles[-1],
        "coarse_standard_c0_30d": 30.0 * SECONDS_PER_DAY * cycles[-1],
        "serial_c_end": ref.c_end,
        "serial_c_end_half_dt": half.c_end,
    }
    header = [
        "defaults: alpha=3e-8 1/s, sigma0=400, lambda=2 1/s, delta_tau=0.02 s, dt=0.3 d, T_end=300 d",
        "micro values: explicit Euler oracle, step 1e-5 s; serial values: two-scale integrator",
    ]
    out = ROOT / "src" / "tempoloop" / "data" / golden.GOLDEN_FILE
    out.write_text(golden.render(values, header))
    print(out.read_text())


if __name__ == "__main__":
    main()
