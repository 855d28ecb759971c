"""Summary rows and tables in the layout of the paper's comparison tables."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

SUMMARY_COLUMNS = (
    "variant", "P", "k", "error_abs", "mp_fine", "mp_coarse",
    "mp_serial_equivalent", "speedup", "efficiency_pct",
)


def _round_half_up(x, places):
    q = Decimal(1).scaleb(-places)
    return Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP)


def format_speedup(s):
    return str(_round_half_up(s, 1))


def format_efficiency(e):
    """Efficiency as a whole percentage, e.g. ``0.2777`` -> ``"28"``."""
    return str(_round_half_up(e * 100.0, 0))


@dataclass(frozen=True)
class SummaryRow:
    variant: str
    P: int
    k: int
    error_abs: float
    mp_fine: int
    mp_coarse: int
    mp_serial_equivalent: int
    N_l: int

    @property
    def speedup(self):
        return self.N_l / self.mp_serial_equivalent

    @property
    def efficiency(self):
        return self.speedup / self.P

    def as_csv(self):
        return [
            self.variant, self.P, self.k, f"{self.error_abs:.6e}", self.mp_fine,
            self.mp_coarse, self.mp_serial_equivalent,
            format_speedup(self.speedup), format_efficiency(self.efficiency),
        ]


def reference_row(reference):
    n = reference.micro_problems
    return SummaryRow("reference", 1, 0, 0.0, n, 0, n, n)


def rows_from_result(result):
    cfg = result.config
    return [
        SummaryRow(cfg.variant, cfg.P, rec.k, rec.error_vs_serial, rec.ledger.fine_micro,
                   rec.ledger.coarse_micro, rec.ledger.serial_equivalent, cfg.N_l)
        for rec in result.history
    ]


def summary_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for row in rows:
        writer.writerow(row.as_csv())
    return buf.getvalue()


def best_process_counts(results):
    """Process counts attaining the smallest serial-equivalent cost (all ties)."""
    costs = {r.config.P: r.ledger.serial_equivalent for r in results}
    low = min(costs.values())
    return sorted(P for P, c in costs.items() if c == low), low


def sweep_report(results, reference=None):
    """Plain-text tables, one per variant: errors by k and P, then cost rows.

    The cheapest column(s) are marked with ``*``.
    """
    by_variant = {}
    for r in results:
        by_variant.setdefault(r.config.variant, []).append(r)
    out = []
    for variant, rs in by_variant.items():
        rs = sorted(rs, key=lambda r: r.config.P)
        best, _ = best_process_counts(rs)
        k_max = max(r.k_par for r in rs)
        header = ["k"] + [f"P={r.config.P}" + ("*" if r.config.P in best else "") for r in rs]
        if reference is not None:
            header.append("ref.")
        lines = [f"[{variant}]", header]
        for k in range(1, k_max + 1):
            line = [str(k)]
            for r in rs:
                line.append(f"{r.history[k].error_vs_serial:.2e}" if k < len(r.history) else "-")
            if reference is not None:
                line.append(repr(reference.c_end) if k == 1 else "-")
            lines.append(line)
        ref_n = reference.micro_problems if reference is not None else None
        tail = [
            ("# mp", [str(r.ledger.serial_equivalent) for r in rs], str(ref_n)),
            ("speedup", [format_speedup(r.speedup) for r in rs], "1.0"),
            ("efficiency", [format_efficiency(r.efficiency) + "%" for r in rs], "100%"),
        ]
        for name, vals, ref_val in tail:
            lines.append([name] + vals + ([ref_val] if reference is not None else []))
        width = max(len(c) for line in lines[1:] for c in line)
        out.append(lines[0])
        out.extend("  ".join(c.rjust(width) for c in line) for line in lines[1:])
        out.append("")
    return "\n".join(out)
