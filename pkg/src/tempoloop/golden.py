"""Stored golden values (plain text, 15 significant digits)."""
from __future__ import annotations

from importlib import resources

GOLDEN_FILE = "golden.txt"


def parse(text):
    values = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, value = line.split()
        values[name] = float(value)
    return values


def load():
    return parse(resources.files("tempoloop.data").joinpath(GOLDEN_FILE).read_text())


def format_value(x):
    return f"{x:.14e}"


def render(values, header=()):
    lines = [f"# {h}" for h in header]
    lines += [f"{name} {format_value(v)}" for name, v in values.items()]
    return "\n".join(lines) + "\n"
