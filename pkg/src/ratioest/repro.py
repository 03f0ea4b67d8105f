"""Command listings that reproduce each published table and the Monte Carlo check."""

from __future__ import annotations

from .params import ParameterError

TARGETS = ("table1", "table2", "table3", "mc_check")


def emit_repro_script(target: str) -> str:
    """Commands, one per line, to run from the repository root after ``pip install -e .``."""
    if target.startswith("table") and target in TARGETS:
        k = target[-1]
        return (
            f"ratioest generate --config configs/table{k}.json --format markdown --out table{k}.md\n"
            f"ratioest generate --config configs/table{k}.json --out table{k}.csv\n"
            f"ratioest verify --config configs/table{k}.json\n"
        )
    if target == "mc_check":
        return "ratioest mc-check --config configs/mc-check.json --threads 4\n"
    raise ParameterError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
