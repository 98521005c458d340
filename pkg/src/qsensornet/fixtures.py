"""
Stored regression values for curves that have no closed form.

File format: CSV with header ``scenario,theta,name,value``. Values carry 15
significant digits; theta is written in shortest round-trip form so the
check recomputes at bit-identical angles. ``QSENSORNET_FIXTURE_PATH`` overrides
the packaged file.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from pathlib import Path

from .scenarios import ScenarioId, grouped_multifire_product, theta_grid

ENV_VAR = "QSENSORNET_FIXTURE_PATH"
DEFAULT_PATH = Path(__file__).parent / "data" / "regression_values.csv"
HEADER = ("scenario", "theta", "name", "value")


def fmt(x: float) -> str:
    return format(float(x), ".15g")


def fixture_path() -> Path:
    override = os.environ.get(ENV_VAR)
    return Path(override) if override else DEFAULT_PATH


@dataclass(frozen=True)
class FixtureRow:
    scenario: str
    theta: str
    name: str
    value: str

    def as_tuple(self) -> tuple[str, str, str, str]:
        return (self.scenario, self.theta, self.name, self.value)


def generate_rows(steps: int = 181) -> list[FixtureRow]:
    """Full-space Helstrom ps for the product-input grouped problem."""
    sid = ScenarioId.GROUPED_MULTIFIRE_PRODUCT.value
    return [
        FixtureRow(sid, repr(float(t)), "ps", fmt(grouped_multifire_product(float(t)).numeric["ps"]))
        for t in theta_grid(steps)
    ]


def render(rows: list[FixtureRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    writer.writerows(r.as_tuple() for r in rows)
    return buf.getvalue()


def write_fixture(path: str | Path | None = None, steps: int = 181) -> Path:
    path = Path(path) if path is not None else fixture_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(generate_rows(steps)), encoding="utf-8", newline="\n")
    return path


def load_fixture(path: str | Path | None = None) -> list[FixtureRow]:
    path = Path(path) if path is not None else fixture_path()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != HEADER:
            raise ValueError(f"unexpected fixture header {header}")
        return [FixtureRow(*row) for row in reader if row]


def check_fixture(path: str | Path | None = None) -> list[tuple[FixtureRow, str]]:
    """Recompute every stored row; returns (row, recomputed value) for each mismatch.

    Comparison is on the 15-digit strings, so any drift beyond the last
    stored digit is reported.
    """
    mismatches = []
    for row in load_fixture(path):
        sid = ScenarioId(row.scenario)
        if sid is not ScenarioId.GROUPED_MULTIFIRE_PRODUCT:
            raise ValueError(f"no regression generator for {sid.value}")
        got = fmt(grouped_multifire_product(float(row.theta)).numeric[row.name])
        if got != row.value:
            mismatches.append((row, got))
    return mismatches
