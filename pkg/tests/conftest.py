import csv
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("stress", max_examples=2000, deadline=None)

DATA = Path(__file__).parent / "data"

_acceptance_lines = []


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line per acceptance criterion."""

    def record(label, passed, detail=""):
        _acceptance_lines.append(f"[{'PASS' if passed else 'FAIL'}] {label}" + (f": {detail}" if detail else ""))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def load_table1():
    with open(DATA / "table1.csv", newline="") as fh:
        rows = []
        for row in csv.DictReader(fh):
            rows.append(
                {
                    "alpha": float(row["alpha"]),
                    "m": int(row["m"]),
                    "p_star": row["p_star"],
                    "fixed_point_iters": None if row["fixed_point_iters"] == "FAIL" else int(row["fixed_point_iters"]),
                    "newton_iters": int(row["newton_iters"]),
                }
            )
        return rows


@pytest.fixture(scope="session")
def table1():
    return load_table1()
