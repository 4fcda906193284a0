from __future__ import annotations

import sys
from functools import lru_cache
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from qext.scalar import SYMBOLIC, NumericField  # noqa: E402
from qext.verify import Context, run_suite  # noqa: E402


def field_for(mode: str):
    return SYMBOLIC if mode == "symbolic" else NumericField(2)


@lru_cache(maxsize=None)
def context(family: str, N: int, sign: str = "plus", mode: str = "symbolic",
            perturb: bool = False) -> Context:
    return Context.build(family, N, sign, field_for(mode), perturb=perturb)


@lru_cache(maxsize=None)
def reports(family: str, N: int, sign: str = "plus", mode: str = "symbolic",
            perturb: bool = False) -> dict:
    """Every suite for one configuration, run once per test session."""
    ctx = context(family, N, sign, mode, perturb)
    done: dict = {}
    names = ["rmatrix", "decomposition", "biinvariants", "adjoint",
             "sr_plus" if sign == "plus" else "sr_minus", "theorem"]
    for name in names:
        done[name] = run_suite(name, ctx, done)
    return done


ACCEPTANCE_LINES: list = []


def record_verdict(number: int, label: str, ok: bool, detail: str = "") -> str:
    line = f"CRITERION {number} {'PASS' if ok else 'FAIL'}: {label}"
    if detail:
        line += f" [{detail}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
