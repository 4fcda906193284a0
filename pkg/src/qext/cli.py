"""Command-line driver: pick a group and calculus, run suites, emit reports."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .calculus import Calculus
from .qdata import TAUS, NTooSmall, OddSymplectic, group_spec
from .scalar import SYMBOLIC, BadSample, NumericField
from .tensor import dump_tensor
from .verify import SUITES, Context, Report, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
DEFAULT_MAX_SYMBOLIC_N = 4
_TAU_NAME = {"+": "plus", "-": "minus", "0": "zero"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    family: str
    N: int
    sign: str
    mode: str = "symbolic"
    s_sample: Fraction = Fraction(2)
    suites: tuple = ("all",)
    fmt: str = "text"
    dump: Optional[Path] = None
    jobs: int = 1
    timing: bool = True
    perturb: bool = False

    def field(self):
        return SYMBOLIC if self.mode == "symbolic" else NumericField(self.s_sample)

    def selected_suites(self) -> list:
        """Suite names in scheduling order; ``all`` drops the other sign's SR suite."""
        other = "sr_minus" if self.sign == "plus" else "sr_plus"
        if "all" in self.suites:
            return [s for s in SUITES if s != other]
        return [s for s in SUITES if s in self.suites]


def max_symbolic_n() -> int:
    raw = os.environ.get("QEXT_MAX_SYMBOLIC_N")
    if raw is None:
        return DEFAULT_MAX_SYMBOLIC_N
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"QEXT_MAX_SYMBOLIC_N must be an integer, got {raw!r}") from exc


def validate(cfg: RunConfig) -> None:
    try:
        group_spec(cfg.family, cfg.N)
    except (OddSymplectic, NTooSmall, ValueError) as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
    if cfg.mode == "symbolic" and cfg.N > max_symbolic_n():
        raise ConfigError(f"symbolic mode is limited to N <= {max_symbolic_n()} "
                          "(set QEXT_MAX_SYMBOLIC_N to raise it)")
    if cfg.mode == "numeric":
        try:
            NumericField(cfg.s_sample)
        except BadSample as exc:
            raise ConfigError(f"BadSample: {exc}") from exc
    unknown = [s for s in cfg.suites if s != "all" and s not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s): {', '.join(unknown)}")
    if cfg.jobs < 1:
        raise ConfigError("--jobs must be positive")


def run_reports(cfg: RunConfig, ctx: Optional[Context] = None) -> list[Report]:
    """Run the selected suites; reports come back in scheduling order."""
    if ctx is None:
        ctx = Context.build(cfg.family, cfg.N, cfg.sign, cfg.field(), perturb=cfg.perturb)
    names = cfg.selected_suites()
    first = [n for n in names if n != "theorem"]
    done: dict[str, Report] = {}
    if cfg.jobs > 1 and len(first) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = {n: pool.submit(run_suite, n, ctx, {}) for n in first}
            for n in first:
                done[n] = futures[n].result()
    else:
        for n in first:
            done[n] = run_suite(n, ctx, done)
    if "theorem" in names:
        sr = "sr_plus" if cfg.sign == "plus" else "sr_minus"
        if sr not in done:
            done[sr] = run_suite(sr, ctx, done)
        done["theorem"] = run_suite("theorem", ctx, done)
    return [done[n] for n in names]


def to_json(cfg: RunConfig, ctx: Context, reports: Sequence[Report]) -> dict:
    return {
        "group": ctx.qd.spec.short,
        "N": cfg.N,
        "calculus": cfg.sign,
        "mode": cfg.mode,
        "q": ctx.field.fmt(ctx.field.qpow(1)),
        "suites": [r.to_dict(timing=cfg.timing) for r in reports],
    }


def to_text(cfg: RunConfig, ctx: Context, reports: Sequence[Report]) -> str:
    lines = [f"{ctx.qd.spec.short}  calculus={cfg.sign}  mode={cfg.mode}  "
             f"q={ctx.field.fmt(ctx.field.qpow(1))}"]
    for r in reports:
        head = f"[{'PASS' if r.passed else 'FAIL'}] {r.name}"
        if cfg.timing:
            head += f"  ({r.elapsed_ms / 1000:.2f}s)"
        lines.append(head)
        for c in r.checks:
            line = f"    {c.status:7s} {c.name}"
            if c.witness and c.status != "pass":
                line += f"  -- {c.witness}"
            lines.append(line)
    return "\n".join(lines)


def dump(cfg: RunConfig, ctx: Context) -> list[Path]:
    """Write the core matrices as ``<family><N>_<name>.mat`` files."""
    out = Path(cfg.dump)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"IoError: {exc}") from exc
    qd = ctx.qd
    calc: Calculus = ctx.calc
    items = {"rhat": qd.R, "C": qd.C, "K": qd.K, "D": qd.D, "sigma": calc.sigma}
    for t in TAUS:
        items[f"P{_TAU_NAME[t]}"] = qd.P[t]
        items[f"eta_{_TAU_NAME[t]}"] = calc.eta_tau(t)
    for (t, n), L in calc.lambda_blocks.items():
        items[f"Lambda_{_TAU_NAME[t]}_{_TAU_NAME[n]}"] = L
    prefix = f"{cfg.family}{cfg.N}"
    written = []
    for name, T in items.items():
        path = out / f"{prefix}_{name}.mat"
        try:
            dump_tensor(T, path)
        except OSError as exc:
            raise ConfigError(f"IoError: {exc}") from exc
        written.append(path)
    return written


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qext",
        description="Exact verification of the quadratic relations of bicovariant "
                    "calculi on orthogonal and symplectic quantum groups.")
    p.add_argument("--family", choices=("o", "sp"), required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--calculus", choices=("plus", "minus"), default="plus")
    p.add_argument("--mode", choices=("symbolic", "numeric"), default="symbolic")
    p.add_argument("--s", type=_rational, default=Fraction(2),
                   help="sample for s with q = s^2 in numeric mode (default 2)")
    p.add_argument("--suite", action="append", default=None,
                   help=f"suite name or 'all' (repeatable); one of {', '.join(SUITES)}")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--dump", type=Path, default=None, help="directory for matrix dumps")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="omit timings for byte-stable output")
    p.add_argument("--perturb", action="store_true",
                   help="alter one entry of the braid matrix (every suite should fail)")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(family=ns.family, N=ns.N, sign=ns.calculus, mode=ns.mode,
                     s_sample=ns.s, suites=tuple(ns.suite or ["all"]), fmt=ns.format,
                     dump=ns.dump, jobs=ns.jobs, timing=not ns.no_timing, perturb=ns.perturb)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    cfg = config_from_args(ns)
    try:
        validate(cfg)
        ctx = Context.build(cfg.family, cfg.N, cfg.sign, cfg.field(), perturb=cfg.perturb)
        if cfg.dump is not None:
            dump(cfg, ctx)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    reports = run_reports(cfg, ctx)
    if cfg.fmt == "json":
        print(json.dumps(to_json(cfg, ctx, reports), indent=2))
    else:
        print(to_text(cfg, ctx, reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
