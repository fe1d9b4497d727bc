"""Command-line front end.

Every command prints one rectangular table, as CSV (header row first) or as
a JSON list of objects with the same field names.  Monte Carlo quantities
carry 6 significant digits, analytic ones 17.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, exact, sim, stats

# (n, replicates)
TABLE1_ROWS = [
    (10, 100_000),
    (100, 100_000),
    (1_000, 10_000),
    (10_000, 10_000),
    (100_000, 10_000),
    (150_000, 10_000),
    (200_000, 1_000),
    (250_000, 1_000),
    (500_000, 1_000),
    (1_000_000, 300),
]

# (n, replicates, ell, m)
TABLE2_ROWS = [
    (100, 100_000, 0, 1),
    (100, 100_000, 0, 2),
    (100, 100_000, 0, 3),
    (100, 100_000, 5, 0),
    (100, 100_000, 10, 0),
    (100, 100_000, 25, 0),
    (1_000, 10_000, 0, 1),
    (1_000, 10_000, 0, 2),
    (1_000, 10_000, 0, 3),
    (1_000, 10_000, 10, 0),
    (1_000, 10_000, 50, 0),
    (1_000, 10_000, 100, 0),
    (10_000, 1_000, 0, 1),
    (10_000, 1_000, 0, 3),
    (10_000, 1_000, 0, 5),
    (10_000, 1_000, 10, 0),
    (10_000, 1_000, 100, 0),
    (10_000, 1_000, 1_000, 0),
    (100_000, 100, 0, 1),
    (100_000, 100, 0, 2),
    (100_000, 100, 0, 3),
    (100_000, 100, 0, 5),
    (100_000, 100, 100, 0),
    (100_000, 100, 1_000, 0),
    (100_000, 100, 10_000, 0),
]

COMMANDS = ("simulate", "exact", "approx", "moments", "multiplicity", "table1", "table2", "compare")
MULTIPLICITY_U = (0.0, 0.25, 0.5, 0.75)


@dataclass
class RunConfig:
    command: str
    n: int = 1000
    m: int = 0
    ell: int = 0
    reps: int | None = None
    K: int = 1
    seed: int = 0
    format: str = "csv"
    out: str | None = None
    rows: list[int] | None = None
    mode: str = "discrete"
    summary: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.n < 1 or self.m < 0 or self.ell < 0:
            raise ValueError("n must be positive, m and ell nonnegative")
        if self.n <= self.ell:
            raise ValueError(f"need n > ell, got n={self.n}, ell={self.ell}")
        if self.reps is not None and self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")


@dataclass
class Table:
    """Columns with a kind each: ``int``, ``str``, ``mc`` (6 digits) or ``exact`` (17 digits)."""

    columns: list[tuple[str, str]]
    rows: list[list] = field(default_factory=list)
    kinds: list[dict] = field(default_factory=list)

    def add(self, *values, kinds: dict | None = None) -> None:
        """Append a row; ``kinds`` overrides column kinds for this row only."""
        self.rows.append(list(values))
        self.kinds.append(kinds or {})

    def _row_kinds(self, i: int) -> list[str]:
        return [self.kinds[i].get(name, kind) for name, kind in self.columns]

    def _cell(self, kind: str, value) -> str:
        if value is None or value == "":
            return ""
        if kind == "int":
            return str(int(value))
        if kind == "str":
            return str(value)
        digits = 6 if kind == "mc" else 17
        return format(float(value), f".{digits}g")

    def formatted(self) -> list[list[str]]:
        return [[self._cell(k, v) for k, v in zip(self._row_kinds(i), row)] for i, row in enumerate(self.rows)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(name for name, _ in self.columns) + "\n")
        for row in self.formatted():
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        records = []
        for i, row in enumerate(self.formatted()):
            rec = {}
            for (name, _), kind, cell in zip(self.columns, self._row_kinds(i), row):
                if cell == "":
                    rec[name] = None
                elif kind == "int":
                    rec[name] = int(cell)
                elif kind == "str":
                    rec[name] = cell
                else:
                    rec[name] = float(cell)
            records.append(rec)
        return json.dumps(records, indent=1) + "\n"


def _reps(cfg: RunConfig, default: int) -> int:
    return cfg.reps if cfg.reps is not None else default


def _simulate(cfg: RunConfig) -> Table:
    params = sim.ModelParams(cfg.n, cfg.m, cfg.ell)
    reps = _reps(cfg, 1)
    batch = sim.simulate(params, K=cfg.K, reps=reps, seed=cfg.seed, mode=cfg.mode)
    if not cfg.summary:
        tau_kind = "int" if cfg.mode == "discrete" else "exact"
        cols = [("replicate", "int"), ("tau", tau_kind)]
        cols += [(f"M{i + 1}", "int") for i in range(cfg.K)]
        cols += [("Q", "int"), ("n_effective", "int")]
        table = Table(cols)
        for i in range(reps):
            table.add(i, batch.tau[i], *batch.top_counts[i], batch.q_multiplicity[i], batch.n_effective[i])
        return table
    table = Table([("statistic", "str"), ("index", "int"), ("value", "mc")])
    maxima = batch.maxima
    table.add("reps", None, reps)
    if reps >= 2:
        mean, sem = stats.mc_summary(maxima)
        table.add("mean_M", None, mean)
        table.add("std_of_mean_M", None, sem)
        tmean, tsem = stats.mc_summary(batch.tau)
        table.add("mean_tau", None, tmean)
        table.add("std_of_mean_tau", None, tsem)
    offset = asymptotics.constants(cfg.n, cfg.m).b_n if cfg.n >= 3 else 0
    table.add("b_n", None, offset)
    pmf = stats.empirical_pmf(maxima - offset)
    for k, p in zip(pmf.support, pmf.probs):
        table.add("pmf_M_minus_b", k, p)
    qpmf = stats.empirical_pmf(batch.q_multiplicity)
    for j, p in zip(qpmf.support, qpmf.probs):
        table.add("q_hist", j, p)
    return table


def _exact(cfg: RunConfig) -> Table:
    params = sim.ModelParams(cfg.n, cfg.m, cfg.ell)
    if cfg.n <= cfg.ell + 1:
        raise ValueError("the exact law needs n > ell + 1")
    pmf = exact.stopped_max_pmf(params)
    table = Table([("statistic", "str"), ("k", "int"), ("value", "exact")])
    table.add("mean", None, pmf.mean())
    for k, p in zip(pmf.support, pmf.probs):
        table.add("pmf", k, p)
    return table


def _approx(cfg: RunConfig) -> Table:
    consts = asymptotics.constants(cfg.n, cfg.m)
    table = Table([("statistic", "str"), ("index", "int"), ("value", "exact")])
    table.add("b_tilde_n", None, consts.b_tilde_n)
    table.add("b_n", None, consts.b_n)
    table.add("c_n", None, consts.c_n)
    table.add("mean_Z", None, asymptotics.mean_zn(1, cfg.ell, consts.c_n))
    pmf = asymptotics.zn_pmf(consts, cfg.ell)
    for k, p in zip(pmf.support, pmf.probs):
        table.add("pmf_Z", k, p)
    reps = _reps(cfg, 10_000)
    draws = asymptotics.sample_topk_approx(consts, cfg.ell, cfg.K, seed=cfg.seed, size=reps)
    for i in range(cfg.K):
        col = consts.b_n + draws[:, i]
        table.add("sample_mean_M", i + 1, col.mean(), kinds={"value": "mc"})
        if reps >= 2:
            table.add("sample_std_of_mean_M", i + 1, stats.mc_summary(col)[1], kinds={"value": "mc"})
    return table


def _moments(cfg: RunConfig) -> Table:
    table = Table([("j", "int"), ("expected_M", "exact")])
    for j in range(1, cfg.K + 1):
        table.add(j, asymptotics.expected_mn(cfg.n, j, cfg.m, cfg.ell))
    return table


def _multiplicity(cfg: RunConfig) -> Table:
    rows = []
    for j in range(1, cfg.K + 1):
        for u in MULTIPLICITY_U:
            f = asymptotics.multiplicity_pmf(j, cfg.ell, u)
            d = asymptotics.multiplicity_pmf_direct(j, cfg.ell, u)
            rows.append((j, u, f, d, abs(f - d)))
    worst = max(r[4] for r in rows)
    table = Table(
        [("j", "int"), ("u", "exact"), ("fourier", "exact"), ("direct", "exact"), ("abs_diff", "exact"), ("max_abs_diff", "exact")]
    )
    for r in rows:
        table.add(*r, worst)
    return table


def _select(rows: list, wanted: list[int] | None) -> list:
    if not wanted:
        return rows
    bad = [i for i in wanted if not 1 <= i <= len(rows)]
    if bad:
        raise ValueError(f"row numbers out of range 1..{len(rows)}: {bad}")
    return [rows[i - 1] for i in wanted]


def _table_row(cfg: RunConfig, n: int, reps: int, ell: int, m: int, index: int) -> tuple[float, float, float]:
    e_n = asymptotics.expected_mn(n, 1, m, ell)
    batch = sim.simulate(sim.ModelParams(n, m, ell), K=1, reps=reps, seed=cfg.seed, first_replicate=index * 10**9)
    mean, sem = stats.mc_summary(batch.maxima)
    return e_n, mean, sem


def _table1(cfg: RunConfig) -> Table:
    table = Table([("n", "int"), ("MC", "int"), ("E_n", "exact"), ("mean", "mc"), ("std_of_mean", "mc")])
    _select(TABLE1_ROWS, cfg.rows)
    for idx, (n, reps) in enumerate(TABLE1_ROWS):
        if cfg.rows and idx + 1 not in cfg.rows:
            continue
        reps = _reps(cfg, reps)
        table.add(n, reps, *_table_row(cfg, n, reps, 0, 0, idx))
    return table


def _table2(cfg: RunConfig) -> Table:
    table = Table(
        [("n", "int"), ("MC", "int"), ("ell", "int"), ("m", "int"), ("E_n", "exact"), ("mean", "mc"), ("std_of_mean", "mc")]
    )
    _select(TABLE2_ROWS, cfg.rows)
    for idx, (n, reps, ell, m) in enumerate(TABLE2_ROWS):
        if cfg.rows and idx + 1 not in cfg.rows:
            continue
        reps = _reps(cfg, reps)
        table.add(n, reps, ell, m, *_table_row(cfg, n, reps, ell, m, idx))
    return table


def _compare(cfg: RunConfig) -> Table:
    params = sim.ModelParams(cfg.n, cfg.m, cfg.ell)
    consts = asymptotics.constants(cfg.n, cfg.m)
    reps = _reps(cfg, 10_000)
    batch = sim.simulate(params, K=1, reps=reps, seed=cfg.seed)
    emp = stats.empirical_pmf(batch.maxima - consts.b_n)
    zn = asymptotics.zn_pmf(consts, cfg.ell)
    ex = exact.stopped_max_pmf(params).shift(-consts.b_n)
    table = Table([("statistic", "str"), ("value", "mc")])
    table.add("reps", reps)
    table.add("tv_empirical_zn", stats.tv_distance(emp, zn))
    table.add("tv_empirical_zn_error_bar", stats.tv_noise(len(emp.probs), reps))
    table.add("tv_empirical_exact", stats.tv_distance(emp, ex))
    table.add("tv_empirical_exact_error_bar", stats.tv_noise(len(emp.probs), reps))
    table.add("tv_exact_zn", stats.tv_distance(ex, zn))
    return table


_HANDLERS = {
    "simulate": _simulate,
    "exact": _exact,
    "approx": _approx,
    "moments": _moments,
    "multiplicity": _multiplicity,
    "table1": _table1,
    "table2": _table2,
    "compare": _compare,
}


def run(cfg: RunConfig) -> str:
    """Execute one command and return the formatted output."""
    table = _HANDLERS[cfg.command](cfg)
    return table.to_csv() if cfg.format == "csv" else table.to_json()


def _row_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("--rows expects comma-separated row numbers") from None


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get("OCC_SEED")
    default_seed = int(env_seed) if env_seed not in (None, "") else 0
    parser = argparse.ArgumentParser(
        prog="stopped-occupancy",
        description="Stopped occupancy scheme: simulation, exact and asymptotic laws of the stopped maximum.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "simulate the stopped scheme (per replicate, or --summary)",
        "exact": "exact law of the stopped maximum by quadrature",
        "approx": "approximating law of M_n - b_n and top-K approximation samples",
        "moments": "asymptotic means of the j-th largest count for j = 1..K",
        "multiplicity": "limiting multiplicity law, Fourier and direct routes",
        "table1": "expected vs simulated maxima for m = ell = 0",
        "table2": "expected vs simulated maxima for several (ell, m)",
        "compare": "total variation between simulation, exact law and approximation",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--n", type=int, default=1000, help="number of boxes")
        p.add_argument("--m", type=int, default=0, help="ball threshold")
        p.add_argument("--ell", type=int, default=0, help="boxes allowed to stay at or below m")
        p.add_argument("--reps", type=int, default=None, help="Monte Carlo replicates")
        p.add_argument("--K", type=int, default=1, help="number of top counts, or of moments")
        p.add_argument("--seed", type=int, default=default_seed, help="RNG seed (default: $OCC_SEED or 0)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        if name in ("table1", "table2"):
            p.add_argument("--rows", type=_row_list, default=None, help="1-based row numbers, e.g. 1,3,4")
        if name == "simulate":
            p.add_argument("--mode", choices=("discrete", "poissonized", "bipoissonized"), default="discrete")
            p.add_argument("--summary", action="store_true", help="aggregate instead of one row per replicate")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(**vars(args))
    except ValueError as exc:
        parser.error(str(exc))
    try:
        text = run(cfg)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"stopped-occupancy {cfg.command}: error: {exc}", file=sys.stderr)
        return 1
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0
