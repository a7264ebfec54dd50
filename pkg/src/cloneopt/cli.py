"""Command-line entry point: ``cloneopt <command> [options]``.

Every command writes CSV (default) or JSON to stdout or ``--output``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, TextIO

import numpy as np

from .curve_core import CloningProblem, boundary_along_ray, point_from_tau, tau_bounds
from .errors import DomainError, NumericError
from .optimal_cloner import PriorWeights, solve, sweep
from .protocols import (
    cloning_by_discrimination,
    discrimination_by_cloning,
    transition_scan,
    ud_failure,
)
from .quantum_sim import simulate

COMMANDS = ("solve", "sweep", "curve", "ud", "compare", "simulate", "transition")
SEED_ENV = "CLONEOPT_SEED"
# parameters echoed in JSON output, per command
PARAMS = {
    "solve": ("s", "m", "n", "eta1"),
    "sweep": ("s", "m", "n", "points"),
    "curve": ("s", "m", "n", "alpha", "points"),
    "ud": ("s", "m", "eta1"),
    "compare": ("s", "m", "n", "eta1"),
    "simulate": ("s", "m", "n", "eta1", "trials", "seed"),
    "transition": ("s", "m", "n_values", "fd_step"),
}


@dataclass
class RunConfig:
    command: str
    s: float
    m: int = 1
    n: int | None = None
    eta1: float = 0.5
    alpha: float = 1.0
    points: int = 200
    trials: int = 1_000_000
    seed: int = 42
    fd_step: float = 1e-4
    n_values: list[int] = field(default_factory=lambda: [3, 5, 10, 20])
    workers: int = 1
    format: str = "csv"
    output: str | None = None

    def problem(self) -> CloningProblem:
        if self.n is None:
            raise DomainError(f"command {self.command!r} needs --n")
        return CloningProblem(self.s, self.m, self.n)

    def priors(self) -> PriorWeights:
        return PriorWeights.from_eta1(self.eta1)


def _solve(cfg: RunConfig) -> dict[str, Any]:
    sol = solve(cfg.problem(), cfg.priors())
    return asdict(sol)


def _sweep(cfg: RunConfig) -> list[dict[str, Any]]:
    problem = cfg.problem()
    return [
        {"eta1": eta1, "q_min": q, "q_ud": ud_failure(problem.s, problem.m, eta1).q_ud}
        for eta1, q in sweep(problem, cfg.points)
    ]


def _curve(cfg: RunConfig) -> list[dict[str, Any]]:
    problem = cfg.problem()
    if cfg.points < 2:
        raise DomainError("--points must be at least 2")
    rows: list[dict[str, Any]] = []
    if cfg.alpha == 1.0 and problem.s > 0.0:
        _, tau_minus1 = tau_bounds(problem)
        lower = [point_from_tau(problem, float(tau)) for tau in np.linspace(tau_minus1, 0.0, cfg.points)]
        for pt in reversed(lower[1:]):
            rows.append({"t": pt.t, "q1": pt.q2, "q2": pt.q1})
        rows.extend({"t": pt.t, "q1": pt.q1, "q2": pt.q2} for pt in lower)
        return rows
    angles = np.linspace(0.0, 0.5 * math.pi, cfg.points)
    q1, q2 = boundary_along_ray(problem, cfg.alpha, angles)
    for phi, a, b in zip(angles, q1, q2):
        rows.append({"t": float(phi / (0.5 * math.pi)), "q1": float(a), "q2": float(b)})
    return rows


def _ud(cfg: RunConfig) -> dict[str, Any]:
    res = ud_failure(cfg.s, cfg.m, cfg.priors())
    return {"q_ud": res.q_ud, "regime": res.regime.value}


def _compare(cfg: RunConfig) -> dict[str, Any]:
    problem, priors = cfg.problem(), cfg.priors()
    q_min = solve(problem, priors).q_min
    cbd = cloning_by_discrimination(problem, priors)
    dbc = discrimination_by_cloning(problem, priors)
    return {
        "q_min": q_min,
        "q_ud": cbd.total,
        "cbd_total": cbd.total,
        "dbc_q_cloning": dbc.q_cloning,
        "dbc_q_second": dbc.q_second,
        "dbc_total": dbc.total,
        "gap_ud": cbd.total - q_min,
        "gap_dbc": dbc.total - cbd.total,
    }


def _simulate(cfg: RunConfig) -> dict[str, Any]:
    problem, priors = cfg.problem(), cfg.priors()
    sol = solve(problem, priors)
    tally = simulate(problem, priors, (sol.q1, sol.q2), cfg.trials, cfg.seed, workers=cfg.workers)
    sigma = math.sqrt(sol.q_min * (1.0 - sol.q_min) / cfg.trials)
    rec = asdict(tally)
    f1, f2 = rec.pop("failures_by_state")
    n1, n2 = rec.pop("trials_by_state")
    rec.update(failures_1=f1, failures_2=f2, trials_1=n1, trials_2=n2)
    rec.update(q_analytic=sol.q_min, sigma=sigma)
    return rec


def _transition(cfg: RunConfig) -> list[dict[str, Any]]:
    scan = transition_scan(cfg.s, cfg.m, cfg.n_values, cfg.fd_step)
    return [
        {
            "n": n,
            "eta_star": scan.eta_star,
            "peak_d2": peak,
            "jump_limit": scan.jump_limit,
            "d2_projective": scan.d2_projective,
            "d2_generalized": scan.d2_generalized,
        }
        for n, peak in zip(scan.n_values, scan.peak_d2)
    ]


HANDLERS = {
    "solve": _solve,
    "sweep": _sweep,
    "curve": _curve,
    "ud": _ud,
    "compare": _compare,
    "simulate": _simulate,
    "transition": _transition,
}


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return "%.15g" % value
    return str(value)


def write_result(cfg: RunConfig, result, stream: TextIO) -> None:
    rows = result if isinstance(result, list) else [result]
    if cfg.format == "json":
        params = {k: getattr(cfg, k) for k in PARAMS[cfg.command]}
        doc: dict[str, Any] = {"command": cfg.command, "params": params}
        if isinstance(result, list):
            doc["rows"] = rows
        else:
            doc["result"] = result
        json.dump(doc, stream, ensure_ascii=False)
        stream.write("\n")
        return
    writer = csv.writer(stream, lineterminator="\n")
    if rows:
        writer.writerow(list(rows[0]))
    for row in rows:
        writer.writerow([_fmt(v) for v in row.values()])


def run(cfg: RunConfig, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        result = HANDLERS[cfg.command](cfg)
    except DomainError as exc:
        print(f"cloneopt {cfg.command}: {exc}", file=stderr)
        return 2
    except NumericError as exc:
        print(f"cloneopt {cfg.command}: numeric failure: {exc}", file=stderr)
        return 3
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            write_result(cfg, result, fh)
    else:
        write_result(cfg, result, stdout)
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloneopt",
        description="Optimal probabilistic cloning of two pure states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--s", type=float, required=True, help="overlap of the two states")
    common.add_argument("--m", type=int, default=1, help="input copies")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", default=None, help="output file (default stdout)")

    def add(name: str, help: str, need_n: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help)
        p.add_argument("--n", type=int, required=need_n, help="output clones")
        return p

    p = add("solve", "optimal operating point for one prior")
    p.add_argument("--eta1", type=float, required=True)

    p = add("sweep", "minimum and UD failure rates against eta1 on [0, 1/2]")
    p.add_argument("--points", type=int, default=200)

    p = add("curve", "unitarity curve for a flag overlap")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--points", type=int, default=200)

    p = add("ud", "optimal unambiguous discrimination", need_n=False)
    p.add_argument("--eta1", type=float, required=True)

    p = add("compare", "cloning against both composite protocols")
    p.add_argument("--eta1", type=float, required=True)

    p = add("simulate", "Monte Carlo run of the explicit unitary")
    p.add_argument("--eta1", type=float, required=True)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)

    p = add("transition", "curvature of the minimum failure rate near the UD regime change", need_n=False)
    p.add_argument("--n-values", type=_int_list, default=[3, 5, 10, 20])
    p.add_argument("--fd-step", type=float, default=1e-4)
    return parser


def parse_config(argv: list[str] | None = None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None and args["command"] == "simulate":
        args["seed"] = int(env_seed)
    return RunConfig(**{k: v for k, v in args.items() if v is not None or k == "n"})


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except ValueError as exc:
        print(f"cloneopt: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
