"""Multistart experiment driver.

Reproduces the benchmark protocol: a grid of constant initial controls
times mesh resolutions for the obstacle problem (or seeded random starts
for the analytic suite), one solver run each, exported as

    front.csv        one row per run (final objective values, diagnostics)
    trace_<id>.csv   per-iteration rows of one run
    field_<id>.csv   final control/state/obstacle per node (obstacle only)
    summary.json     config echo plus per-run statuses

Runs are dispatched to a process pool; all solver inputs are fixed up
front from the seed, so results are reproducible for a given config (wall
times excepted).  Config comes from an optional JSON file with the same
keys as the flags; flags override the file.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import sys
import time
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .problems import (
    ANALYTIC_NAMES,
    ObstacleBicriteria,
    analytic_problem,
    field_columns,
    make_obstacle_problem,
)
from .solver import RunRecord, SolverConfig, solve

DESK_H_MAX = (0.4, 0.2)
DESK_U0 = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0)


@dataclass
class ExperimentConfig:
    problem: str = "obstacle:constant"
    h_max: tuple[float, ...] = DESK_H_MAX
    u0: tuple[float, ...] = DESK_U0
    n_starts: int = 5
    start_low: float = -5.0
    start_high: float = 5.0
    starts: list[list[float]] | None = None
    eps_bar: float = 1e-4
    delta_bar: float = 1e-4
    c: float = 0.1
    t0: float = 1.0
    max_iters: int = 10_000
    schedule: str = "constant"
    scaling_C: float = 1.5e-2
    out_dir: str = "results"
    seed: int = 0
    jobs: int = 1

    def validate(self):
        if self.problem.startswith("analytic:"):
            name = self.problem.split(":", 1)[1]
            if name not in ANALYTIC_NAMES:
                raise ValueError(
                    f"unknown analytic problem {name!r}; choose from {ANALYTIC_NAMES}")
        elif self.problem.startswith("obstacle:"):
            kind = self.problem.split(":", 1)[1]
            if kind not in ("constant", "piecewise"):
                raise ValueError(f"unknown obstacle kind {kind!r}")
            if not self.h_max or any(h <= 0 for h in self.h_max):
                raise ValueError("h_max values must be positive")
            if not self.u0:
                raise ValueError("u0 list must be nonempty")
        else:
            raise ValueError(
                f"problem must be analytic:<name> or obstacle:<kind>, got {self.problem!r}")
        for name in ("eps_bar", "delta_bar", "c", "t0", "scaling_C"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1 or self.jobs < 1 or self.n_starts < 1:
            raise ValueError("max_iters, jobs and n_starts must be >= 1")

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            eps_bar=self.eps_bar, delta_bar=self.delta_bar, c=self.c,
            t0=self.t0, max_outer_iters=self.max_iters, schedule=self.schedule,
        )


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and not np.isfinite(x)):
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _task_list(config: ExperimentConfig) -> list[dict]:
    """Fully determined run descriptions (starts drawn here, from the seed)."""
    tasks = []
    if config.problem.startswith("obstacle:"):
        for h in config.h_max:
            for u0 in config.u0:
                label = f"u{u0:g}"
                tasks.append(dict(
                    problem=config.problem, h_max=h, start_label=label,
                    u0=float(u0), start=None,
                ))
    else:
        name = config.problem.split(":", 1)[1]
        dim = analytic_problem(name).space.dim
        if config.starts is not None:
            starts = [np.asarray(s, dtype=float) for s in config.starts]
        else:
            rng = np.random.default_rng(config.seed)
            starts = [rng.uniform(config.start_low, config.start_high, dim)
                      for _ in range(config.n_starts)]
        for i, s in enumerate(starts):
            if len(s) != dim:
                raise ValueError(f"start #{i} has length {len(s)}, expected {dim}")
            tasks.append(dict(
                problem=config.problem, h_max=None, start_label=f"s{i:02d}",
                u0=None, start=s.tolist(),
            ))
    for t in tasks:
        h = t["h_max"]
        hpart = f"_h{h:g}" if h is not None else ""
        slug = t["problem"].replace(":", "-")
        t["run_id"] = f"{slug}{hpart}_{t['start_label']}"
    return tasks


def _run_one(task: dict, config_dict: dict) -> dict:
    """Execute one run and write its trace (and field) files.

    Returns a plain summary row; never raises, so one bad run cannot spoil
    the batch.
    """
    config = ExperimentConfig(**config_dict)
    out_dir = Path(config.out_dir)
    row = dict(task)
    try:
        if task["problem"].startswith("obstacle:"):
            kind = task["problem"].split(":", 1)[1]
            cp = make_obstacle_problem(task["h_max"], obstacle=kind,
                                       C=config.scaling_C)
            problem = ObstacleBicriteria(cp)
            x0 = problem.space.primal(
                np.full(cp.mesh.num_nodes, task["u0"]))
        else:
            problem = analytic_problem(task["problem"].split(":", 1)[1])
            x0 = problem.space.primal(np.asarray(task["start"]))

        record = solve(x0, config.solver_config(), problem)
        _write_trace(out_dir / f"trace_{task['run_id']}.csv", record)
        if task["problem"].startswith("obstacle:"):
            state = problem.state_at(record.x_final)
            _write_field(out_dir / f"field_{task['run_id']}.csv",
                         field_columns(cp, record.x_final, state))
        row.update(
            status=record.status.value,
            iters=record.iterations,
            wall_ms=int(round(record.wall_time_s * 1000)),
            max_xi_set=record.max_xi_set,
            J1=float(record.f_final[0]),
            J2=float(record.f_final[1]) if problem.k > 1 else None,
        )
    except Exception:
        row.update(status="Error", iters=None, wall_ms=None, max_xi_set=None,
                   J1=None, J2=None, error=traceback.format_exc(limit=20))
    return row


def _write_trace(path: Path, record: RunRecord) -> None:
    k = len(record.rows[0].f) if record.rows else len(record.f_final)
    header = (["iter"] + [f"f{i + 1}" for i in range(k)] +
              ["v_norm", "step", "step_kind", "xi_set_size",
               "func_evals", "subgrad_evals", "eps_j", "delta_j"])
    rows = [
        [r.j, *[float(v) for v in r.f], r.v_norm, r.step, r.step_kind.value,
         r.xi_set_size, r.func_evals, r.subgrad_evals, r.eps_j, r.delta_j]
        for r in record.rows
    ]
    _write_csv(path, header, rows)


def _write_field(path: Path, cols: dict) -> None:
    header = ["node_id", "x1", "x2", "u", "y", "psi", "active"]
    n = len(cols["node_id"])
    rows = [[int(cols["node_id"][i]), float(cols["x1"][i]), float(cols["x2"][i]),
             float(cols["u"][i]), float(cols["y"][i]), float(cols["psi"][i]),
             int(cols["active"][i])] for i in range(n)]
    _write_csv(path, header, rows)


FRONT_HEADER = ["run_id", "problem", "h_max", "start_label", "J1", "J2",
                "iters", "status", "wall_ms", "max_xi_set"]


def export_front(rows: list[dict], path: Path) -> None:
    """front.csv: one data row per run, sorted by (h_max, start_label)."""
    if not rows:
        raise ValueError("no runs to export")
    ordered = sorted(rows, key=lambda r: (r["h_max"] if r["h_max"] is not None
                                          else -1.0, r["start_label"]))
    _write_csv(path, FRONT_HEADER,
               [[r.get(c) for c in FRONT_HEADER] for r in ordered])


def run_experiment(config: ExperimentConfig) -> dict:
    """Run the whole batch; returns the summary dict (also written as JSON)."""
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = _task_list(config)
    config_dict = dataclasses.asdict(config)

    t0 = time.perf_counter()
    if config.jobs == 1:
        rows = [_run_one(t, config_dict) for t in tasks]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [pool.submit(_run_one, t, config_dict) for t in tasks]
            rows = [f.result() for f in futures]

    export_front(rows, out_dir / "front.csv")
    keys = ("run_id", "status", "iters", "wall_ms", "max_xi_set",
            "J1", "J2", "error")
    summary = {
        "config": config_dict,
        "runs": [{k: r[k] for k in keys if k in r} for r in rows],
        "all_completed": all(r["status"] != "Error" for r in rows),
        "wall_s": time.perf_counter() - t0,
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsmop",
        description="Multistart experiments for the nonsmooth common-descent solver.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a batch of solver instances")
    run.add_argument("--config", type=Path, default=None,
                     help="JSON file with config keys (flags override)")
    run.add_argument("--problem", type=str, default=None,
                     help="analytic:<name> or obstacle:<constant|piecewise>")
    run.add_argument("--hmax", type=float, nargs="+", default=None,
                     help="mesh target edge lengths (obstacle problems)")
    run.add_argument("--u0", type=float, nargs="+", default=None,
                     help="constant initial control values (obstacle problems)")
    run.add_argument("--n-starts", type=int, default=None,
                     help="number of random starts (analytic problems)")
    run.add_argument("--eps-bar", type=float, default=None)
    run.add_argument("--delta-bar", type=float, default=None)
    run.add_argument("--c", type=float, default=None)
    run.add_argument("--t0", type=float, default=None)
    run.add_argument("--max-iters", type=int, default=None)
    run.add_argument("--schedule", type=str, default=None,
                     choices=["constant", "sqrt_decay"])
    run.add_argument("--scaling-C", type=float, default=None, dest="scaling_C",
                     help="weight of the control-cost objective")
    run.add_argument("--out", type=str, default=None, help="output directory")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--jobs", type=int, default=None)
    return parser


_FLAG_TO_FIELD = {
    "problem": "problem", "hmax": "h_max", "u0": "u0", "n_starts": "n_starts",
    "eps_bar": "eps_bar", "delta_bar": "delta_bar", "c": "c", "t0": "t0",
    "max_iters": "max_iters", "schedule": "schedule", "scaling_C": "scaling_C",
    "out": "out_dir", "seed": "seed", "jobs": "jobs",
}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config is not None:
        file_values = json.loads(Path(args.config).read_text())
        known = {f.name for f in dataclasses.fields(ExperimentConfig)}
        unknown = set(file_values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(file_values)
    for flag, fname in _FLAG_TO_FIELD.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[fname] = v
    for key in ("h_max", "u0"):
        if key in values:
            values[key] = tuple(float(x) for x in values[key])
    return ExperimentConfig(**values)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        summary = run_experiment(config)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for run in summary["runs"]:
        print(f"{run['run_id']}: {run['status']} "
              f"({run['iters']} iters, {run['wall_ms']} ms)")
    out = Path(config.out_dir)
    print(f"front: {out / 'front.csv'}  summary: {out / 'summary.json'}")
    return 0 if summary["all_completed"] else 1


if __name__ == "__main__":
    sys.exit(main())
