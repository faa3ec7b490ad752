"""Readers and writers for solution, trace and oracle fixture files."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .engine import IterationTrace, Params, SolveResult

TRACE_COLUMNS = ["iteration", "p_s", "removed_select", "removed_mutate", "objective", "best_objective"]
FIXTURE_COLUMNS = ["instance", "optimal_objective", "optimal_shift_ids"]


def solution_to_dict(result: SolveResult, instance_name: str, algorithm: str) -> dict:
    best = result.best
    return {
        "instance": instance_name,
        "algorithm": algorithm,
        "seed": result.params.seed,
        "params": result.params.to_dict(),
        "objective": int(best.objective),
        "n_shifts": len(best),
        "iterations_run": result.iterations,
        "initial_objective": int(result.initial_objective),
        "shifts": [
            {
                "id": j,
                "cost": int(best.pool.shifts[j].cost),
                "spells": [
                    {"block_id": s.block_id, "first_piece": s.first_piece, "last_piece": s.last_piece}
                    for s in best.pool.shifts[j].spells
                ],
            }
            for j in best.shift_ids
        ],
    }


def dumps_solution(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def write_solution(path, data: dict) -> None:
    Path(path).write_text(dumps_solution(data))


def read_solution(path) -> dict:
    return json.loads(Path(path).read_text())


def recompute_objective(solution: dict) -> int:
    """Weighted-sum objective rebuilt from the shift costs stored in a solution."""
    charge = solution["params"]["fixed_charge"]
    return sum(int(s["cost"]) + charge for s in solution["shifts"])


def solution_params(solution: dict) -> Params:
    return Params.from_dict(solution["params"])


def dumps_trace(trace: list[IterationTrace]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for t in trace:
        p_s = "" if t.p_s is None else repr(t.p_s)
        w.writerow([t.iteration, p_s, t.removed_select, t.removed_mutate, t.objective, t.best_objective])
    return buf.getvalue()


def write_trace(path, trace: list[IterationTrace]) -> None:
    Path(path).write_text(dumps_trace(trace))


def read_trace(path) -> list[IterationTrace]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        IterationTrace(
            iteration=int(r["iteration"]),
            p_s=None if r["p_s"] == "" else float(r["p_s"]),
            removed_select=int(r["removed_select"]),
            removed_mutate=int(r["removed_mutate"]),
            objective=int(r["objective"]),
            best_objective=int(r["best_objective"]),
        )
        for r in rows
    ]


def fixture_row(name: str, result) -> list:
    return [name, result.optimal_objective, " ".join(map(str, result.optimal_shift_ids))]


def append_fixture(path, name: str, result) -> None:
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(FIXTURE_COLUMNS)
        w.writerow(fixture_row(name, result))


def read_fixtures(path) -> dict[str, tuple[int, list[int]]]:
    with open(path, newline="") as fh:
        return {
            r["instance"]: (int(r["optimal_objective"]),
                            [int(x) for x in r["optimal_shift_ids"].split()])
            for r in csv.DictReader(fh)
        }


def trace_is_monotone(trace: list[IterationTrace]) -> bool:
    best = math.inf
    for t in trace:
        if t.best_objective > best:
            return False
        best = t.best_objective
    return True
