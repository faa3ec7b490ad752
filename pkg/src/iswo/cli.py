"""Command line interface: ``iswo {generate,pool,solve,oracle,bench}``."""

from __future__ import annotations

import argparse
import csv
import logging
import statistics
import sys
import time
from pathlib import Path

from . import files
from .engine import Params, solve
from .evaluate import FIXED_CHARGE, Weights
from .generate import MEDIUM_RULES, TINY_RULES, medium_instance, random_instance, tiny_instance
from .lp import fractional_cover
from .model import ValidationError, load_instance, save_instance, validate_instance
from .oracle import OracleTooLargeError, exact_min_cover
from .shiftgen import PoolError, enumerate_shifts

log = logging.getLogger("iswo")

BENCH_COLUMNS = [
    "instance", "algorithm", "seed", "best_shifts", "best_cost", "objective",
    "reported_objective", "iterations", "wall_ms", "error",
]


class CommandError(Exception):
    pass


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    d = Params()
    w = d.weights
    p.add_argument("--p", type=float, default=d.p, help="selection offset (default %(default)s)")
    p.add_argument("--pm", type=float, default=d.p_m, help="mutation rate (default %(default)s)")
    p.add_argument("--k", type=int, default=d.k, help="construction choice width (default %(default)s)")
    for i, val in enumerate(w.as_tuple(), 1):
        p.add_argument(f"--w{i}", type=float, default=val)
    p.add_argument("--stagnation", type=int, default=d.stagnation_limit,
                   help="stop after this many iterations without improvement")
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--fixed-charge", type=int, default=FIXED_CHARGE)
    p.add_argument("--no-lp", action="store_true", help="drop the LP criterion (w5 := 0)")
    p.add_argument("--no-redundancy", action="store_true", help="skip the redundant-shift pass")


def _params(args, seed: int) -> Params:
    try:
        return Params(
            weights=Weights(args.w1, args.w2, args.w3, args.w4, args.w5),
            p=args.p, p_m=args.pm, k=args.k, fixed_charge=args.fixed_charge,
            stagnation_limit=args.stagnation, max_iterations=args.max_iter, seed=seed,
            use_lp=not args.no_lp, redundancy_pass=not args.no_redundancy,
        )
    except ValueError as e:
        raise CommandError(str(e)) from e


def _load(path):
    try:
        inst = load_instance(path)
    except (OSError, ValueError, KeyError) as e:
        raise CommandError(f"cannot read instance {path}: {e}") from e
    report = validate_instance(inst)
    if report:
        raise CommandError("invalid instance:\n  " + "\n  ".join(report))
    return inst


def cmd_generate(args) -> int:
    if args.preset == "tiny":
        inst = tiny_instance(args.seed)
    elif args.preset == "medium":
        inst = medium_instance(args.seed)
    else:
        rules = TINY_RULES if args.tiny_rules else MEDIUM_RULES
        try:
            inst = random_instance(args.blocks, tuple(args.ros), tuple(args.span), args.seed,
                                   rules, tuple(args.gap), args.name)
        except ValueError as e:
            raise CommandError(str(e)) from e
    try:
        save_instance(inst, args.out)
    except OSError as e:
        raise CommandError(f"cannot write {args.out}: {e}") from e
    print(f"{inst.name}: {len(inst.blocks)} blocks, {inst.n_pieces} pieces -> {args.out}")
    return 0


def cmd_pool(args) -> int:
    inst = _load(args.instance)
    pool = enumerate_shifts(inst)
    b = pool.bounds
    print(f"{inst.name}: {inst.n_pieces} pieces, {len(pool)} candidate shifts")
    print(f"work time {b.b1:g}..{b.a1:g}  ratio {b.b2:.3f}..{b.a2:.3f}  pieces {b.b3:g}..{b.a3:g}")
    if args.dump:
        Path(args.dump).write_text(pool.dump())
    if args.lp_dump:
        fc = fractional_cover(pool, args.fixed_charge)
        Path(args.lp_dump).write_text(fc.dump())
        print(f"LP objective {fc.objective:.3f}, {int(fc.in_cover.sum())} shifts in the fractional cover")
    return 0


def trace_path(out: Path) -> Path:
    return out.with_name(out.stem + ".trace.csv")


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    params = _params(args, args.seed)
    t0 = time.perf_counter()
    result = solve(inst, args.algo, params)
    wall = (time.perf_counter() - t0) * 1000
    data = files.solution_to_dict(result, inst.name, args.algo)
    out = Path(args.out)
    files.write_solution(out, data)
    files.write_trace(args.trace or trace_path(out), result.trace)
    print(f"objective {data['objective']}  shifts {data['n_shifts']}  "
          f"iterations {data['iterations_run']}  ({wall:.0f} ms)")
    return 0


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    pool = enumerate_shifts(inst)
    try:
        res = exact_min_cover(pool, args.fixed_charge)
    except OracleTooLargeError as e:
        raise CommandError(str(e)) from e
    row = files.fixture_row(inst.name, res)
    print(",".join(map(str, row)))
    if args.fixture:
        files.append_fixture(args.fixture, inst.name, res)
    return 0


def run_bench(instances: list[Path], seeds, algos, make_params, solutions_dir: Path | None = None):
    """Run every (instance, algorithm, seed) cell; return rows sorted by that key.

    The objective column is recomputed from each written solution file;
    ``reported_objective`` is the engine's own value.
    """
    if solutions_dir is not None:
        solutions_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for path in instances:
        try:
            inst = _load(path)
            pool = enumerate_shifts(inst)
            frac_cache = {}
        except (CommandError, PoolError) as e:
            for algo in algos:
                for seed in seeds:
                    rows.append(_error_row(path.stem, algo, seed, e))
            continue
        for algo in algos:
            for seed in seeds:
                params = make_params(seed)
                try:
                    key = params.fixed_charge
                    if params.use_lp and params.weights.w5 and key not in frac_cache:
                        frac_cache[key] = fractional_cover(pool, key)
                    t0 = time.perf_counter()
                    res = solve(inst, algo, params, pool=pool, frac=frac_cache.get(key))
                    wall = (time.perf_counter() - t0) * 1000
                    data = files.solution_to_dict(res, inst.name, algo)
                    if solutions_dir is not None:
                        sol_path = solutions_dir / f"{inst.name}.{algo}.{seed}.json"
                        files.write_solution(sol_path, data)
                        files.write_trace(trace_path(sol_path), res.trace)
                        data = files.read_solution(sol_path)
                    rows.append({
                        "instance": inst.name, "algorithm": algo, "seed": seed,
                        "best_shifts": data["n_shifts"],
                        "best_cost": sum(s["cost"] for s in data["shifts"]),
                        "objective": files.recompute_objective(data),
                        "reported_objective": data["objective"],
                        "iterations": data["iterations_run"],
                        "wall_ms": round(wall, 1), "error": "",
                    })
                except Exception as e:  # one failed cell must not stop the run
                    log.exception("bench cell failed")
                    rows.append(_error_row(inst.name, algo, seed, e))
    rows.sort(key=lambda r: (r["instance"], r["algorithm"], r["seed"]))
    return rows


def _error_row(name, algo, seed, err):
    row = {c: "" for c in BENCH_COLUMNS}
    row.update(instance=name, algorithm=algo, seed=seed, error=f"ERROR: {err}")
    return row


def mean_rows(rows):
    groups = {}
    for r in rows:
        if not r["error"]:
            groups.setdefault((r["instance"], r["algorithm"]), []).append(r)
    out = []
    for (name, algo), grp in sorted(groups.items()):
        row = {"instance": name, "algorithm": algo, "seed": "mean", "error": ""}
        for col in ("best_shifts", "best_cost", "objective", "reported_objective", "iterations", "wall_ms"):
            row[col] = round(statistics.fmean(r[col] for r in grp), 2)
        out.append(row)
    return out


def cmd_bench(args) -> int:
    suite = Path(args.suite)
    instances = sorted(suite.glob("*.json"))
    if not instances:
        raise CommandError(f"no instance files in {suite}")
    sol_dir = Path(args.solutions) if args.solutions else Path(args.out).with_suffix("")
    _params(args, 0)
    rows = run_bench(instances, args.seeds, args.algos, lambda s: _params(args, s), sol_dir)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        w.writerows(mean_rows(rows))
    failed = sum(1 for r in rows if r["error"])
    print(f"{len(rows)} runs, {failed} failed -> {args.out}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="iswo", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--preset", choices=["tiny", "medium", "custom"], default="custom")
    g.add_argument("--blocks", type=int, default=20)
    g.add_argument("--ros", type=int, nargs=2, default=[6, 10], metavar=("MIN", "MAX"))
    g.add_argument("--span", type=int, nargs=2, default=[240, 1500], metavar=("START", "END"))
    g.add_argument("--gap", type=int, nargs=2, default=[60, 130], metavar=("MIN", "MAX"))
    g.add_argument("--tiny-rules", action="store_true", help="use the tiny preset's rules")
    g.add_argument("--name", default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("pool", help="enumerate candidate shifts")
    p.add_argument("instance")
    p.add_argument("--dump", help="write one line per shift: id cost spells")
    p.add_argument("--lp-dump", help="write one line per shift: id x in_cover")
    p.add_argument("--fixed-charge", type=int, default=FIXED_CHARGE)
    p.set_defaults(func=cmd_pool)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("instance")
    s.add_argument("--algo", choices=["iswo", "swo", "greedy"], default="iswo")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="solution JSON path")
    s.add_argument("--trace", help="trace CSV path (default: <out stem>.trace.csv)")
    _add_solver_flags(s)
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact optimum for a tiny instance")
    o.add_argument("instance")
    o.add_argument("--fixed-charge", type=int, default=FIXED_CHARGE)
    o.add_argument("--fixture", help="append the result to this CSV")
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="run algorithms x seeds over a suite directory")
    b.add_argument("suite")
    b.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    b.add_argument("--algos", nargs="+", choices=["iswo", "swo", "greedy"], default=["iswo", "swo"])
    b.add_argument("--out", required=True, help="bench CSV path")
    b.add_argument("--solutions", help="directory for per-run solution files")
    _add_solver_flags(b)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CommandError, PoolError, ValidationError, OracleTooLargeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
