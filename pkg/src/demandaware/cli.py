"""Command-line front end.

Every subcommand prints a JSON run report (or CSV with ``--csv``) where all
numbers are exact rational strings. Exit status: 0 ok, 1 validation or
domain failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import io as dio
from .core import (
    FAMILIES,
    MODES,
    DemandMatrix,
    DemandMatrixError,
    DimensionMismatch,
    MatrixFamilyId,
    ParamOutOfRange,
    TopologyError,
    enumerate_regular_topologies,
    fmt,
    paper_matrix,
    random_doubly_stochastic,
)
from .lp import LpError
from .oracle import LpTooLarge, RelationViolation, evaluate, relation_audit
from .reduction import InvalidX3C, NotACover, brute_force_x3c, witness_from_cover, x3c_to_instance
from .oracle import verify_flow_plan
from .synthesis import SYNTHESIZERS, KappaOutOfRange, best_known, maxcost_weak_direct, synthesize

BENCH_HEADER = ["n", "source", "seed", "algorithm", "direct", "weak_direct", "strict", "weak"]
DOMAIN_ERRORS = (
    DemandMatrixError,
    TopologyError,
    ParamOutOfRange,
    DimensionMismatch,
    LpTooLarge,
    LpError,
    RelationViolation,
    InvalidX3C,
    NotACover,
    KappaOutOfRange,
    dio.FormatError,
)


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: list[str]
    seed: int
    inputs: dict[str, str] = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "inputs": self.inputs,
            "results": self.results,
            "timings": self.timings,
        }


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _timed(report: RunReport, label: str, fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    report.timings[label] = round(time.perf_counter() - t0, 6)
    return out


def _matrix(report: RunReport, path: str) -> DemandMatrix:
    report.inputs[path] = dio.digest(path)
    return dio.load_matrix(path)


def _graph(report: RunReport, path: str):
    report.inputs[path] = dio.digest(path)
    return dio.load_topology(path)


# --- subcommands -----------------------------------------------------------

def cmd_gen(args, report: RunReport) -> dict:
    if args.family:
        kappa = Fraction(args.kappa) if args.kappa is not None else None
        M = paper_matrix(MatrixFamilyId(args.family, args.n, kappa))
        source = str(MatrixFamilyId(args.family, args.n, kappa))
    else:
        if args.n is None:
            raise UsageError("gen --random needs --n")
        k = args.k if args.k is not None else args.n + 1
        M = random_doubly_stochastic(args.n, k, args.seed)
        source = f"random,n={args.n},k={k},seed={args.seed}"
    if args.out:
        dio.save_matrix(M, args.out)
    return {"source": source, "matrix": dio.matrix_to_json(M)}


def cmd_synth(args, report: RunReport) -> dict:
    M = _matrix(report, args.matrix)
    out: dict = {}
    if args.algo == "best":
        G, rep = _timed(report, "best", best_known, M, args.objective, args.seed)
        out["objective"] = args.objective
        out["value"] = fmt(rep.value)
    else:
        G = _timed(report, args.algo, synthesize, M, args.algo, args.seed)
    out["algorithm"] = args.algo
    out["topology"] = dio.topology_to_json(G)
    out["values"] = {}
    for mode in args.modes:
        out["values"][mode] = fmt(_timed(report, f"eval:{mode}", evaluate, G, M, mode).value)
    if args.algo == "maxcost":
        out["maxcost_value"] = fmt(maxcost_weak_direct(M)[1])
    if args.out:
        dio.save_topology(G, args.out)
    return out


def cmd_eval(args, report: RunReport) -> dict:
    G = _graph(report, args.graph)
    M = _matrix(report, args.matrix)
    modes = [args.mode] if args.mode else list(MODES)
    out = {}
    for mode in modes:
        rep = _timed(report, mode, evaluate, G, M, mode)
        entry = {"value": fmt(rep.value)}
        if args.witness and rep.witness is not None:
            entry["witness"] = dio.plan_to_json(rep.witness)
        out[mode] = entry
    if args.plan:
        report.inputs[args.plan] = dio.digest(args.plan)
        plan = dio.load_plan(args.plan)
        mode = args.mode or "general-weak"
        theta = Fraction(args.theta) if args.theta is not None else None
        if mode.endswith("strict") and theta is None:
            raise UsageError("verifying a strict plan needs --theta")
        vr = verify_flow_plan(G, M, plan, mode, theta)
        out["verification"] = vr.to_json()
        if not vr.feasible:
            report.results = out
            raise _Failed("plan is infeasible")
    return out


def cmd_enum(args, report: RunReport) -> dict:
    M = _matrix(report, args.matrix)
    r = args.degree if args.degree is not None else 2 * M.n - 1
    t0 = time.perf_counter()
    best, best_val, count = None, None, 0
    for G in enumerate_regular_topologies(M.n, r):
        count += 1
        v = evaluate(G, M, args.mode).value
        if best_val is None or v > best_val:
            best, best_val = G, v
    report.timings["enum"] = round(time.perf_counter() - t0, 6)
    return {
        "mode": args.mode,
        "topologies": count,
        "best_value": fmt(best_val) if best_val is not None else None,
        "best_topology": dio.topology_to_json(best) if best is not None else None,
    }


def cmd_audit(args, report: RunReport) -> dict:
    G = _graph(report, args.graph)
    M = _matrix(report, args.matrix)
    d, wd, s, w = _timed(report, "audit", relation_audit, G, M)
    return {"direct": fmt(d), "weak_direct": fmt(wd), "strict": fmt(s), "weak": fmt(w), "holds": True}


def cmd_reduce(args, report: RunReport) -> dict:
    report.inputs[args.x3c] = dio.digest(args.x3c)
    inst = dio.load_x3c(args.x3c)
    art = _timed(report, "reduce", x3c_to_instance, inst)
    out = art.to_json()
    if not args.entries:
        del out["entries"]
    if args.witness:
        cover = brute_force_x3c(inst)
        out["cover"] = list(cover) if cover is not None else None
        if cover is not None:
            G, plan = witness_from_cover(inst, cover, art)
            vr = verify_flow_plan(G, art.demand, plan, "general-weak")
            out["witness"] = {
                "feasible": vr.feasible,
                "fraction": fmt(vr.fraction),
                "meets_kappa": vr.fraction >= art.kappa,
                "topology": dio.topology_to_json(G),
                "plan": dio.plan_to_json(plan),
            }
    if args.out:
        Path(args.out).write_text(json.dumps(art.to_json()) + "\n")
    return out


def _bench_trial(task) -> list[list[str]]:
    n, source, seed, algos = task
    if source == "random":
        M = random_doubly_stochastic(n, n + 1, seed)
    else:
        tag, _, kappa = source.partition(":")
        fam_n = None if tag in ("M1", "M2", "weak-upper-2x2", "strong-upper", "fig-second-stage", "fig-flow-example") else n
        M = paper_matrix(MatrixFamilyId(tag, fam_n, Fraction(kappa) if kappa else None))
    rows = []
    for algo in algos:
        G = synthesize(M, algo, seed)
        vals = [fmt(evaluate(G, M, mode).value) for mode in MODES]
        rows.append([str(n), source, str(seed), algo, *vals])
    return rows


def cmd_bench(args, report: RunReport) -> str:
    tasks = []
    for n in args.n:
        for t in range(args.trials):
            trial_seed = int(np.random.SeedSequence([args.seed, n, t]).generate_state(1)[0])
            tasks.append((n, "random", trial_seed, tuple(args.algos)))
        for fam in args.family or ():
            tasks.append((n, fam, args.seed, tuple(args.algos)))
    t0 = time.perf_counter()
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_bench_trial, tasks))
    else:
        results = [_bench_trial(t) for t in tasks]
    report.timings["bench"] = round(time.perf_counter() - t0, 6)
    rows = [row for trial in results for row in trial]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if args.out:
        path = Path(args.out)
        fresh = not path.exists() or path.stat().st_size == 0
        if not fresh:
            with open(path) as fh:
                head = next(csv.reader(fh), None)
            if head != BENCH_HEADER:
                raise _Failed(f"{path} has header {head}, expected {BENCH_HEADER}")
        with open(path, "a", newline="") as fh:
            fw = csv.writer(fh, lineterminator="\n")
            if fresh:
                fw.writerow(BENCH_HEADER)
            fw.writerows(rows)
    w.writerow(BENCH_HEADER)
    w.writerows(rows)
    report.results = {"rows": len(rows), "out": args.out}
    return buf.getvalue()


class _Failed(Exception):
    pass


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="demandaware", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="master seed for all randomness")
    p.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a named family or random doubly stochastic matrix")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", choices=FAMILIES)
    src.add_argument("--random", action="store_true")
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int, help="permutations in the random mixture (default n+1)")
    g.add_argument("--kappa", help="family parameter, e.g. 9/10")
    g.add_argument("--out")

    s = sub.add_parser("synth", help="build a topology for a matrix")
    s.add_argument("--matrix", required=True)
    s.add_argument("--algo", required=True, choices=SYNTHESIZERS + ("best",))
    s.add_argument("--objective", choices=MODES, default="general-strict")
    s.add_argument("--modes", nargs="+", choices=MODES, default=["direct-strict", "direct-weak"])
    s.add_argument("--out")

    e = sub.add_parser("eval", help="evaluate throughput oracles on (graph, matrix)")
    e.add_argument("--graph", required=True)
    e.add_argument("--matrix", required=True)
    e.add_argument("--mode", choices=MODES)
    e.add_argument("--witness", action="store_true", help="include the witness flow plans")
    e.add_argument("--plan", help="flow plan JSON to verify instead of trusting the oracle")
    e.add_argument("--theta", help="throughput to verify a strict plan at")

    en = sub.add_parser("enum", help="brute-force the best topology for one mode")
    en.add_argument("--matrix", required=True)
    en.add_argument("--mode", choices=MODES, required=True)
    en.add_argument("--degree", type=int)

    a = sub.add_parser("audit", help="check the ordering of the four throughput notions")
    a.add_argument("--graph", required=True)
    a.add_argument("--matrix", required=True)

    r = sub.add_parser("reduce", help="build the weak-throughput instance of an X3C input")
    r.add_argument("--x3c", required=True)
    r.add_argument("--entries", action="store_true", help="include the full demand matrix")
    r.add_argument("--witness", action="store_true", help="brute-force a cover and verify its witness")
    r.add_argument("--out")

    b = sub.add_parser("bench", help="seeded trials of every synthesizer, as CSV")
    b.add_argument("--n", type=int, nargs="+", default=[2, 3])
    b.add_argument("--trials", type=int, default=5)
    b.add_argument("--algos", nargs="+", choices=SYNTHESIZERS, default=list(SYNTHESIZERS))
    b.add_argument("--family", nargs="*", help="named matrix families to add, e.g. uniform weak-direct-upper")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", help="CSV file to append to")
    return p


COMMANDS = {
    "gen": cmd_gen,
    "synth": cmd_synth,
    "eval": cmd_eval,
    "enum": cmd_enum,
    "audit": cmd_audit,
    "reduce": cmd_reduce,
    "bench": cmd_bench,
}


def _results_csv(results: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(obj, list):
            w.writerow([prefix, json.dumps(obj)])
        else:
            w.writerow([prefix, obj])

    walk("", results)
    return buf.getvalue()


def dispatch(argv: Optional[list[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=stderr)
        return 2
    report = RunReport(command=argv, seed=args.seed)
    try:
        out = COMMANDS[args.cmd](args, report)
    except UsageError as e:
        print(f"usage error: {e}", file=stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=stderr)
        return 1
    except _Failed as e:
        print(f"error: {e}", file=stderr)
        json.dump(report.to_json(), stdout, indent=2)
        stdout.write("\n")
        return 1
    except DOMAIN_ERRORS as e:
        print(f"error: {type(e).__name__}: {e}", file=stderr)
        return 1
    if isinstance(out, str):  # bench: CSV body
        stdout.write(out)
        return 0
    report.results = out
    if args.csv:
        stdout.write(_results_csv(out))
    else:
        json.dump(report.to_json(), stdout, indent=2)
        stdout.write("\n")
    return 0


def main() -> None:
    sys.exit(dispatch())
