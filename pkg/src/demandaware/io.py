"""File formats: matrices (JSON/CSV), topologies, flow plans, X3C instances.

Every rational is written as an exact "p/q" string.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Union

from .core import DemandMatrix, FlowPlan, Route, Topology, as_fraction, fmt, validate_demand_matrix
from .reduction import X3CInstance

PathLike = Union[str, Path]


class FormatError(ValueError):
    pass


def _load_json(path: PathLike) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON ({e})") from None


def _rational(x, where: str):
    if isinstance(x, float):
        raise FormatError(f"{where}: write rationals as strings, not float {x!r}")
    try:
        return as_fraction(x)
    except (ValueError, ZeroDivisionError, TypeError):
        raise FormatError(f"{where}: {x!r} is not a rational literal") from None


# --- matrices ---------------------------------------------------------------

def matrix_to_json(M: DemandMatrix) -> dict:
    return {"n": M.n, "entries": [[fmt(a) for a in row] for row in M.entries]}


def matrix_from_json(obj: dict) -> DemandMatrix:
    try:
        n, rows = obj["n"], obj["entries"]
    except (KeyError, TypeError):
        raise FormatError('matrix JSON needs "n" and "entries"') from None
    if len(rows) != n or any(len(r) != n for r in rows):
        raise FormatError(f"entries are not {n}x{n}")
    grid = [[_rational(x, f"entry ({i},{j})") for j, x in enumerate(r)] for i, r in enumerate(rows)]
    return validate_demand_matrix(grid)


def matrix_to_csv(M: DemandMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in M.entries:
        w.writerow(fmt(a) for a in row)
    return buf.getvalue()


def matrix_from_csv(text: str) -> DemandMatrix:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    grid = [
        [_rational(x.strip(), f"entry ({i},{j})") for j, x in enumerate(r)] for i, r in enumerate(rows)
    ]
    return validate_demand_matrix(grid)


def load_matrix(path: PathLike) -> DemandMatrix:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return matrix_from_csv(path.read_text())
    return matrix_from_json(_load_json(path))


def save_matrix(M: DemandMatrix, path: PathLike) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(matrix_to_csv(M))
    else:
        path.write_text(json.dumps(matrix_to_json(M)) + "\n")


# --- topologies ---------------------------------------------------------------

def topology_to_json(G: Topology) -> dict:
    return {"n": G.n, "degree": G.degree, "counts": [list(r) for r in G.counts]}


def topology_from_json(obj: dict) -> Topology:
    try:
        counts = obj["counts"]
    except (KeyError, TypeError):
        raise FormatError('topology JSON needs "counts"') from None
    if any(not isinstance(c, int) for r in counts for c in r):
        raise FormatError("arc counts must be integers")
    G = Topology.from_counts(counts, obj.get("degree"))
    if "n" in obj and obj["n"] != G.n:
        raise FormatError(f'"n"={obj["n"]} but counts are {G.n}x{G.n}')
    return G


def load_topology(path: PathLike) -> Topology:
    return topology_from_json(_load_json(path))


def save_topology(G: Topology, path: PathLike) -> None:
    Path(path).write_text(json.dumps(topology_to_json(G)) + "\n")


# --- flow plans ---------------------------------------------------------------

def plan_to_json(plan: FlowPlan) -> dict:
    return {
        "routes": [
            {"path": [list(arc) for arc in rt.path], "amount": fmt(rt.amount)} for rt in plan
        ]
    }


def plan_from_json(obj: dict) -> FlowPlan:
    try:
        raw = obj["routes"]
    except (KeyError, TypeError):
        raise FormatError('plan JSON needs "routes"') from None
    routes = []
    for k, rt in enumerate(raw):
        path = tuple((int(u), int(v)) for u, v in rt["path"])
        routes.append(Route(path, _rational(rt["amount"], f"route {k}")))
    return FlowPlan(tuple(routes))


def load_plan(path: PathLike) -> FlowPlan:
    return plan_from_json(_load_json(path))


# --- X3C ------------------------------------------------------------------------

def x3c_from_json(obj: dict) -> X3CInstance:
    try:
        return X3CInstance.of(int(obj["N"]), obj["sets"])
    except (KeyError, TypeError):
        raise FormatError('X3C JSON needs "N" and "sets"') from None


def load_x3c(path: PathLike) -> X3CInstance:
    return x3c_from_json(_load_json(path))


def digest(path: PathLike) -> str:
    """sha256 of a file's bytes, for run reports."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
