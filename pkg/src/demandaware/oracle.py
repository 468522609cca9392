"""Throughput oracles for a fixed (topology, demand matrix) pair.

Direct notions have closed forms. General notions are solved as exact
edge-based multicommodity LPs. Every commodity (s, t) gets a private copy
``S`` of s that only has the out-arcs of s, and a copy ``T`` of t that only
has the in-arcs of t, so each unit delivered from S to T is a non-empty
walk from s to t in the topology (self-demand included).
"""

from __future__ import annotations

import os
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    Arc,
    DemandMatrix,
    DimensionMismatch,
    FlowPlan,
    Route,
    ThroughputReport,
    Topology,
    fmt,
)
from .lp import LinearProgram, solve_lp

ZERO = Fraction(0)


class LpTooLarge(RuntimeError):
    pass


class RelationViolation(AssertionError):
    pass


def max_lp_vars() -> int:
    return int(os.environ.get("DAW_MAX_LP_VARS", "2000"))


def _check_dims(G: Topology, M: DemandMatrix) -> None:
    if G.n != M.n:
        raise DimensionMismatch(f"topology has {G.n} nodes, matrix has {M.n}")


# --- direct variants ----------------------------------------------------

def direct_throughput(G: Topology, M: DemandMatrix) -> ThroughputReport:
    _check_dims(G, M)
    r = G.degree
    value = Fraction(1)
    for i in range(M.n):
        for j in range(M.n):
            a = M[i, j]
            if a > 0:
                value = min(value, Fraction(G[i, j]) / (r * a))
    routes = tuple(
        Route(((i, j),), value * M[i, j])
        for i in range(M.n)
        for j in range(M.n)
        if M[i, j] > 0 and value > 0
    )
    hosted = tuple(tuple(value * a for a in row) for row in M.entries)
    return ThroughputReport("direct-strict", value, FlowPlan(routes), hosted)


def weak_direct_throughput(G: Topology, M: DemandMatrix) -> ThroughputReport:
    _check_dims(G, M)
    r = G.degree
    hosted = tuple(
        tuple(min(r * M[i, j], Fraction(G[i, j])) / r for j in range(M.n)) for i in range(M.n)
    )
    total = sum((sum(row, ZERO) for row in hosted), ZERO)
    routes = tuple(
        Route(((i, j),), hosted[i][j]) for i in range(M.n) for j in range(M.n) if hosted[i][j] > 0
    )
    return ThroughputReport("direct-weak", total / M.n, FlowPlan(routes), hosted)


# --- general variants ----------------------------------------------------

@dataclass
class _Commodity:
    s: int
    t: int
    # expanded-graph edges: (tail, head, underlying arc); tails/heads are
    # node ids, "S"/"T" for the source/sink copies
    edges: list[tuple[object, object, Arc]] = field(default_factory=list)
    first_var: int = 0


def _commodity_edges(G: Topology, s: int, t: int) -> list[tuple[object, object, Arc]]:
    edges = []
    for u, v in G.arcs():
        edges.append((u, v, (u, v)))
        if u == s:
            edges.append(("S", "T" if v == t else v, (u, v)))
        if v == t:
            edges.append((u, "T", (u, v)))
    return edges


def _build_flow_lp(G: Topology, M: DemandMatrix, weak: bool, max_vars: Optional[int]):
    _check_dims(G, M)
    n, r = M.n, G.degree
    comms = [_Commodity(s, t) for s in range(n) for t in range(n) if M[s, t] > 0]
    var = 0 if weak else 1  # variable 0 is theta in the strict LP
    for c in comms:
        c.edges = _commodity_edges(G, c.s, c.t)
        c.first_var = var
        var += len(c.edges)
    limit = max_lp_vars() if max_vars is None else max_vars
    if var > limit:
        raise LpTooLarge(f"LP would need {var} variables (limit {limit}, set DAW_MAX_LP_VARS)")
    lp = LinearProgram(var)
    load: dict[Arc, dict[int, Fraction]] = defaultdict(dict)
    for c in comms:
        out_s: dict[int, Fraction] = {}
        balance: dict[int, dict[int, Fraction]] = defaultdict(dict)
        for k, (tail, head, arc) in enumerate(c.edges):
            x = c.first_var + k
            load[arc][x] = Fraction(1)
            if tail == "S":
                out_s[x] = Fraction(1)
            else:
                balance[tail][x] = balance[tail].get(x, ZERO) - 1
            if head != "T":
                balance[head][x] = balance[head].get(x, ZERO) + 1
        for node in range(n):
            if balance[node]:
                lp.add(balance[node], "=", 0)
        demand = r * M[c.s, c.t]
        if weak:
            if out_s:
                lp.add(out_s, "<=", demand)
            for x in out_s:
                lp.objective[x] = Fraction(1)
        else:
            row = dict(out_s)
            row[0] = -demand
            lp.add(row, "=", 0)
    for arc, row in load.items():
        lp.add(row, "<=", G[arc])
    if not weak:
        lp.add({0: Fraction(1)}, "<=", 1)
        lp.objective[0] = Fraction(1)
    return lp, comms


def _decompose(c: _Commodity, x: list[Fraction], r: int) -> list[Route]:
    """Split one commodity's edge flow into S->T paths; leftover cycles are dropped."""
    flow = {k: x[c.first_var + k] for k in range(len(c.edges)) if x[c.first_var + k] > 0}
    out: dict[object, list[int]] = defaultdict(list)
    for k in flow:
        out[c.edges[k][0]].append(k)
    routes = []
    while True:
        # BFS for a shortest S->T path over positive-flow edges
        prev: dict[object, int] = {}
        seen = {"S"}
        queue = deque(["S"])
        while queue and "T" not in seen:
            u = queue.popleft()
            for k in out[u]:
                if flow[k] > 0:
                    v = c.edges[k][1]
                    if v not in seen:
                        seen.add(v)
                        prev[v] = k
                        queue.append(v)
        if "T" not in seen:
            break
        ks = []
        node = "T"
        while node != "S":
            k = prev[node]
            ks.append(k)
            node = c.edges[k][0]
        ks.reverse()
        amount = min(flow[k] for k in ks)
        for k in ks:
            flow[k] -= amount
        routes.append(Route(tuple(c.edges[k][2] for k in ks), amount / r))
    return routes


def _merge(routes: list[Route]) -> FlowPlan:
    acc: dict[tuple[Arc, ...], Fraction] = {}
    for rt in routes:
        acc[rt.path] = acc.get(rt.path, ZERO) + rt.amount
    return FlowPlan(tuple(Route(p, a) for p, a in acc.items() if a > 0))


def _served(plan: FlowPlan, n: int) -> list[list[Fraction]]:
    served = [[ZERO] * n for _ in range(n)]
    for rt in plan:
        served[rt.source][rt.target] += rt.amount
    return served


def throughput(G: Topology, M: DemandMatrix, max_vars: Optional[int] = None) -> ThroughputReport:
    """Largest theta such that G hosts theta*M (maximum concurrent flow)."""
    lp, comms = _build_flow_lp(G, M, weak=False, max_vars=max_vars)
    theta, x = solve_lp(lp)
    routes = [rt for c in comms for rt in _decompose(c, x, G.degree)]
    plan = _merge(routes)
    hosted = tuple(tuple(theta * a for a in row) for row in M.entries)
    return ThroughputReport("general-strict", theta, plan, hosted)


def weak_throughput(G: Topology, M: DemandMatrix, max_vars: Optional[int] = None) -> ThroughputReport:
    """Largest hostable fraction of the total demand, pairs may be partially served."""
    lp, comms = _build_flow_lp(G, M, weak=True, max_vars=max_vars)
    total, x = solve_lp(lp)
    routes = [rt for c in comms for rt in _decompose(c, x, G.degree)]
    plan = _merge(routes)
    served = _served(plan, M.n)
    value = total / (G.degree * M.n)
    return ThroughputReport("general-weak", value, plan, tuple(tuple(row) for row in served))


ORACLES = {
    "direct-strict": direct_throughput,
    "direct-weak": weak_direct_throughput,
    "general-strict": throughput,
    "general-weak": weak_throughput,
}


def evaluate(G: Topology, M: DemandMatrix, mode: str) -> ThroughputReport:
    try:
        oracle = ORACLES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(ORACLES)}") from None
    return oracle(G, M)


# --- verification --------------------------------------------------------

@dataclass
class Violation:
    kind: str
    location: tuple
    amount: Fraction

    def to_json(self) -> dict:
        return {"kind": self.kind, "location": list(self.location), "amount": fmt(self.amount)}


@dataclass
class VerificationReport:
    feasible: bool
    load: list[list[Fraction]]
    served: list[list[Fraction]]
    violations: list[Violation]
    fraction: Fraction

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "fraction": fmt(self.fraction),
            "per_arc_load": [[fmt(v) for v in row] for row in self.load],
            "served": [[fmt(v) for v in row] for row in self.served],
            "violations": [v.to_json() for v in self.violations],
        }


def verify_flow_plan(
    G: Topology,
    M: DemandMatrix,
    plan: FlowPlan,
    mode: str,
    theta: Optional[Fraction] = None,
) -> VerificationReport:
    """Exact audit of ``plan`` against capacities and demands.

    Strict modes require served == theta * a for every pair; weak modes
    require served <= a. Direct modes also require single-arc paths.
    Amounts are in demand units, so arc (i, j) carries at most counts/r.
    """
    _check_dims(G, M)
    if mode not in ORACLES:
        raise ValueError(f"unknown mode {mode!r}")
    strict = mode.endswith("strict")
    if strict and theta is None:
        raise ValueError("strict verification needs theta")
    n, r = M.n, G.degree
    load = [[ZERO] * n for _ in range(n)]
    served = [[ZERO] * n for _ in range(n)]
    violations: list[Violation] = []
    for idx, rt in enumerate(plan):
        if rt.amount < 0:
            violations.append(Violation("NegativeAmount", (idx,), rt.amount))
        if not rt.path:
            violations.append(Violation("EmptyPath", (idx,), rt.amount))
            continue
        if mode.startswith("direct") and len(rt.path) != 1:
            violations.append(Violation("PathTooLong", (idx, len(rt.path)), rt.amount))
        ok = True
        for (u, v), (u2, _) in zip(rt.path, rt.path[1:]):
            if v != u2:
                violations.append(Violation("BrokenPath", (idx, v, u2), rt.amount))
                ok = False
        for u, v in rt.path:
            if not (0 <= u < n and 0 <= v < n):
                violations.append(Violation("UnknownNode", (idx, u, v), rt.amount))
                ok = False
                continue
            if G[u, v] == 0:
                violations.append(Violation("ArcMissing", (u, v), rt.amount))
            load[u][v] += rt.amount
        if ok:
            served[rt.source][rt.target] += rt.amount
    for u in range(n):
        for v in range(n):
            cap = Fraction(G[u, v], r)
            if load[u][v] > cap and G[u, v] > 0:
                violations.append(Violation("CapacityExceeded", (u, v), load[u][v] - cap))
            want = M[u, v]
            if strict:
                if served[u][v] != theta * want:
                    violations.append(Violation("DemandMismatch", (u, v), served[u][v] - theta * want))
            elif served[u][v] > want:
                violations.append(Violation("OverServed", (u, v), served[u][v] - want))
    total = sum((sum(row, ZERO) for row in served), ZERO)
    fraction = Fraction(theta) if strict else total / n
    return VerificationReport(not violations, load, served, violations, fraction)


def relation_audit(G: Topology, M: DemandMatrix) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """(direct, weak-direct, strict, weak); raises if the ordering of notions breaks."""
    d = direct_throughput(G, M).value
    wd = weak_direct_throughput(G, M).value
    s = throughput(G, M).value
    w = weak_throughput(G, M).value
    if not (w >= s >= d and w >= wd >= d):
        raise RelationViolation(
            f"relation chain broken on G={G}: direct={d} weak-direct={wd} strict={s} weak={w}"
        )
    return d, wd, s, w
