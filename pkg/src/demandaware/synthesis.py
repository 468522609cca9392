"""Topology synthesizers for a known demand matrix."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import DemandMatrix, FlowPlan, ParamOutOfRange, Route, ThroughputReport, Topology
from .flow import MinCostFlowNetwork, flow_cost, min_cost_flow
from .oracle import evaluate, verify_flow_plan, weak_direct_throughput
from .rounding import cycle_round, dependent_round, floor_part, fractional_part

log = logging.getLogger(__name__)

ZERO = Fraction(0)


class KappaOutOfRange(ValueError):
    pass


class BadRounding(ValueError):
    pass


def greedy_direct(M: DemandMatrix) -> Topology:
    """Repeatedly add an arc where demand per existing arc is largest.

    A pair with demand but no arc has ratio infinity, 0/0 counts as 0; ties
    go to the lexicographically smallest pair. Optimal for direct throughput.
    """
    n = M.n
    r = 2 * n - 1
    b = [[0] * n for _ in range(n)]
    row_left = [r] * n
    col_left = [r] * n

    def key(i: int, j: int):
        a = M[i, j]
        if b[i][j] == 0:
            return (1, ZERO) if a > 0 else (0, ZERO)
        return (0, a / b[i][j])

    for _ in range(n * r):
        best = None
        for i in range(n):
            if not row_left[i]:
                continue
            for j in range(n):
                if not col_left[j]:
                    continue
                k = key(i, j)
                if best is None or k > best[0]:
                    best = (k, i, j)
        _, i, j = best
        b[i][j] += 1
        row_left[i] -= 1
        col_left[j] -= 1
    return Topology.from_counts(b, r)


def weak_direct_network(M: DemandMatrix) -> MinCostFlowNetwork:
    """s -> r_i -> c_j -> t with three parallel arcs per (i, j)."""
    n = M.n
    r = 2 * n - 1
    s, t = 0, 2 * n + 1
    net = MinCostFlowNetwork(2 * n + 2, s, t)
    for i in range(n):
        net.add_arc(s, 1 + i, r, 0)
    for j in range(n):
        net.add_arc(1 + n + j, t, r, 0)
    for i in range(n):
        for j in range(n):
            a = r * M[i, j]
            whole = a.numerator // a.denominator
            net.add_arc(1 + i, 1 + n + j, whole, 1)
            net.add_arc(1 + i, 1 + n + j, 1, a - whole)
            net.add_arc(1 + i, 1 + n + j, r, 0)
    return net


def maxcost_weak_direct(M: DemandMatrix) -> tuple[Topology, Fraction]:
    """Topology maximizing weak direct throughput via max-cost flow."""
    n = M.n
    r = 2 * n - 1
    net = weak_direct_network(M)
    flows = min_cost_flow(net, n * r, maximize=True)
    counts = [[0] * n for _ in range(n)]
    for (u, v, _, _), f in zip(net.arcs, flows):
        if 1 <= u <= n and n + 1 <= v <= 2 * n:
            counts[u - 1][v - n - 1] += f
    G = Topology.from_counts(counts, r)
    value = weak_direct_throughput(G, M).value
    assert value == flow_cost(net, flows) / (n * r)
    return G, value


def construct_weak_direct(M: DemandMatrix) -> Topology:
    """floor((2n-1)M) plus a cycle rounding of the fractional remainder."""
    n = M.n
    r = 2 * n - 1
    scaled = M.scaled(r)
    whole = floor_part(scaled)
    bits = cycle_round(fractional_part(scaled)).bits
    return Topology.from_counts([[whole[i][j] + bits[i][j] for j in range(n)] for i in range(n)], r)


def oblivious_baseline(n: int) -> Topology:
    """One self-loop per node and two arcs per ordered pair of distinct nodes."""
    if n < 1:
        raise ParamOutOfRange("n must be positive")
    return Topology.from_counts([[1 if i == j else 2 for j in range(n)] for i in range(n)], 2 * n - 1)


# --- two-stage construction ------------------------------------------------

@dataclass(frozen=True)
class StageQuantities:
    n: int
    kappa: Fraction
    b: list[list[Fraction]]
    c: list[list[int]]
    d: list[list[int]]
    eta: list[list[Fraction]]
    sigma: list[list[Fraction]]
    zeta: list[list[Fraction]]

    def good_rounding_margins(self) -> tuple[list[Fraction], list[Fraction]]:
        """Excess per row and per column (a rounding is good when both are >= (3/4 - eps) n)."""
        rows = [sum(r, ZERO) for r in self.eta]
        cols = [sum(c, ZERO) for c in zip(*self.eta)]
        return rows, cols


def _kappa_range(n: int, kappa: Fraction) -> None:
    lo = Fraction(n - 1, 2 * n - 1)
    if not lo <= kappa <= 1:
        raise KappaOutOfRange(f"kappa={kappa} outside [{lo}, 1]")


def stage_quantities(M: DemandMatrix, kappa, bits) -> StageQuantities:
    """Stage grids for a rounding ``bits`` of the fractional part of (n-1)M.

    Arc counts are d = floor(b) + bits + 1, which reduces to bits + 1
    whenever every entry of b is below 1.
    """
    n = M.n
    kappa = Fraction(kappa)
    _kappa_range(n, kappa)
    b = M.scaled(n - 1)
    frac = fractional_part(b)
    whole = floor_part(b)
    bits = [list(row) for row in bits]
    if len(bits) != n or any(len(row) != n for row in bits):
        raise BadRounding("rounding has wrong shape")
    for i in range(n):
        for j in range(n):
            if bits[i][j] not in (0, 1):
                raise BadRounding(f"rounding entry ({i},{j}) is not 0/1")
            if bits[i][j] and frac[i][j] == 0:
                raise BadRounding(f"rounding raises integral entry ({i},{j})")
    for i in range(n):
        if sum(bits[i]) != sum(frac[i], ZERO):
            raise BadRounding(f"row {i}: rounding sums to {sum(bits[i])}, expected {sum(frac[i], ZERO)}")
    for j in range(n):
        want = sum((frac[i][j] for i in range(n)), ZERO)
        got = sum(bits[i][j] for i in range(n))
        if got != want:
            raise BadRounding(f"column {j}: rounding sums to {got}, expected {want}")
    c = [[whole[i][j] + bits[i][j] for j in range(n)] for i in range(n)]
    d = [[c[i][j] + 1 for j in range(n)] for i in range(n)]
    eta = [[min(d[i][j] - b[i][j], Fraction(1)) for j in range(n)] for i in range(n)]
    spill = (2 * n - 1) * kappa - (n - 1)
    sigma = [[spill * M[i, j] for j in range(n)] for i in range(n)]
    zeta = [
        [sum((min(eta[i][h], eta[h][j]) for h in range(n)), ZERO) for j in range(n)]
        for i in range(n)
    ]
    return StageQuantities(n, kappa, b, c, d, eta, sigma, zeta)


@dataclass(frozen=True)
class TwoStageResult:
    topology: Topology
    plan: FlowPlan
    kappa: Fraction
    stages: StageQuantities
    retry: int
    stage2_load: list[list[Fraction]]


def two_stage_plan(M: DemandMatrix, sq: StageQuantities) -> Optional[tuple[FlowPlan, list[list[Fraction]]]]:
    """Direct stage plus two-hop overflow routing; None if some overflow has no common excess.

    Returned amounts are in demand units; the stage-2 load grid is in arc units.
    """
    n = sq.n
    r = 2 * n - 1
    routes = []
    load2 = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if sq.b[i][j] > 0:
                routes.append(Route(((i, j),), sq.b[i][j] / r))
    for i in range(n):
        for j in range(n):
            sig = sq.sigma[i][j]
            if sig == 0:
                continue
            z = sq.zeta[i][j]
            if z == 0:
                return None
            for h in range(n):
                share = min(sq.eta[i][h], sq.eta[h][j])
                if share == 0:
                    continue
                amount = sig * share / z
                load2[i][h] += amount
                load2[h][j] += amount
                routes.append(Route(((i, h), (h, j)), amount / r))
    return FlowPlan(tuple(routes)), load2


def _retry_seed(seed: int, retry: int) -> int:
    return int(np.random.SeedSequence([seed, retry]).generate_state(1, dtype=np.uint64)[0])


def two_stage_aware(M: DemandMatrix, kappa, max_retries: int = 16, seed: int = 0) -> Optional[TwoStageResult]:
    """Sample-and-verify version of the two-stage construction.

    Each retry draws a dependent rounding of frac((n-1)M), builds the plan and
    accepts it only if it verifies exactly at throughput ``kappa``.
    """
    n = M.n
    kappa = Fraction(kappa)
    _kappa_range(n, kappa)
    r = 2 * n - 1
    frac = fractional_part(M.scaled(n - 1))
    for retry in range(max_retries):
        bits = dependent_round(frac, _retry_seed(seed, retry)).bits
        sq = stage_quantities(M, kappa, bits)
        built = two_stage_plan(M, sq)
        if built is None:
            continue
        plan, load2 = built
        if any(load2[a][b] > sq.eta[a][b] for a in range(n) for b in range(n)):
            log.debug("retry %d: stage-2 load exceeds excess", retry)
            continue
        G = Topology.from_counts(sq.d, r)
        report = verify_flow_plan(G, M, plan, "general-strict", kappa)
        if report.feasible:
            return TwoStageResult(G, plan, kappa, sq, retry, load2)
    return None


def two_stage_search(M: DemandMatrix, seed: int = 0, retries: int = 8, bits: int = 20) -> TwoStageResult:
    """Bisection on kappa over [(n-1)/(2n-1), 1] to resolution 2**-bits."""
    n = M.n
    lo = Fraction(n - 1, 2 * n - 1)
    best = two_stage_aware(M, lo, retries, seed)
    assert best is not None, "zero-overflow plan must always verify"
    hi = Fraction(1)
    top = two_stage_aware(M, hi, retries, seed)
    if top is not None:
        return top
    step = Fraction(1, 1 << bits)
    while hi - lo > step:
        mid = (lo + hi) / 2
        got = two_stage_aware(M, mid, retries, seed)
        if got is None:
            hi = mid
        else:
            lo, best = mid, got
    return best


SYNTHESIZERS = ("greedy", "maxcost", "weakdir-construct", "two-stage", "oblivious")


def synthesize(M: DemandMatrix, algo: str, seed: int = 0) -> Topology:
    if algo == "greedy":
        return greedy_direct(M)
    if algo == "maxcost":
        return maxcost_weak_direct(M)[0]
    if algo == "weakdir-construct":
        return construct_weak_direct(M)
    if algo == "two-stage":
        return two_stage_search(M, seed).topology
    if algo == "oblivious":
        return oblivious_baseline(M.n)
    raise ValueError(f"unknown algorithm {algo!r}; expected one of {SYNTHESIZERS}")


def best_known(M: DemandMatrix, objective: str, seed: int = 0) -> tuple[Topology, ThroughputReport]:
    """Run every synthesizer, score each with the oracle for ``objective``, keep the best.

    Ties keep the earlier synthesizer in ``SYNTHESIZERS`` order.
    """
    best = None
    for algo in SYNTHESIZERS:
        G = synthesize(M, algo, seed)
        rep = evaluate(G, M, objective)
        log.info("%s: %s", algo, rep.value)
        if best is None or rep.value > best[1].value:
            best = (G, rep)
    return best
