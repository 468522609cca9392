"""Successive shortest augmenting paths with Johnson potentials, exact costs."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction


class TargetUnreachable(RuntimeError):
    pass


@dataclass
class MinCostFlowNetwork:
    num_nodes: int
    source: int
    sink: int
    # (tail, head, capacity, cost); parallel arcs allowed
    arcs: list[tuple[int, int, int, Fraction]] = field(default_factory=list)

    def add_arc(self, u: int, v: int, capacity: int, cost) -> int:
        if capacity < 0:
            raise ValueError("negative capacity")
        self.arcs.append((u, v, capacity, Fraction(cost)))
        return len(self.arcs) - 1


def min_cost_flow(net: MinCostFlowNetwork, target: int, maximize: bool = True) -> list[int]:
    """Flow of exactly ``target`` units with maximum (or, with ``maximize=False``, minimum) total cost.

    Returns the per-arc flow, integral because capacities and target are.
    Maximization runs the same algorithm on negated costs.
    """
    target = Fraction(target)
    if target.denominator != 1:
        raise ValueError(f"target {target} is not integral")
    target = int(target)
    n = net.num_nodes
    sign = -1 if maximize else 1
    # residual graph: edge e and its reverse e ^ 1
    head, cap, cost = [], [], []
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v, c, w in net.arcs:
        adj[u].append(len(head))
        head.append(v)
        cap.append(c)
        cost.append(sign * w)
        adj[v].append(len(head))
        head.append(u)
        cap.append(0)
        cost.append(-sign * w)

    # initial potentials by Bellman-Ford (costs may be negative)
    INF = None
    pot: list = [INF] * n
    pot[net.source] = Fraction(0)
    for _ in range(n):
        changed = False
        for u in range(n):
            if pot[u] is None:
                continue
            for e in adj[u]:
                if cap[e] > 0:
                    nd = pot[u] + cost[e]
                    v = head[e]
                    if pot[v] is None or nd < pot[v]:
                        pot[v] = nd
                        changed = True
        if not changed:
            break
    else:
        raise ValueError("negative cycle in the initial residual network")
    pot = [p if p is not None else Fraction(0) for p in pot]

    sent = 0
    while sent < target:
        dist: list = [None] * n
        prev_edge = [-1] * n
        dist[net.source] = Fraction(0)
        heap = [(Fraction(0), net.source)]
        while heap:
            d, u = heapq.heappop(heap)
            if d != dist[u]:
                continue
            for e in adj[u]:
                if cap[e] <= 0:
                    continue
                v = head[e]
                nd = d + cost[e] + pot[u] - pot[v]
                if dist[v] is None or nd < dist[v]:
                    dist[v] = nd
                    prev_edge[v] = e
                    heapq.heappush(heap, (nd, v))
        if dist[net.sink] is None:
            raise TargetUnreachable(f"only {sent} of {target} units can be routed")
        for v in range(n):
            if dist[v] is not None:
                pot[v] += dist[v]
        push = target - sent
        v = net.sink
        while v != net.source:
            e = prev_edge[v]
            push = min(push, cap[e])
            v = head[e ^ 1]
        v = net.sink
        while v != net.source:
            e = prev_edge[v]
            cap[e] -= push
            cap[e ^ 1] += push
            v = head[e ^ 1]
        sent += push
    return [cap[2 * k + 1] for k in range(len(net.arcs))]


def flow_cost(net: MinCostFlowNetwork, flows: list[int]) -> Fraction:
    return sum((f * w for (_, _, _, w), f in zip(net.arcs, flows)), Fraction(0))
