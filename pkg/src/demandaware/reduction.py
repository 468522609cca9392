"""Exact Cover by 3-Sets -> Demand-Aware Weak Throughput gadget.

All demands are built as integer-plus-fraction values scaled by
n* = 2n - 1 and divided by n* at the end.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import DemandMatrix, FlowPlan, Route, Topology, validate_demand_matrix

F = Fraction
ZERO = F(0)
THREE_QUARTERS = F(3, 4)


class InvalidX3C(ValueError):
    pass


class NegativeGadgetSize(InvalidX3C):
    pass


class NotACover(ValueError):
    pass


@dataclass(frozen=True)
class X3CInstance:
    """Universe {1..N} and a family of 3-element subsets."""

    N: int
    sets: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, N: int, sets: Sequence[Sequence[int]]) -> "X3CInstance":
        if N <= 0 or N % 3:
            raise InvalidX3C(f"universe size {N} is not a positive multiple of 3")
        fam = []
        for k, s in enumerate(sets):
            elems = list(s)
            if len(elems) != 3 or len(set(elems)) != 3:
                raise InvalidX3C(f"set {k} = {elems} does not have 3 distinct elements")
            if any(not 1 <= x <= N for x in elems):
                raise InvalidX3C(f"set {k} = {elems} leaves the universe 1..{N}")
            fam.append(frozenset(elems))
        inst = cls(N, tuple(fam))
        if inst.M < inst.K:
            raise NegativeGadgetSize(f"M={inst.M} sets cannot cover N={N} elements")
        return inst

    @property
    def M(self) -> int:
        return len(self.sets)

    @property
    def K(self) -> int:
        return self.N // 3

    def alpha(self, x: int) -> int:
        return sum(1 for s in self.sets if x in s)

    def is_cover(self, chosen) -> bool:
        """Whether the 1-based set indices ``chosen`` form an exact cover."""
        chosen = list(chosen)
        if len(chosen) != self.K or len(set(chosen)) != self.K:
            return False
        if any(not 1 <= k <= self.M for k in chosen):
            return False
        covered = set().union(*(self.sets[k - 1] for k in chosen)) if chosen else set()
        return len(covered) == self.N

    def to_json(self) -> dict:
        return {"N": self.N, "sets": [sorted(s) for s in self.sets]}


def frac_part(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def f_direct(x: Fraction) -> Fraction:
    """Demand an arc set of g(x) arcs hosts directly: all of x if its fraction is >= 3/4."""
    return x if frac_part(x) >= THREE_QUARTERS else F(x.numerator // x.denominator)


def g_arcs(x: Fraction) -> int:
    fl = x.numerator // x.denominator
    return fl + 1 if frac_part(x) >= THREE_QUARTERS else fl


@dataclass(frozen=True)
class ReductionArtifacts:
    instance: X3CInstance
    demand: DemandMatrix
    scaled: tuple[tuple[Fraction, ...], ...]
    kappa: Fraction
    n: int
    n_star: int
    H: Fraction
    L: Fraction
    labels: dict[str, int]

    def to_json(self) -> dict:
        from .core import fmt

        return {
            "instance": self.instance.to_json(),
            "n": self.n,
            "n_star": self.n_star,
            "H": fmt(self.H),
            "L": fmt(self.L),
            "kappa": fmt(self.kappa),
            "labels": self.labels,
            "entries": [[fmt(a) for a in row] for row in self.demand.entries],
        }


def _layout(inst: X3CInstance) -> tuple[dict[str, int], dict[str, int]]:
    M, N, K = inst.M, inst.N, inst.K
    sizes = {
        "A": 10 * (M - K),
        "B": 5 * M - 5 * K,  # 10(M/2 + N/6 - K) with N = 3K
        "Z": 15 * M - 10 * K,
    }
    if sizes["A"] < 0 or sizes["B"] < 0 or sizes["Z"] <= 0:
        raise NegativeGadgetSize(f"gadget sizes {sizes} for M={M}, K={K}")
    labels: dict[str, int] = {}

    def put(name):
        labels[name] = len(labels)

    put("s")
    put("t")
    for i in range(1, M + 1):
        put(f"u{i}")
        put(f"v{i}")
    for j in range(1, N + 1):
        put(f"y{j}")
    for grp in ("A", "B", "Z"):
        for k in range(1, sizes[grp] + 1):
            put(f"{grp.lower()}{k}")
    for i in range(1, M + 1):
        for j in range(1, 6):
            put(f"w{i}_{j}")
    return labels, sizes


def x3c_to_instance(inst: X3CInstance) -> ReductionArtifacts:
    for x in range(1, inst.N + 1):
        if inst.alpha(x) == 0:
            raise InvalidX3C(f"element {x} lies in no set")
    labels, sizes = _layout(inst)
    M, N, K = inst.M, inst.N, inst.K
    n = len(labels)
    ns = 2 * n - 1
    A = [labels[f"a{k}"] for k in range(1, sizes["A"] + 1)]
    B = [labels[f"b{k}"] for k in range(1, sizes["B"] + 1)]
    Z = [labels[f"z{k}"] for k in range(1, sizes["Z"] + 1)]
    nz = len(Z)
    d = [[ZERO] * n for _ in range(n)]
    s, t = labels["s"], labels["t"]

    def setd(u, v, x):
        d[u][v] = F(x)

    setd(s, s, ns - len(A) - K)
    for a in A:
        setd(s, a, F(9, 10))
        setd(a, a, ns - 1)
        setd(a, s, 1)
    setd(t, t, ns - len(B) - K)
    setd(t, s, K)
    for b in B:
        setd(t, b, 1)
        setd(b, b, ns - 1)
        setd(b, t, F(9, 10))
        for z in Z:
            setd(b, z, F(1, 10 * nz))
    for i in range(1, M + 1):
        u, v = labels[f"u{i}"], labels[f"v{i}"]
        setd(s, u, F(1, 2))
        setd(s, v, F(1, 2))
        setd(u, u, ns - F(11, 2))
        setd(u, v, F(1, 2))
        setd(v, u, F(1, 2))
        setd(v, t, F(1, 2))
        setd(v, v, ns - 4)
        for j in range(1, 6):
            w = labels[f"w{i}_{j}"]
            setd(u, w, 1)
            setd(w, w, ns - 1)
            setd(w, u, F(9, 10))
            for z in Z:
                setd(w, z, F(1, 10 * nz))
        for x in inst.sets[i - 1]:
            y = labels[f"y{x}"]
            setd(v, y, 1)
            setd(y, v, F(5, 6))
    for x in range(1, N + 1):
        y = labels[f"y{x}"]
        al = inst.alpha(x)
        setd(y, t, F(1, 6))
        setd(y, y, ns - al)
        for z in Z:
            setd(y, z, F(al - 1, 6 * nz))
    for z in Z:
        setd(z, z, ns - F(1, 10))
        for a in A:
            setd(z, a, F(1, 10 * nz))
        for i in range(1, M + 1):
            setd(z, labels[f"v{i}"], F(1, 2 * nz))

    H = sum((f_direct(x) for row in d for x in row), ZERO)
    L = F(n * ns - sum(g_arcs(x) for row in d for x in row))
    kappa = (H + 3 * L / 4 + F(N, 12)) / (n * ns)
    demand = validate_demand_matrix([[x / ns for x in row] for row in d])
    return ReductionArtifacts(
        inst, demand, tuple(tuple(r) for r in d), kappa, n, ns, H, L, labels
    )


def witness_from_cover(inst: X3CInstance, cover, art: Optional[ReductionArtifacts] = None) -> tuple[Topology, FlowPlan]:
    """Regular topology plus weak-mode flow plan built from an exact cover."""
    cover = sorted(cover)
    if not inst.is_cover(cover):
        raise NotACover(f"{cover} is not an exact cover")
    art = art or x3c_to_instance(inst)
    lab, ns, n, d = art.labels, art.n_star, art.n, art.scaled
    counts = [[0] * n for _ in range(n)]
    routes: list[Route] = []

    def route(amount, *arcs):
        routes.append(Route(tuple(arcs), F(amount) / ns))

    for u in range(n):
        for v in range(n):
            g = g_arcs(d[u][v])
            if g:
                counts[u][v] += g
                route(f_direct(d[u][v]), (u, v))
    s, t = lab["s"], lab["t"]
    half = F(1, 2)
    chosen = set(cover)
    for k in range(1, inst.M + 1):
        u, v = lab[f"u{k}"], lab[f"v{k}"]
        if k in chosen:
            counts[s][u] += 1
            counts[u][v] += 1
            counts[v][t] += 1
            route(half, (s, u))
            route(half, (s, u), (u, v))
            route(half, (u, v))
            route(half, (v, t))
            for x in inst.sets[k - 1]:
                route(F(1, 6), (lab[f"y{x}"], v), (v, t))
        else:
            counts[u][v] += 1
            counts[v][u] += 1
            route(half, (u, v))
            route(half, (v, u))
            route(half, (u, v), (v, u))
    return Topology.from_counts(counts, ns), FlowPlan(tuple(routes))


def brute_force_x3c(inst: X3CInstance) -> Optional[tuple[int, ...]]:
    """First exact cover (1-based set indices, lexicographic order), or None."""
    if inst.M > 20:
        raise ValueError("brute force is capped at 20 sets")
    for combo in itertools.combinations(range(1, inst.M + 1), inst.K):
        if inst.is_cover(combo):
            return combo
    return None


def random_x3c(N: int, M: int, seed: int, planted: bool = True, max_tries: int = 10_000) -> X3CInstance:
    """Random instance in which every element occurs in some set.

    With ``planted`` K of the sets form an exact cover. Free sets are drawn
    uniformly and the whole draw is rejected until every element is covered.
    """
    K = N // 3
    if M < K:
        raise NegativeGadgetSize(f"M={M} sets cannot cover N={N} elements")
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(max_tries):
        sets: list[list[int]] = []
        if planted:
            perm = [int(x) + 1 for x in rng.permutation(N)]
            sets += [perm[3 * k:3 * k + 3] for k in range(K)]
        while len(sets) < M:
            sets.append([int(x) + 1 for x in rng.choice(N, size=3, replace=False)])
        if len(set().union(*map(set, sets))) == N:
            order = [int(i) for i in rng.permutation(len(sets))]
            return X3CInstance.of(N, [sets[i] for i in order])
    raise InvalidX3C(f"no covering family found for N={N}, M={M} in {max_tries} draws")
