"""Exact-rational data model: demand matrices, regular multigraph topologies,
flow plans, the named matrix families and small-instance enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

Arc = tuple[int, int]
Grid = tuple[tuple[Fraction, ...], ...]

MODES = ("direct-strict", "direct-weak", "general-strict", "general-weak")


class DemandMatrixError(ValueError):
    pass


class NegativeEntry(DemandMatrixError):
    def __init__(self, i: int, j: int, value: Fraction):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"entry ({i},{j}) is negative: {value}")


class RowSumMismatch(DemandMatrixError):
    def __init__(self, i: int, actual: Fraction):
        self.i, self.actual = i, actual
        super().__init__(f"row {i} sums to {actual}, expected 1")


class ColSumMismatch(DemandMatrixError):
    def __init__(self, j: int, actual: Fraction):
        self.j, self.actual = j, actual
        super().__init__(f"column {j} sums to {actual}, expected 1")


class NotSquare(DemandMatrixError):
    pass


class TopologyError(ValueError):
    pass


class ParamOutOfRange(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


def as_fraction(x) -> Fraction:
    """Exact conversion; strings like "3/8" or "0.16" and ints are accepted.

    Floats are rejected: they rarely denote the value the caller meant.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError(f"refusing inexact float {x!r}; pass a string or Fraction")
    return Fraction(x)


def fmt(x: Fraction) -> str:
    """Render a rational as "p/q" (or "p" when integral)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class DemandMatrix:
    entries: Grid

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: Arc) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def scaled(self, x) -> list[list[Fraction]]:
        return [[x * a for a in row] for row in self.entries]

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(fmt(a) for a in row) + "]" for row in self.entries) + "]"


@dataclass(frozen=True)
class Topology:
    """Directed ``degree``-regular multigraph given by its arc-count matrix.

    Self-loops live on the diagonal. Every arc has capacity ``1/degree``.
    """

    counts: tuple[tuple[int, ...], ...]
    degree: int

    def __post_init__(self):
        n = len(self.counts)
        if any(len(row) != n for row in self.counts):
            raise TopologyError("count matrix is not square")
        for i, row in enumerate(self.counts):
            if any(c < 0 for c in row):
                raise TopologyError(f"negative arc count in row {i}")
            if sum(row) != self.degree:
                raise TopologyError(f"row {i} has out-degree {sum(row)}, expected {self.degree}")
        for j in range(n):
            s = sum(self.counts[i][j] for i in range(n))
            if s != self.degree:
                raise TopologyError(f"column {j} has in-degree {s}, expected {self.degree}")

    @classmethod
    def from_counts(cls, counts: Sequence[Sequence[int]], degree: Optional[int] = None) -> "Topology":
        rows = tuple(tuple(int(c) for c in row) for row in counts)
        if degree is None:
            n = len(rows)
            degree = sum(rows[0]) if n else 0
        return cls(rows, degree)

    @property
    def n(self) -> int:
        return len(self.counts)

    def __getitem__(self, ij: Arc) -> int:
        i, j = ij
        return self.counts[i][j]

    def arcs(self) -> list[Arc]:
        """Ordered pairs carrying at least one arc."""
        return [(i, j) for i in range(self.n) for j in range(self.n) if self.counts[i][j] > 0]

    def __str__(self) -> str:
        return str([list(r) for r in self.counts])


@dataclass(frozen=True)
class Route:
    path: tuple[Arc, ...]
    amount: Fraction

    @property
    def source(self) -> int:
        return self.path[0][0]

    @property
    def target(self) -> int:
        return self.path[-1][1]


@dataclass(frozen=True)
class FlowPlan:
    """Multicommodity flow as explicit (path, amount) pairs, amounts in demand units."""

    routes: tuple[Route, ...] = ()

    @classmethod
    def of(cls, pairs) -> "FlowPlan":
        return cls(tuple(Route(tuple(tuple(a) for a in p), as_fraction(d)) for p, d in pairs))

    def __len__(self) -> int:
        return len(self.routes)

    def __iter__(self):
        return iter(self.routes)

    def scaled(self, x) -> "FlowPlan":
        return FlowPlan(tuple(Route(r.path, r.amount * x) for r in self.routes))

    def __add__(self, other: "FlowPlan") -> "FlowPlan":
        return FlowPlan(self.routes + other.routes)


@dataclass(frozen=True)
class ThroughputReport:
    mode: str
    value: Fraction
    witness: Optional[FlowPlan] = None
    hosted: Optional[Grid] = field(default=None, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0 <= self.value <= 1:
            raise ValueError(f"throughput value {self.value} outside [0, 1]")


def _freeze(rows) -> Grid:
    return tuple(tuple(as_fraction(a) for a in row) for row in rows)


def validate_demand_matrix(raw) -> DemandMatrix:
    """Check ``raw`` is square, non-negative and doubly stochastic, exactly."""
    entries = _freeze(raw)
    n = len(entries)
    if any(len(row) != n for row in entries):
        raise NotSquare(f"matrix is not square ({n} rows, row lengths {[len(r) for r in entries]})")
    for i, row in enumerate(entries):
        for j, a in enumerate(row):
            if a < 0:
                raise NegativeEntry(i, j, a)
    for i, row in enumerate(entries):
        s = sum(row, Fraction(0))
        if s != 1:
            raise RowSumMismatch(i, s)
    for j in range(n):
        s = sum((entries[i][j] for i in range(n)), Fraction(0))
        if s != 1:
            raise ColSumMismatch(j, s)
    return DemandMatrix(entries)


def identity(n: int) -> DemandMatrix:
    return validate_demand_matrix([[int(i == j) for j in range(n)] for i in range(n)])


# --- named families -------------------------------------------------------

F = Fraction

FAMILIES = (
    "M1",
    "M2",
    "strong-upper",
    "direct-upper",
    "weak-upper-2x2",
    "weak-direct-upper",
    "fig-second-stage",
    "fig-flow-example",
    "uniform",
)


@dataclass(frozen=True)
class MatrixFamilyId:
    tag: str
    n: Optional[int] = None
    kappa: Optional[Fraction] = None

    def __post_init__(self):
        if self.tag not in FAMILIES:
            raise ParamOutOfRange(f"unknown matrix family {self.tag!r}")

    def __str__(self) -> str:
        parts = [self.tag]
        if self.n is not None:
            parts.append(f"n={self.n}")
        if self.kappa is not None:
            parts.append(f"kappa={fmt(self.kappa)}")
        return ",".join(parts)


def _need_n(fam: MatrixFamilyId, lo: int) -> int:
    if fam.n is None or fam.n < lo:
        raise ParamOutOfRange(f"{fam.tag} requires n >= {lo}, got {fam.n}")
    return fam.n


def _need_kappa(fam: MatrixFamilyId) -> Fraction:
    if fam.kappa is None:
        raise ParamOutOfRange(f"{fam.tag} requires kappa")
    return as_fraction(fam.kappa)


def paper_matrix(family: MatrixFamilyId) -> DemandMatrix:
    tag = family.tag
    if tag == "M1":
        rows = [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]]
    elif tag == "M2":
        rows = [[F(9, 10), F(1, 10)], [F(1, 10), F(9, 10)]]
    elif tag == "strong-upper":
        kappa = _need_kappa(family)
        if not F(5, 6) < kappa <= 1:
            raise ParamOutOfRange(f"strong-upper requires 5/6 < kappa <= 1, got {kappa}")
        eps = kappa - F(5, 6)
        rows = [[1 - eps, eps], [eps, 1 - eps]]
    elif tag == "direct-upper":
        n = _need_n(family, 2)
        kappa = _need_kappa(family)
        base = F(n, 2 * n - 1)
        if not base < kappa <= 1:
            raise ParamOutOfRange(f"direct-upper requires {base} < kappa <= 1, got {kappa}")
        delta = min((kappa - base) / 2, F(1, 2 * n - 1))
        off = delta / (n - 1)
        rows = [[1 - delta if i == j else off for j in range(n)] for i in range(n)]
    elif tag == "weak-upper-2x2":
        rows = [[F(5, 9), F(4, 9)], [F(4, 9), F(5, 9)]]
    elif tag == "weak-direct-upper":
        n = _need_n(family, 1)
        # diagonal reductions for odd/even (1-based) rows
        a, b = (F(3, 2), F(1, 2)) if n % 2 else (F(1), F(1))
        rows = []
        for i in range(1, n + 1):
            row = []
            for j in range(1, n + 1):
                v = F(5, 2) if (i + j) % 2 == 0 else F(3, 2)
                if i == j:
                    v -= a if i % 2 else b
                row.append(v / (2 * n - 1))
            rows.append(row)
    elif tag == "fig-second-stage":
        rows = [
            [F(3, 8), F(1, 4), F(3, 8)],
            [F(3, 8), F(3, 8), F(1, 4)],
            [F(1, 4), F(3, 8), F(3, 8)],
        ]
    elif tag == "fig-flow-example":
        rows = [
            ["0.16", "0.12", "0.72"],
            ["0.12", "0.84", "0.04"],
            ["0.72", "0.04", "0.24"],
        ]
    else:  # uniform
        n = _need_n(family, 1)
        rows = [[F(1, n)] * n for _ in range(n)]
    return validate_demand_matrix(rows)


def family_corpus(n: int) -> list[tuple[str, DemandMatrix]]:
    """Every named family instantiable at size ``n`` with representative parameters."""
    out = []
    fams = [MatrixFamilyId("uniform", n), MatrixFamilyId("weak-direct-upper", n)]
    if n == 2:
        fams += [
            MatrixFamilyId("M1"),
            MatrixFamilyId("M2"),
            MatrixFamilyId("weak-upper-2x2"),
            MatrixFamilyId("strong-upper", kappa=F(9, 10)),
        ]
    if n == 3:
        fams += [MatrixFamilyId("fig-second-stage"), MatrixFamilyId("fig-flow-example")]
    if n >= 2:
        fams.append(MatrixFamilyId("direct-upper", n, F(n, 2 * n - 1) + F(1, 20)))
    for fam in fams:
        out.append((str(fam), paper_matrix(fam)))
    out.append((f"identity,n={n}", identity(n)))
    return out


# --- generators -----------------------------------------------------------

def random_doubly_stochastic(n: int, k: int, seed: int) -> DemandMatrix:
    """Convex combination of ``k`` random permutation matrices with rational weights."""
    if n < 1 or k < 1:
        raise ParamOutOfRange("need n >= 1 and k >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    perms = [rng.permutation(n) for _ in range(k)]
    weights = [int(w) for w in rng.integers(1, 1 << 16, size=k)]
    total = sum(weights)
    acc = [[F(0)] * n for _ in range(n)]
    for perm, w in zip(perms, weights):
        for i, j in enumerate(perm):
            acc[i][int(j)] += F(w, total)
    return validate_demand_matrix(acc)


def enumerate_regular_topologies(n: int, r: int) -> Iterator[Topology]:
    """All n x n non-negative integer matrices with every margin equal to ``r``.

    Row-major lexicographic order; backtracking with running column sums.
    """
    if n < 1 or r < 0:
        return
    col = [0] * n
    grid = [[0] * n for _ in range(n)]

    def fill(i: int, j: int, row_left: int):
        if i == n:
            yield Topology(tuple(tuple(row) for row in grid), r)
            return
        if j == n - 1:
            # last entry of the row is forced
            if col[j] + row_left > r:
                return
            if i == n - 1 and col[j] + row_left != r:
                return
            grid[i][j] = row_left
            col[j] += row_left
            yield from fill(i + 1, 0, r)
            col[j] -= row_left
            return
        # on the last row every column must be completed exactly
        if i == n - 1:
            lo = hi = r - col[j]
            if lo > row_left:
                return
        else:
            lo, hi = 0, min(row_left, r - col[j])
        for v in range(lo, hi + 1):
            grid[i][j] = v
            col[j] += v
            yield from fill(i, j + 1, row_left - v)
            col[j] -= v

    yield from fill(0, 0, r)


def default_degree(n: int) -> int:
    return 2 * n - 1
