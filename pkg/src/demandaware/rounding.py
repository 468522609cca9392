"""Integral rounding of fractional matrices with integer row/column sums.

Both routines repeatedly cancel along an even cycle of fractional entries
in the row/column bipartite graph. Since every line sum is an integer, no
vertex of that graph has degree one, so a cycle always exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import as_fraction

ZERO = Fraction(0)
TWO64 = 1 << 64


class InvalidInput(ValueError):
    pass


@dataclass(frozen=True)
class RoundingSample:
    bits: tuple[tuple[int, ...], ...]
    provenance: str
    seed: Optional[int] = None

    def row_sums(self) -> list[int]:
        return [sum(r) for r in self.bits]

    def col_sums(self) -> list[int]:
        return [sum(c) for c in zip(*self.bits)]


def line_sums(F: Sequence[Sequence[Fraction]]) -> tuple[list[Fraction], list[Fraction]]:
    rows = [sum(r, ZERO) for r in F]
    cols = [sum(c, ZERO) for c in zip(*F)]
    return rows, cols


def check_fractional_matrix(raw) -> list[list[Fraction]]:
    F = [[as_fraction(x) for x in row] for row in raw]
    n = len(F)
    if any(len(row) != n for row in F):
        raise InvalidInput("matrix is not square")
    for i, row in enumerate(F):
        for j, x in enumerate(row):
            if not 0 <= x <= 1:
                raise InvalidInput(f"entry ({i},{j}) = {x} outside [0, 1]")
    rows, cols = line_sums(F)
    for i, s in enumerate(rows):
        if s.denominator != 1:
            raise InvalidInput(f"row {i} sums to non-integer {s}")
    for j, s in enumerate(cols):
        if s.denominator != 1:
            raise InvalidInput(f"column {j} sums to non-integer {s}")
    return F


def _find_cycle(C: list[list[Fraction]]) -> Optional[list[tuple[int, int]]]:
    """Deterministic walk-until-repeat over fractional entries.

    Starts at the lexicographically smallest fractional entry and always
    takes the lowest-index unused neighbour. Returns the cycle as a list of
    matrix cells, consecutive cells sharing a row or a column.
    """
    n = len(C)
    frac = lambda i, j: C[i][j].denominator != 1  # noqa: E731
    start = next(((i, j) for i in range(n) for j in range(n) if frac(i, j)), None)
    if start is None:
        return None
    # vertices: ("r", i) / ("c", j); walk alternates row -> col -> row ...
    i0, j0 = start
    walk = [("r", i0), ("c", j0)]
    cells = [(i0, j0)]
    pos = {("r", i0): 0, ("c", j0): 1}
    while True:
        kind, idx = walk[-1]
        last = cells[-1]
        if kind == "c":
            nxt = next(
                (("r", i), (i, idx)) for i in range(n) if frac(i, idx) and (i, idx) != last
            )
        else:
            nxt = next(
                (("c", j), (idx, j)) for j in range(n) if frac(idx, j) and (idx, j) != last
            )
        vertex, cell = nxt
        if vertex in pos:
            k = pos[vertex]
            return cells[k:] + [cell]
        pos[vertex] = len(walk)
        walk.append(vertex)
        cells.append(cell)


def cycle_round(F, weights=None) -> RoundingSample:
    """Round to 0/1 keeping line sums, never decreasing ``sum(w * x)``.

    ``weights`` default to ``F`` itself, in which case the result satisfies
    ``sum(F * bits) >= X**2 / n**2`` with ``X`` the total of ``F``.
    """
    A = check_fractional_matrix(F)
    W = A if weights is None else [[as_fraction(x) for x in row] for row in weights]
    C = [row[:] for row in A]
    while (cycle := _find_cycle(C)) is not None:
        odd, even = cycle[0::2], cycle[1::2]
        d_odd = sum((W[i][j] for i, j in odd), ZERO)
        d_even = sum((W[i][j] for i, j in even), ZERO)
        if d_odd <= d_even:
            down, up = odd, even
        else:
            down, up = even, odd
        eps = min(min(C[i][j] for i, j in down), min(1 - C[i][j] for i, j in up))
        for i, j in down:
            C[i][j] -= eps
        for i, j in up:
            C[i][j] += eps
    bits = tuple(tuple(int(x) for x in row) for row in C)
    if weights is None:
        n = len(A)
        X = sum((sum(r, ZERO) for r in A), ZERO)
        gain = sum((A[i][j] * bits[i][j] for i in range(n) for j in range(n)), ZERO)
        if n and gain < X * X / (n * n):
            raise AssertionError(f"averaging bound violated: {gain} < {X * X / (n * n)}")
    return RoundingSample(bits, "cycle")


def _bernoulli(rng: np.random.PCG64, p: Fraction) -> bool:
    """True with probability p, up to 2**-64 bias, from one raw 64-bit draw."""
    u = int(rng.random_raw())
    return u * p.denominator < p.numerator * TWO64


def dependent_round(F, seed: int) -> RoundingSample:
    """Randomized 0/1 rounding with exact marginals and preserved line sums.

    Each step finds a cycle and picks one of the two alternating shifts with
    probabilities inversely proportional to their magnitudes, which keeps
    every entry's expectation fixed (bipartite dependent rounding).
    """
    C = check_fractional_matrix(F)
    rng = np.random.PCG64(seed)
    while (cycle := _find_cycle(C)) is not None:
        odd, even = cycle[0::2], cycle[1::2]
        # alpha: raise odd / lower even; beta: lower odd / raise even
        alpha = min(min(1 - C[i][j] for i, j in odd), min(C[i][j] for i, j in even))
        beta = min(min(C[i][j] for i, j in odd), min(1 - C[i][j] for i, j in even))
        if _bernoulli(rng, beta / (alpha + beta)):
            shift = alpha
        else:
            shift = -beta
        for i, j in odd:
            C[i][j] += shift
        for i, j in even:
            C[i][j] -= shift
    bits = tuple(tuple(int(x) for x in row) for row in C)
    return RoundingSample(bits, "dependent", seed)


def fractional_part(grid) -> list[list[Fraction]]:
    return [[x - (x.numerator // x.denominator) for x in row] for row in grid]


def floor_part(grid) -> list[list[int]]:
    return [[x.numerator // x.denominator for x in row] for row in grid]
