"""Two-phase dense-tableau simplex over exact rationals with Bland's rule."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class LpError(RuntimeError):
    pass


class Infeasible(LpError):
    pass


class Unbounded(LpError):
    pass


class LpNumericalFailure(LpError):
    """Pivot budget exhausted."""


@dataclass
class LinearProgram:
    """maximize ``objective . x`` subject to ``constraints``, ``x >= 0``.

    Constraint rows are stored sparsely as ``{var: coeff}`` dicts; the
    relation is one of ``"<="``, ``"="`` or ``">="``.
    """

    num_vars: int
    objective: dict[int, Fraction] = field(default_factory=dict)
    constraints: list[tuple[dict[int, Fraction], str, Fraction]] = field(default_factory=list)

    def add(self, coeffs, rel: str, bound) -> None:
        if rel not in ("<=", "=", ">="):
            raise ValueError(f"bad relation {rel!r}")
        row = {}
        for v, c in (coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)):
            if not 0 <= v < self.num_vars:
                raise IndexError(f"variable {v} out of range")
            c = Fraction(c)
            if c:
                row[v] = row.get(v, ZERO) + c
        self.constraints.append((row, rel, Fraction(bound)))

    @classmethod
    def dense(cls, objective: Sequence, constraints) -> "LinearProgram":
        lp = cls(len(objective), {i: Fraction(c) for i, c in enumerate(objective) if c})
        for coeffs, rel, bound in constraints:
            if len(coeffs) != lp.num_vars:
                raise ValueError("constraint width does not match objective")
            lp.add(coeffs, rel, bound)
        return lp


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int], width: int):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.width = width
        self.pivots = 0

    def pivot(self, r: int, c: int, obj: list[Fraction], obj_val: list[Fraction]) -> None:
        row = self.rows[r]
        p = row[c]
        if p != 1:
            inv = 1 / p
            for k in range(self.width):
                if row[k]:
                    row[k] *= inv
            self.rhs[r] *= inv
        nz = [k for k in range(self.width) if row[k]]
        b = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[c]
            if f:
                for k in nz:
                    other[k] -= f * row[k]
                self.rhs[i] -= f * b
        f = obj[c]
        if f:
            for k in nz:
                obj[k] -= f * row[k]
            obj_val[0] += f * b
        self.basis[r] = c
        self.pivots += 1

    def run(self, obj: list[Fraction], obj_val: list[Fraction], allowed: int, max_pivots: int) -> None:
        """Maximize; ``obj`` holds reduced costs (positive = improving)."""
        while True:
            enter = next((k for k in range(allowed) if obj[k] > 0), None)
            if enter is None:
                return
            best = None
            leave = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best, leave = ratio, i
            if leave is None:
                raise Unbounded("objective is unbounded")
            self.pivot(leave, enter, obj, obj_val)
            if self.pivots > max_pivots:
                raise LpNumericalFailure(f"pivot limit {max_pivots} exceeded")


def solve_lp(p: LinearProgram, max_pivots: int = 200_000) -> tuple[Fraction, list[Fraction]]:
    """Exact optimum and an optimal basic solution of ``p``."""
    n = p.num_vars
    m = len(p.constraints)
    # column layout: structural | slack/surplus | artificial
    slack_of: list[int | None] = []
    art_of: list[int | None] = []
    n_slack = sum(1 for _, rel, _ in p.constraints if rel != "=")
    next_slack = n
    next_art = n + n_slack
    normalized = []
    for coeffs, rel, bound in p.constraints:
        if bound < 0:
            coeffs = {v: -c for v, c in coeffs.items()}
            bound = -bound
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        normalized.append((coeffs, rel, bound))
        if rel == "=":
            slack_of.append(None)
        else:
            slack_of.append(next_slack)
            next_slack += 1
        if rel == "<=":
            art_of.append(None)
        else:
            art_of.append(next_art)
            next_art += 1
    width = next_art
    n_art_start = n + n_slack

    rows, rhs, basis = [], [], []
    for (coeffs, rel, bound), s, a in zip(normalized, slack_of, art_of):
        row = [ZERO] * width
        for v, c in coeffs.items():
            row[v] = c
        if s is not None:
            row[s] = ONE if rel == "<=" else -ONE
        if a is not None:
            row[a] = ONE
            basis.append(a)
        else:
            basis.append(s)
        rows.append(row)
        rhs.append(bound)
    tab = _Tableau(rows, rhs, basis, width)

    if width > n_art_start:
        # phase 1: maximize -(sum of artificials)
        obj = [ZERO] * width
        val = [ZERO]
        for i, b in enumerate(basis):
            if b >= n_art_start:
                for k in range(n_art_start):
                    obj[k] += rows[i][k]
                val[0] -= rhs[i]
        tab.run(obj, val, n_art_start, max_pivots)
        if val[0] != 0:
            raise Infeasible("no feasible point")
        # drive remaining (zero-level) artificials out of the basis
        for i in range(m - 1, -1, -1):
            if tab.basis[i] < n_art_start:
                continue
            col = next((k for k in range(n_art_start) if tab.rows[i][k]), None)
            if col is None:
                # redundant row
                del tab.rows[i]
                del tab.rhs[i]
                del tab.basis[i]
            else:
                tab.pivot(i, col, [ZERO] * width, [ZERO])
    # phase 2
    obj = [ZERO] * width
    val = [ZERO]
    for v, c in p.objective.items():
        obj[v] = Fraction(c)
    for i, b in enumerate(tab.basis):
        cb = obj[b]
        if cb:
            row = tab.rows[i]
            for k in range(width):
                if row[k]:
                    obj[k] -= cb * row[k]
            val[0] += cb * tab.rhs[i]
    tab.run(obj, val, n_art_start, max_pivots)
    x = [ZERO] * n
    for i, b in enumerate(tab.basis):
        if b < n:
            x[b] = tab.rhs[i]
    return val[0], x
