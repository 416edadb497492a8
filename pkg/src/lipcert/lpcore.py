"""Exact rational linear programming.

Maximises a linear objective over {x : Ax <= b} with x free, via a dense
two-phase tableau simplex with Bland's anti-cycling rule.  All arithmetic
is in `fractions.Fraction`; returned optima satisfy every constraint
exactly.  Problem sizes here are small, so exactness beats speed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InvalidInput

Row = list[Fraction]


@dataclass
class LinearProgram:
    num_vars: int
    rows: list[Row] = field(default_factory=list)       # constraint coefficients
    rhs: list[Fraction] = field(default_factory=list)   # bounds, sense <=
    objective: Row = field(default_factory=list)        # maximised

    def add_constraint(self, coeffs: Sequence[Fraction | int], bound) -> None:
        row = [Fraction(c) for c in coeffs]
        if len(row) != self.num_vars:
            raise InvalidInput("constraint length does not match num_vars")
        self.rows.append(row)
        self.rhs.append(Fraction(bound))

    def set_objective(self, coeffs: Sequence[Fraction | int]) -> None:
        obj = [Fraction(c) for c in coeffs]
        if len(obj) != self.num_vars:
            raise InvalidInput("objective length does not match num_vars")
        self.objective = obj


@dataclass(frozen=True)
class LpResult:
    status: str                       # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction] = None
    point: Optional[tuple[Fraction, ...]] = None


def solve_lp(lp: LinearProgram) -> LpResult:
    """Two-phase simplex on the split-variable standard form."""
    if not lp.objective:
        raise InvalidInput("objective is not set")
    n, m = lp.num_vars, len(lp.rows)
    # Free x becomes u - v with u, v >= 0; slacks close the inequalities.
    ncols = 2 * n + m
    rows: list[Row] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    art_cols: list[int] = []
    for i in range(m):
        row = [Fraction(0)] * ncols
        for j, c in enumerate(lp.rows[i]):
            row[j] = c
            row[n + j] = -c
        row[2 * n + i] = Fraction(1)
        b = lp.rhs[i]
        if b < 0:
            row = [-c for c in row]
            b = -b
            art_cols.append(i)
        rows.append(row)
        rhs.append(b)
        basis.append(-1)  # filled below

    # Artificial columns for rows whose slack got negated.
    for k, i in enumerate(art_cols):
        for r in range(m):
            rows[r].append(Fraction(1) if r == i else Fraction(0))
    total = ncols + len(art_cols)
    art_index = {i: ncols + k for k, i in enumerate(art_cols)}
    for i in range(m):
        basis[i] = art_index.get(i, 2 * n + i)

    if art_cols:
        phase1 = [Fraction(0)] * total
        for col in art_index.values():
            phase1[col] = Fraction(-1)  # maximise -(sum of artificials)
        status = _simplex(rows, rhs, basis, phase1)
        assert status == "optimal"  # phase-1 objective is bounded above by 0
        if _objective_value(basis, rhs, phase1) != 0:
            return LpResult("infeasible")
        _drive_out_artificials(rows, rhs, basis, ncols)

    obj = [Fraction(0)] * total
    for j, c in enumerate(lp.objective):
        obj[j] = c
        obj[n + j] = -c
    forbidden = set(range(ncols, total))
    status = _simplex(rows, rhs, basis, obj, forbidden)
    if status == "unbounded":
        return LpResult("unbounded")
    x = [Fraction(0)] * total
    for i, col in enumerate(basis):
        x[col] = rhs[i]
    point = tuple(x[j] - x[n + j] for j in range(n))
    value = sum((c * p for c, p in zip(lp.objective, point)), Fraction(0))
    return LpResult("optimal", value, point)


def _objective_value(basis, rhs, obj) -> Fraction:
    return sum((obj[col] * rhs[i] for i, col in enumerate(basis)), Fraction(0))


def _simplex(rows, rhs, basis, obj, forbidden=frozenset()) -> str:
    """In-place primal simplex with Bland's rule; rows are kept feasible."""
    m = len(rows)
    total = len(obj)
    while True:
        # Reduced costs c_j - c_B . B^-1 A_j; tableau rows already hold B^-1 A.
        y = {col: obj[col] for col in basis}
        entering = -1
        for j in range(total):
            if j in forbidden or j in y:
                continue
            red = obj[j] - sum(obj[basis[i]] * rows[i][j] for i in range(m))
            if red > 0:
                entering = j
                break  # Bland: lowest improving index
        if entering < 0:
            return "optimal"
        leaving = -1
        best: Optional[Fraction] = None
        for i in range(m):
            a = rows[i][entering]
            if a > 0:
                ratio = rhs[i] / a
                if (best is None or ratio < best
                        or (ratio == best and basis[i] < basis[leaving])):
                    best = ratio
                    leaving = i
        if leaving < 0:
            return "unbounded"
        _pivot(rows, rhs, basis, leaving, entering)


def _pivot(rows, rhs, basis, r, c) -> None:
    piv = rows[r][c]
    rows[r] = [x / piv for x in rows[r]]
    rhs[r] /= piv
    for i in range(len(rows)):
        if i != r and rows[i][c] != 0:
            factor = rows[i][c]
            rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
            rhs[i] -= factor * rhs[r]
    basis[r] = c


def _drive_out_artificials(rows, rhs, basis, ncols) -> None:
    for i in range(len(rows)):
        if basis[i] >= ncols:
            for j in range(ncols):
                if rows[i][j] != 0:
                    _pivot(rows, rhs, basis, i, j)
                    break
            # A fully zero structural row is redundant; its artificial stays
            # basic at value zero, which is harmless for phase 2.
