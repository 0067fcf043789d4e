"""Exact two-phase simplex over the rationals.

Problems are in equality form: maximize ``c.x`` subject to ``A x = b`` and
``x >= 0``.  Pivoting follows Bland's rule (lowest-index entering column,
lowest-index basic variable among ratio ties), so the solver terminates and
returns the same vertex for the same input.  The tableau is stored as one
sparse dict per row; NS polytope constraint matrices are mostly zeros.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

try:
    from gmpy2 import mpq
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    mpq = Fraction

from bellmono.model import ConditionalBox

log = logging.getLogger(__name__)


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``variables`` name the columns; rows and objective are sparse dicts."""

    variables: Sequence[Hashable]
    objective: Mapping[Hashable, Fraction]
    equalities: Sequence[tuple[Mapping[Hashable, Fraction], Fraction]]
    scenario: object = None  # set when variables are box cells


@dataclass(frozen=True)
class LpSolution:
    status: Status
    value: Fraction | None = None
    point: Mapping[Hashable, Fraction] = field(default_factory=dict)
    witness: ConditionalBox | None = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class _Tableau:
    def __init__(self, rows: list[dict], rhs: list, basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.obj: dict = {}
        self.value = mpq(0)
        self.pivots = 0

    def set_objective(self, cost: Mapping[int, object]) -> None:
        """Reduced costs ``c_j - sum_i c_B(i) row_i[j]`` for the current basis."""
        obj = {j: mpq(c) for j, c in cost.items() if c}
        value = mpq(0)
        for i, row in enumerate(self.rows):
            cb = cost.get(self.basis[i], 0)
            if not cb:
                continue
            value += cb * self.rhs[i]
            for j, v in row.items():
                r = obj.get(j, 0) - cb * v
                if r:
                    obj[j] = r
                else:
                    obj.pop(j, None)
        for j in self.basis:
            obj.pop(j, None)
        self.obj = obj
        self.value = value

    def pivot(self, r: int, j: int) -> None:
        row = self.rows[r]
        piv = row[j]
        if piv != 1:
            inv = 1 / piv
            for k in row:
                row[k] *= inv
            self.rhs[r] *= inv
        b_r = self.rhs[r]
        items = list(row.items())
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(j)
            if f is None:
                continue
            for k, v in items:
                nv = other.get(k, 0) - f * v
                if nv:
                    other[k] = nv
                else:
                    del other[k]
            self.rhs[i] -= f * b_r
        f = self.obj.get(j)
        if f is not None:
            for k, v in items:
                nv = self.obj.get(k, 0) - f * v
                if nv:
                    self.obj[k] = nv
                else:
                    del self.obj[k]
            self.value += f * b_r
        self.basis[r] = j
        self.pivots += 1

    def run(self, allowed: int) -> Status:
        """Pivot to optimality; only columns below ``allowed`` may enter."""
        while True:
            entering = min((j for j, v in self.obj.items() if v > 0 and j < allowed), default=None)
            if entering is None:
                return Status.OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                ratio = self.rhs[i] / a
                key = (ratio, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
            if best is None:
                return Status.UNBOUNDED
            self.pivot(best[1], entering)


def lp_maximize(lp: LinearProgram) -> LpSolution:
    """Maximize ``lp.objective`` over ``{x >= 0 : equalities}`` exactly."""
    index = {v: j for j, v in enumerate(lp.variables)}
    n = len(index)
    rows: list[dict] = []
    rhs: list = []
    for coeffs, b in lp.equalities:
        row = {}
        for var, c in coeffs.items():
            if c:
                row[index[var]] = row.get(index[var], 0) + mpq(c)
        row = {j: v for j, v in row.items() if v}
        b = mpq(b)
        if b < 0:
            row = {j: -v for j, v in row.items()}
            b = -b
        if not row:
            if b != 0:
                return LpSolution(Status.INFEASIBLE)
            continue
        rows.append(row)
        rhs.append(b)

    # Phase 1: artificial variable n+i starts basic in row i.  Artificial
    # columns are never stored since they may not re-enter once they leave.
    m = len(rows)
    tab = _Tableau(rows, rhs, [n + i for i in range(m)])
    tab.set_objective({n + i: -1 for i in range(m)})
    tab.run(allowed=n)
    if tab.value != 0:
        log.debug("phase 1 ended at %s after %d pivots: infeasible", tab.value, tab.pivots)
        return LpSolution(Status.INFEASIBLE, pivots=tab.pivots)

    # Drive remaining zero-level artificials out of the basis; rows with no
    # structural entry left are redundant and dropped.
    keep = []
    for i in range(len(tab.rows)):
        if tab.basis[i] < n:
            keep.append(i)
            continue
        j = min(tab.rows[i], default=None)
        if j is not None:
            tab.pivot(i, j)
            keep.append(i)
    tab.rows = [tab.rows[i] for i in keep]
    tab.rhs = [tab.rhs[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]
    log.debug("phase 1: %d pivots, %d of %d rows independent", tab.pivots, len(keep), m)

    cost = {index[v]: mpq(c) for v, c in lp.objective.items() if c}
    tab.set_objective(cost)
    status = tab.run(allowed=n)
    if status is Status.UNBOUNDED:
        return LpSolution(Status.UNBOUNDED, pivots=tab.pivots)

    point = {v: Fraction(0) for v in lp.variables}
    for i, j in enumerate(tab.basis):
        point[lp.variables[j]] = _to_fraction(tab.rhs[i])
    value = _to_fraction(tab.value)
    witness = None
    if lp.scenario is not None:
        witness = ConditionalBox(lp.scenario, point)
    return LpSolution(Status.OPTIMAL, value, point, witness, tab.pivots)


def check_point(lp: LinearProgram, point: Mapping[Hashable, Fraction]) -> Fraction:
    """Verify feasibility of ``point`` exactly and return its objective value."""
    for var in lp.variables:
        if point[var] < 0:
            raise AssertionError(f"variable {var} is negative: {point[var]}")
    for coeffs, b in lp.equalities:
        lhs = sum((c * point[v] for v, c in coeffs.items()), Fraction(0))
        if lhs != b:
            raise AssertionError(f"equality violated: {lhs} != {b}")
    return sum((c * point[v] for v, c in lp.objective.items()), Fraction(0))
