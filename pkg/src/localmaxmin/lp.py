"""Exact rational linear programming.

:func:`simplex` is a dense-tableau two-phase simplex with Bland's
smallest-index rule, run over GMP rationals.  :func:`solve_max_min` solves a
max-min LP in two stages (maximise the minimum utility, then minimise the
total mass at that utility) after quotienting the instance by its coarsest
coefficient-weighted equitable partition.

The quotient is exact: if rows and columns are split into classes such that
every row of a class sees the same weighted total in every column class (and
vice versa), then averaging any feasible solution over column classes keeps
it feasible with the same objective value, so an optimum of the reduced LP
lifts to an optimum of the original.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .errors import DomainError, InfeasibleError, UnboundedError
from .model import Assignment, MaxMinInstance, Role, as_fraction


class Relation(str, enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Row:
    coeffs: Tuple[Fraction, ...]
    relation: Relation
    rhs: Fraction


@dataclass(frozen=True)
class LinearProgram:
    """Optimise ``objective . x`` subject to explicit rows.

    Variables flagged in ``nonneg`` carry ``x >= 0``; the rest are free.
    Every row must have exactly ``n`` coefficients.
    """

    n: int
    objective: Tuple[Fraction, ...]
    rows: Tuple[Row, ...]
    nonneg: Tuple[bool, ...] = ()
    maximize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(as_fraction(v) for v in self.objective))
        object.__setattr__(self, "rows", tuple(
            Row(tuple(as_fraction(v) for v in r.coeffs), Relation(r.relation), as_fraction(r.rhs))
            for r in self.rows))
        if not self.nonneg:
            object.__setattr__(self, "nonneg", (True,) * self.n)
        if len(self.objective) != self.n or len(self.nonneg) != self.n:
            raise ValueError("objective and nonneg must have length n")
        for j, r in enumerate(self.rows):
            if len(r.coeffs) != self.n:
                raise ValueError(f"row {j} has {len(r.coeffs)} coefficients, expected {self.n}")


@dataclass(frozen=True)
class SolveResult:
    status: Status
    value: Optional[Fraction] = None
    x: Optional[Tuple[Fraction, ...]] = None
    pivots: int = 0


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class _Tableau:
    """Rows are ``[a_0 .. a_{ncols-1}, rhs]`` lists of mpq; ``basis[r]`` is the basic column."""

    def __init__(self, rows, basis, ncols):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def pivot(self, r: int, col: int, obj: List) -> None:
        prow = self.rows[r]
        inv = 1 / prow[col]
        nz = [j for j, v in enumerate(prow) if v != 0]
        for j in nz:
            prow[j] *= inv
        for other in self.rows + [obj]:
            if other is prow:
                continue
            f = other[col]
            if f == 0:
                continue
            for j in nz:
                other[j] -= f * prow[j]
        self.basis[r] = col
        self.pivots += 1

    def reduced_costs(self, cost: Sequence) -> List:
        """Objective row ``[d_0 .. d_{n-1}, -value]`` for maximising ``cost``."""
        obj = [mpq(c) for c in cost] + [mpq(0)]
        for r, row in enumerate(self.rows):
            cb = cost[self.basis[r]]
            if cb != 0:
                for j, v in enumerate(row):
                    if v != 0:
                        obj[j] -= cb * v
        return obj

    def optimise(self, obj: List, allowed: Sequence[bool]) -> bool:
        """Bland's rule to optimality; False when unbounded."""
        while True:
            col = next((j for j in range(self.ncols) if allowed[j] and obj[j] > 0), None)
            if col is None:
                return True
            best = None
            for r, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return False
            self.pivot(best[1], col, obj)


def simplex(lp: LinearProgram) -> SolveResult:
    """Exact two-phase simplex with the smallest-index anti-cycling rule."""
    # free variables are split as x = x+ - x-
    cols: List[Tuple[int, int]] = []
    for j in range(lp.n):
        cols.append((j, 1))
        if not lp.nonneg[j]:
            cols.append((j, -1))
    nstruct = len(cols)

    norm_rows = []
    for r in lp.rows:
        coeffs = [mpq(r.coeffs[j]) * s for j, s in cols]
        rhs, rel = mpq(r.rhs), r.relation
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
            rel = {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}[rel]
        norm_rows.append((coeffs, rel, rhs))

    n_slack = sum(1 for _, rel, _ in norm_rows if rel is not Relation.EQ)
    n_art = sum(1 for _, rel, _ in norm_rows if rel is not Relation.LE)
    ncols = nstruct + n_slack + n_art
    rows, basis = [], []
    s_at, a_at = nstruct, nstruct + n_slack
    artificial = [False] * ncols
    for coeffs, rel, rhs in norm_rows:
        row = coeffs + [mpq(0)] * (n_slack + n_art) + [rhs]
        if rel is Relation.LE:
            row[s_at] = mpq(1)
            basis.append(s_at)
            s_at += 1
        else:
            if rel is Relation.GE:
                row[s_at] = mpq(-1)
                s_at += 1
            row[a_at] = mpq(1)
            artificial[a_at] = True
            basis.append(a_at)
            a_at += 1
        rows.append(row)

    tab = _Tableau(rows, basis, ncols)
    if n_art:
        cost = [mpq(-1) if artificial[j] else mpq(0) for j in range(ncols)]
        obj = tab.reduced_costs(cost)
        tab.optimise(obj, [True] * ncols)
        if obj[-1] != 0:  # obj[-1] = -(phase-1 value) = sum of artificials
            return SolveResult(Status.INFEASIBLE, pivots=tab.pivots)
        # drive zero-valued artificials out of the basis; drop redundant rows
        r = 0
        while r < len(tab.rows):
            if artificial[tab.basis[r]]:
                col = next((j for j in range(ncols) if not artificial[j] and tab.rows[r][j] != 0), None)
                if col is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, col, [mpq(0)] * (ncols + 1))
            r += 1

    sign = 1 if lp.maximize else -1
    cost = [mpq(0)] * ncols
    for k, (j, s) in enumerate(cols):
        cost[k] = mpq(lp.objective[j]) * s * sign
    obj = tab.reduced_costs(cost)
    allowed = [not a for a in artificial]
    if not tab.optimise(obj, allowed):
        return SolveResult(Status.UNBOUNDED, pivots=tab.pivots)

    colval = [mpq(0)] * ncols
    for r, b in enumerate(tab.basis):
        colval[b] = tab.rows[r][-1]
    x = [mpq(0)] * lp.n
    for k, (j, s) in enumerate(cols):
        x[j] += s * colval[k]
    xs = tuple(_frac(v) for v in x)
    value = sum((c * v for c, v in zip(lp.objective, xs)), Fraction(0))
    return SolveResult(Status.OPTIMAL, value, xs, tab.pivots)


# -- max-min LPs -------------------------------------------------------------

def equitable_partition(inst: MaxMinInstance) -> Dict[int, int]:
    """Coarsest stable colouring under coefficient-weighted colour refinement.

    Returns vertex -> class index.  Class indices are assigned by sorting the
    refinement signatures, so they do not depend on vertex numbering.
    """
    order = {Role.AGENT: 0, Role.CONSTRAINT: 1, Role.OBJECTIVE: 2}
    colour = {x: order[r] for x, r in inst.role.items()}
    ncolours = len(set(colour.values()))
    nbrs = {x: [(inst.coef(x, y), y) for y in inst.neighbours(x)] for x in inst.role}
    while True:
        sig = {x: (colour[x], tuple(sorted((w, colour[y]) for w, y in nbrs[x]))) for x in inst.role}
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {x: ranks[sig[x]] for x in inst.role}
        if len(ranks) == ncolours:
            return new
        colour, ncolours = new, len(ranks)


@dataclass(frozen=True)
class MaxMinSolution:
    omega: Fraction
    x: Assignment
    pivots: int
    classes: int


def _max_min_rows(inst, classes, agent_classes, con_classes, obj_classes, omega_rhs):
    """Reduced rows over agent-class variables (plus omega when ``omega_rhs`` is None)."""
    col = {c: j for j, c in enumerate(agent_classes)}
    width = len(agent_classes) + (1 if omega_rhs is None else 0)
    rep = {}
    for x in sorted(inst.role):
        rep.setdefault(classes[x], x)
    rows = []
    for cls in con_classes:
        i = rep[cls]
        coeffs = [Fraction(0)] * width
        for v in inst.agents_of(i):
            coeffs[col[classes[v]]] += inst.a[(i, v)]
        rows.append(Row(tuple(coeffs), Relation.LE, Fraction(1)))
    for cls in obj_classes:
        k = rep[cls]
        coeffs = [Fraction(0)] * width
        for v in inst.agents_of(k):
            coeffs[col[classes[v]]] += inst.c[(k, v)]
        if omega_rhs is None:
            coeffs[-1] = Fraction(-1)
            rows.append(Row(tuple(coeffs), Relation.GE, Fraction(0)))
        else:
            rows.append(Row(tuple(coeffs), Relation.GE, omega_rhs))
    return rows


def solve_max_min_report(inst: MaxMinInstance) -> MaxMinSolution:
    if not inst.objectives:
        raise DomainError("instance has no objectives")
    classes = equitable_partition(inst)
    by_role = {r: sorted({classes[x] for x in ids}) for r, ids in
               ((Role.AGENT, inst.agents), (Role.CONSTRAINT, inst.constraints),
                (Role.OBJECTIVE, inst.objectives))}
    agent_classes = by_role[Role.AGENT]
    size = {c: 0 for c in agent_classes}
    for v in inst.agents:
        size[classes[v]] += 1
    nvars = len(agent_classes)

    rows1 = _max_min_rows(inst, classes, agent_classes, by_role[Role.CONSTRAINT],
                          by_role[Role.OBJECTIVE], None)
    first = simplex(LinearProgram(nvars + 1, (Fraction(0),) * nvars + (Fraction(1),), tuple(rows1)))
    if first.status is Status.UNBOUNDED:
        raise UnboundedError("the minimum utility is unbounded: some objective chain has no "
                             "positive-coefficient constraint")
    if first.status is not Status.OPTIMAL:
        raise InfeasibleError("max-min LP reported infeasible")  # x = 0 is always feasible
    omega = first.value

    rows2 = _max_min_rows(inst, classes, agent_classes, by_role[Role.CONSTRAINT],
                          by_role[Role.OBJECTIVE], omega)
    second = simplex(LinearProgram(nvars, tuple(Fraction(size[c]) for c in agent_classes),
                                   tuple(rows2), maximize=False))
    if second.status is not Status.OPTIMAL:
        raise InfeasibleError(f"second stage ended {second.status.value}")
    y = dict(zip(agent_classes, second.x))
    x = {v: y[classes[v]] for v in sorted(inst.agents)}
    return MaxMinSolution(omega, x, first.pivots + second.pivots, len(set(classes.values())))


def solve_max_min(inst: MaxMinInstance) -> Tuple[Fraction, Assignment]:
    """Optimum utility and a canonical optimal assignment.

    Among optimal assignments the one returned minimises ``sum x``; ties are
    broken by Bland's rule on the canonically ordered reduced LP, so
    isomorphic instances receive corresponding solutions.
    """
    sol = solve_max_min_report(inst)
    return sol.omega, sol.x


__all__ = [
    "Relation", "Status", "Row", "LinearProgram", "SolveResult", "simplex",
    "equitable_partition", "MaxMinSolution", "solve_max_min", "solve_max_min_report",
]
