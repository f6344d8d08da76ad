"""Best-first branch-and-bound over the integer-marked variables of an LP."""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from ..errors import NodeLimitExceededError
from .program import EQ, GE, LE, LinearProgram
from .simplex import LpStatus, SimplexOptions, solve_lp

INTEGRALITY_TOL = 1e-6


@dataclass(frozen=True)
class MilpOptions:
    node_limit: int = 100_000
    gap_tol: float = 1e-6
    simplex: SimplexOptions = field(default_factory=SimplexOptions)


@dataclass
class SynthesisResult:
    """Outcome of :func:`solve_milp`.

    Values are addressed through ``keys``; for node-link programs the
    helpers decode installed links and per-commodity arc flows.
    """

    status: LpStatus
    keys: list[Hashable]
    values: np.ndarray
    objective: float
    lp_bound: float
    node_count: int
    iterations: int

    def value(self, key: Hashable) -> float:
        return float(self.values[self.keys.index(key)])

    @property
    def installed_links(self) -> list[tuple[str, str]]:
        """Links with ``y = 1``, each as a sorted endpoint pair."""
        return sorted((min(k[1], k[2]), max(k[1], k[2])) for k, v in zip(self.keys, self.values) if isinstance(k, tuple) and k[0] == "y" and v > 0.5)

    def commodity_flows(self, eps: float = 1e-9) -> dict[str, dict[tuple[str, str], float]]:
        out: dict[str, dict[tuple[str, str], float]] = defaultdict(dict)
        for k, v in zip(self.keys, self.values):
            if isinstance(k, tuple) and k[0] == "x" and v > eps:
                out[k[1]][(k[2], k[3])] = float(v)
        return {c: dict(sorted(f.items())) for c, f in sorted(out.items())}

    def arc_flows(self, eps: float = 1e-9) -> dict[tuple[str, str], float]:
        total: dict[tuple[str, str], float] = defaultdict(float)
        for flows in self.commodity_flows(eps).values():
            for arc, x in flows.items():
                total[arc] += x
        return dict(sorted(total.items()))


@dataclass(order=True)
class _Node:
    bound: float
    neg_depth: int
    seq: int
    lower: list[float] = field(compare=False)
    upper: list[float] = field(compare=False)


def _fractional(x: np.ndarray, integer: np.ndarray) -> np.ndarray:
    frac = np.abs(x - np.round(x))
    frac[~integer] = 0.0
    return frac


def _branch_var(x: np.ndarray, integer: np.ndarray) -> int:
    """Most fractional integer variable; lowest index on ties."""
    dist = np.full(x.size, np.inf)
    f = x[integer] - np.floor(x[integer])
    dist[integer] = np.abs(f - 0.5)
    dist[_fractional(x, integer) <= INTEGRALITY_TOL] = np.inf
    return int(np.argmin(dist))


class _RowIndex:
    """Rows touching each variable, for cheap local feasibility checks."""

    def __init__(self, lp: LinearProgram) -> None:
        self.lp = lp
        self.by_var: dict[int, list[int]] = defaultdict(list)
        for i, row in enumerate(lp.rows):
            for j in row.coefs:
                self.by_var[j].append(i)

    def rows_ok(self, x: np.ndarray, rows, tol: float) -> bool:
        for i in rows:
            row = self.lp.rows[i]
            act = sum(a * x[j] for j, a in row.coefs.items())
            if (row.sense == LE and act > row.rhs + tol) or (row.sense == GE and act < row.rhs - tol) or (row.sense == EQ and abs(act - row.rhs) > tol):
                return False
        return True


def _round_up(lp: LinearProgram, rows: _RowIndex, x: np.ndarray, integer: np.ndarray, lower, upper, tol: float) -> np.ndarray | None:
    """Round fractional integer variables up and keep the point if it stays feasible."""
    frac = _fractional(x, integer) > INTEGRALITY_TOL
    cand = x.copy()
    cand[integer] = np.round(cand[integer])
    cand[frac] = np.minimum(np.ceil(x[frac]), np.asarray(upper)[frac])
    touched = sorted({i for j in np.flatnonzero(integer) for i in rows.by_var[j]})
    if np.any(cand < np.asarray(lower) - tol) or not rows.rows_ok(cand, touched, tol):
        return None
    return cand


def _release_idle(lp: LinearProgram, rows: _RowIndex, x: np.ndarray, integer: np.ndarray, tol: float) -> np.ndarray:
    """Lower zero-cost integer variables to their bound wherever feasibility allows."""
    x = x.copy()
    cost = np.asarray(lp.cost)
    for j in np.flatnonzero(integer & (cost == 0.0)):
        lo = lp.lower[j]
        if x[j] > lo:
            old, x[j] = x[j], lo
            if not rows.rows_ok(x, rows.by_var[j], tol):
                x[j] = old
    return x


def solve_milp(lp: LinearProgram, options: MilpOptions | None = None) -> SynthesisResult:
    """Minimize ``lp`` with its integer marks enforced.

    Nodes are explored best-first by LP bound (deeper first on ties). The
    branching variable is the most fractional one, lowest index first. Each
    node's LP point is also rounded up as a quick incumbent candidate. The
    search stops once no open node can beat the incumbent by more than
    ``gap_tol``. The returned ``lp_bound`` is the root relaxation value.

    Raises:
        NodeLimitExceededError: more than ``node_limit`` nodes were solved.
    """
    opts = options or MilpOptions()
    tol = opts.simplex.feasibility_tol
    integer = np.asarray(lp.integer, dtype=bool)
    rows = _RowIndex(lp)
    n = lp.num_vars

    best_x: np.ndarray | None = None
    best_obj = math.inf
    root_bound = math.nan
    iterations = 0
    nodes_solved = 0
    seq = 0
    heap = [_Node(-math.inf, 0, seq, list(lp.lower), list(lp.upper))]

    while heap:
        node = heapq.heappop(heap)
        if node.bound >= best_obj - opts.gap_tol:
            break  # best-first: nothing left can improve
        if nodes_solved >= opts.node_limit:
            raise NodeLimitExceededError(f"branch-and-bound exceeded {opts.node_limit} nodes")
        nodes_solved += 1
        sol = solve_lp(lp.with_bounds(node.lower, node.upper), opts.simplex)
        iterations += sol.iterations
        if nodes_solved == 1:
            if sol.status is not LpStatus.OPTIMAL:
                return SynthesisResult(sol.status, list(lp.keys), np.full(n, np.nan), math.nan if sol.status is LpStatus.INFEASIBLE else -math.inf, sol.objective, 1, iterations)
            root_bound = sol.objective
        if sol.status is not LpStatus.OPTIMAL or sol.objective >= best_obj - opts.gap_tol:
            continue

        x = sol.values
        if not np.any(_fractional(x, integer) > INTEGRALITY_TOL):
            cand = x.copy()
            cand[integer] = np.round(cand[integer])
            best_x, best_obj = cand, lp.objective(cand)
            continue
        rounded = _round_up(lp, rows, x, integer, node.lower, node.upper, tol)
        if rounded is not None:
            obj = lp.objective(rounded)
            if obj < best_obj - opts.gap_tol:
                best_x, best_obj = rounded, obj
            if sol.objective >= best_obj - opts.gap_tol:
                continue

        j = _branch_var(x, integer)
        down_upper = list(node.upper)
        down_upper[j] = math.floor(x[j])
        up_lower = list(node.lower)
        up_lower[j] = math.ceil(x[j])
        for lo, hi in ((node.lower, down_upper), (up_lower, node.upper)):
            seq += 1
            heapq.heappush(heap, _Node(sol.objective, node.neg_depth - 1, seq, lo, hi))

    if best_x is None:
        return SynthesisResult(LpStatus.INFEASIBLE, list(lp.keys), np.full(n, np.nan), math.nan, root_bound, nodes_solved, iterations)
    best_x = _release_idle(lp, rows, best_x, integer, tol)
    return SynthesisResult(LpStatus.OPTIMAL, list(lp.keys), best_x, lp.objective(best_x), root_bound, nodes_solved, iterations)
