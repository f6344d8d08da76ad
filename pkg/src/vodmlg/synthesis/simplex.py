"""Two-phase bounded-variable primal simplex on a dense tableau.

Pricing is Dantzig's largest reduced cost; after a run of degenerate pivots
the solver switches to Bland's smallest-index rule (for both the entering and
the leaving variable) until the objective moves again, which rules out
cycling.  ``pricing="bland"`` uses Bland's rule throughout.

Artificial variables are kept out of the tableau: once one leaves the basis
it can never return, so its column is never needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .. import _kernels
from ..errors import IterationLimitExceededError
from .program import EQ, GE, LE, LinearProgram

AT_LOWER, AT_UPPER, BASIC = 0, 1, 2


class LpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class SimplexOptions:
    iteration_limit: int = 50_000
    pivot_tol: float = 1e-9
    feasibility_tol: float = 1e-6
    optimality_tol: float = 1e-9
    pricing: str = "dantzig"
    degenerate_switch: int = 500


@dataclass
class LpSolution:
    """Result of :func:`solve_lp`.

    ``duals`` are row multipliers in the orientation of the original rows, so
    ``cost - A.T @ duals`` gives the reduced costs of the original variables.
    """

    status: LpStatus
    values: np.ndarray
    objective: float
    iterations: int
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))


class _Tableau:
    def __init__(self, lp: LinearProgram, opts: SimplexOptions) -> None:
        self.opts = opts
        n = lp.num_vars
        lower = np.asarray(lp.lower, dtype=float)
        upper = np.asarray(lp.upper, dtype=float)
        self.lp, self.lower, self.upper = lp, lower, upper
        self.cost = np.asarray(lp.cost, dtype=float)
        self.infeasible_bounds = bool(np.any(lower > upper + opts.feasibility_tol))
        width = upper - lower
        free = np.flatnonzero(width > 0)
        col_of = -np.ones(n, dtype=np.intp)
        col_of[free] = np.arange(free.size)
        self.free, self.col_of = free, col_of

        # standard form: shifted rows, sign-normalized, with slacks
        rows, rhs, sign, kinds = [], [], [], []
        self.trivially_infeasible = False
        self.row_ids = []
        for i, row in enumerate(lp.rows):
            b = row.rhs - sum(a * lower[j] for j, a in row.coefs.items())
            coefs = {int(col_of[j]): a for j, a in row.coefs.items() if col_of[j] >= 0 and a != 0.0}
            if not coefs:
                tol = opts.feasibility_tol
                if (row.sense == LE and b < -tol) or (row.sense == GE and b > tol) or (row.sense == EQ and abs(b) > tol):
                    self.trivially_infeasible = True
                continue
            s = -1.0 if b < 0 else 1.0
            sense = row.sense
            if s < 0 and sense != EQ:
                sense = GE if sense == LE else LE
            rows.append({k: s * a for k, a in coefs.items()})
            rhs.append(s * b)
            sign.append(s)
            kinds.append((sense, 1.0 if row.sense == LE else -1.0 if row.sense == GE else 0.0))
            self.row_ids.append(i)

        m = len(rows)
        nstruct = free.size
        nslack = sum(1 for sense, _ in kinds if sense != EQ)
        ncols = nstruct + nslack
        T = np.zeros((m, ncols))
        ub = np.full(ncols, math.inf)
        ub[:nstruct] = width[free]
        c = np.zeros(ncols)
        c[:nstruct] = self.cost[free]
        basis = np.empty(m, dtype=np.intp)
        k = nstruct
        for i, (coefs, (sense, orig)) in enumerate(zip(rows, kinds)):
            idx = np.fromiter(coefs.keys(), dtype=np.intp, count=len(coefs))
            T[i, idx] = np.fromiter(coefs.values(), dtype=float, count=len(coefs))
            if sense == EQ:
                basis[i] = ncols + i  # artificial
            else:
                # slack sign in the sign-normalized row
                T[i, k] = 1.0 if sense == LE else -1.0
                basis[i] = k if sense == LE else ncols + i
                k += 1
        self.A = sp.csc_matrix(T)  # original standard-form matrix for refactoring
        self.b = np.asarray(rhs, dtype=float)
        self.sign = np.asarray(sign, dtype=float)
        self.T, self.ub, self.c, self.basis = T, ub, c, basis
        self.ncols, self.nstruct = ncols, nstruct
        self.state = np.full(ncols, AT_LOWER, dtype=np.int8)
        for i, bv in enumerate(basis):
            if bv < ncols:
                self.state[bv] = BASIC
        self.xb = self.b.copy()
        self.iterations = 0

    # -- helpers ---------------------------------------------------------
    def is_artificial(self, bv: int) -> bool:
        return bv >= self.ncols

    def _order(self, bv: int) -> int:
        # artificials rank lowest so they leave first under Bland's rule
        return bv - 2 * self.ncols if bv >= self.ncols else bv

    def column_values(self) -> np.ndarray:
        x = np.where(self.state == AT_UPPER, self.ub, 0.0)
        for i, bv in enumerate(self.basis):
            if bv < self.ncols:
                x[bv] = self.xb[i]
        return x

    # -- main loop -------------------------------------------------------
    def iterate(self, d: np.ndarray, phase: int) -> LpStatus:
        opts = self.opts
        tol = opts.optimality_tol
        bland = opts.pricing == "bland"
        degenerate_run = 0
        eligible_cols = self.ub > 0
        while True:
            use_bland = bland or degenerate_run >= opts.degenerate_switch
            score = np.where(self.state == AT_LOWER, -d, np.where(self.state == AT_UPPER, d, 0.0))
            score[~eligible_cols] = 0.0
            if not score.size:
                return LpStatus.OPTIMAL
            if use_bland:
                cand = np.flatnonzero(score > tol)
                if cand.size == 0:
                    return LpStatus.OPTIMAL
                j = int(cand[0])
            else:
                j = int(np.argmax(score))
                if score[j] <= tol:
                    return LpStatus.OPTIMAL

            if self.iterations >= opts.iteration_limit:
                raise IterationLimitExceededError(f"simplex exceeded {opts.iteration_limit} iterations")
            self.iterations += 1

            direction = 1.0 if self.state[j] == AT_LOWER else -1.0
            s = direction * self.T[:, j]
            theta, r, to_upper = self.ub[j], -1, False

            ubb = self._basic_upper(phase)
            dec = np.flatnonzero(s > opts.pivot_tol)
            inc = np.flatnonzero((s < -opts.pivot_tol) & np.isfinite(ubb))
            lims = np.concatenate([np.maximum(self.xb[dec], 0.0) / s[dec], np.maximum(ubb[inc] - self.xb[inc], 0.0) / -s[inc]])
            if lims.size:
                best = lims.min()
                if best < theta:
                    rows = np.concatenate([dec, inc])
                    ties = np.flatnonzero(lims <= best + 1e-12)
                    if use_bland:
                        pick = min(ties, key=lambda t: self._order(int(self.basis[rows[t]])))
                    else:
                        # prefer artificials, then the largest pivot magnitude
                        pick = min(ties, key=lambda t: (not self.is_artificial(int(self.basis[rows[t]])), -abs(s[rows[t]]), rows[t]))
                    theta, r, to_upper = best, int(rows[pick]), pick >= dec.size
            if math.isinf(theta):
                return LpStatus.UNBOUNDED

            degenerate_run = degenerate_run + 1 if theta <= 1e-12 else 0
            if theta:
                self.xb -= theta * s
            if r < 0:
                self.state[j] = AT_UPPER if self.state[j] == AT_LOWER else AT_LOWER
                continue

            entering_value = theta if direction > 0 else self.ub[j] - theta
            leaving = int(self.basis[r])
            _kernels.pivot(self.T, d, r, j)
            self.basis[r] = j
            self.state[j] = BASIC
            self.xb[r] = entering_value
            if leaving < self.ncols:
                self.state[leaving] = AT_UPPER if to_upper else AT_LOWER

    def _basic_upper(self, phase: int) -> np.ndarray:
        ubb = np.empty(self.basis.size)
        art = self.basis >= self.ncols
        ubb[~art] = self.ub[self.basis[~art]]
        ubb[art] = math.inf if phase == 1 else 0.0
        return ubb

    def drive_out_artificials(self) -> None:
        keep = np.ones(self.basis.size, dtype=bool)
        for r in range(self.basis.size):
            if not self.is_artificial(int(self.basis[r])):
                continue
            row = np.abs(self.T[r]) * (self.state != BASIC) * (self.ub > 0)
            j = int(np.argmax(row)) if row.size else 0
            if row.size and row[j] > 1e-7:
                value = self.ub[j] if self.state[j] == AT_UPPER else 0.0
                dummy = np.zeros(self.ncols)
                _kernels.pivot(self.T, dummy, r, j)
                self.basis[r] = j
                self.state[j] = BASIC
                self.xb[r] = value
            else:
                keep[r] = False  # redundant row
        if not keep.all():
            self.T = np.ascontiguousarray(self.T[keep])
            self.xb = self.xb[keep]
            self.basis = self.basis[keep]
            self.A = self.A[np.flatnonzero(keep), :].tocsc()
            self.b = self.b[keep]
            self.sign = self.sign[keep]
            self.row_ids = [rid for rid, k in zip(self.row_ids, keep) if k]

    def phase_two_costs(self) -> np.ndarray:
        cb = np.array([self.c[bv] if bv < self.ncols else 0.0 for bv in self.basis])
        d = self.c - cb @ self.T
        d[self.state == BASIC] = 0.0
        return d

    def refactor(self) -> np.ndarray:
        """Rebuild tableau and basic values from the original matrix; return phase-2 costs."""
        B = self.A[:, self.basis].tocsc()
        lu = splu(B)
        self.T = np.ascontiguousarray(lu.solve(self.A.toarray()))
        self.T[np.abs(self.T) < 1e-11] = 0.0
        rhs = self.b - self.A @ np.where(self.state == AT_UPPER, self.ub, 0.0)
        self.xb = lu.solve(rhs)
        return self.phase_two_costs()

    def drift(self) -> float:
        """Residual of ``A x = b`` for the current basic solution."""
        if not self.basis.size:
            return 0.0
        x = self.column_values()
        return float(np.max(np.abs(self.A @ x - self.b)))

    def duals(self) -> np.ndarray:
        y = np.zeros(len(self.lp.rows))
        if self.basis.size:
            B = self.A[:, self.basis].tocsc()
            cb = np.array([self.c[bv] for bv in self.basis])
            ystd = splu(B).solve(cb, trans="T")
            y[self.row_ids] = ystd * self.sign
        return y


def _finite_lower(lp: LinearProgram) -> tuple[LinearProgram, list[tuple[int, float, int]]]:
    """Rewrite variables without a finite lower bound.

    ``x <= u`` becomes ``x = -x'`` with ``x' >= -u``; a free ``x`` becomes
    ``x+ - x-``. Returns the new program and, per original variable, the
    column, its sign and the index of the negative part (or -1).
    """
    out = LinearProgram()
    recover = []
    for j in range(lp.num_vars):
        lo, hi, c = lp.lower[j], lp.upper[j], lp.cost[j]
        if math.isfinite(lo):
            recover.append((out.add_var(("col", j), lo, hi, c), 1.0, -1))
        elif math.isfinite(hi):
            recover.append((out.add_var(("neg", j), -hi, math.inf, -c), -1.0, -1))
        else:
            pos = out.add_var(("pos", j), 0.0, math.inf, c)
            recover.append((pos, 1.0, out.add_var(("neg", j), 0.0, math.inf, -c)))
    for row in lp.rows:
        coefs: dict[int, float] = {}
        for j, a in row.coefs.items():
            col, sign, neg = recover[j]
            coefs[col] = sign * a
            if neg >= 0:
                coefs[neg] = -a
        out.add_row(coefs, row.sense, row.rhs, row.label)
    return out, recover


def solve_lp(lp: LinearProgram, options: SimplexOptions | None = None) -> LpSolution:
    """Solve the LP relaxation of ``lp`` (integrality marks are ignored).

    Raises:
        IterationLimitExceededError: more than ``options.iteration_limit`` pivots.
    """
    opts = options or SimplexOptions()
    if any(math.isinf(lo) for lo in lp.lower):
        std, recover = _finite_lower(lp)
        sol = solve_lp(std, opts)
        if sol.status is LpStatus.OPTIMAL:
            x = np.array([sign * sol.values[col] - (sol.values[neg] if neg >= 0 else 0.0) for col, sign, neg in recover])
            sol = LpSolution(sol.status, x, sol.objective, sol.iterations, sol.duals)
        else:
            sol = LpSolution(sol.status, np.full(lp.num_vars, np.nan), sol.objective, sol.iterations, sol.duals)
        return sol
    tab = _Tableau(lp, opts)
    n = lp.num_vars
    if tab.infeasible_bounds or tab.trivially_infeasible:
        return LpSolution(LpStatus.INFEASIBLE, np.full(n, np.nan), math.nan, 0, np.zeros(len(lp.rows)))

    art_rows = tab.basis >= tab.ncols
    if art_rows.any():
        d1 = -tab.T[art_rows].sum(axis=0)
        d1[tab.state == BASIC] = 0.0
        tab.iterate(d1, phase=1)
        infeas = float(sum(tab.xb[i] for i, bv in enumerate(tab.basis) if bv >= tab.ncols))
        if infeas > opts.feasibility_tol:
            return LpSolution(LpStatus.INFEASIBLE, np.full(n, np.nan), math.nan, tab.iterations, np.zeros(len(lp.rows)))
        tab.drive_out_artificials()

    d = tab.phase_two_costs()
    status = tab.iterate(d, phase=2)
    for _ in range(3):
        if status is not LpStatus.OPTIMAL or tab.drift() <= 1e-9:
            break
        d = tab.refactor()
        status = tab.iterate(d, phase=2)
    if status is LpStatus.UNBOUNDED:
        return LpSolution(status, np.full(n, np.nan), -math.inf, tab.iterations, np.zeros(len(lp.rows)))

    xcols = tab.column_values()
    x = tab.lower.copy()
    x[tab.free] += xcols[: tab.nstruct]
    x[np.abs(x) < 1e-12] = 0.0
    return LpSolution(LpStatus.OPTIMAL, x, float(tab.cost @ x), tab.iterations, tab.duals())
