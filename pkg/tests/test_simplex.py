from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from vodmlg.errors import IterationLimitExceededError
from vodmlg.instances import line
from vodmlg.synthesis import LinearProgram, LpStatus, SimplexOptions, solve_lp, solve_relaxation
from vodmlg.synthesis.program import EQ, GE, LE


def _lp(cost, rows, bounds):
    lp = LinearProgram()
    for j, (c, (lo, hi)) in enumerate(zip(cost, bounds)):
        lp.add_var(j, lo, hi, c)
    for coefs, sense, rhs in rows:
        lp.add_row({j: a for j, a in enumerate(coefs) if a}, sense, rhs)
    return lp


def _highs(lp: LinearProgram, cost=None):
    n = lp.num_vars
    ub, bub, eq, beq = [], [], [], []
    for r in lp.rows:
        a = np.zeros(n)
        for j, v in r.coefs.items():
            a[j] = v
        if r.sense == LE:
            ub.append(a), bub.append(r.rhs)
        elif r.sense == GE:
            ub.append(-a), bub.append(-r.rhs)
        else:
            eq.append(a), beq.append(r.rhs)
    return linprog(
        lp.cost if cost is None else cost,
        A_ub=np.array(ub) if ub else None,
        b_ub=bub or None,
        A_eq=np.array(eq) if eq else None,
        b_eq=beq or None,
        bounds=[(lo if math.isfinite(lo) else None, hi if math.isfinite(hi) else None) for lo, hi in zip(lp.lower, lp.upper)],
        method="highs",
    )


def _certify(lp: LinearProgram, sol, tol=1e-7):
    """Primal feasibility, dual sign and reduced-cost optimality of ``sol``."""
    x, y = sol.values, sol.duals
    assert lp.max_violation(x) <= 1e-6
    d = np.array(lp.cost, dtype=float)
    for i, r in enumerate(lp.rows):
        for j, a in r.coefs.items():
            d[j] -= a * y[i]
        if r.sense == LE:
            assert y[i] <= tol
        elif r.sense == GE:
            assert y[i] >= -tol
    for j in range(lp.num_vars):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo == hi:
            continue
        at_lo = abs(x[j] - lo) <= 1e-9
        at_hi = abs(x[j] - hi) <= 1e-9
        if not at_lo and not at_hi:
            assert abs(d[j]) <= tol
        elif at_lo and not at_hi:
            assert d[j] >= -tol
        elif at_hi and not at_lo:
            assert d[j] <= tol


def test_line_objective():
    _, sol = solve_relaxation(line(4).graph(), line(4).commodities())
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective == pytest.approx(12.0, abs=1e-9)


def test_infeasible_over_capacity():
    scn = line(11)
    _, sol = solve_relaxation(scn.graph(), scn.commodities())
    assert sol.status is LpStatus.INFEASIBLE


def test_unbounded():
    lp = _lp([-1, 0], [([1, -1], LE, 1)], [(0, math.inf), (0, math.inf)])
    assert solve_lp(lp).status is LpStatus.UNBOUNDED


def test_infeasible_bounds():
    lp = _lp([1], [], [(2, 1)])
    assert solve_lp(lp).status is LpStatus.INFEASIBLE


def test_zero_volume_all_zero():
    lp = _lp([1, 1], [([1, -1], EQ, 0)], [(0, math.inf)] * 2)
    sol = solve_lp(lp)
    assert sol.status is LpStatus.OPTIMAL and sol.objective == 0 and not sol.values.any()


def test_free_and_negative_bounds():
    lp = _lp([1, -2], [([1, 1], GE, -3), ([1, 1], LE, 4)], [(-math.inf, math.inf), (-5, 2)])
    sol = solve_lp(lp)
    ref = _highs(lp)
    assert sol.objective == pytest.approx(ref.fun, abs=1e-7)
    _certify(lp, sol)


def test_iteration_limit():
    scn = line(4)
    with pytest.raises(IterationLimitExceededError):
        solve_relaxation(scn.graph(), scn.commodities(), scn.options.milp().__class__(simplex=SimplexOptions(iteration_limit=1)))


def test_degenerate_cycling_example():
    # Beale's example: cycles under textbook Dantzig without an anti-cycling rule
    cost = [-0.75, 150, -0.02, 6]
    rows = [([0.25, -60, -0.04, 9], LE, 0), ([0.5, -90, -0.02, 3], LE, 0), ([0, 0, 1, 0], LE, 1)]
    lp = _lp(cost, rows, [(0, math.inf)] * 4)
    for pricing in ("dantzig", "bland"):
        sol = solve_lp(lp, SimplexOptions(pricing=pricing, degenerate_switch=5))
        assert sol.objective == pytest.approx(-0.05, abs=1e-9)
        _certify(lp, sol)


@st.composite
def random_lps(draw):
    n = draw(st.integers(1, 6))
    m = draw(st.integers(0, 5))
    coef = st.integers(-5, 5)
    cost = draw(st.lists(coef, min_size=n, max_size=n))
    bounds = []
    for _ in range(n):
        kind = draw(st.sampled_from(["pos", "box", "free", "neg"]))
        hi = draw(st.integers(0, 8))
        bounds.append({"pos": (0, math.inf), "box": (-hi, hi), "free": (-math.inf, math.inf), "neg": (-math.inf, 0)}[kind])
    rows = [
        (draw(st.lists(coef, min_size=n, max_size=n)), draw(st.sampled_from([LE, GE, EQ])), draw(st.integers(-10, 10)))
        for _ in range(m)
    ]
    return _lp(cost, rows, bounds)


def _reference_status(lp: LinearProgram):
    """HiGHS status with feasibility decided first.

    HiGHS presolve can label an unbounded model infeasible, so feasibility is
    settled by a zero-cost solve before the real objective is tried.
    """
    if _highs(lp, np.zeros(lp.num_vars)).status == 2:
        return "infeasible", None
    ref = _highs(lp)
    if ref.status == 0:
        return "optimal", ref.fun
    assert ref.status in (2, 3)
    return "unbounded", None


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(random_lps())
def test_agrees_with_highs(lp):
    status, fun = _reference_status(lp)
    for pricing in ("dantzig", "bland"):
        sol = solve_lp(lp, SimplexOptions(pricing=pricing))
        if status == "infeasible":
            assert sol.status is LpStatus.INFEASIBLE
        elif status == "unbounded":
            assert sol.status is LpStatus.UNBOUNDED
        else:
            assert sol.status is LpStatus.OPTIMAL
            assert sol.objective == pytest.approx(fun, abs=1e-6, rel=1e-9)
            _certify(lp, sol)
