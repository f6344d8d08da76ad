from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vodmlg.core import PHYSICAL, Edge, Layer, VertexRole, validate_structure
from vodmlg.demand import Commodity, augment_all
from vodmlg.errors import NotOptimalError, TooLargeForOracleError
from vodmlg.instances import capacity_split, diamond, line, random_instance, two_server
from vodmlg.synthesis import (
    LinearProgram,
    LpStatus,
    brute_force_optimum,
    extract_topology,
    install_key,
    solve_milp,
    solve_relaxation,
    synthesize,
)
from vodmlg.synthesis.milp import SynthesisResult
from vodmlg.synthesis.program import EQ, LE

R = VertexRole


def _run(scn):
    return synthesize(scn.graph(), scn.commodities(), scn.options.milp())


def _oracle(scn):
    g = scn.graph()
    cs = scn.commodities()
    return brute_force_optimum(augment_all(g.physical, cs), cs, g.entity_roles())


class TestWorkedExamples:
    def test_diamond(self):
        run = _run(diamond())
        assert run.result.objective == pytest.approx(12, abs=1e-6)
        assert run.result.installed_links == [("a1", "na1"), ("na1", "x1"), ("vs1", "x1")]
        assert run.findings.ok
        assert _oracle(diamond()).objective == pytest.approx(12, abs=1e-6)

    def test_two_server(self):
        run = _run(two_server())
        assert run.result.objective == pytest.approx(10, abs=1e-6)
        assert {p.path[1] for p in run.assignment.path_flows} == {"vs1"}
        assert _oracle(two_server()).objective == pytest.approx(10, abs=1e-6)

    def test_capacity_split(self):
        run = _run(capacity_split())
        assert run.result.objective == pytest.approx(20, abs=1e-6)
        flows = run.result.arc_flows()
        for e in run.graph.physical.links():
            assert flows.get((e.u, e.v), 0) + flows.get((e.v, e.u), 0) <= e.capacity + 1e-6
        assert _oracle(capacity_split()).objective == pytest.approx(20, abs=1e-6)

    def test_line_relaxation(self):
        _, sol = solve_relaxation(line(4).graph(), line(4).commodities())
        assert sol.objective == pytest.approx(12)


def test_zero_demand():
    scn = line(4)
    c = [Commodity("d0", ("vs1",), "a1", 0.0)]
    run = synthesize(scn.graph(), c)
    assert run.result.status is LpStatus.OPTIMAL
    assert run.result.objective == 0 and run.result.installed_links == []
    assert len(extract_topology(run.result, scn.graph()).physical.edges) == 0


def test_extract_topology_diamond():
    scn = diamond()
    run = _run(scn)
    g = extract_topology(run.result, scn.graph())
    assert len(g.physical.edges) == 3
    assert "x2" not in g.physical.vertices
    assert validate_structure(g).ok


def test_extract_requires_optimal():
    res = SynthesisResult(LpStatus.INFEASIBLE, [], [], math.nan, math.nan, 1, 0)
    with pytest.raises(NotOptimalError):
        extract_topology(res, diamond().graph())


def test_infeasible_when_capacity_short():
    run = _run(line(11))
    assert run.result.status is LpStatus.INFEASIBLE
    assert not _oracle(line(11)).feasible


def test_oracle_empty_links():
    roles = {"vs1": R.VIDEO_SERVER, "a1": R.SUBSCRIBER}
    layer = Layer(PHYSICAL, frozenset(roles), ())
    c = [Commodity("d0", ("vs1",), "a1", 1.0)]
    res = brute_force_optimum(augment_all(layer, c), c, roles)
    assert not res.feasible


def test_oracle_too_large():
    names = [f"n{i}" for i in range(6)]
    roles = {n: R.INTERMEDIATE for n in names}
    layer = Layer(PHYSICAL, frozenset(names), tuple(Edge(a, b, 1) for i, a in enumerate(names) for b in names[i + 1 :]))
    with pytest.raises(TooLargeForOracleError):
        brute_force_optimum(layer, [], roles)


def test_uninstalled_links_carry_nothing():
    run = _run(diamond())
    res = run.result
    flows = res.arc_flows()
    for e in run.graph.physical.links():
        if res.value(install_key(e.u, e.v)) < 0.5:
            assert flows.get((e.u, e.v), 0) + flows.get((e.v, e.u), 0) <= 1e-6


def test_augmentation_neutral_for_single_source():
    # direct routing: supply sits at vs1 itself, no super-source
    scn = diamond()
    g = scn.graph()
    lp = LinearProgram()
    links = g.physical.links()
    for e in links:
        lp.add_var(("y", e.u, e.v), 0, 1, 0, integer=True)
    bal = {v: {} for v in g.physical.vertices}
    for e in links:
        for u, v in ((e.u, e.v), (e.v, e.u)):
            j = lp.add_var(("x", u, v), 0, 0 if u == "a1" else math.inf, e.weight)
            bal[u][j] = 1
            bal[v][j] = -1
    for v, coefs in sorted(bal.items()):
        lp.add_row(coefs, EQ, 4 if v == "vs1" else -4 if v == "a1" else 0)
    for e in links:
        coefs = {lp.index(("x", e.u, e.v)): 1, lp.index(("x", e.v, e.u)): 1, lp.index(("y", e.u, e.v)): -e.capacity}
        lp.add_row(coefs, LE, 0)
    direct = solve_milp(lp)
    assert direct.objective == pytest.approx(_run(scn).result.objective, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_monotone_in_links(seed):
    """Dropping a link never lowers the optimum."""
    scn = random_instance(seed)
    full = _run(scn)
    if full.result.status is not LpStatus.OPTIMAL or len(scn.links) < 2:
        return
    for k in range(len(scn.links)):
        links = scn.links[:k] + scn.links[k + 1 :]
        fewer = type(scn)(scn.entities, links, scn.catalog, scn.requests, scn.options)
        run = _run(fewer)
        if run.result.status is LpStatus.OPTIMAL:
            assert run.result.objective >= full.result.objective - 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_random_instances_match_oracle(seed):
    scn = random_instance(seed)
    run = _run(scn)
    ref = _oracle(scn)
    assert (run.result.status is LpStatus.OPTIMAL) == ref.feasible
    if ref.feasible:
        assert run.result.objective == pytest.approx(ref.objective, abs=1e-6)
        assert run.findings.ok
        assert run.result.lp_bound <= run.result.objective + 1e-6
