"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import pytest

from vodmlg.cli import main as cli_main
from vodmlg.core import validate_structure
from vodmlg.demand import augment_all
from vodmlg.flow import EPS, check_demand_satisfaction, check_node_balance, check_route_invariance, check_transit_restrictions
from vodmlg.instances import capacity_split, desk_scale_instance, diamond, random_instance, two_server
from vodmlg.synthesis import LpStatus, brute_force_optimum, solve_relaxation, synthesize
from vodmlg.synthesis.pipeline import SynthesisRun

from mutations import MUTATIONS

SUITE_SIZE = 240
ORACLE_TOL = 1e-6


def _verdict(capsys, criterion: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")


@dataclass
class Case:
    seed: int
    run: SynthesisRun
    oracle_feasible: bool
    oracle_objective: float


@pytest.fixture(scope="module")
def suite():
    start = time.perf_counter()
    cases = []
    for seed in range(SUITE_SIZE):
        scn = random_instance(seed)
        g = scn.graph()
        commodities = scn.commodities()
        run = synthesize(g, commodities, scn.options.milp())
        ref = brute_force_optimum(augment_all(g.physical, commodities), commodities, g.entity_roles())
        cases.append(Case(seed, run, ref.feasible, ref.objective))
    return cases, time.perf_counter() - start


def test_c1_oracle_equivalence(suite, capsys):
    cases, elapsed = suite
    bad = []
    for c in cases:
        solved = c.run.result.status is LpStatus.OPTIMAL
        if solved != c.oracle_feasible:
            bad.append((c.seed, "feasibility"))
        elif solved and abs(c.run.result.objective - c.oracle_objective) > ORACLE_TOL:
            bad.append((c.seed, c.run.result.objective, c.oracle_objective))
    feasible = sum(c.oracle_feasible for c in cases)
    ok = not bad and len(cases) >= 200 and elapsed < 60
    _verdict(capsys, "C1 oracle equivalence", ok, f"{len(cases)} instances ({feasible} feasible), {len(bad)} mismatches, {elapsed:.1f}s")
    assert not bad
    assert len(cases) >= 200
    assert elapsed < 60


def test_c2_conservation(suite, capsys):
    cases, _ = suite
    violations = 0
    checked = 0
    for c in cases:
        if c.run.result.status is not LpStatus.OPTIMAL:
            continue
        checked += 1
        a, cs, roles = c.run.assignment, c.run.commodities, c.run.graph.entity_roles()
        for report in (
            check_route_invariance(a, c.run.augmented),
            check_demand_satisfaction(a, cs),
            check_node_balance(a.commodity_flows, cs),
            check_transit_restrictions(a.commodity_flows, roles, cs),
        ):
            violations += len(report)
        # capacity and coupling
        flows = c.run.result.arc_flows()
        installed = set(c.run.result.installed_links)
        for e in c.run.graph.physical.links():
            load = flows.get((e.u, e.v), 0.0) + flows.get((e.v, e.u), 0.0)
            if load > e.capacity + EPS or (e.key not in installed and load > EPS):
                violations += 1
    _verdict(capsys, "C2 conservation suite", violations == 0, f"{checked} solver outputs, {violations} violations")
    assert violations == 0


def test_c3_structural(capsys):
    graphs = [random_instance(seed).graph() for seed in range(SUITE_SIZE)]
    graphs += [f().graph() for f in (diamond, two_server, capacity_split)]
    clean = sum(validate_structure(g).ok for g in graphs)
    missed = {kind: sum(kind not in validate_structure(mutate(g)).kinds() for g in graphs) for kind, mutate in MUTATIONS.items()}
    ok = clean == len(graphs) and not any(missed.values()) and len(MUTATIONS) == 6
    detail = f"{clean}/{len(graphs)} canonical graphs clean; missed per mutation {missed}"
    _verdict(capsys, "C3 structural suite", ok, detail)
    assert clean == len(graphs)
    assert len(MUTATIONS) == 6
    assert not any(missed.values())


def test_c4_relaxation_bound(suite, capsys):
    cases, _ = suite
    above, unequal, integral = 0, 0, 0
    for c in cases:
        if c.run.result.status is not LpStatus.OPTIMAL:
            continue
        lp, sol = solve_relaxation(c.run.graph, c.run.commodities)
        milp = c.run.result.objective
        if sol.objective > milp + ORACLE_TOL or c.run.result.lp_bound > milp + ORACLE_TOL:
            above += 1
        y = np.array([sol.values[j] for j, k in enumerate(lp.keys) if k[0] == "y"])
        if np.all(np.abs(y - np.round(y)) <= 1e-6):
            integral += 1
            if abs(sol.objective - milp) > ORACLE_TOL:
                unequal += 1
    ok = above == 0 and unequal == 0
    _verdict(capsys, "C4 relaxation bound", ok, f"{above} bound violations, {integral} integral roots, {unequal} unequal")
    assert above == 0
    assert unequal == 0


def test_c5_worked_examples(capsys):
    results = {}
    for name, make in (("diamond", diamond), ("two_server", two_server), ("capacity_split", capacity_split)):
        scn = make()
        g, cs = scn.graph(), scn.commodities()
        run = synthesize(g, cs, scn.options.milp())
        ref = brute_force_optimum(augment_all(g.physical, cs), cs, g.entity_roles())
        results[name] = (run, ref)

    d_run, d_ref = results["diamond"]
    diamond_ok = abs(d_run.result.objective - 12) <= ORACLE_TOL and len(d_run.result.installed_links) == 3
    diamond_ok &= abs(d_ref.objective - 12) <= ORACLE_TOL

    t_run, t_ref = results["two_server"]
    servers = {pf.path[1] for pf in t_run.assignment.path_flows}
    two_ok = abs(t_run.result.objective - 10) <= ORACLE_TOL and servers == {"vs1"} and abs(t_ref.objective - 10) <= ORACLE_TOL

    s_run, s_ref = results["capacity_split"]
    flows = s_run.result.arc_flows()
    within = all(
        flows.get((e.u, e.v), 0.0) + flows.get((e.v, e.u), 0.0) <= e.capacity + ORACLE_TOL for e in s_run.graph.physical.links()
    )
    split_ok = abs(s_run.result.objective - 20) <= ORACLE_TOL and within and abs(s_ref.objective - 20) <= ORACLE_TOL

    detail = (
        f"diamond {d_run.result.objective:.6f}/{len(d_run.result.installed_links)} links, "
        f"two_server {t_run.result.objective:.6f} via {sorted(servers)}, "
        f"capacity_split {s_run.result.objective:.6f}"
    )
    _verdict(capsys, "C5 worked examples", diamond_ok and two_ok and split_ok, detail)
    assert diamond_ok and two_ok and split_ok


def test_c6_desk_scale(capsys):
    scn = desk_scale_instance(0)
    g, cs = scn.graph(), scn.commodities()
    assert len(g.physical.vertices) == 50 and len(g.physical.edges) == 200 and len(cs) == 30

    t0 = time.perf_counter()
    _, lp_sol = solve_relaxation(g, cs, scn.options.milp())
    lp_time = time.perf_counter() - t0
    t0 = time.perf_counter()
    run = synthesize(g, cs, scn.options.milp())
    milp_time = time.perf_counter() - t0

    ok = lp_sol.status is LpStatus.OPTIMAL and run.result.status is LpStatus.OPTIMAL and lp_time < 10 and milp_time < 120
    detail = f"LP {lp_time:.2f}s, MILP {milp_time:.2f}s ({run.result.node_count} nodes), objective {run.result.objective:.6f}"
    _verdict(capsys, "C6 desk-scale performance", ok, detail)
    assert ok
    assert run.findings.ok


def test_c7_determinism(capsys, scenario_dir, tmp_path):
    paths = sorted(p for p in scenario_dir.glob("*.json"))
    for seed in range(0, SUITE_SIZE, 12):
        p = tmp_path / f"random_{seed}.json"
        p.write_text(random_instance(seed).to_json())
        paths.append(p)
    differing = []
    for path in paths:
        for fmt in ("machine", "table"):
            outputs = []
            for k in range(3):
                out = tmp_path / f"out_{k}"
                code = cli_main(["synthesize", str(path), "--format", fmt, "--out", str(out)])
                outputs.append((code, out.read_bytes()))
            if len(set(outputs)) != 1:
                differing.append((path.name, fmt))
    _verdict(capsys, "C7 determinism", not differing, f"{len(paths)} scenarios x 2 formats x 3 runs, {len(differing)} differ")
    assert not differing
