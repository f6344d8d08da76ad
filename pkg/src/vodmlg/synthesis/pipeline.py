"""End-to-end synthesis run on a multi-layer graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import Layer, MultiLayerGraph, assemble
from ..demand import Commodity, augment_all
from ..errors import NotOptimalError
from ..flow import FlowAssignment, assignment_from_arc_flows, check_all
from ..validation import ValidationReport
from .milp import MilpOptions, SynthesisResult, solve_milp
from .program import build_node_link_program
from .simplex import LpStatus, solve_lp


@dataclass
class SynthesisRun:
    graph: MultiLayerGraph
    commodities: list[Commodity]
    augmented: Layer
    result: SynthesisResult
    assignment: FlowAssignment
    findings: ValidationReport


def synthesize(g: MultiLayerGraph, commodities: Sequence[Commodity], options: MilpOptions | None = None) -> SynthesisRun:
    """Choose links and route every commodity at minimum occupied bandwidth.

    The flow solution is decomposed into paths and passed through all flow
    validators; findings are attached to the run rather than raised.
    """
    opts = options or MilpOptions()
    commodities = list(commodities)
    roles = g.entity_roles()
    augmented = augment_all(g.physical, commodities)
    if not any(c.volume > 0 for c in commodities):
        result = SynthesisResult(LpStatus.OPTIMAL, [], np.zeros(0), 0.0, 0.0, 0, 0)
    else:
        lp = build_node_link_program(augmented, commodities, roles)
        result = solve_milp(lp, opts)
    if result.status is LpStatus.OPTIMAL:
        active = [c for c in commodities if c.volume > 0]
        # leftover cyclic flow shows up as AggregationMismatch in the findings
        assignment, _ = assignment_from_arc_flows(result.commodity_flows(), active)
        findings = check_all(assignment, commodities, roles, augmented)
    else:
        assignment, findings = FlowAssignment(), ValidationReport()
    return SynthesisRun(g, commodities, augmented, result, assignment, findings)


def solve_relaxation(g: MultiLayerGraph, commodities: Sequence[Commodity], options: MilpOptions | None = None):
    """LP relaxation of the synthesis program (installation variables continuous)."""
    opts = options or MilpOptions()
    augmented = augment_all(g.physical, commodities)
    lp = build_node_link_program(augmented, list(commodities), g.entity_roles())
    return lp, solve_lp(lp, opts.simplex)


def extract_topology(result: SynthesisResult, g: MultiLayerGraph) -> MultiLayerGraph:
    """Reduce the physical layer of ``g`` to the installed links and their endpoints.

    Counterpart edges are rebuilt for the reduced presence. The result is
    structurally valid except that the physical layer may be disconnected.

    Raises:
        NotOptimalError: ``result`` is not an optimal solution.
    """
    if result.status is not LpStatus.OPTIMAL:
        raise NotOptimalError(f"cannot extract a topology from a {result.status.value} result")
    installed = set(result.installed_links)
    edges = tuple(e for e in g.physical.links() if e.key in installed)
    vertices = frozenset(x for e in edges for x in (e.u, e.v))
    physical = Layer(g.physical.layer_id, vertices, edges)
    others = [l for l in g.layers if l.layer_id != physical.layer_id]
    return assemble([physical, *others], g.entity_roles())
