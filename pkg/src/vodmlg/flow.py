"""Flow assignments and the conservation, transit and overlay-mapping checks.

Flows live on one layer as directed arcs ``(u, v)``.  Per-commodity arc
flows are ``{commodity_id: {arc: rate}}``; aggregated flows drop the
commodity level.  All comparisons use an absolute tolerance of ``EPS``.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import LOGICAL, PHYSICAL, EntityId, Layer, MultiLayerGraph, VertexRole, counterpart
from .demand import Commodity, super_source_id
from .errors import DiscontinuousMappingError, InvalidPathError, LoopingExpansionError, UnmappedEdgeError
from .validation import ValidationReport, Violation

EPS = 1e-6

Arc = tuple[EntityId, EntityId]
ArcFlows = Mapping[Arc, float]
CommodityFlows = Mapping[str, ArcFlows]


@dataclass(frozen=True)
class PathFlow:
    commodity: str
    path: tuple[EntityId, ...]
    amount: float

    def arcs(self) -> list[Arc]:
        return list(zip(self.path, self.path[1:]))


@dataclass(frozen=True)
class FlowAssignment:
    """Path flows together with the per-commodity arc flows they claim to produce.

    ``commodity_flows`` usually comes from a solver; use :meth:`from_paths`
    when only paths are known.
    """

    path_flows: tuple[PathFlow, ...] = ()
    commodity_flows: Mapping[str, Mapping[Arc, float]] = field(default_factory=dict)

    @classmethod
    def from_paths(cls, path_flows: Iterable[PathFlow]) -> "FlowAssignment":
        path_flows = tuple(path_flows)
        by_commodity: dict[str, list[PathFlow]] = defaultdict(list)
        for pf in path_flows:
            by_commodity[pf.commodity].append(pf)
        return cls(path_flows, {c: aggregate(pfs) for c, pfs in by_commodity.items()})

    @property
    def link_flows(self) -> dict[Arc, float]:
        total: dict[Arc, float] = defaultdict(float)
        for flows in self.commodity_flows.values():
            for arc, x in flows.items():
                total[arc] += x
        return dict(sorted(total.items()))


def _check_path(path: Sequence[EntityId], layer: Layer | None) -> None:
    if len(path) < 2:
        raise InvalidPathError(f"path {list(path)} has fewer than two vertices")
    if len(set(path)) != len(path):
        raise InvalidPathError(f"path {list(path)} is not simple")
    if layer is not None:
        for u, v in zip(path, path[1:]):
            if not layer.has_arc(u, v):
                raise InvalidPathError(f"path {list(path)}: no arc {u}->{v} on layer {layer.layer_id}")


def aggregate(path_flows: Iterable[PathFlow], layer: Layer | None = None) -> dict[Arc, float]:
    """Sum path amounts onto the arcs each path traverses.

    Every arc of a path carries exactly that path's amount.  With ``layer``
    given, paths are checked against it and every arc of the layer appears in
    the result (zero when unused).

    Raises:
        InvalidPathError: a path is not simple, too short, not on ``layer``,
            or has a negative amount.
    """
    flows: dict[Arc, float] = {arc: 0.0 for arc in layer.arcs()} if layer is not None else {}
    for pf in path_flows:
        _check_path(pf.path, layer)
        if pf.amount < 0:
            raise InvalidPathError(f"path {list(pf.path)} has negative amount {pf.amount}")
        for arc in pf.arcs():
            flows[arc] = flows.get(arc, 0.0) + pf.amount
    return dict(sorted(flows.items()))


def _net_outflow(flows: ArcFlows) -> dict[EntityId, float]:
    net: dict[EntityId, float] = defaultdict(float)
    for (u, v), x in flows.items():
        net[u] += x
        net[v] -= x
    return net


# ---------------------------------------------------------------------------
# conservation law checks


def check_route_invariance(assignment: FlowAssignment, layer: Layer | None = None) -> ValidationReport:
    """A flow keeps its amount along its whole route.

    Each path must be valid, and re-aggregating the path flows of every
    commodity must reproduce its stated arc flows arc by arc.
    """
    found = []
    by_commodity: dict[str, list[PathFlow]] = defaultdict(list)
    for pf in assignment.path_flows:
        try:
            _check_path(pf.path, layer)
        except InvalidPathError as exc:
            found.append(Violation("InvalidPath", str(exc), (pf.commodity,)))
            continue
        by_commodity[pf.commodity].append(pf)
    for cid in sorted(set(by_commodity) | set(assignment.commodity_flows)):
        rebuilt = aggregate(by_commodity.get(cid, ()))
        stated = assignment.commodity_flows.get(cid, {})
        for arc in sorted(set(rebuilt) | set(stated)):
            diff = rebuilt.get(arc, 0.0) - stated.get(arc, 0.0)
            if abs(diff) > EPS:
                found.append(Violation("AggregationMismatch", f"arc {arc[0]}->{arc[1]} paths carry {diff:+.6f} vs link flow", (cid, f"{arc[0]}->{arc[1]}"), diff))
    return ValidationReport.from_violations(found)


def check_demand_satisfaction(assignment: FlowAssignment, commodities: Sequence[Commodity]) -> ValidationReport:
    """Routes of a commodity together carry its full volume from a source to its destination."""
    found = []
    known = {c.id: c for c in commodities}
    sent: dict[str, float] = defaultdict(float)
    delivered: dict[str, float] = defaultdict(float)
    for pf in assignment.path_flows:
        c = known.get(pf.commodity)
        if c is None:
            found.append(Violation("UnknownCommodity", f"path flow for unknown commodity {pf.commodity}", (pf.commodity,)))
            continue
        start = pf.path[0]
        if start != super_source_id(c) and start not in c.candidate_sources:
            found.append(Violation("WrongSource", f"path starts at {start}, not a candidate source", (c.id, start), pf.amount))
            continue
        sent[c.id] += pf.amount
        if pf.path[-1] == c.destination:
            delivered[c.id] += pf.amount
    for c in commodities:
        deficit = c.volume - sent[c.id]
        if abs(deficit) > EPS:
            found.append(Violation("DemandDeficit", f"commodity {c.id}: routes carry {sent[c.id]:.6f} of {c.volume:.6f}", (c.id,), deficit))
        lost = sent[c.id] - delivered[c.id]
        if abs(lost) > EPS:
            found.append(Violation("MisdeliveredFlow", f"commodity {c.id}: {lost:.6f} does not end at {c.destination}", (c.id,), lost))
    return ValidationReport.from_violations(found)


def check_node_balance(commodity_flows: CommodityFlows, commodities: Sequence[Commodity]) -> ValidationReport:
    """Outflow minus inflow is the volume at the source, minus it at the sink, zero elsewhere.

    The source is the commodity's super-source when its flows use one;
    otherwise the candidate servers together must emit the volume, none of
    them absorbing flow.
    """
    found = []
    for c in commodities:
        flows = commodity_flows.get(c.id, {})
        net = _net_outflow(flows)
        star = super_source_id(c)
        expected: dict[EntityId, float] = {c.destination: -c.volume}
        if any(u == star for u, _ in flows):
            expected[star] = c.volume
            free: set[EntityId] = set()
        else:
            free = set(c.candidate_sources)
            emitted = sum(net.get(s, 0.0) for s in free)
            if abs(emitted - c.volume) > EPS:
                found.append(Violation("NodeImbalance", f"commodity {c.id}: sources emit {emitted:.6f} of {c.volume:.6f}", (c.id, ",".join(sorted(free))), emitted - c.volume))
            for s in sorted(free):
                if net.get(s, 0.0) < -EPS:
                    found.append(Violation("NodeImbalance", f"commodity {c.id}: source {s} absorbs flow", (c.id, s), net[s]))
        for node in sorted(set(net) | set(expected)):
            if node in free:
                continue
            residual = net.get(node, 0.0) - expected.get(node, 0.0)
            if abs(residual) > EPS:
                found.append(Violation("NodeImbalance", f"commodity {c.id}: node {node} off balance by {residual:+.6f}", (c.id, node), residual))
    return ValidationReport.from_violations(found)


def check_transit_restrictions(
    commodity_flows: CommodityFlows,
    roles: Mapping[EntityId, VertexRole],
    commodities: Sequence[Commodity],
) -> ValidationReport:
    """Subscribers neither originate nor relay traffic; they only absorb their own."""
    found = []
    for c in commodities:
        flows = commodity_flows.get(c.id, {})
        inflow: dict[EntityId, float] = defaultdict(float)
        outflow: dict[EntityId, float] = defaultdict(float)
        for (u, v), x in flows.items():
            outflow[u] += x
            inflow[v] += x
        for node in sorted(set(inflow) | set(outflow)):
            if roles.get(node) is not VertexRole.SUBSCRIBER:
                continue
            if outflow[node] > EPS:
                found.append(Violation("SubscriberOrigination", f"subscriber {node} sends {outflow[node]:.6f} of {c.id}", (c.id, node), outflow[node]))
            if node != c.destination and inflow[node] > EPS:
                found.append(Violation("SubscriberTransit", f"subscriber {node} receives {inflow[node]:.6f} of {c.id} destined to {c.destination}", (c.id, node), inflow[node]))
    return ValidationReport.from_violations(found)


def check_all(
    assignment: FlowAssignment,
    commodities: Sequence[Commodity],
    roles: Mapping[EntityId, VertexRole],
    layer: Layer | None = None,
) -> ValidationReport:
    """All three conservation statements plus the transit rule."""
    return ValidationReport.merge(
        check_route_invariance(assignment, layer),
        check_demand_satisfaction(assignment, commodities),
        check_node_balance(assignment.commodity_flows, commodities),
        check_transit_restrictions(assignment.commodity_flows, roles, commodities),
    )


# ---------------------------------------------------------------------------
# path decomposition


def decompose(flows: ArcFlows, source: EntityId, sink: EntityId, eps: float = 1e-9) -> tuple[list[tuple[tuple[EntityId, ...], float]], dict[Arc, float]]:
    """Peel ``flows`` into source-sink paths.

    Repeatedly takes the lexicographically smallest path in the positive-flow
    subgraph and subtracts its bottleneck. Returns the paths with amounts and
    whatever flow is left (cycles or stray flow); an acyclic, balanced input
    leaves nothing.
    """
    rest = {a: x for a, x in flows.items() if x > eps}
    paths = []
    while True:
        out: dict[EntityId, list[EntityId]] = defaultdict(list)
        for u, v in sorted(rest):
            out[u].append(v)
        path = _smallest_path(out, source, sink)
        if path is None:
            break
        arcs = list(zip(path, path[1:]))
        amount = min(rest[a] for a in arcs)
        for a in arcs:
            rest[a] -= amount
            if rest[a] <= eps:
                del rest[a]
        paths.append((path, amount))
    return paths, dict(sorted(rest.items()))


def _smallest_path(out: Mapping[EntityId, list[EntityId]], source: EntityId, sink: EntityId) -> tuple[EntityId, ...] | None:
    dead: set[EntityId] = set()
    path = [source]
    on_path = {source}
    stack = [iter(out.get(source, ()))]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            node = path.pop()
            on_path.discard(node)
            # dead-end memo is exact on acyclic flow; cyclic leftovers surface as residual
            dead.add(node)
            continue
        if nxt in on_path or nxt in dead:
            continue
        path.append(nxt)
        if nxt == sink:
            return tuple(path)
        on_path.add(nxt)
        stack.append(iter(out.get(nxt, ())))
    return None


def assignment_from_arc_flows(
    commodity_flows: CommodityFlows, commodities: Sequence[Commodity]
) -> tuple[FlowAssignment, dict[str, dict[Arc, float]]]:
    """Decompose solver arc flows into paths from each commodity's super-source.

    Returns the assignment (paths plus the original arc flows) and any
    per-commodity leftover flow that did not fit a source-sink path.
    """
    paths = []
    leftovers = {}
    for c in commodities:
        flows = commodity_flows.get(c.id, {})
        peeled, rest = decompose(flows, super_source_id(c), c.destination)
        paths += [PathFlow(c.id, p, x) for p, x in peeled]
        if rest:
            leftovers[c.id] = rest
    cleaned = {cid: dict(sorted(f.items())) for cid, f in commodity_flows.items()}
    return FlowAssignment(tuple(paths), cleaned), leftovers


# ---------------------------------------------------------------------------
# overlay mapping

RouteMapping = Mapping[tuple[EntityId, EntityId], tuple[EntityId, ...]]


def route_key(u: EntityId, v: EntityId) -> tuple[EntityId, EntityId]:
    return (u, v) if u <= v else (v, u)


def _orient(g: MultiLayerGraph, u: EntityId, v: EntityId, segment: Sequence[EntityId]) -> tuple[EntityId, ...]:
    cu = counterpart(g, (u, LOGICAL), PHYSICAL)
    cv = counterpart(g, (v, LOGICAL), PHYSICAL)
    if cu is None or cv is None:
        raise DiscontinuousMappingError(f"edge {u}-{v} has an endpoint without a physical counterpart")
    seg = tuple(segment)
    if seg and seg[0] == cu[0] and seg[-1] == cv[0]:
        return seg
    if seg and seg[-1] == cu[0] and seg[0] == cv[0]:
        return seg[::-1]
    raise DiscontinuousMappingError(f"segment for {u}-{v} runs {seg[:1]}..{seg[-1:]}, expected {cu[0]}..{cv[0]}")


def map_route_down(g: MultiLayerGraph, route2: Sequence[EntityId], mapping: RouteMapping) -> tuple[EntityId, ...]:
    """Expand a layer-2 route into the physical path that carries it.

    Raises:
        InvalidPathError: the route is not a walk on layer 2, or a segment is
            not a path on layer 1.
        UnmappedEdgeError: a route edge has no physical segment.
        DiscontinuousMappingError: a segment does not join the physical
            counterparts of its edge's endpoints.
        LoopingExpansionError: the joined segments revisit a vertex.
    """
    logical, physical = g.layer(LOGICAL), g.physical
    if len(route2) < 2:
        raise InvalidPathError(f"route {list(route2)} has fewer than two vertices")
    out: list[EntityId] = []
    for u, v in zip(route2, route2[1:]):
        if not logical.has_edge(u, v):
            raise InvalidPathError(f"{u}-{v} is not a layer-2 edge")
        segment = mapping.get(route_key(u, v))
        if segment is None:
            raise UnmappedEdgeError(f"layer-2 edge {u}-{v} has no physical segment")
        seg = _orient(g, u, v, segment)
        for a, b in zip(seg, seg[1:]):
            if not physical.has_edge(a, b):
                raise InvalidPathError(f"segment for {u}-{v}: {a}-{b} is not a physical link")
        if out and out[-1] != seg[0]:
            raise DiscontinuousMappingError(f"segment for {u}-{v} starts at {seg[0]}, previous ended at {out[-1]}")
        out.extend(seg[1:] if out else seg)
    if len(set(out)) != len(out):
        raise LoopingExpansionError(f"expanded route {out} revisits a vertex")
    return tuple(out)


def validate_route_mapping(g: MultiLayerGraph, mapping: RouteMapping) -> ValidationReport:
    found = []
    logical, physical = g.layer(LOGICAL), g.physical
    for (u, v), seg in sorted(mapping.items()):
        name = f"{u}-{v}"
        if not logical.has_edge(u, v):
            found.append(Violation("UnknownRouteEdge", f"{name} is not a layer-2 edge", (name,)))
            continue
        try:
            seg = _orient(g, u, v, seg)
        except DiscontinuousMappingError as exc:
            found.append(Violation("DiscontinuousMapping", str(exc), (name,)))
            continue
        if len(set(seg)) != len(seg):
            found.append(Violation("LoopingExpansion", f"segment for {name} is not simple", (name,)))
        if any(not physical.has_edge(a, b) for a, b in zip(seg, seg[1:])):
            found.append(Violation("InvalidPath", f"segment for {name} leaves the physical layer", (name,)))
    return ValidationReport.from_violations(found)


def build_route_mapping(g: MultiLayerGraph, roles: Mapping[EntityId, VertexRole] | None = None) -> dict[tuple[EntityId, EntityId], tuple[EntityId, ...]]:
    """Map each layer-2 edge to a fewest-hop physical path.

    Subscribers are never used as intermediate hops. Edges whose endpoints
    are not physically joined are left out.
    """
    roles = roles if roles is not None else g.entity_roles()
    physical = g.physical
    mapping = {}
    for e in g.layer(LOGICAL).links():
        path = _bfs_path(physical, e.u, e.v, roles)
        if path is not None:
            mapping[e.key] = path
    return mapping


def _bfs_path(layer: Layer, src: EntityId, dst: EntityId, roles: Mapping[EntityId, VertexRole]) -> tuple[EntityId, ...] | None:
    if src not in layer.vertices or dst not in layer.vertices:
        return None
    parent: dict[EntityId, EntityId | None] = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            path = [x]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return tuple(reversed(path))
        if x != src and roles.get(x) is VertexRole.SUBSCRIBER:
            continue
        for y in layer.neighbors(x):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    return None


# ---------------------------------------------------------------------------
# reporting


@dataclass(frozen=True)
class Utilization:
    fractions: dict[tuple[EntityId, EntityId], float]
    overloaded: tuple[tuple[EntityId, EntityId], ...]


def link_utilization(link_flows: ArcFlows, layer1: Layer) -> Utilization:
    """Carried flow over capacity for every physical link.

    Both directions of a link share its capacity, so a link's load is the
    sum of its two arc flows. Arcs not on ``layer1`` (super-source arcs) are
    ignored.
    """
    fractions = {}
    overloaded = []
    for e in layer1.links():
        if e.directed or not e.capacity:
            continue
        load = link_flows.get((e.u, e.v), 0.0) + link_flows.get((e.v, e.u), 0.0)
        frac = load / e.capacity
        fractions[e.key] = frac
        if frac > 1 + EPS:
            overloaded.append(e.key)
    return Utilization(fractions, tuple(overloaded))
