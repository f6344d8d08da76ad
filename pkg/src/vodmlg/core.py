"""Three-layer graph model of a VoD delivery system.

Layer 1 is the physical network (servers, subscribers, access and
intermediate nodes joined by capacitated links), layer 2 the logical
server/subscriber mesh and layer 3 the service star.  Every vertex is a
per-layer replica of an entity, identified by ``(entity, layer)``.  Replicas
of one entity on adjacent layers are joined by a counterpart edge.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

from .errors import (
    DuplicateEntityError,
    EdgeEndpointMissingError,
    NoServersError,
    NoSubscribersError,
    NonAdjacentLayerError,
    NonPositiveCapacityError,
    UnknownServerError,
)
from .validation import ValidationReport, Violation

EntityId = str
LayerId = int
VertexId = tuple[EntityId, LayerId]

PHYSICAL, LOGICAL, SERVICE = 1, 2, 3
LAYER_IDS = (PHYSICAL, LOGICAL, SERVICE)
DEFAULT_HUB = "service"


class VertexRole(str, Enum):
    SUBSCRIBER = "subscriber"
    VIDEO_SERVER = "video_server"
    ACCESS_NODE = "access_node"
    INTERMEDIATE = "intermediate"
    SERVICE_HUB = "service_hub"


@dataclass(frozen=True)
class Edge:
    """Undirected edge inside one layer.

    ``capacity`` is in rate units and is only meaningful on layer 1;
    ``weight`` is the cost per rate unit carried (1 = plain bandwidth).
    Directed edges only occur as synthetic super-source arcs.
    """

    u: EntityId
    v: EntityId
    capacity: float | None = None
    weight: float = 1.0
    directed: bool = False

    @property
    def key(self) -> tuple[EntityId, EntityId]:
        return (self.u, self.v) if self.u <= self.v else (self.v, self.u)


@dataclass(frozen=True)
class Layer:
    layer_id: LayerId
    vertices: frozenset[EntityId]
    edges: tuple[Edge, ...] = ()

    @cached_property
    def _index(self) -> dict[tuple[EntityId, EntityId], Edge]:
        # first occurrence wins; duplicates are a validation matter
        index: dict[tuple[EntityId, EntityId], Edge] = {}
        for e in self.edges:
            index.setdefault(e.key, e)
        return index

    @cached_property
    def _adjacency(self) -> dict[EntityId, tuple[EntityId, ...]]:
        adj: dict[EntityId, set[EntityId]] = defaultdict(set)
        for u, v in self._index:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return {k: tuple(sorted(vs)) for k, vs in adj.items()}

    def edge(self, u: EntityId, v: EntityId) -> Edge | None:
        return self._index.get((u, v) if u <= v else (v, u))

    def has_edge(self, u: EntityId, v: EntityId) -> bool:
        return self.edge(u, v) is not None

    def neighbors(self, v: EntityId) -> tuple[EntityId, ...]:
        """Sorted neighbours of ``v``."""
        return self._adjacency.get(v, ())

    def links(self) -> list[Edge]:
        """Distinct edges in canonical (sorted endpoint) order."""
        return [self._index[k] for k in sorted(self._index)]

    def arcs(self) -> list[tuple[EntityId, EntityId]]:
        """Directed arcs, sorted; an undirected link yields both directions."""
        out = []
        for k in sorted(self._index):
            e = self._index[k]
            if e.u == e.v:
                continue
            out.append((e.u, e.v))
            if not e.directed:
                out.append((e.v, e.u))
        return sorted(out)

    def has_arc(self, u: EntityId, v: EntityId) -> bool:
        e = self.edge(u, v)
        return e is not None and u != v and (not e.directed or e.u == u)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        start = min(self.vertices)
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in self.neighbors(x):
                if y in self.vertices and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen >= self.vertices


@dataclass(frozen=True)
class CounterpartEdge:
    lower: VertexId
    upper: VertexId


@dataclass(frozen=True)
class MultiLayerGraph:
    layers: tuple[Layer, ...]
    roles: Mapping[VertexId, VertexRole]
    counterparts: frozenset[CounterpartEdge] = field(default_factory=frozenset)

    def layer(self, layer_id: LayerId) -> Layer:
        for layer in self.layers:
            if layer.layer_id == layer_id:
                return layer
        raise KeyError(f"no layer {layer_id}")

    @property
    def physical(self) -> Layer:
        return self.layer(PHYSICAL)

    def vertices(self) -> list[VertexId]:
        return sorted((e, layer.layer_id) for layer in self.layers for e in layer.vertices)

    def has_vertex(self, v: VertexId) -> bool:
        entity, layer_id = v
        return any(l.layer_id == layer_id and entity in l.vertices for l in self.layers)

    @staticmethod
    def entity_of(v: VertexId) -> EntityId:
        return v[0]

    def entity_roles(self) -> dict[EntityId, VertexRole]:
        """Role per entity, taken from its lowest-layer replica."""
        out: dict[EntityId, VertexRole] = {}
        for (entity, _layer), role in sorted(self.roles.items()):
            out.setdefault(entity, role)
        return out

    def entities_with_role(self, role: VertexRole) -> list[EntityId]:
        return sorted(e for e, r in self.entity_roles().items() if r is role)

    @cached_property
    def _counterpart_index(self) -> dict[tuple[VertexId, LayerId], list[VertexId]]:
        index: dict[tuple[VertexId, LayerId], list[VertexId]] = defaultdict(list)
        for ce in self.counterparts:
            index[(ce.lower, ce.upper[1])].append(ce.upper)
            index[(ce.upper, ce.lower[1])].append(ce.lower)
        return dict(index)


# ---------------------------------------------------------------------------
# construction


@dataclass(frozen=True)
class EntitySpec:
    id: EntityId
    role: VertexRole
    layers: frozenset[LayerId] = frozenset({PHYSICAL})


@dataclass(frozen=True)
class EdgeSpec:
    layer: LayerId
    u: EntityId
    v: EntityId
    capacity: float | None = None
    weight: float = 1.0


@dataclass(frozen=True)
class GraphSpec:
    """Entities with their roles and layer presence, plus all layer edges."""

    entities: tuple[EntitySpec, ...]
    edges: tuple[EdgeSpec, ...] = ()


def _materialize_counterparts(presence: Mapping[EntityId, Iterable[LayerId]]) -> frozenset[CounterpartEdge]:
    out = set()
    for entity, layers in presence.items():
        layers = set(layers)
        for lo, hi in ((PHYSICAL, LOGICAL), (LOGICAL, SERVICE)):
            if lo in layers and hi in layers:
                out.add(CounterpartEdge((entity, lo), (entity, hi)))
    return frozenset(out)


def assemble(layers: Iterable[Layer], entity_roles: Mapping[EntityId, VertexRole]) -> MultiLayerGraph:
    """Join three layers into a graph, replicating roles and adding counterparts."""
    layers = tuple(sorted(layers, key=lambda l: l.layer_id))
    presence: dict[EntityId, set[LayerId]] = defaultdict(set)
    roles: dict[VertexId, VertexRole] = {}
    for layer in layers:
        for e in layer.vertices:
            presence[e].add(layer.layer_id)
            roles[(e, layer.layer_id)] = entity_roles[e]
    return MultiLayerGraph(layers, roles, _materialize_counterparts(presence))


def build_graph(spec: GraphSpec) -> MultiLayerGraph:
    """Materialize replicas, layer edges and counterpart edges from ``spec``.

    Raises:
        ValueError: an entity id starts with the reserved ``*`` prefix.
        DuplicateEntityError: an entity id is declared twice.
        EdgeEndpointMissingError: an edge names a vertex absent from its layer.
        NonPositiveCapacityError: a layer-1 edge lacks a finite positive capacity.
    """
    roles: dict[EntityId, VertexRole] = {}
    members: dict[LayerId, set[EntityId]] = {lid: set() for lid in LAYER_IDS}
    for ent in spec.entities:
        if ent.id.startswith("*"):
            raise ValueError(f"entity id {ent.id!r}: the '*' prefix is reserved for super-sources")
        if ent.id in roles:
            raise DuplicateEntityError(f"entity {ent.id!r} declared twice")
        roles[ent.id] = ent.role
        for lid in ent.layers:
            if lid not in members:
                raise ValueError(f"entity {ent.id!r}: layer {lid} does not exist")
            members[lid].add(ent.id)

    edges: dict[LayerId, list[Edge]] = {lid: [] for lid in LAYER_IDS}
    for es in spec.edges:
        if es.layer not in members:
            raise ValueError(f"edge {es.u}-{es.v}: layer {es.layer} does not exist")
        for end in (es.u, es.v):
            if end not in members[es.layer]:
                raise EdgeEndpointMissingError(f"edge {es.u}-{es.v} on layer {es.layer}: {end!r} is not on that layer")
        if es.layer == PHYSICAL:
            cap = es.capacity
            if cap is None or not math.isfinite(cap) or cap <= 0:
                raise NonPositiveCapacityError(f"link {es.u}-{es.v} has capacity {cap!r}")
        edges[es.layer].append(Edge(es.u, es.v, es.capacity, es.weight))

    layers = [Layer(lid, frozenset(members[lid]), tuple(edges[lid])) for lid in LAYER_IDS]
    return assemble(layers, roles)


def generate_logical_layers(
    physical: Layer,
    roles: Mapping[EntityId, VertexRole],
    catalog: Mapping[str, Iterable[EntityId]] | None = None,
    hub: EntityId = DEFAULT_HUB,
) -> tuple[Layer, Layer]:
    """Derive the canonical layer-2 mesh and layer-3 star from the physical layer.

    Layer 2 holds every server and subscriber, with all server-server and
    subscriber-server pairs joined and no subscriber-subscriber edges. Layer 3
    joins a synthetic hub to every subscriber. When a catalog is given, every
    server it names must be a video server of ``physical``.
    """
    missing = sorted(v for v in physical.vertices if v not in roles)
    if missing:
        raise ValueError(f"vertices without a role: {missing}")
    servers = sorted(v for v in physical.vertices if roles[v] is VertexRole.VIDEO_SERVER)
    subscribers = sorted(v for v in physical.vertices if roles[v] is VertexRole.SUBSCRIBER)
    if not servers:
        raise NoServersError("physical layer has no video servers")
    if not subscribers:
        raise NoSubscribersError("physical layer has no subscribers")
    if hub in physical.vertices or hub in roles:
        raise DuplicateEntityError(f"hub id {hub!r} collides with an entity")
    if catalog is not None:
        known = set(servers)
        for content, hosts in sorted(catalog.items()):
            for s in hosts:
                if s not in known:
                    raise UnknownServerError(f"content {content!r} hosted on {s!r}, which is not a video server")

    mesh = [Edge(a, b) for a, b in combinations(servers, 2)]
    mesh += [Edge(a, s) for a in subscribers for s in servers]
    logical = Layer(LOGICAL, frozenset(servers) | frozenset(subscribers), tuple(mesh))
    star = Layer(SERVICE, frozenset(subscribers) | {hub}, tuple(Edge(hub, a) for a in subscribers))
    return logical, star


def canonical_graph(
    physical: Layer,
    roles: Mapping[EntityId, VertexRole],
    catalog: Mapping[str, Iterable[EntityId]] | None = None,
    hub: EntityId = DEFAULT_HUB,
) -> MultiLayerGraph:
    logical, star = generate_logical_layers(physical, roles, catalog, hub)
    return assemble([physical, logical, star], {**roles, hub: VertexRole.SERVICE_HUB})


def counterpart(g: MultiLayerGraph, v: VertexId, target: LayerId) -> VertexId | None:
    """Replica of ``v``'s entity on the adjacent ``target`` layer, if any.

    Raises:
        NonAdjacentLayerError: ``target`` is not directly above or below ``v``.
        KeyError: ``v`` is not a vertex of ``g``.
    """
    if abs(target - v[1]) != 1:
        raise NonAdjacentLayerError(f"layer {target} is not adjacent to layer {v[1]}")
    if not g.has_vertex(v):
        raise KeyError(v)
    found = g._counterpart_index.get((v, target), [])
    return found[0] if len(found) == 1 else None


# ---------------------------------------------------------------------------
# validation


def _edge_name(layer_id: LayerId, e: Edge) -> str:
    return f"L{layer_id}:{e.u}-{e.v}"


def _check_roles(g: MultiLayerGraph) -> Iterable[Violation]:
    by_entity: dict[EntityId, set[VertexRole]] = defaultdict(set)
    for layer in g.layers:
        for e in layer.vertices:
            role = g.roles.get((e, layer.layer_id))
            if role is None:
                yield Violation("MissingRole", f"{e} on layer {layer.layer_id} has no role", (f"{e}@{layer.layer_id}",))
            else:
                by_entity[e].add(role)
    for e, roles in sorted(by_entity.items()):
        if len(roles) > 1:
            names = ", ".join(sorted(r.value for r in roles))
            yield Violation("RoleOverlap", f"entity {e} carries roles {names}", (e,))

    hubs = sorted({v[0] for v, r in g.roles.items() if r is VertexRole.SERVICE_HUB})
    if len(hubs) > 1:
        yield Violation("HubPlacement", f"{len(hubs)} service hubs", tuple(hubs))
    for (e, lid), r in sorted(g.roles.items()):
        if r is VertexRole.SERVICE_HUB and lid != SERVICE:
            yield Violation("HubPlacement", f"service hub {e} replicated on layer {lid}", (f"{e}@{lid}",))


def _check_edges(layer: Layer) -> Iterable[Violation]:
    seen: set[tuple[EntityId, EntityId]] = set()
    for e in layer.edges:
        name = _edge_name(layer.layer_id, e)
        if e.u == e.v:
            yield Violation("SelfLoop", f"self-loop at {e.u}", (name,))
        if e.key in seen:
            yield Violation("ParallelEdge", f"duplicate edge {e.u}-{e.v}", (name,))
        seen.add(e.key)
        for end in (e.u, e.v):
            if end not in layer.vertices:
                yield Violation("DanglingEdge", f"edge endpoint {end} not on layer {layer.layer_id}", (name,))
        if layer.layer_id == PHYSICAL:
            cap = e.capacity
            if cap is None or not math.isfinite(cap) or cap <= 0:
                yield Violation("NonPositiveCapacity", f"link capacity {cap!r}", (name,))
            if not math.isfinite(e.weight) or e.weight < 0:
                yield Violation("InvalidWeight", f"link weight {e.weight!r}", (name,))
        elif e.capacity is not None:
            yield Violation("CapacityOnLogicalLayer", f"edge on layer {layer.layer_id} carries a capacity", (name,))


def _check_star(g: MultiLayerGraph, star: Layer) -> Iterable[Violation]:
    role = lambda e: g.roles.get((e, SERVICE))  # noqa: E731
    degree: dict[EntityId, int] = defaultdict(int)
    for e in star.edges:
        kinds = {role(e.u), role(e.v)}
        if kinds != {VertexRole.SERVICE_HUB, VertexRole.SUBSCRIBER}:
            yield Violation("BrokenStar", f"layer-3 edge {e.u}-{e.v} is not hub-subscriber", (_edge_name(SERVICE, e),))
        degree[e.u] += 1
        degree[e.v] += 1
    for v in sorted(star.vertices):
        r = role(v)
        if r is VertexRole.SUBSCRIBER and degree[v] != 1:
            yield Violation("BrokenStar", f"subscriber {v} has {degree[v]} layer-3 edges", (f"{v}@3",))
        elif r not in (VertexRole.SUBSCRIBER, VertexRole.SERVICE_HUB, None):
            yield Violation("BrokenStar", f"{r.value} {v} on the service layer", (f"{v}@3",))


def _check_counterparts(g: MultiLayerGraph) -> Iterable[Violation]:
    count: dict[tuple[EntityId, LayerId], int] = defaultdict(int)
    for ce in sorted(g.counterparts, key=lambda c: (c.lower, c.upper)):
        name = f"{ce.lower[0]}@{ce.lower[1]}~{ce.upper[0]}@{ce.upper[1]}"
        if ce.upper[1] - ce.lower[1] != 1:
            yield Violation("CounterpartMismatch", "counterpart edge between non-adjacent layers", (name,))
            continue
        if ce.lower[0] != ce.upper[0]:
            yield Violation("CounterpartMismatch", "counterpart edge joins different entities", (name,))
            continue
        if not (g.has_vertex(ce.lower) and g.has_vertex(ce.upper)):
            yield Violation("CounterpartMismatch", "counterpart edge endpoint missing", (name,))
            continue
        count[(ce.lower[0], ce.lower[1])] += 1
    for lo in (PHYSICAL, LOGICAL):
        below, above = g.layer(lo).vertices, g.layer(lo + 1).vertices
        for e in sorted(below & above):
            if count[(e, lo)] == 0:
                yield Violation("MissingCounterpart", f"{e} on layers {lo} and {lo + 1} has no counterpart edge", (e,))


def validate_structure(g: MultiLayerGraph, check_connectivity: bool = True) -> ValidationReport:
    """Check every structural rule of ``g``; an empty report means valid.

    With ``check_connectivity=False`` the physical layer may fall apart into
    several components; extracted topologies use this since two servers can
    feed disjoint groups of subscribers.
    """
    ids = sorted(l.layer_id for l in g.layers)
    if ids != list(LAYER_IDS):
        return ValidationReport.from_violations([Violation("LayerCount", f"layers {ids}, expected 1, 2, 3")])

    found: list[Violation] = []
    found += _check_roles(g)
    for layer in g.layers:
        found += _check_edges(layer)
    found += _check_star(g, g.layer(SERVICE))
    for e in g.layer(LOGICAL).edges:
        if g.roles.get((e.u, LOGICAL)) is VertexRole.SUBSCRIBER and g.roles.get((e.v, LOGICAL)) is VertexRole.SUBSCRIBER:
            found.append(Violation("SubscriberAdjacency", f"subscribers {e.u} and {e.v} are adjacent", (_edge_name(LOGICAL, e),)))
    found += _check_counterparts(g)
    if check_connectivity and not g.physical.is_connected():
        found.append(Violation("Disconnected", "physical layer is not connected"))
    return ValidationReport.from_violations(found)
