"""Scenario files: a strict JSON document describing one planning problem.

Top-level keys are ``entities``, ``links``, ``catalog``, ``requests`` and the
optional ``options``::

    {
      "entities": [{"id": "vs1", "role": "video_server"}, ...],
      "links": [{"endpoints": ["vs1", "x1"], "capacity": 10, "weight": 1}, ...],
      "catalog": {"c1": ["vs1"]},
      "requests": [{"subscriber": "a1", "content": "c1", "rate": 4}],
      "options": {"iteration_limit": 50000, "node_limit": 100000}
    }

Links default to layer 1.  When any link names layer 2 or 3, or an entity
lists its ``layers``, the logical layers are taken from the file as written;
otherwise they are generated canonically from the physical layer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .core import (
    DEFAULT_HUB,
    LOGICAL,
    PHYSICAL,
    SERVICE,
    EdgeSpec,
    EntitySpec,
    GraphSpec,
    Layer,
    Edge,
    MultiLayerGraph,
    VertexRole,
    build_graph,
    canonical_graph,
)
from .demand import Commodity, Request, build_commodities
from .errors import ScenarioSyntaxError, SchemaViolationError, UnknownFieldError
from .synthesis.milp import MilpOptions
from .synthesis.simplex import SimplexOptions

REQUIRED_TOP = ("entities", "links", "catalog", "requests")
OPTION_TYPES = {
    "iteration_limit": int,
    "node_limit": int,
    "pricing": str,
    "pivot_tolerance": float,
    "feasibility_tolerance": float,
    "gap_tolerance": float,
}
DEFAULT_PRESENCE = {
    VertexRole.VIDEO_SERVER: (PHYSICAL, LOGICAL),
    VertexRole.SUBSCRIBER: (PHYSICAL, LOGICAL, SERVICE),
    VertexRole.ACCESS_NODE: (PHYSICAL,),
    VertexRole.INTERMEDIATE: (PHYSICAL,),
    VertexRole.SERVICE_HUB: (SERVICE,),
}


@dataclass(frozen=True)
class EntityDecl:
    id: str
    role: VertexRole
    layers: tuple[int, ...] | None = None


@dataclass(frozen=True)
class LinkDecl:
    u: str
    v: str
    capacity: float | None
    weight: float = 1.0
    layer: int = PHYSICAL


@dataclass(frozen=True)
class ScenarioOptions:
    iteration_limit: int = 50_000
    node_limit: int = 100_000
    pricing: str = "dantzig"
    pivot_tolerance: float = 1e-9
    feasibility_tolerance: float = 1e-6
    gap_tolerance: float = 1e-6

    def milp(self) -> MilpOptions:
        simplex = SimplexOptions(
            iteration_limit=self.iteration_limit,
            pivot_tol=self.pivot_tolerance,
            feasibility_tol=self.feasibility_tolerance,
            pricing=self.pricing,
        )
        return MilpOptions(node_limit=self.node_limit, gap_tol=self.gap_tolerance, simplex=simplex)


@dataclass(frozen=True)
class Scenario:
    entities: tuple[EntityDecl, ...]
    links: tuple[LinkDecl, ...]
    catalog: dict[str, tuple[str, ...]]
    requests: tuple[Request, ...]
    options: ScenarioOptions = field(default_factory=ScenarioOptions)

    def roles(self) -> dict[str, VertexRole]:
        return {e.id: e.role for e in self.entities}

    @property
    def explicit_layers(self) -> bool:
        return any(l.layer != PHYSICAL for l in self.links) or any(e.layers is not None for e in self.entities)

    def graph(self) -> MultiLayerGraph:
        roles = self.roles()
        hubs = [e.id for e in self.entities if e.role is VertexRole.SERVICE_HUB]
        if self.explicit_layers:
            ents = [
                EntitySpec(e.id, e.role, frozenset(e.layers if e.layers is not None else DEFAULT_PRESENCE[e.role]))
                for e in self.entities
            ]
            if not hubs and any(es.role is VertexRole.SUBSCRIBER and SERVICE in es.layers for es in ents):
                ents.append(EntitySpec(DEFAULT_HUB, VertexRole.SERVICE_HUB, frozenset({SERVICE})))
            edges = [EdgeSpec(l.layer, l.u, l.v, l.capacity, l.weight) for l in self.links]
            return build_graph(GraphSpec(tuple(ents), tuple(edges)))
        physical_roles = {k: r for k, r in roles.items() if r is not VertexRole.SERVICE_HUB}
        physical = Layer(
            PHYSICAL,
            frozenset(physical_roles),
            tuple(Edge(l.u, l.v, l.capacity, l.weight) for l in self.links),
        )
        return canonical_graph(physical, physical_roles, self.catalog, hubs[0] if hubs else DEFAULT_HUB)

    def commodities(self) -> list[Commodity]:
        return build_commodities(list(self.requests), self.catalog, self.roles())

    def to_dict(self) -> dict[str, Any]:
        ents = []
        for e in self.entities:
            d: dict[str, Any] = {"id": e.id, "role": e.role.value}
            if e.layers is not None:
                d["layers"] = list(e.layers)
            ents.append(d)
        links = []
        for l in self.links:
            d = {"endpoints": [l.u, l.v]}
            if l.capacity is not None:
                d["capacity"] = l.capacity
            if l.weight != 1.0:
                d["weight"] = l.weight
            if l.layer != PHYSICAL:
                d["layer"] = l.layer
            links.append(d)
        reqs = []
        for r in self.requests:
            d = {"subscriber": r.subscriber, "content": r.content, "rate": r.rate}
            if r.id is not None:
                d["id"] = r.id
            reqs.append(d)
        defaults = ScenarioOptions()
        opts = {k: getattr(self.options, k) for k in OPTION_TYPES if getattr(self.options, k) != getattr(defaults, k)}
        out = {
            "entities": ents,
            "links": links,
            "catalog": {k: list(v) for k, v in sorted(self.catalog.items())},
            "requests": reqs,
        }
        if opts:
            out["options"] = opts
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


# ---------------------------------------------------------------------------
# parsing


def _fail(where: str, msg: str) -> SchemaViolationError:
    return SchemaViolationError(msg, where)


def _fields(obj: Any, where: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(obj, dict):
        raise _fail(where, f"expected an object, got {type(obj).__name__}")
    for k in obj:
        if k not in required and k not in optional:
            raise UnknownFieldError(f"unknown field {k!r}", f"{where}.{k}" if where else k)
    for k in required:
        if k not in obj:
            raise _fail(where, f"missing field {k!r}")
    return obj


def _string(v: Any, where: str) -> str:
    if not isinstance(v, str) or not v:
        raise _fail(where, "expected a non-empty string")
    return v


def _number(v: Any, where: str, positive: bool = True) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise _fail(where, f"expected a finite number, got {v!r}")
    if positive and v <= 0:
        raise _fail(where, f"must be positive, got {v!r}")
    return float(v)


def _list(v: Any, where: str) -> list:
    if not isinstance(v, list):
        raise _fail(where, "expected a list")
    return v


def parse_scenario(text: str) -> Scenario:
    """Parse and check a scenario document.

    Raises:
        ScenarioSyntaxError: the text is not JSON (location gives line and column).
        UnknownFieldError: an object carries a field the format does not define.
        SchemaViolationError: a value has the wrong type or range, or refers
            to something undeclared.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    _fields(doc, "", REQUIRED_TOP, ("options",))

    entities: list[EntityDecl] = []
    roles: dict[str, VertexRole] = {}
    for i, raw in enumerate(_list(doc["entities"], "entities")):
        where = f"entities[{i}]"
        _fields(raw, where, ("id", "role"), ("layers",))
        eid = _string(raw["id"], f"{where}.id")
        if eid.startswith("*"):
            raise _fail(f"{where}.id", "ids starting with '*' are reserved")
        if eid in roles:
            raise _fail(f"{where}.id", f"duplicate entity {eid!r}")
        try:
            role = VertexRole(raw["role"])
        except ValueError:
            raise _fail(f"{where}.role", f"unknown role {raw['role']!r}") from None
        layers = None
        if "layers" in raw:
            layers = tuple(_list(raw["layers"], f"{where}.layers"))
            if not layers or any(isinstance(x, bool) or x not in (1, 2, 3) for x in layers) or len(set(layers)) != len(layers):
                raise _fail(f"{where}.layers", "expected distinct layer numbers from 1, 2, 3")
        roles[eid] = role
        entities.append(EntityDecl(eid, role, layers))

    links: list[LinkDecl] = []
    for i, raw in enumerate(_list(doc["links"], "links")):
        where = f"links[{i}]"
        _fields(raw, where, ("endpoints",), ("capacity", "weight", "layer"))
        ends = _list(raw["endpoints"], f"{where}.endpoints")
        if len(ends) != 2:
            raise _fail(f"{where}.endpoints", "expected two endpoints")
        for k, end in enumerate(ends):
            if _string(end, f"{where}.endpoints[{k}]") not in roles:
                raise _fail(f"{where}.endpoints[{k}]", f"undeclared entity {end!r}")
        layer = raw.get("layer", PHYSICAL)
        if isinstance(layer, bool) or layer not in (1, 2, 3):
            raise _fail(f"{where}.layer", "expected 1, 2 or 3")
        if layer == PHYSICAL:
            if "capacity" not in raw:
                raise _fail(where, "physical links need a capacity")
            capacity = _number(raw["capacity"], f"{where}.capacity")
        else:
            if "capacity" in raw:
                raise _fail(f"{where}.capacity", "logical links are uncapacitated")
            capacity = None
        weight = _number(raw["weight"], f"{where}.weight") if "weight" in raw else 1.0
        links.append(LinkDecl(ends[0], ends[1], capacity, weight, layer))

    catalog: dict[str, tuple[str, ...]] = {}
    raw_cat = doc["catalog"]
    if not isinstance(raw_cat, dict):
        raise _fail("catalog", "expected an object mapping content to servers")
    for content, servers in raw_cat.items():
        where = f"catalog.{content}"
        servers = _list(servers, where)
        if not servers:
            raise _fail(where, "content must be hosted somewhere")
        for k, s in enumerate(servers):
            if roles.get(_string(s, f"{where}[{k}]")) is not VertexRole.VIDEO_SERVER:
                raise _fail(f"{where}[{k}]", f"{s!r} is not a video server")
        catalog[content] = tuple(servers)

    requests: list[Request] = []
    ids: set[str] = set()
    for i, raw in enumerate(_list(doc["requests"], "requests")):
        where = f"requests[{i}]"
        _fields(raw, where, ("subscriber", "content", "rate"), ("id",))
        sub = _string(raw["subscriber"], f"{where}.subscriber")
        if roles.get(sub) is not VertexRole.SUBSCRIBER:
            raise _fail(f"{where}.subscriber", f"{sub!r} is not a subscriber")
        content = _string(raw["content"], f"{where}.content")
        if content not in catalog:
            raise _fail(f"{where}.content", f"content {content!r} is not in the catalog")
        rate = _number(raw["rate"], f"{where}.rate")
        rid = _string(raw["id"], f"{where}.id") if "id" in raw else f"d{i}"
        if rid in ids:
            raise _fail(f"{where}.id", f"duplicate request id {rid!r}")
        ids.add(rid)
        requests.append(Request(sub, content, rate, rid))

    options = ScenarioOptions()
    if "options" in doc:
        raw = _fields(doc["options"], "options", (), tuple(OPTION_TYPES))
        vals = {}
        for k, v in raw.items():
            if OPTION_TYPES[k] is int:
                if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
                    raise _fail(f"options.{k}", "expected a positive integer")
            elif OPTION_TYPES[k] is float:
                v = _number(v, f"options.{k}")
            elif v not in ("dantzig", "bland"):
                raise _fail(f"options.{k}", "expected 'dantzig' or 'bland'")
            vals[k] = v
        options = ScenarioOptions(**vals)

    return Scenario(tuple(entities), tuple(links), catalog, tuple(requests), options)
