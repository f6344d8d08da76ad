"""Requests, the content catalog and the commodities routed by the optimizer."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import Edge, EntityId, Layer, VertexRole
from .errors import (
    DuplicateEntityError,
    MissingSuperSourceError,
    SourceNotOnLayer1Error,
    UnknownContentError,
    UnknownSubscriberError,
)

ContentId = str
Catalog = Mapping[ContentId, Iterable[EntityId]]


@dataclass(frozen=True)
class Request:
    subscriber: EntityId
    content: ContentId
    rate: float
    id: str | None = None

    def __post_init__(self) -> None:
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValueError(f"request rate must be positive, got {self.rate!r}")


@dataclass(frozen=True)
class Commodity:
    """A routable demand: ``volume`` rate units to ``destination`` from any candidate."""

    id: str
    candidate_sources: tuple[EntityId, ...]
    destination: EntityId
    volume: float

    def __post_init__(self) -> None:
        if not self.candidate_sources:
            raise ValueError(f"commodity {self.id}: no candidate sources")
        if self.destination in self.candidate_sources:
            raise ValueError(f"commodity {self.id}: destination is also a source")
        if not (self.volume >= 0 and math.isfinite(self.volume)):
            raise ValueError(f"commodity {self.id}: bad volume {self.volume!r}")


def build_commodities(
    requests: Sequence[Request],
    catalog: Catalog,
    roles: Mapping[EntityId, VertexRole] | None = None,
) -> list[Commodity]:
    """One commodity per request, in request order.

    Candidate sources are every server hosting the requested content. When
    ``roles`` is supplied the requesting entity must be a subscriber.
    """
    out = []
    for i, req in enumerate(requests):
        if req.content not in catalog:
            raise UnknownContentError(f"request {i}: content {req.content!r} is not in the catalog")
        if roles is not None and roles.get(req.subscriber) is not VertexRole.SUBSCRIBER:
            raise UnknownSubscriberError(f"request {i}: {req.subscriber!r} is not a subscriber")
        sources = tuple(sorted(set(catalog[req.content])))
        out.append(Commodity(req.id or f"d{i}", sources, req.subscriber, float(req.rate)))
    return out


def super_source_id(commodity: Commodity) -> EntityId:
    return f"*{commodity.id}"


def augment_super_source(g1: Layer, commodity: Commodity) -> tuple[Layer, EntityId]:
    """Attach a synthetic source feeding every candidate server of ``commodity``.

    The new arcs are directed, zero-weight and uncapacitated, so picking a
    server becomes part of the routing decision without adding bandwidth.
    """
    missing = [s for s in commodity.candidate_sources if s not in g1.vertices]
    if missing:
        raise SourceNotOnLayer1Error(f"commodity {commodity.id}: sources {missing} are not on layer 1")
    star = super_source_id(commodity)
    if star in g1.vertices:
        raise DuplicateEntityError(f"super-source {star!r} already present")
    arcs = tuple(Edge(star, s, math.inf, 0.0, directed=True) for s in commodity.candidate_sources)
    return Layer(g1.layer_id, g1.vertices | {star}, g1.edges + arcs), star


def augment_all(g1: Layer, commodities: Iterable[Commodity]) -> Layer:
    for c in commodities:
        g1, _ = augment_super_source(g1, c)
    return g1


def require_super_source(g1: Layer, commodity: Commodity) -> EntityId:
    """Return the commodity's super-source, checking it is wired to every candidate."""
    star = super_source_id(commodity)
    if star not in g1.vertices or not all(g1.has_arc(star, s) for s in commodity.candidate_sources):
        raise MissingSuperSourceError(f"commodity {commodity.id} has no super-source in the layer")
    return star
