from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vodmlg.core import PHYSICAL, Edge, Layer, VertexRole
from vodmlg.demand import (
    Commodity,
    Request,
    augment_all,
    augment_super_source,
    build_commodities,
    require_super_source,
    super_source_id,
)
from vodmlg.errors import (
    DuplicateEntityError,
    MissingSuperSourceError,
    SourceNotOnLayer1Error,
    UnknownContentError,
    UnknownSubscriberError,
)

ROLES = {"vs1": VertexRole.VIDEO_SERVER, "vs2": VertexRole.VIDEO_SERVER, "a1": VertexRole.SUBSCRIBER, "na1": VertexRole.ACCESS_NODE}
G1 = Layer(PHYSICAL, frozenset(ROLES), (Edge("vs1", "na1", 10), Edge("vs2", "na1", 10), Edge("na1", "a1", 10)))


def test_single_source():
    (c,) = build_commodities([Request("a1", "c1", 4)], {"c1": ["vs1"]})
    assert (c.candidate_sources, c.destination, c.volume) == (("vs1",), "a1", 4.0)
    assert c.id == "d0"


def test_two_sources_sorted():
    (c,) = build_commodities([Request("a1", "c1", 5, "r")], {"c1": ["vs2", "vs1"]})
    assert c.candidate_sources == ("vs1", "vs2")
    assert c.id == "r"


def test_unknown_content():
    with pytest.raises(UnknownContentError):
        build_commodities([Request("a1", "c9", 1)], {"c1": ["vs1"]})


def test_unknown_subscriber():
    with pytest.raises(UnknownSubscriberError):
        build_commodities([Request("na1", "c1", 1)], {"c1": ["vs1"]}, ROLES)


@pytest.mark.parametrize("rate", [0, -1, math.inf, math.nan])
def test_bad_rate(rate):
    with pytest.raises(ValueError):
        Request("a1", "c1", rate)


def test_commodity_rules():
    with pytest.raises(ValueError):
        Commodity("d", (), "a1", 1)
    with pytest.raises(ValueError):
        Commodity("d", ("a1",), "a1", 1)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.sampled_from(["c1", "c2"]), st.integers(1, 10)), max_size=8))
def test_volume_preserved_and_ordered(reqs):
    requests = [Request("a1", c, r) for c, r in reqs]
    out = build_commodities(requests, {"c1": ["vs1"], "c2": ["vs1", "vs2"]})
    assert [c.volume for c in out] == [float(r) for _, r in reqs]
    assert sum(c.volume for c in out) == sum(r for _, r in reqs)


def test_augment_counts():
    c = Commodity("d0", ("vs1", "vs2"), "a1", 5)
    layer, star = augment_super_source(G1, c)
    assert star == "*d0" == super_source_id(c)
    assert layer.vertices == G1.vertices | {star}
    new = [e for e in layer.edges if e not in G1.edges]
    assert len(new) == 2
    assert all(e.directed and e.weight == 0.0 and e.capacity == math.inf and e.u == star for e in new)
    assert layer.has_arc(star, "vs1") and not layer.has_arc("vs1", star)
    assert require_super_source(layer, c) == star


def test_augment_single_candidate():
    layer, _ = augment_super_source(G1, Commodity("d0", ("vs1",), "a1", 5))
    assert len(layer.vertices) == len(G1.vertices) + 1
    assert len(layer.edges) == len(G1.edges) + 1


def test_augment_missing_source():
    with pytest.raises(SourceNotOnLayer1Error):
        augment_super_source(G1, Commodity("d0", ("vs9",), "a1", 5))


def test_augment_twice():
    c = Commodity("d0", ("vs1",), "a1", 5)
    with pytest.raises(DuplicateEntityError):
        augment_all(G1, [c, c])


def test_require_missing():
    with pytest.raises(MissingSuperSourceError):
        require_super_source(G1, Commodity("d0", ("vs1",), "a1", 5))
