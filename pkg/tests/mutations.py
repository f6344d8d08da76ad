"""Structural mutations shared by the core and acceptance tests.

Each entry maps a violation kind to a function that breaks a valid graph in
exactly that way.
"""

from __future__ import annotations

import dataclasses

from vodmlg.core import LOGICAL, PHYSICAL, SERVICE, Edge, Layer, MultiLayerGraph, VertexRole

R = VertexRole


def replace_layer(g: MultiLayerGraph, layer: Layer, counterparts=None) -> MultiLayerGraph:
    layers = tuple(layer if l.layer_id == layer.layer_id else l for l in g.layers)
    return MultiLayerGraph(layers, g.roles, g.counterparts if counterparts is None else counterparts)


def add_edge(g, lid, edge):
    l = g.layer(lid)
    return replace_layer(g, Layer(lid, l.vertices, l.edges + (edge,)))


MUTATIONS = {
    "SubscriberAdjacency": lambda g: add_edge(g, LOGICAL, Edge(*sorted(g.entities_with_role(R.SUBSCRIBER))[:2]))
    if len(g.entities_with_role(R.SUBSCRIBER)) > 1
    else _add_sub_pair(g),
    "RoleOverlap": lambda g: MultiLayerGraph(
        g.layers,
        {**g.roles, (sorted(g.entities_with_role(R.VIDEO_SERVER))[0], LOGICAL): R.SUBSCRIBER},
        g.counterparts,
    ),
    "MissingCounterpart": lambda g: MultiLayerGraph(g.layers, g.roles, frozenset(sorted(g.counterparts, key=lambda c: (c.lower, c.upper))[1:])),
    "BrokenStar": lambda g: add_edge(g, SERVICE, Edge(*_two_subs_or_hub(g))),
    "SelfLoop": lambda g: add_edge(g, PHYSICAL, Edge("vs1", "vs1", 1.0)),
    "NonPositiveCapacity": lambda g: replace_layer(
        g,
        Layer(PHYSICAL, g.physical.vertices, (dataclasses.replace(g.physical.edges[0], capacity=0.0),) + g.physical.edges[1:]),
    ),
}


def _add_sub_pair(g):
    # one subscriber only: give it a second star edge to a fresh subscriber
    a = g.entities_with_role(R.SUBSCRIBER)[0]
    l = g.layer(LOGICAL)
    extra = "zz_sub"
    roles = {**g.roles, (extra, LOGICAL): R.SUBSCRIBER}
    layers = tuple(Layer(LOGICAL, l.vertices | {extra}, l.edges + (Edge(a, extra),)) if x.layer_id == LOGICAL else x for x in g.layers)
    return MultiLayerGraph(layers, roles, g.counterparts)


def _two_subs_or_hub(g):
    subs = sorted(g.entities_with_role(R.SUBSCRIBER))
    # a subscriber-subscriber star edge, or a second edge at the same subscriber
    return (subs[0], subs[1]) if len(subs) > 1 else (subs[0], subs[0])
