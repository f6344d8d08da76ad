"""Multi-layer graph modelling and topology synthesis for video-on-demand networks."""

from .core import (
    CounterpartEdge,
    Edge,
    EdgeSpec,
    EntitySpec,
    GraphSpec,
    Layer,
    MultiLayerGraph,
    VertexRole,
    build_graph,
    canonical_graph,
    counterpart,
    generate_logical_layers,
    validate_structure,
)
from .demand import Commodity, Request, augment_super_source, build_commodities
from .validation import ValidationReport, Violation

__version__ = "0.1.0"
