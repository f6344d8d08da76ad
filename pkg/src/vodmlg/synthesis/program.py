"""Linear programs and the node-link topology synthesis formulation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Hashable, Mapping, Sequence

from ..core import EntityId, Layer, VertexRole
from ..demand import Commodity, require_super_source
from ..errors import NoCommoditiesError

LE, EQ, GE = "<=", "==", ">="


@dataclass(frozen=True)
class Row:
    coefs: Mapping[int, float]
    sense: str
    rhs: float
    label: Hashable = None


@dataclass
class LinearProgram:
    """``min cost @ x`` subject to sparse rows and ``lower <= x <= upper``.

    Variables are addressed by index or by their hashable key. ``integer``
    marks variables that branch-and-bound must drive to whole values; the
    LP solver ignores it.
    """

    keys: list[Hashable] = field(default_factory=list)
    lower: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)
    cost: list[float] = field(default_factory=list)
    integer: list[bool] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    _index: dict[Hashable, int] = field(default_factory=dict, repr=False)

    @property
    def num_vars(self) -> int:
        return len(self.keys)

    def add_var(self, key: Hashable, lower: float = 0.0, upper: float = math.inf, cost: float = 0.0, integer: bool = False) -> int:
        if key in self._index:
            raise ValueError(f"variable {key!r} declared twice")
        self._index[key] = len(self.keys)
        self.keys.append(key)
        self.lower.append(float(lower))
        self.upper.append(float(upper))
        self.cost.append(float(cost))
        self.integer.append(integer)
        return self._index[key]

    def add_row(self, coefs: Mapping[int, float], sense: str, rhs: float, label: Hashable = None) -> None:
        if sense not in (LE, EQ, GE):
            raise ValueError(f"bad sense {sense!r}")
        for j in coefs:
            if not 0 <= j < len(self.keys):
                raise ValueError(f"row {label!r} references undeclared variable {j}")
        self.rows.append(Row(dict(coefs), sense, float(rhs), label))

    def index(self, key: Hashable) -> int:
        return self._index[key]

    def with_bounds(self, lower: Sequence[float], upper: Sequence[float]) -> "LinearProgram":
        """Copy sharing the rows but with new variable bounds."""
        return replace(self, lower=list(lower), upper=list(upper))

    def objective(self, x: Sequence[float]) -> float:
        return float(sum(c * v for c, v in zip(self.cost, x) if c))

    def max_violation(self, x: Sequence[float]) -> float:
        """Largest bound or row violation of ``x`` (0 when feasible)."""
        worst = 0.0
        for v, lo, hi in zip(x, self.lower, self.upper):
            worst = max(worst, lo - v, v - hi)
        for row in self.rows:
            act = sum(a * x[j] for j, a in row.coefs.items())
            if row.sense == LE:
                worst = max(worst, act - row.rhs)
            elif row.sense == GE:
                worst = max(worst, row.rhs - act)
            else:
                worst = max(worst, abs(act - row.rhs))
        return worst


def flow_key(commodity_id: str, u: EntityId, v: EntityId) -> tuple:
    return ("x", commodity_id, u, v)


def install_key(u: EntityId, v: EntityId) -> tuple:
    return ("y", u, v)


def build_node_link_program(
    g1: Layer,
    commodities: Sequence[Commodity],
    roles: Mapping[EntityId, VertexRole],
) -> LinearProgram:
    """Node-link program selecting physical links and routing every commodity.

    ``g1`` is the physical layer with a super-source attached per commodity.
    Variables are one flow per arc per commodity (both directions of every
    link plus the commodity's own super-source arcs) and one installation
    variable in ``[0, 1]`` per link.  Rows: flow balance per commodity per
    node, and per link the shared-capacity coupling
    ``sum of both arc flows over commodities <= capacity * installed``.
    Subscriber out-arcs, and in-arcs of subscribers other than the
    commodity's destination, have their upper bound fixed at 0.  The
    objective is the weighted bandwidth carried on physical links.

    Commodities with zero volume are dropped.

    Raises:
        NoCommoditiesError: ``commodities`` is empty.
        MissingSuperSourceError: a commodity's super-source is not in ``g1``.
    """
    if not commodities:
        raise NoCommoditiesError("no commodities to route")
    stars = {c.id: require_super_source(g1, c) for c in commodities}
    active = [c for c in commodities if c.volume > 0]

    lp = LinearProgram()
    links = [e for e in g1.links() if not e.directed]
    nodes = sorted({x for e in links for x in (e.u, e.v)} | {v for v in g1.vertices if not v.startswith("*")})
    for e in links:
        lp.add_var(install_key(e.u, e.v), 0.0, 1.0, 0.0, integer=True)

    is_sub = {v for v in nodes if roles.get(v) is VertexRole.SUBSCRIBER}
    link_flow_vars: dict[tuple[EntityId, EntityId], list[int]] = {e.key: [] for e in links}
    for c in active:
        star = stars[c.id]
        balance: dict[EntityId, dict[int, float]] = {v: {} for v in nodes + [star]}
        for s in c.candidate_sources:
            j = lp.add_var(flow_key(c.id, star, s))
            balance[star][j] = 1.0
            balance[s][j] = -1.0
        for e in links:
            for u, v in ((e.u, e.v), (e.v, e.u)):
                blocked = u in is_sub or (v in is_sub and v != c.destination)
                j = lp.add_var(flow_key(c.id, u, v), 0.0, 0.0 if blocked else math.inf, e.weight)
                balance[u][j] = 1.0
                balance[v][j] = -1.0
                link_flow_vars[e.key].append(j)
        for v in nodes + [star]:
            rhs = c.volume if v == star else -c.volume if v == c.destination else 0.0
            lp.add_row(balance[v], EQ, rhs, ("balance", c.id, v))

    for e in links:
        coefs = {j: 1.0 for j in link_flow_vars[e.key]}
        coefs[lp.index(install_key(e.u, e.v))] = -float(e.capacity)
        lp.add_row(coefs, LE, 0.0, ("capacity", e.u, e.v))
    return lp
