"""Exhaustive link-subset oracle for small instances.

Every subset of physical links is tried; for each, the routing LP with just
those links available is solved by HiGHS (through scipy), which keeps this
check independent of the in-house simplex and branch-and-bound.  Subsets in
which some demand cannot reach its subscriber are skipped without an LP.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from ..core import EntityId, Layer, VertexRole
from ..demand import Commodity, require_super_source
from ..errors import TooLargeForOracleError

MAX_ORACLE_LINKS = 12


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    objective: float
    best_links: tuple[tuple[EntityId, EntityId], ...]
    subsets_solved: int


def _reachable(arcs: Sequence[tuple[EntityId, EntityId]], sources: Sequence[EntityId], target: EntityId) -> bool:
    out: dict[EntityId, list[EntityId]] = {}
    for u, v in arcs:
        out.setdefault(u, []).append(v)
    seen = set(sources)
    queue = deque(sources)
    while queue:
        x = queue.popleft()
        if x == target:
            return True
        for y in out.get(x, ()):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return False


def brute_force_optimum(
    g1: Layer,
    commodities: Sequence[Commodity],
    roles: Mapping[EntityId, VertexRole],
) -> OracleResult:
    """Minimum occupied bandwidth over all link subsets of the augmented layer ``g1``.

    Raises:
        TooLargeForOracleError: more than ``MAX_ORACLE_LINKS`` physical links.
    """
    links = [e for e in g1.links() if not e.directed]
    if len(links) > MAX_ORACLE_LINKS:
        raise TooLargeForOracleError(f"{len(links)} links exceed the oracle bound of {MAX_ORACLE_LINKS}")
    for c in commodities:
        require_super_source(g1, c)
    active = [c for c in commodities if c.volume > 0]
    if not active:
        return OracleResult(True, 0.0, (), 0)

    subscribers = {v for v, r in roles.items() if r is VertexRole.SUBSCRIBER}
    nodes = sorted({x for e in links for x in (e.u, e.v)} | {v for v in g1.vertices if not v.startswith("*")})
    node_row = {v: i for i, v in enumerate(nodes)}

    # one column per usable (commodity, arc); subscriber relays are simply absent
    col_link, col_cost, eq_r, eq_c, eq_v = [], [], [], [], []
    per_commodity_arcs: list[list[tuple[int, tuple[EntityId, EntityId]]]] = []
    nrows_eq = 0
    for c in active:
        base = nrows_eq
        star_row = base + len(nodes)
        nrows_eq += len(nodes) + 1
        arcs = []
        for s in c.candidate_sources:
            k = len(col_link)
            col_link.append(-1)
            col_cost.append(0.0)
            eq_r += [star_row, base + node_row[s]]
            eq_c += [k, k]
            eq_v += [1.0, -1.0]
        for li, e in enumerate(links):
            for u, v in ((e.u, e.v), (e.v, e.u)):
                if u in subscribers or (v in subscribers and v != c.destination):
                    continue
                k = len(col_link)
                col_link.append(li)
                col_cost.append(e.weight)
                eq_r += [base + node_row[u], base + node_row[v]]
                eq_c += [k, k]
                eq_v += [1.0, -1.0]
                arcs.append((li, (u, v)))
        per_commodity_arcs.append(arcs)

    ncols = len(col_link)
    A_eq = sp.csc_matrix((eq_v, (eq_r, eq_c)), shape=(nrows_eq, ncols))
    b_eq = np.zeros(nrows_eq)
    offset = 0
    for c in active:
        b_eq[offset + len(nodes)] = c.volume
        b_eq[offset + node_row[c.destination]] = -c.volume
        offset += len(nodes) + 1
    col_link = np.asarray(col_link)
    col_cost = np.asarray(col_cost)
    cap = np.array([float(e.capacity) for e in links])
    A_cap = sp.csc_matrix((np.ones(int((col_link >= 0).sum())), (col_link[col_link >= 0], np.flatnonzero(col_link >= 0))), shape=(len(links), ncols))

    best, best_mask, solved = math.inf, None, 0
    for mask in range(1 << len(links)):
        on = np.array([(mask >> i) & 1 == 1 for i in range(len(links))], dtype=bool)
        if not all(
            _reachable([a for li, a in arcs if on[li]], c.candidate_sources, c.destination)
            for c, arcs in zip(active, per_commodity_arcs)
        ):
            continue
        cols = np.flatnonzero((col_link < 0) | on[np.maximum(col_link, 0)] & (col_link >= 0))
        rows = np.flatnonzero(on)
        res = linprog(
            col_cost[cols],
            A_ub=A_cap[rows][:, cols] if rows.size else None,
            b_ub=cap[rows] if rows.size else None,
            A_eq=A_eq[:, cols],
            b_eq=b_eq,
            bounds=(0, None),
            method="highs",
        )
        solved += 1
        if res.status == 0 and res.fun < best - 1e-9:
            best, best_mask = float(res.fun), mask
    if best_mask is None:
        return OracleResult(False, math.nan, (), solved)
    chosen = tuple(links[i].key for i in range(len(links)) if (best_mask >> i) & 1)
    return OracleResult(True, best, chosen, solved)
