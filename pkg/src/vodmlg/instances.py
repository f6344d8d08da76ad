"""Named worked examples and seeded random scenario generators."""

from __future__ import annotations

import random
from itertools import combinations

from .core import VertexRole
from .demand import Request
from .scenario import EntityDecl, LinkDecl, Scenario

R = VertexRole


def _scenario(roles: dict[str, VertexRole], links, catalog, requests) -> Scenario:
    return Scenario(
        tuple(EntityDecl(k, r) for k, r in roles.items()),
        tuple(LinkDecl(u, v, float(c)) for u, v, c in links),
        {k: tuple(v) for k, v in catalog.items()},
        tuple(Request(a, c, float(rate), f"d{i}") for i, (a, c, rate) in enumerate(requests)),
    )


def diamond() -> Scenario:
    """vs1 reaches na1 over two parallel intermediates; one subscriber asks for 4."""
    roles = {"vs1": R.VIDEO_SERVER, "x1": R.INTERMEDIATE, "x2": R.INTERMEDIATE, "na1": R.ACCESS_NODE, "a1": R.SUBSCRIBER}
    links = [("vs1", "x1", 10), ("vs1", "x2", 10), ("x1", "na1", 10), ("x2", "na1", 10), ("na1", "a1", 10)]
    return _scenario(roles, links, {"c1": ["vs1"]}, [("a1", "c1", 4)])


def two_server() -> Scenario:
    """Same content on vs1 (2 hops from a1) and vs2 (3 hops); rate 5."""
    roles = {"vs1": R.VIDEO_SERVER, "vs2": R.VIDEO_SERVER, "x1": R.INTERMEDIATE, "na1": R.ACCESS_NODE, "a1": R.SUBSCRIBER}
    links = [("vs1", "na1", 10), ("vs2", "x1", 10), ("x1", "na1", 10), ("na1", "a1", 10)]
    return _scenario(roles, links, {"c1": ["vs1", "vs2"]}, [("a1", "c1", 5)])


def capacity_split() -> Scenario:
    """Rate 10 over two parallel 2-hop paths of capacity 6 each."""
    roles = {"vs1": R.VIDEO_SERVER, "na1": R.ACCESS_NODE, "na2": R.ACCESS_NODE, "a1": R.SUBSCRIBER}
    links = [("vs1", "na1", 6), ("vs1", "na2", 6), ("na1", "a1", 6), ("na2", "a1", 6)]
    return _scenario(roles, links, {"c1": ["vs1"]}, [("a1", "c1", 10)])


def line(rate: float = 4.0) -> Scenario:
    """vs1 - x1 - na1 - a1."""
    roles = {"vs1": R.VIDEO_SERVER, "x1": R.INTERMEDIATE, "na1": R.ACCESS_NODE, "a1": R.SUBSCRIBER}
    links = [("vs1", "x1", 10), ("x1", "na1", 10), ("na1", "a1", 10)]
    return _scenario(roles, links, {"c1": ["vs1"]}, [("a1", "c1", rate)])


WORKED_EXAMPLES = {"diamond": diamond, "two_server": two_server, "capacity_split": capacity_split, "line": line}


def _spanning_links(rng: random.Random, nodes: list[str]) -> set[tuple[str, str]]:
    order = nodes[:]
    rng.shuffle(order)
    out = set()
    for i in range(1, len(order)):
        a, b = order[i], order[rng.randrange(i)]
        out.add((min(a, b), max(a, b)))
    return out


def random_instance(
    seed: int,
    max_nodes: int = 6,
    max_links: int = 8,
    max_commodities: int = 3,
    max_rate: int = 10,
    max_capacity: int = 20,
) -> Scenario:
    """Small connected scenario for oracle comparisons.

    Integer rates in ``[1, max_rate]`` and capacities in ``[1, max_capacity]``;
    some draws are infeasible by design (tight capacities, subscribers
    cutting the only path).
    """
    rng = random.Random(seed)
    n = rng.randint(3, max_nodes)
    n_srv = rng.randint(1, min(2, n - 2))
    n_sub = rng.randint(1, min(2, n - n_srv))
    names = [f"vs{i + 1}" for i in range(n_srv)] + [f"a{i + 1}" for i in range(n_sub)]
    roles = {k: (R.VIDEO_SERVER if k.startswith("vs") else R.SUBSCRIBER) for k in names}
    for i in range(n - n_srv - n_sub):
        if rng.random() < 0.5:
            roles[f"na{i + 1}"] = R.ACCESS_NODE
        else:
            roles[f"x{i + 1}"] = R.INTERMEDIATE
    nodes = sorted(roles)

    links = _spanning_links(rng, nodes)
    pairs = [p for p in combinations(nodes, 2) if p not in links]
    rng.shuffle(pairs)
    target = rng.randint(len(links), min(max_links, len(links) + len(pairs)))
    links |= set(pairs[: target - len(links)])
    link_list = [(u, v, rng.randint(1, max_capacity)) for u, v in sorted(links)]

    servers = [k for k in nodes if roles[k] is R.VIDEO_SERVER]
    subs = [k for k in nodes if roles[k] is R.SUBSCRIBER]
    catalog = {}
    for i in range(rng.randint(1, 2)):
        catalog[f"c{i + 1}"] = sorted(rng.sample(servers, rng.randint(1, len(servers))))
    requests = [
        (rng.choice(subs), rng.choice(sorted(catalog)), rng.randint(1, max_rate))
        for _ in range(rng.randint(1, max_commodities))
    ]
    return _scenario(roles, link_list, catalog, requests)


def desk_scale_instance(
    seed: int = 0,
    n_nodes: int = 50,
    n_links: int = 200,
    n_requests: int = 30,
    n_servers: int = 5,
    n_subscribers: int = 20,
    n_access: int = 10,
) -> Scenario:
    """Larger feasible scenario: a meshed core, subscribers dual-homed to access nodes."""
    rng = random.Random(seed)
    roles: dict[str, VertexRole] = {}
    roles.update({f"vs{i + 1}": R.VIDEO_SERVER for i in range(n_servers)})
    roles.update({f"na{i + 1}": R.ACCESS_NODE for i in range(n_access)})
    n_inter = n_nodes - n_servers - n_subscribers - n_access
    roles.update({f"x{i + 1}": R.INTERMEDIATE for i in range(n_inter)})
    core = sorted(roles)
    subs = [f"a{i + 1}" for i in range(n_subscribers)]
    roles.update({a: R.SUBSCRIBER for a in subs})

    access = sorted(k for k in core if roles[k] is R.ACCESS_NODE)
    links = _spanning_links(rng, core)
    for a in subs:
        for na in rng.sample(access, 2):
            links.add((min(a, na), max(a, na)))
    pairs = [p for p in combinations(core, 2) if p not in links]
    rng.shuffle(pairs)
    links |= set(pairs[: n_links - len(links)])
    link_list = [(u, v, rng.randint(30, 100)) for u, v in sorted(links)]

    servers = sorted(k for k in core if roles[k] is R.VIDEO_SERVER)
    catalog = {f"c{i + 1}": sorted(rng.sample(servers, rng.randint(1, 2))) for i in range(6)}
    requests = [(rng.choice(subs), rng.choice(sorted(catalog)), rng.randint(1, 10)) for _ in range(n_requests)]
    return _scenario(roles, link_list, catalog, requests)
