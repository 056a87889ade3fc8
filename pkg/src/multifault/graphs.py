"""Graph algorithms over directed networks, similarity graphs and hypergraphs.

All functions are pure. Wherever a choice exists the lexicographically least
option is taken so results are reproducible bit for bit.
"""

from __future__ import annotations

import heapq
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Collection, Hashable, Iterable, NamedTuple

from .errors import CyclicInput, OverlappingSets


class DirectedGraph(NamedTuple):
    nodes: frozenset
    arcs: frozenset


EMPTY = DirectedGraph(frozenset(), frozenset())


@dataclass(frozen=True)
class SimilarityHypergraph:
    nodes: frozenset[str]
    edges: frozenset[frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "edges", frozenset(frozenset(e) for e in self.edges))
        for e in self.edges:
            if len(e) < 2:
                raise ValueError(f"hyperedge {sorted(e)} has fewer than two members")
            if not e <= self.nodes:
                raise ValueError(f"hyperedge {sorted(e)} names undeclared nodes")

    @property
    def is_pairwise(self) -> bool:
        return all(len(e) == 2 for e in self.edges)

    def sorted_edges(self) -> list[tuple[str, ...]]:
        return sorted(tuple(sorted(e)) for e in self.edges)


class SimilarityGraph(SimilarityHypergraph):
    """Undirected similarity graph; every edge joins exactly two faults."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_pairwise:
            raise ValueError("similarity graph edges must join exactly two nodes")


def is_acyclic(nodes: Iterable[Hashable], arcs: Iterable[tuple]) -> bool:
    """True iff the directed graph has no cycle (Kahn's algorithm)."""
    nodes = set(nodes)
    indeg = {n: 0 for n in nodes}
    succ = defaultdict(list)
    for a, b in set(arcs):
        indeg.setdefault(a, 0)
        indeg[b] = indeg.get(b, 0) + 1
        succ[a].append(b)
    queue = deque(n for n, d in indeg.items() if d == 0)
    seen = 0
    while queue:
        n = queue.popleft()
        seen += 1
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    return seen == len(indeg)


def topological_order(nodes: Iterable[Hashable], arcs: Iterable[tuple]) -> list:
    """Lexicographically least topological order.

    Raises CyclicInput when the arcs contain a cycle.
    """
    nodes = set(nodes)
    for a, b in arcs:
        nodes.update((a, b))
    indeg = {n: 0 for n in nodes}
    succ = defaultdict(list)
    for a, b in set(arcs):
        indeg[b] += 1
        succ[a].append(b)
    heap = [n for n, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(heap, m)
    if len(order) != len(nodes):
        raise CyclicInput("graph contains a directed cycle",
                          nodes=sorted(n for n, d in indeg.items() if d > 0))
    return order


def _components(nodes: Iterable, links: Iterable[Collection]) -> list[set]:
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for link in links:
        members = list(link)
        for m in members[1:]:
            ra, rb = find(members[0]), find(m)
            if ra != rb:
                parent[rb] = ra
    groups = defaultdict(set)
    for n in parent:
        groups[find(n)].add(n)
    return list(groups.values())


def is_connected(g: SimilarityHypergraph) -> bool:
    """Connectivity with each hyperedge read as a clique over its members."""
    if len(g.nodes) <= 1:
        return True
    return len(_components(g.nodes, g.edges)) == 1


def graph_union(graphs: Iterable[DirectedGraph]) -> DirectedGraph:
    nodes: set = set()
    arcs: set = set()
    for g in graphs:
        nodes |= set(g.nodes)
        arcs |= set(g.arcs)
    return DirectedGraph(frozenset(nodes), frozenset(arcs))


def undirected_component(start: Hashable, nodes: Iterable, arcs: Iterable[tuple]) -> set:
    """Nodes reachable from ``start`` ignoring arc direction."""
    adj = defaultdict(set)
    for a, b in arcs:
        adj[a].add(b)
        adj[b].add(a)
    seen = {start}
    queue = deque([start])
    while queue:
        n = queue.popleft()
        for m in adj[n]:
            if m not in seen:
                seen.add(m)
                queue.append(m)
    return seen & (set(nodes) | {start})


def connected_to(x: Hashable, y: Hashable, g: DirectedGraph) -> bool:
    return y in undirected_component(x, g.nodes, g.arcs)


def _ancestors(targets: Iterable, parents: dict) -> set:
    out = set()
    stack = list(targets)
    while stack:
        n = stack.pop()
        if n in out:
            continue
        out.add(n)
        stack.extend(parents[n])
    return out


def d_separated(g, xs: Iterable, ys: Iterable, zs: Iterable = ()) -> bool:
    """True iff every trail between ``xs`` and ``ys`` is blocked by ``zs``.

    ``g`` is anything with ``nodes`` and ``arcs`` (a DirectedGraph or a
    BeliefNetwork). Uses reachability over (node, direction) states: a trail
    may pass a collider only when the collider or one of its descendants is
    observed, and a non-collider only when it is unobserved.
    """
    xs, ys, zs = set(xs), set(ys), set(zs)
    if xs & ys or xs & zs or ys & zs:
        raise OverlappingSets("query sets must be disjoint",
                              overlap=sorted((xs & ys) | (xs & zs) | (ys & zs)))
    parents = defaultdict(set)
    children = defaultdict(set)
    for a, b in g.arcs:
        parents[b].add(a)
        children[a].add(b)
    observed_anc = _ancestors(zs, parents)

    # direction "up": arrived from a child; "down": arrived from a parent
    visited = set()
    queue = deque((x, "up") for x in xs)
    while queue:
        node, direction = queue.popleft()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node in ys:
            return False
        if direction == "up" and node not in zs:
            for p in parents[node]:
                queue.append((p, "up"))
            for c in children[node]:
                queue.append((c, "down"))
        elif direction == "down":
            if node not in zs:
                for c in children[node]:
                    queue.append((c, "down"))
            if node in observed_anc:
                for p in parents[node]:
                    queue.append((p, "up"))
    return True
