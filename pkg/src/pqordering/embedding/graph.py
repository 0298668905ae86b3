"""Simple undirected graphs with string vertices and text edge-list parsing.

Application inputs are simple graphs; skeleton multigraphs live in the
decomposition module.  Edges are identified by the string "u v" with the
endpoints in lexicographic order, which is unambiguous because vertex names
come from a whitespace-separated file format.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..pqtree import PQError


class InvalidGraph(PQError):
    pass


class NotBiconnected(PQError):
    pass


class NotPlanar(PQError):
    pass


class NotSupported(PQError):
    pass


class PlanarityCheckFailed(PQError):
    pass


class InvalidConstraint(PQError):
    pass


def edge_id(u: str, v: str) -> str:
    a, b = sorted((u, v))
    return f"{a} {b}"


@dataclass(frozen=True)
class Graph:
    """vertices sorted; edges as sorted (u, v) pairs, no loops, no parallels."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    @staticmethod
    def build(vertices, edges) -> Graph:
        verts = sorted(set(vertices))
        seen: set[tuple[str, str]] = set()
        pairs: list[tuple[str, str]] = []
        for u, v in edges:
            if u == v:
                raise InvalidGraph(f"self loop at {u!r}")
            pair = (u, v) if u < v else (v, u)
            if pair in seen:
                raise InvalidGraph(f"parallel edge {pair[0]!r} {pair[1]!r}")
            seen.add(pair)
            pairs.append(pair)
        for u, v in pairs:
            if u not in verts or v not in verts:
                raise InvalidGraph(f"edge endpoint missing from vertex set: {u} {v}")
        return Graph(tuple(verts), tuple(sorted(pairs)))

    def edge_ids(self) -> list[str]:
        return [edge_id(u, v) for u, v in self.edges]

    def incident(self, v: str) -> list[str]:
        return [edge_id(a, b) for a, b in self.edges if v in (a, b)]

    def neighbors(self, v: str) -> list[str]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return sorted(out)

    def degree(self, v: str) -> int:
        return sum(1 for a, b in self.edges if v in (a, b))

    def endpoints(self, eid: str) -> tuple[str, str]:
        a, b = eid.split(" ")
        return a, b

    def has_edge(self, u: str, v: str) -> bool:
        pair = (u, v) if u < v else (v, u)
        return pair in set(self.edges)

    def subgraph_of_edges(self, eids) -> Graph:
        pairs = [self.endpoints(e) for e in sorted(eids)]
        verts = sorted({x for p in pairs for x in p})
        return Graph(tuple(verts), tuple(sorted(pairs)))

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.vertices)

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def to_edge_list(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges)


def parse_edge_list(text: str) -> Graph:
    """One "u v" pair per line; "#" starts a comment; blank lines ignored."""
    pairs: list[tuple[str, str]] = []
    verts: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidGraph(f"line {lineno}: expected 'u v', got {raw!r}")
        u, v = parts
        verts.update((u, v))
        pairs.append((u, v))
    if not verts:
        raise InvalidGraph("empty graph")
    return Graph.build(verts, pairs)


# ---------------------------------------------------------------------------
# rotation systems and face tracing
# ---------------------------------------------------------------------------


def rotation_faces(graph: Graph, rotation: dict[str, tuple[str, ...]]) -> int:
    """Number of faces induced by the rotation system.  The rotation must
    list, for every vertex, exactly its incident edge ids in circular order."""
    succ_index: dict[str, dict[str, int]] = {}
    for v in graph.vertices:
        ring = rotation.get(v)
        if ring is None or sorted(ring) != sorted(graph.incident(v)):
            raise InvalidGraph(f"rotation at {v!r} does not match incident edges")
        succ_index[v] = {e: i for i, e in enumerate(ring)}
    darts: set[tuple[str, str]] = set()
    for u, v in graph.edges:
        e = edge_id(u, v)
        darts.add((u, e))
        darts.add((v, e))
    faces = 0
    visited: set[tuple[str, str]] = set()
    for start in sorted(darts):
        if start in visited:
            continue
        faces += 1
        cur = start
        while cur not in visited:
            visited.add(cur)
            tail, e = cur
            a, b = graph.endpoints(e)
            head = b if tail == a else a
            ring = rotation[head]
            nxt = ring[(succ_index[head][e] + 1) % len(ring)]
            cur = (head, nxt)
    return faces


def is_planar_rotation(graph: Graph, rotation: dict[str, tuple[str, ...]]) -> bool:
    """Euler test n - m + f = 2 for a connected graph."""
    if not graph.is_connected():
        raise InvalidGraph("face tracing needs a connected graph")
    f = rotation_faces(graph, rotation)
    return len(graph.vertices) - len(graph.edges) + f == 2
