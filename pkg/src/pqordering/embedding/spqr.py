"""Decomposition of a biconnected graph into triconnected components.

The decomposition is computed by splitting along separation pairs until every
piece is a bond, a cycle, or a triconnected simple graph, then merging
adjacent pieces of equal kind (bond/bond, cycle/cycle).  The result of that
merge is unique regardless of split order, so no care is needed in choosing
pairs beyond determinism.  Finally every original edge is moved into its own
leaf node so that inner skeletons consist of virtual edges plus one twin per
real edge.

Skeleton edges are "occurrences": each carries a globally unique id, its two
endpoints, and optionally the original edge id it stands for.  Virtual
occurrences come in twin pairs linking two nodes of the tree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, NotBiconnected, NotPlanar, edge_id

KIND_S = "S"
KIND_P = "P"
KIND_Q = "Q"
KIND_R = "R"


@dataclass(frozen=True)
class SkelEdge:
    occ: str
    u: str
    v: str
    real: str | None = None

    def pair(self) -> tuple[str, str]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)

    def other(self, x: str) -> str:
        return self.v if x == self.u else self.u


@dataclass
class SPQRNode:
    kind: str
    edges: list[SkelEdge]

    def vertex_set(self) -> set[str]:
        return {x for e in self.edges for x in (e.u, e.v)}

    def edges_at(self, v: str) -> list[SkelEdge]:
        return [e for e in self.edges if v in (e.u, e.v)]


@dataclass
class SPQRTree:
    graph: Graph
    nodes: list[SPQRNode]
    twins: dict[str, str]
    _occ_node: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._occ_node = {
            e.occ: i for i, node in enumerate(self.nodes) for e in node.edges
        }

    def occ_node(self, occ: str) -> int:
        return self._occ_node[occ]

    def edge_by_occ(self, occ: str) -> SkelEdge:
        node = self.nodes[self._occ_node[occ]]
        for e in node.edges:
            if e.occ == occ:
                return e
        raise KeyError(occ)

    def links(self) -> list[tuple[int, int, str, str]]:
        """Tree edges as (node a, node b, occ in a, occ in b), a <= b view."""
        out = []
        for occ in sorted(self.twins):
            twin = self.twins[occ]
            if occ > twin:
                continue
            i, j = self._occ_node[occ], self._occ_node[twin]
            out.append((i, j, occ, twin))
        return out

    def members_of(self, v: str) -> list[int]:
        return [i for i, node in enumerate(self.nodes) if v in node.vertex_set()]

    def kind_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for node in self.nodes:
            out[node.kind] = out.get(node.kind, 0) + 1
        return out

    def validate(self) -> None:
        for occ, twin in self.twins.items():
            assert self.twins[twin] == occ
            assert occ != twin
            ea, eb = self.edge_by_occ(occ), self.edge_by_occ(twin)
            assert ea.pair() == eb.pair(), "twin endpoints differ"
            assert ea.real is None or eb.real is None
        # every occurrence is either real-or-twinned, never both dangling
        for node in self.nodes:
            for e in node.edges:
                if e.real is None:
                    assert e.occ in self.twins, f"dangling virtual {e.occ}"
        links = self.links()
        assert len(links) == len(self.nodes) - 1, "link count is not a tree"
        adj: dict[int, set[int]] = {i: set() for i in range(len(self.nodes))}
        for i, j, _, _ in links:
            assert i != j, "twin pair within one node"
            adj[i].add(j)
            adj[j].add(i)
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        assert len(seen) == len(self.nodes), "tree is disconnected"
        for i, j, _, _ in links:
            ka, kb = self.nodes[i].kind, self.nodes[j].kind
            assert not (ka == kb == KIND_S), "adjacent cycle nodes"
            assert not (ka == kb == KIND_P), "adjacent bond nodes"
        for node in self.nodes:
            self._validate_skeleton(node)
        reals = sorted(
            e.real for node in self.nodes for e in node.edges if e.real is not None
        )
        assert reals == self.graph.edge_ids(), "merged edges differ from graph"
        for node in self.nodes:
            for e in node.edges:
                assert e.u in self.graph.vertices and e.v in self.graph.vertices

    def _validate_skeleton(self, node: SPQRNode) -> None:
        verts = sorted(node.vertex_set())
        if node.kind == KIND_Q:
            assert len(node.edges) == 2 and len(verts) == 2
            kinds = sorted(e.real is None for e in node.edges)
            assert kinds == [False, True], "leaf node needs one real, one virtual"
            return
        assert all(e.real is None for e in node.edges), "inner skeleton has real edge"
        if node.kind == KIND_P:
            assert len(verts) == 2 and len(node.edges) >= 3
            return
        if node.kind == KIND_S:
            assert len(verts) >= 3 and len(node.edges) == len(verts)
            for v in verts:
                assert len(node.edges_at(v)) == 2
            assert _is_connected_edges(node.edges, verts)
            return
        assert node.kind == KIND_R
        assert len(verts) >= 4
        pairs = [e.pair() for e in node.edges]
        assert len(pairs) == len(set(pairs)), "parallel edges in R skeleton"
        assert not _find_separation_pair(node.edges, verts), "R skeleton splittable"


def _is_connected_edges(edges: list[SkelEdge], verts: list[str]) -> bool:
    adj: dict[str, list[str]] = {v: [] for v in verts}
    for e in edges:
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(verts)


def _components_without(edges: list[SkelEdge], verts: list[str], s: str, t: str):
    """Connected components of the skeleton minus {s, t}, as vertex sets."""
    rest = [v for v in verts if v not in (s, t)]
    adj: dict[str, set[str]] = {v: set() for v in rest}
    for e in edges:
        if e.u in adj and e.v in adj:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
    comps: list[set[str]] = []
    left = set(rest)
    for v in rest:
        if v not in left:
            continue
        comp = {v}
        stack = [v]
        left.discard(v)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in left:
                    left.discard(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def _find_separation_pair(edges: list[SkelEdge], verts: list[str]):
    """A pair {s, t} whose removal disconnects the rest, or None.  Only called
    on simple skeletons with >= 4 vertices."""
    for i, s in enumerate(verts):
        for t in verts[i + 1 :]:
            comps = _components_without(edges, verts, s, t)
            if len(comps) >= 2:
                return s, t, comps
    return None


def spqr_tree(graph: Graph) -> SPQRTree:
    """Decompose a biconnected planar graph with at least three vertices."""
    import networkx as nx

    nxg = graph.to_networkx()
    if len(graph.vertices) < 3 or not nx.is_biconnected(nxg):
        raise NotBiconnected("input graph is not biconnected")
    ok, _ = nx.check_planarity(nxg)
    if not ok:
        raise NotPlanar("input graph is not planar")

    counter = [0]

    def fresh_pair(u: str, v: str) -> tuple[SkelEdge, SkelEdge]:
        k = counter[0]
        counter[0] += 1
        a, b = (u, v) if u < v else (v, u)
        return SkelEdge(f"v{k}", a, b), SkelEdge(f"v{k}*", a, b)

    twins: dict[str, str] = {}
    start = [
        SkelEdge(edge_id(u, v), u, v, real=edge_id(u, v)) for u, v in graph.edges
    ]
    pieces: list[SPQRNode] = []
    stack: list[list[SkelEdge]] = [start]
    while stack:
        edges = stack.pop()
        verts = sorted({x for e in edges for x in (e.u, e.v)})
        if len(verts) == 2:
            pieces.append(SPQRNode(KIND_P, edges))
            continue
        by_pair: dict[tuple[str, str], list[SkelEdge]] = {}
        for e in edges:
            by_pair.setdefault(e.pair(), []).append(e)
        multi = sorted(p for p, group in by_pair.items() if len(group) > 1)
        if multi:
            u, v = multi[0]
            ea, eb = fresh_pair(u, v)
            twins[ea.occ] = eb.occ
            twins[eb.occ] = ea.occ
            group = by_pair[(u, v)]
            stack.append(group + [ea])
            stack.append([e for e in edges if e not in group] + [eb])
            continue
        if all(len(by_pair.get(e.pair(), [])) == 1 for e in edges) and all(
            sum(1 for e in edges if v in (e.u, e.v)) == 2 for v in verts
        ):
            pieces.append(SPQRNode(KIND_S, edges))
            continue
        found = _find_separation_pair(edges, verts)
        if found is None:
            pieces.append(SPQRNode(KIND_R, edges))
            continue
        s, t, comps = found
        comp = sorted(comps, key=lambda c: min(c))[0]
        side = [e for e in edges if e.u in comp or e.v in comp]
        rest = [e for e in edges if e not in side]
        ea, eb = fresh_pair(s, t)
        twins[ea.occ] = eb.occ
        twins[eb.occ] = ea.occ
        stack.append(side + [ea])
        stack.append(rest + [eb])

    # merge adjacent pieces of equal kind; the fixed point is canonical
    occ_node = {e.occ: i for i, node in enumerate(pieces) for e in node.edges}
    alive = [True] * len(pieces)
    changed = True
    while changed:
        changed = False
        for occ in sorted(twins):
            twin = twins.get(occ)
            if twin is None or occ > twin or occ not in occ_node:
                continue
            i, j = occ_node[occ], occ_node[twin]
            ka, kb = pieces[i].kind, pieces[j].kind
            if i == j or ka != kb or ka not in (KIND_S, KIND_P):
                continue
            merged = [e for e in pieces[i].edges if e.occ != occ] + [
                e for e in pieces[j].edges if e.occ != twin
            ]
            pieces[i].edges = merged
            alive[j] = False
            del twins[occ]
            del twins[twin]
            del occ_node[occ]
            del occ_node[twin]
            for e in pieces[j].edges:
                if e.occ in occ_node:
                    occ_node[e.occ] = i
            pieces[j].edges = []
            changed = True

    nodes = [p for k, p in enumerate(pieces) if alive[k]]

    # move every real edge into its own leaf node
    leaves: list[SPQRNode] = []
    for node in nodes:
        fixed: list[SkelEdge] = []
        for e in sorted(node.edges, key=lambda e: (e.real is None, e.real or e.occ)):
            if e.real is None:
                fixed.append(e)
                continue
            inner_occ = f"q:{e.real}"
            leaf_occ = f"q:{e.real}:t"
            fixed.append(SkelEdge(inner_occ, e.u, e.v))
            leaves.append(
                SPQRNode(
                    KIND_Q,
                    [SkelEdge(e.real, e.u, e.v, real=e.real), SkelEdge(leaf_occ, e.u, e.v)],
                )
            )
            twins[inner_occ] = leaf_occ
            twins[leaf_occ] = inner_occ
        node.edges = fixed

    if len(nodes) == 1 and not nodes[0].edges:
        # cannot happen: >= 3 vertices means at least one inner piece with edges
        raise AssertionError("empty decomposition")

    for node in nodes:
        node.edges.sort(key=lambda e: (e.pair(), e.occ))
    leaves.sort(key=lambda n: n.edges[0].real or "")
    tree = SPQRTree(graph, nodes + leaves, twins)
    tree.validate()
    return tree


def skeleton_rotations(spqr: SPQRTree, i: int) -> dict[str, tuple[str, ...]]:
    """Reference rotation system of skeleton i, as occurrence ids per vertex.

    For triconnected skeletons this is one of the two planar embeddings; for
    bonds it is an arbitrary but deterministic order at one pole and its
    reverse at the other; cycles and leaves have degree two everywhere, so any
    order works.
    """
    import networkx as nx

    node = spqr.nodes[i]
    verts = sorted(node.vertex_set())
    if node.kind == KIND_R:
        occ_by_pair = {e.pair(): e.occ for e in node.edges}
        nxg = nx.Graph()
        nxg.add_nodes_from(verts)
        nxg.add_edges_from(sorted(occ_by_pair))
        ok, emb = nx.check_planarity(nxg)
        assert ok, "triconnected skeleton of a planar graph must be planar"
        data = emb.get_data()
        return {
            v: tuple(occ_by_pair[(v, w) if v < w else (w, v)] for w in data[v])
            for v in verts
        }
    if node.kind == KIND_P:
        u, w = verts
        occs = tuple(sorted(e.occ for e in node.edges))
        return {u: occs, w: tuple(reversed(occs))}
    rot: dict[str, tuple[str, ...]] = {}
    for v in verts:
        rot[v] = tuple(sorted(e.occ for e in node.edges_at(v)))
    return rot
