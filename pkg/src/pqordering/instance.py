"""Instances of simultaneous circular ordering.

An instance is a DAG of PQ-trees.  An arc (source, target, mapping) demands
that the target's order, mapped through the injective leaf mapping, appears
as the induced suborder of the source's order; a reversing arc demands the
reversed target order instead.  Sources act as parents: choosing a parent
order determines the full order of every child.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .pqtree import (
    P,
    Q,
    PQError,
    PQTree,
    intersect,
    project,
    universal,
)
from .pqtree.fixedness import classify_fixedness, stems_from
from .pqtree.tree import relabel_leaves


class InvalidMap(PQError):
    pass


class CyclicDAG(PQError):
    pass


class InvalidTriple(PQError):
    pass


@dataclass
class Arc:
    """source/target are tree indices; mapping sends every target leaf
    label to a source leaf label."""

    source: int
    target: int
    mapping: dict[str, str]
    reversing: bool = False

    def image(self) -> set[str]:
        return set(self.mapping.values())

    def inverse(self) -> dict[str, str]:
        return {v: k for k, v in self.mapping.items()}


@dataclass
class Instance:
    trees: list[PQTree]
    arcs: list[Arc]

    def validate(self) -> None:
        n = len(self.trees)
        for a in self.arcs:
            if not (0 <= a.source < n and 0 <= a.target < n) or a.source == a.target:
                raise InvalidMap(f"arc {a.source}->{a.target} out of range")
            target_labels = self.trees[a.target].leaf_labels()
            source_labels = self.trees[a.source].leaf_labels()
            if set(a.mapping) != target_labels:
                raise InvalidMap(
                    f"arc {a.source}->{a.target}: mapping keys must be the target's leaves"
                )
            values = list(a.mapping.values())
            if len(set(values)) != len(values) or not set(values) <= source_labels:
                raise InvalidMap(
                    f"arc {a.source}->{a.target}: mapping must be injective into source leaves"
                )
        topo_order(len(self.trees), self.arcs)

    def to_json_obj(self) -> dict:
        return {
            "trees": [t.to_json_obj() for t in self.trees],
            "arcs": [
                {
                    "source": a.source,
                    "target": a.target,
                    "map": dict(sorted(a.mapping.items())),
                    "reversing": a.reversing,
                }
                for a in self.arcs
            ],
        }

    @staticmethod
    def from_json_obj(obj: dict) -> Instance:
        trees = [PQTree.from_json_obj(t) for t in obj["trees"]]
        arcs = [
            Arc(
                int(a["source"]),
                int(a["target"]),
                {str(k): str(v) for k, v in a["map"].items()},
                bool(a.get("reversing", False)),
            )
            for a in obj.get("arcs", [])
        ]
        inst = Instance(trees, arcs)
        inst.validate()
        return inst


def topo_order(n: int, arcs: list[Arc]) -> list[int]:
    """Tree indices sorted parents before children; raises CyclicDAG."""
    out_arcs: dict[int, list[int]] = {i: [] for i in range(n)}
    indeg = [0] * n
    for a in arcs:
        out_arcs[a.source].append(a.target)
        indeg[a.target] += 1
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    order = []
    import heapq

    heapq.heapify(ready)
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for j in out_arcs[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(ready, j)
    if len(order) != n:
        raise CyclicDAG("instance arcs contain a directed cycle")
    return order


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


def pullback(parent: PQTree, arc: Arc) -> PQTree:
    """The parent's projection onto the arc image, relabeled to the
    target's leaf names.  Keeps degree-3 Q-nodes: their orientation is
    pinned by the parent."""
    proj = project(parent, arc.image(), raw=True)
    return relabel_leaves(proj, arc.inverse())


@dataclass
class ArcInfo:
    """Derived per-arc data on a normalized instance."""

    image: set[str]
    fixed_p: list[int] = field(default_factory=list)  # source P-nodes
    fixed_q: list[int] = field(default_factory=list)  # source Q-nodes
    stems: dict[int, int] = field(default_factory=dict)  # target node -> source node


@dataclass
class NormalizedInstance:
    trees: list[PQTree]
    arcs: list[Arc]
    order: list[int]  # topological, parents first
    arc_info: list[ArcInfo]
    fixed_value: list[dict[int, int]]  # per tree: P-node -> fixedness
    two_fixed: bool
    has_null: bool


def normalize(instance: Instance) -> NormalizedInstance:
    """Replace every tree by its intersection with all parent projections
    (parents first), then mark pinned degree-3 nodes as Q-nodes."""
    instance.validate()
    order = topo_order(len(instance.trees), instance.arcs)
    incoming: dict[int, list[Arc]] = {i: [] for i in range(len(instance.trees))}
    for a in instance.arcs:
        incoming[a.target].append(a)
    trees: list[PQTree | None] = [None] * len(instance.trees)
    for i in order:
        t = instance.trees[i]
        for a in incoming[i]:
            if t.is_null():
                break
            parent = trees[a.source]
            if parent.is_null():
                t = PQTree.null()
                break
            t = intersect(pullback(parent, a), t, raw=True)
        if t.variant == "normal":
            t = _flip_pinned_markers(t, incoming[i], trees)
        trees[i] = t

    arc_info = [_arc_info(trees, a) for a in instance.arcs]
    fixed_value, two_fixed = _fixedness_values(trees, instance.arcs, order, arc_info)
    return NormalizedInstance(
        trees=trees,
        arcs=instance.arcs,
        order=order,
        arc_info=arc_info,
        fixed_value=fixed_value,
        two_fixed=two_fixed,
        has_null=any(t.is_null() for t in trees),
    )


def _flip_pinned_markers(tree: PQTree, incoming: list[Arc], trees: list[PQTree | None]) -> PQTree:
    """Turn degree-3 P-nodes whose rotation is pinned by a parent Q-node
    into Q-nodes, so the pinning propagates to further children."""
    candidates = [i for i in tree.inner_ids() if tree.kind(i) == P and tree.degree(i) == 3]
    if not candidates:
        return tree
    flip: set[int] = set()
    for a in incoming:
        parent = trees[a.source]
        if parent is None or parent.variant != "normal":
            continue
        stems = stems_from(parent, tree, a.mapping)
        for nu in candidates:
            mu = stems.get(nu)
            if mu is not None and parent.kind(mu) == Q:
                flip.add(nu)
    if not flip:
        return tree
    nodes = {
        i: (Q if i in flip else kind, nbrs, lab) for i, (kind, nbrs, lab) in tree.nodes.items()
    }
    return PQTree("normal", nodes)


def _arc_info(trees: list[PQTree], a: Arc) -> ArcInfo:
    info = ArcInfo(image=a.image())
    src, tgt = trees[a.source], trees[a.target]
    if src.variant != "normal" or tgt.variant != "normal":
        return info
    report = classify_fixedness(src, info.image)
    for node in sorted(report.fixed_nodes):
        (info.fixed_p if src.kind(node) == P else info.fixed_q).append(node)
    info.stems = stems_from(src, tgt, a.mapping)
    return info


def _fixedness_values(trees, arcs, order, arc_info):
    """fixed(mu) = number of children fixing mu plus, for every parent,
    the parent's corresponding fixedness minus one."""
    outgoing: dict[int, list[int]] = {i: [] for i in range(len(trees))}
    incoming: dict[int, list[int]] = {i: [] for i in range(len(trees))}
    for idx, a in enumerate(arcs):
        outgoing[a.source].append(idx)
        incoming[a.target].append(idx)
    values: list[dict[int, int]] = [dict() for _ in trees]
    two_fixed = True
    for i in order:
        t = trees[i]
        if t.variant != "normal":
            continue
        for node in t.inner_ids():
            if t.kind(node) != P:
                continue
            k = sum(node in arc_info[ai].fixed_p for ai in outgoing[i])
            total = k
            for ai in incoming[i]:
                mu_parent = arc_info[ai].stems.get(node)
                if mu_parent is None:
                    continue
                parent_vals = values[arcs[ai].source]
                if mu_parent in parent_vals:
                    total += parent_vals[mu_parent] - 1
            values[i][node] = total
            if total > 2:
                two_fixed = False
    return values, two_fixed


# ---------------------------------------------------------------------------
# cyclic ordering reduction
# ---------------------------------------------------------------------------


def reduce_cyclic_ordering(labels, triples) -> Instance:
    """Build the instance whose solvability decides whether the labels
    admit a circular order realizing every (a, b, c) clockwise.

    One star tree carries all labels; each triple gets a 3-leaf tree fed
    from the star; a shared 3-leaf sink pinned to the orientation 1,2,3
    forces all triples to be oriented consistently.
    """
    labels = sorted(set(labels))
    triples = [tuple(t) for t in triples]
    for t in triples:
        if len(t) != 3 or len(set(t)) != 3 or not set(t) <= set(labels):
            raise InvalidTriple(f"bad triple {t!r}")
    trees = [universal(labels)]
    arcs = []
    for t in triples:
        idx = len(trees)
        trees.append(universal(t))
        arcs.append(Arc(0, idx, {x: x for x in t}))
    sink = len(trees)
    trees.append(universal(["1", "2", "3"]))
    for i, t in enumerate(triples):
        arcs.append(Arc(1 + i, sink, {str(j + 1): t[j] for j in range(3)}))
    return Instance(trees, arcs)
