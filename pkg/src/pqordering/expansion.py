"""Expansion of a normalized instance.

A P-node fixed by two child arcs couples the two children: both orders
induce an order on the node's commonly populated edges, and the two induced
orders must agree (up to the arcs' reversing flags).  The coupling is made
explicit by adding trees:

* expansion step: project both children onto one representative leaf per
  common edge, intersect, and hang the result below both children;
* finalizing step: when both children are single-P-node stars over exactly
  the shared edges, a direct arc between them replaces further expansion;
* a parallel arc pair meeting the finalizing conditions on an expansion
  tree becomes a permutation constraint on that tree's order.

The result is solvable iff the input is, and every P-node fixed by at most
two children keeps the process finite.  A third fixing arc on any P-node
aborts: such instances go to the exhaustive fallback instead.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .instance import NormalizedInstance, _flip_pinned_markers
from .pqtree import (
    P,
    PQError,
    PQTree,
    classify_fixedness,
    intersect,
    populated_neighbors,
    project,
    relabel_leaves,
)


class NotOneCritical(PQError):
    """Some P-node is fixed by three or more child arcs."""


class BudgetExceeded(PQError):
    """The expansion graph grew past the configured size bound."""


class NullExpansion(PQError):
    """Two children force contradictory orders on a shared node's edges."""


@dataclass
class ExpArc:
    source: int
    target: int
    mapping: dict[str, str]
    reversing: bool
    origin: str  # "input" | "expansion" | "finalizing"

    def image(self) -> set[str]:
        return set(self.mapping.values())

    def inverse(self) -> dict[str, str]:
        return {v: k for k, v in self.mapping.items()}


@dataclass
class ExpTree:
    tree: PQTree
    origin: str  # "input" | "expansion"
    responsible: tuple[int, int] | None = None  # (tree index, node id)


@dataclass
class DoubleArc:
    """Permutation constraint on a tree's order: perm must map the realized
    order to itself (parity False) or to its reversal (parity True)."""

    target: int
    perm: dict[str, str]
    parity: bool


@dataclass
class ExpansionGraph:
    trees: list[ExpTree]
    arcs: list[ExpArc]
    double_arcs: list[DoubleArc]
    n_input: int
    triples: int = 0

    def topo_order(self) -> list[int]:
        out: dict[int, list[int]] = {i: [] for i in range(len(self.trees))}
        indeg = [0] * len(self.trees)
        for a in self.arcs:
            out[a.source].append(a.target)
            indeg[a.target] += 1
        stack = sorted((i for i in range(len(self.trees)) if indeg[i] == 0), reverse=True)
        order = []
        while stack:
            i = stack.pop()
            order.append(i)
            for j in sorted(out[i], reverse=True):
                indeg[j] -= 1
                if indeg[j] == 0:
                    stack.append(j)
        assert len(order) == len(self.trees), "expansion graph must stay acyclic"
        return order

    def responsibility_root(self, idx: int) -> tuple[int, int] | None:
        """The input-tree P-node an expansion tree traces back to."""
        resp = self.trees[idx].responsible
        while resp is not None and resp[0] >= self.n_input:
            resp = self.trees[resp[0]].responsible
        return resp


class _Builder:
    def __init__(self, norm: NormalizedInstance, budget_factor: int):
        self.trees = [ExpTree(t, "input") for t in norm.trees]
        self.arcs = [
            ExpArc(a.source, a.target, dict(a.mapping), a.reversing, "input")
            for a in norm.arcs
        ]
        self.double_arcs: list[DoubleArc] = []
        self.n_input = len(norm.trees)
        self.fixers: dict[tuple[int, int], list[int]] = {}
        self.queue: deque[tuple[int, int]] = deque()
        self.triples = 0
        p_max = max(
            (sum(t.kind(i) == P for i in t.inner_ids()) for t in norm.trees if t.variant == "normal"),
            default=0,
        )
        self.budget = budget_factor * (max(p_max, 1) * len(norm.trees) + len(norm.arcs) + 1)

    # -- fixer bookkeeping ---------------------------------------------

    def register(self, arc_idx: int) -> None:
        a = self.arcs[arc_idx]
        src = self.trees[a.source].tree
        if src.variant != "normal":
            return
        report = classify_fixedness(src, a.image())
        for node in sorted(report.fixed_nodes):
            if src.kind(node) != P:
                continue
            lst = self.fixers.setdefault((a.source, node), [])
            lst.append(arc_idx)
            if len(lst) == 2:
                self.queue.append((a.source, node))
            elif len(lst) > 2:
                raise NotOneCritical(
                    f"node {node} of tree {a.source} is fixed by {len(lst)} children"
                )

    # -- expansion ------------------------------------------------------

    def run(self) -> ExpansionGraph:
        for i in range(len(self.arcs)):
            self.register(i)
        while self.queue:
            t_idx, mu = self.queue.popleft()
            a1_idx, a2_idx = self.fixers[(t_idx, mu)]
            self.process_triple(t_idx, mu, a1_idx, a2_idx)
        return ExpansionGraph(
            self.trees, self.arcs, self.double_arcs, self.n_input, self.triples
        )

    def process_triple(self, t_idx: int, mu: int, a1_idx: int, a2_idx: int) -> None:
        self.triples += 1
        T = self.trees[t_idx].tree
        a1, a2 = self.arcs[a1_idx], self.arcs[a2_idx]
        img1, img2 = a1.image(), a2.image()
        pop1 = set(populated_neighbors(T, mu, img1))
        pop2 = set(populated_neighbors(T, mu, img2))
        common = [v for v in T.neighbors(mu) if v in pop1 and v in pop2]
        if len(common) < 3:
            return  # at most two shared edges: any pair of orders agrees
        reps1 = self._edge_reps(T, mu, a1, common)
        reps2 = self._edge_reps(T, mu, a2, common)
        final1 = self._is_final_star(a1.target, pop1, common, img1)
        final2 = self._is_final_star(a2.target, pop2, common, img2)
        if final1 and final2:
            if a1.target == a2.target:
                if self.trees[a1.target].origin == "expansion":
                    perm = {reps1[v]: reps2[v] for v in common}
                    self.double_arcs.append(
                        DoubleArc(a1.target, perm, a1.reversing != a2.reversing)
                    )
                    return
                # an input tree: one expansion step makes the pair's target
                # an expansion tree, and the new pair is handled above
            else:
                self._finalize(a1, a2, reps1, reps2, common)
                return
        self._expand(t_idx, mu, a1, a2, reps1, reps2, common)

    def _edge_reps(self, T: PQTree, mu: int, a: ExpArc, common: list[int]) -> dict[int, str]:
        """One child leaf per common edge: the preimage of the smallest
        mapped leaf behind that edge."""
        inv = a.inverse()
        img = a.image()
        return {v: inv[min(T.side_leaves(mu, v) & img)] for v in common}

    def _is_final_star(self, c_idx: int, pop: set[int], common: list[int], img: set[str]) -> bool:
        Tc = self.trees[c_idx].tree
        if Tc.variant != "normal":
            return False
        inner = Tc.inner_ids()
        return (
            len(inner) == 1
            and Tc.kind(inner[0]) == P
            and pop == set(common)
            and len(img) == len(common)
        )

    def _reachable(self, start: int, goal: int) -> bool:
        out: dict[int, list[int]] = {}
        for a in self.arcs:
            out.setdefault(a.source, []).append(a.target)
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            if x == goal:
                return True
            for y in out.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    def _finalize(self, a1: ExpArc, a2: ExpArc, reps1, reps2, common) -> None:
        """Tie two star children together with a direct arc."""
        s, t = a1.target, a2.target
        rs, rt = reps1, reps2
        if self._reachable(t, s) or (not self._reachable(s, t) and t < s):
            s, t, rs, rt = t, s, rt, rs
        mapping = {rt[v]: rs[v] for v in common}
        arc = ExpArc(s, t, mapping, a1.reversing != a2.reversing, "finalizing")
        self.arcs.append(arc)
        self.register(len(self.arcs) - 1)

    def _expand(self, t_idx: int, mu: int, a1: ExpArc, a2: ExpArc, reps1, reps2, common) -> None:
        T = self.trees[t_idx].tree
        order = T.neighbors(mu)
        edge_label = {v: f"e{order.index(v)}" for v in common}
        p1 = relabel_leaves(
            project(self.trees[a1.target].tree, set(reps1.values()), raw=True),
            {reps1[v]: edge_label[v] for v in common},
        )
        p2 = relabel_leaves(
            project(self.trees[a2.target].tree, set(reps2.values()), raw=True),
            {reps2[v]: edge_label[v] for v in common},
        )
        te = intersect(p1, p2, raw=True)
        if te.is_null():
            raise NullExpansion(
                f"children of tree {t_idx} disagree on the edges of node {mu}"
            )
        new_idx = len(self.trees)
        if new_idx >= self.n_input + self.budget:
            raise BudgetExceeded(f"expansion graph exceeded {self.budget} new trees")
        m1 = {edge_label[v]: reps1[v] for v in common}
        m2 = {edge_label[v]: reps2[v] for v in common}
        arc1 = ExpArc(a1.target, new_idx, m1, a1.reversing, "expansion")
        arc2 = ExpArc(a2.target, new_idx, m2, a2.reversing, "expansion")
        te = _flip_pinned_markers(te, [arc1, arc2], [et.tree for et in self.trees])
        self.trees.append(ExpTree(te, "expansion", (t_idx, mu)))
        self.arcs.append(arc1)
        self.register(len(self.arcs) - 1)
        self.arcs.append(arc2)
        self.register(len(self.arcs) - 1)


def build_expansion_graph(norm: NormalizedInstance, budget_factor: int = 50) -> ExpansionGraph:
    """Expansion graph of a normalized instance without null trees."""
    assert not norm.has_null
    return _Builder(norm, budget_factor).run()
