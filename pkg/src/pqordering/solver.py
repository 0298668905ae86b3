"""Solving simultaneous circular ordering instances.

Pipeline: normalize, build the expansion graph, couple Q-node orientations
through 2-SAT, turn permutation constraints into witness orders, then pick
per-node rotations bottom-up (children before parents).  Instances where
some P-node is fixed by three or more children fall back to an exhaustive
search over the source trees' orders; every other tree's order is already
determined by its parents.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .expansion import (
    BudgetExceeded,
    ExpansionGraph,
    NotOneCritical,
    NullExpansion,
    build_expansion_graph,
)
from .instance import Instance, NormalizedInstance, normalize
from .orders import (
    apply_map,
    canonical_rotation,
    is_suborder,
    order_preserving_witness,
    order_reversing_witness,
    permutes_order,
    restrict,
    same_circular,
)
from .pqtree import P, PQError, Q, PQTree, populated_neighbors
from .pqtree.tree import TooLarge


class InternalInconsistency(PQError):
    """A solver invariant failed; indicates a bug, not a bad instance."""


class SearchBudget(PQError):
    """The exhaustive fallback ran out of budget before deciding."""


# ---------------------------------------------------------------------------
# orders against trees
# ---------------------------------------------------------------------------


def order_rotations(tree: PQTree, order) -> dict[int, tuple[int, ...]] | None:
    """Realized neighbor rotation of every inner node, or None when the
    order does not belong to the tree.

    An order belongs to the tree iff each node's sides occupy consecutive
    stretches and each Q-node's side rotation is its reference tuple or the
    reversal.
    """
    order = tuple(order)
    if tree.is_null():
        return None
    if sorted(order) != sorted(tree.leaf_labels()):
        return None
    rotations: dict[int, tuple[int, ...]] = {}
    for node in tree.inner_ids():
        toward: dict[str, int] = {}
        for v in tree.neighbors(node):
            for lab in tree.side_leaves(node, v):
                toward[lab] = v
        seq: list[int] = []
        for lab in order:
            v = toward[lab]
            if not seq or seq[-1] != v:
                seq.append(v)
        if len(seq) > 1 and seq[0] == seq[-1]:
            seq.pop()
        if len(seq) != tree.degree(node):
            return None
        realized = tuple(seq)
        if tree.kind(node) == Q:
            ref = tree.neighbors(node)
            if not (
                same_circular(realized, ref)
                or same_circular(realized, tuple(reversed(ref)))
            ):
                return None
        rotations[node] = realized
    return rotations


def tree_realizes(tree: PQTree, order) -> bool:
    """Whether the circular order belongs to the tree."""
    order = tuple(order)
    if tree.is_null():
        return False
    if tree.is_empty() or len(tree.leaf_labels()) <= 2:
        return sorted(order) == sorted(tree.leaf_labels())
    return order_rotations(tree, order) is not None


def q_orientations(tree: PQTree, order) -> dict[int, bool]:
    """Per Q-node: True when the order realizes the reference rotation."""
    rotations = order_rotations(tree, order)
    if rotations is None:
        raise InternalInconsistency("order does not belong to the tree")
    out = {}
    for node, realized in rotations.items():
        if tree.kind(node) == Q:
            out[node] = same_circular(realized, tree.neighbors(node))
    return out


# ---------------------------------------------------------------------------
# Q-constraints as 2-SAT
# ---------------------------------------------------------------------------


def _two_sat(variables: list, clauses: list) -> dict | None:
    """Variables with equality/inequality clauses (var_a, var_b, equal).
    Returns an assignment or None.  Literal 2i is var_i true, 2i+1 false."""
    index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    adj: list[list[int]] = [[] for _ in range(2 * n)]
    radj: list[list[int]] = [[] for _ in range(2 * n)]

    def imply(a: int, b: int) -> None:
        adj[a].append(b)
        radj[b].append(a)

    for va, vb, equal in clauses:
        a, b = 2 * index[va], 2 * index[vb]
        if equal:
            imply(a, b), imply(b, a), imply(a ^ 1, b ^ 1), imply(b ^ 1, a ^ 1)
        else:
            imply(a, b ^ 1), imply(b, a ^ 1), imply(a ^ 1, b), imply(b ^ 1, a)

    # Kosaraju: order by first DFS, then label components on the reverse graph
    seen = [False] * (2 * n)
    finish: list[int] = []
    for s in range(2 * n):
        if seen[s]:
            continue
        stack = [(s, 0)]
        seen[s] = True
        while stack:
            node, ptr = stack.pop()
            if ptr < len(adj[node]):
                stack.append((node, ptr + 1))
                nxt = adj[node][ptr]
                if not seen[nxt]:
                    seen[nxt] = True
                    stack.append((nxt, 0))
            else:
                finish.append(node)
    comp = [-1] * (2 * n)
    c = 0
    for s in reversed(finish):
        if comp[s] != -1:
            continue
        stack = [s]
        comp[s] = c
        while stack:
            node = stack.pop()
            for nxt in radj[node]:
                if comp[nxt] == -1:
                    comp[nxt] = c
                    stack.append(nxt)
        c += 1
    # components are numbered in topological order of the condensation, so a
    # literal is chosen when its component comes later than its negation's
    out = {}
    for v, i in index.items():
        if comp[2 * i] == comp[2 * i + 1]:
            return None
        out[v] = comp[2 * i] > comp[2 * i + 1]
    return out


def solve_q_constraints(graph: ExpansionGraph) -> dict[tuple[int, int], bool] | None:
    """Orientation assignment for every Q-node of every tree, or None."""
    from .pqtree import classify_fixedness, q_representative

    variables = []
    for idx, et in enumerate(graph.trees):
        t = et.tree
        if t.variant != "normal":
            continue
        for node in t.inner_ids():
            if t.kind(node) == Q:
                variables.append((idx, node))
    clauses = []
    for a in graph.arcs:
        src = graph.trees[a.source].tree
        tgt = graph.trees[a.target].tree
        if src.variant != "normal" or tgt.variant != "normal":
            continue
        report = classify_fixedness(src, a.image())
        for node in sorted(report.fixed_nodes):
            if src.kind(node) != Q:
                continue
            res = q_representative(src, tgt, a.mapping, node)
            if res is None:
                raise InternalInconsistency(
                    f"no representative for Q-node {node} of tree {a.source}"
                )
            center, agree = res
            if tgt.kind(center) != Q:
                raise InternalInconsistency(
                    f"representative {center} in tree {a.target} is not a Q-node"
                )
            clauses.append(((a.source, node), (a.target, center), agree != a.reversing))
    return _two_sat(variables, clauses)


# ---------------------------------------------------------------------------
# extension
# ---------------------------------------------------------------------------


def _double_arc_orders(graph: ExpansionGraph):
    """Witness order per double-arc target, or None when unsatisfiable."""
    has_out = {a.source for a in graph.arcs}
    pinned: dict[int, tuple[str, ...]] = {}
    for d in graph.double_arcs:
        if d.target in has_out:
            raise NotOneCritical("double-arc target is not a sink")
        t = graph.trees[d.target].tree
        inner = t.inner_ids()
        if len(inner) != 1 or t.kind(inner[0]) != P:
            raise InternalInconsistency("double-arc target must be a star")
        if d.target in pinned:
            if not permutes_order(d.perm, pinned[d.target], reverse=d.parity):
                raise NotOneCritical("conflicting permutation constraints")
            continue
        w = (
            order_reversing_witness(d.perm)
            if d.parity
            else order_preserving_witness(d.perm)
        )
        if w is None:
            return None
        pinned[d.target] = w
    return pinned


def _merge_cyclic(a: list[int], b: list[int]) -> list[int]:
    """Interleave two cyclic sequences agreeing on their common elements."""
    common = set(a) & set(b)
    if not common:
        return list(a) + list(b)
    ra = [x for x in a if x in common]
    rb = [x for x in b if x in common]
    if not same_circular(ra, rb):
        raise InternalInconsistency("children disagree on shared edges")
    k = next(i for i, x in enumerate(b) if x in common)
    rot = b[k:] + b[:k]
    runs: dict[int, list[int]] = {}
    anchor = rot[0]
    for x in rot:
        if x in common:
            anchor = x
            runs[x] = []
        else:
            runs[anchor].append(x)
    out: list[int] = []
    for x in a:
        out.append(x)
        out.extend(runs.get(x, ()))
    return out


def _forced_sequence(tree: PQTree, node: int, arc, child_order) -> list[int] | None:
    """Cyclic sequence the child order forces on the node's populated
    edges; None when fewer than three edges are populated."""
    image = arc.image()
    pop = populated_neighbors(tree, node, image)
    if len(pop) < 3:
        return None
    eff = tuple(reversed(child_order)) if arc.reversing else tuple(child_order)
    toward: dict[str, int] = {}
    for v in pop:
        for lab in tree.side_leaves(node, v) & image:
            toward[lab] = v
    seq: list[int] = []
    for lab in eff:
        v = toward[arc.mapping[lab]]
        if not seq or seq[-1] != v:
            seq.append(v)
    if len(seq) > 1 and seq[0] == seq[-1]:
        seq.pop()
    if len(seq) != len(pop):
        raise InternalInconsistency("child order scatters a side of its parent")
    return seq


def extend_orders(
    graph: ExpansionGraph,
    assignment: dict[tuple[int, int], bool],
    pinned: dict[int, tuple[str, ...]],
) -> list[tuple[str, ...]]:
    """One order per tree, children first, parents extending children."""
    outgoing: dict[int, list] = {i: [] for i in range(len(graph.trees))}
    for a in graph.arcs:
        outgoing[a.source].append(a)
    orders: dict[int, tuple[str, ...]] = {}
    for idx in reversed(graph.topo_order()):
        t = graph.trees[idx].tree
        if t.is_null():
            raise InternalInconsistency("null tree reached extension")
        if idx in pinned:
            orders[idx] = pinned[idx]
            continue
        labels = sorted(t.leaf_labels())
        if len(labels) <= 2:
            orders[idx] = tuple(labels)
            continue
        rotations: dict[int, tuple[int, ...]] = {}
        for node in t.inner_ids():
            if t.kind(node) == Q:
                ref = t.neighbors(node)
                rotations[node] = ref if assignment[(idx, node)] else tuple(reversed(ref))
            else:
                rotations[node] = _p_rotation(t, node, outgoing[idx], orders)
        orders[idx] = _realize(t, rotations)
    return [orders[i] for i in range(len(graph.trees))]


def _p_rotation(tree: PQTree, node: int, out_arcs: list, orders) -> tuple[int, ...]:
    seqs: list[list[int]] = []
    for a in out_arcs:
        seq = _forced_sequence(tree, node, a, orders[a.target])
        if seq is not None:
            seqs.append(seq)
    if not seqs:
        return tree.neighbors(node)
    if len(seqs) > 2:
        raise InternalInconsistency("P-node forced by more than two children")
    merged = seqs[0] if len(seqs) == 1 else _merge_cyclic(seqs[0], seqs[1])
    used = set(merged)
    free = [v for v in tree.neighbors(node) if v not in used]
    return tuple(merged + free)


def _realize(tree: PQTree, rotations: dict[int, tuple[int, ...]]) -> tuple[str, ...]:
    """Circular leaf order obtained by walking the chosen rotations."""
    leaves = tree.leaves()
    root_label = min(leaves)
    root_id = leaves[root_label]
    out: list[str] = []

    def walk(node: int, parent: int) -> None:
        if tree.kind(node) == "leaf":
            out.append(tree.label(node))
            return
        rot = rotations[node]
        i = rot.index(parent)
        for v in rot[i + 1 :] + rot[:i]:
            walk(v, node)

    walk(tree.neighbors(root_id)[0], root_id)
    return canonical_rotation(tuple([root_label] + out))


# ---------------------------------------------------------------------------
# exhaustive fallback
# ---------------------------------------------------------------------------


def exhaustive_solve(norm: NormalizedInstance, cap: int = 200_000):
    """Decide the instance by enumerating source-tree orders.

    Every non-source tree's order is determined by any one parent, so the
    search space is the product of the source trees' order sets.
    """
    incoming: dict[int, list] = {i: [] for i in range(len(norm.trees))}
    for a in norm.arcs:
        incoming[a.target].append(a)
    sources = [i for i in norm.order if not incoming[i]]
    choices: list[list[tuple[str, ...]]] = []
    total = 1
    for i in sources:
        t = norm.trees[i]
        if t.variant == "normal":
            try:
                opts = sorted({canonical_rotation(o) for o in t.enumerate_orders(cap)})
            except TooLarge:
                raise SearchBudget(f"tree {i} has too many orders to enumerate")
        else:
            opts = [()]
        choices.append(opts)
        total *= len(opts)
        if total > cap:
            raise SearchBudget(f"order product {total} exceeds the search budget")
    derived = [i for i in norm.order if incoming[i]]
    for combo in itertools.product(*choices):
        orders: dict[int, tuple[str, ...]] = dict(zip(sources, combo))
        ok = True
        for i in derived:
            candidate = None
            for a in incoming[i]:
                induced = apply_map(restrict(orders[a.source], a.image()), a.inverse())
                if a.reversing:
                    induced = tuple(reversed(induced))
                if candidate is None:
                    candidate = induced
                elif not same_circular(candidate, induced):
                    ok = False
                    break
            if not ok or not tree_realizes(norm.trees[i], candidate):
                ok = False
                break
            orders[i] = canonical_rotation(candidate)
        if ok:
            return [orders[i] for i in range(len(norm.trees))]
    return None


# ---------------------------------------------------------------------------
# public entry point
# ---------------------------------------------------------------------------


@dataclass
class SolveResult:
    status: str  # "ok" | "infeasible"
    reason: str | None = None  # NullTree | QConstraints | DoubleArc | Search
    orders: list[tuple[str, ...]] | None = None
    q_assignment: dict[str, bool] | None = None
    two_fixed: bool = False
    used_fallback: bool = False
    stats: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        obj = {
            "status": self.status,
            "twoFixed": self.two_fixed,
            "usedFallback": self.used_fallback,
        }
        if self.reason is not None:
            obj["reason"] = self.reason
        if self.orders is not None:
            obj["orders"] = [list(o) for o in self.orders]
        if self.q_assignment is not None:
            obj["qAssignment"] = dict(sorted(self.q_assignment.items()))
        if self.stats:
            obj["stats"] = {k: self.stats[k] for k in sorted(self.stats)}
        return obj


def _result_orders(instance: Instance, orders: list[tuple[str, ...]]) -> SolveResult:
    n = len(instance.trees)
    q_assign: dict[str, bool] = {}
    for i in range(n):
        t = instance.trees[i]
        if t.variant != "normal":
            continue
        for node, flag in sorted(q_orientations(t, orders[i]).items()):
            q_assign[f"{i}.{node}"] = flag
    return SolveResult(
        status="ok",
        orders=[canonical_rotation(o) for o in orders[:n]],
        q_assignment=q_assign,
    )


def verify_solution(instance: Instance, result: SolveResult) -> bool:
    """Check a positive result against the instance definition: every order
    belongs to its tree and every arc's suborder condition holds."""
    if result.status != "ok" or result.orders is None:
        return False
    if len(result.orders) != len(instance.trees):
        return False
    for t, o in zip(instance.trees, result.orders):
        if not tree_realizes(t, o):
            return False
    for a in instance.arcs:
        mapped = apply_map(result.orders[a.target], a.mapping)
        if a.reversing:
            mapped = tuple(reversed(mapped))
        if not is_suborder(result.orders[a.source], mapped):
            return False
    return True


def solve(
    instance: Instance,
    *,
    budget_factor: int = 50,
    fallback_cap: int = 200_000,
    check: bool = True,
) -> SolveResult:
    """Decide the instance and produce one order per tree when solvable."""
    norm = normalize(instance)
    stats = {"trees": len(instance.trees), "arcs": len(instance.arcs)}
    if norm.has_null:
        return SolveResult(
            "infeasible", reason="NullTree", two_fixed=norm.two_fixed, stats=stats
        )
    try:
        graph = build_expansion_graph(norm, budget_factor)
        stats["expansionTrees"] = len(graph.trees) - graph.n_input
        stats["triples"] = graph.triples
        assignment = solve_q_constraints(graph)
        if assignment is None:
            return SolveResult(
                "infeasible", reason="QConstraints", two_fixed=norm.two_fixed, stats=stats
            )
        pinned = _double_arc_orders(graph)
        if pinned is None:
            return SolveResult(
                "infeasible", reason="DoubleArc", two_fixed=norm.two_fixed, stats=stats
            )
        orders = extend_orders(graph, assignment, pinned)
        used_fallback = False
    except NullExpansion:
        return SolveResult(
            "infeasible", reason="NullTree", two_fixed=norm.two_fixed, stats=stats
        )
    except (NotOneCritical, BudgetExceeded) as exc:
        stats["fallbackCause"] = type(exc).__name__
        orders = exhaustive_solve(norm, fallback_cap)
        if orders is None:
            return SolveResult(
                "infeasible",
                reason="Search",
                two_fixed=norm.two_fixed,
                used_fallback=True,
                stats=stats,
            )
        used_fallback = True
    result = _result_orders(instance, orders)
    result.two_fixed = norm.two_fixed
    result.used_fallback = used_fallback
    result.stats = stats
    if check and not verify_solution(instance, result):
        raise InternalInconsistency("solution failed verification")
    return result
