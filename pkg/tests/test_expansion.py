"""Structural laws of the expansion graph."""
from __future__ import annotations

import random

import pytest

from _gen import random_instance
from pqordering.expansion import (
    BudgetExceeded,
    NotOneCritical,
    NullExpansion,
    build_expansion_graph,
)
from pqordering.instance import Arc, Instance, normalize
from pqordering.pqtree import P, universal
from pqordering.solver import solve


def _ident(labs):
    return {x: x for x in labs}


def _graphs(seed: int, count: int, **kw):
    """Expansion graphs of random instances that build without falling back."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = random_instance(rng, **kw)
        norm = normalize(inst)
        if norm.has_null:
            continue
        try:
            g = build_expansion_graph(norm)
        except (NotOneCritical, BudgetExceeded, NullExpansion):
            continue
        out.append((inst, norm, g))
    return out


def test_expansion_basic_triple():
    inst = Instance(
        [universal("abcde"), universal("abcd"), universal("abce")],
        [Arc(0, 1, _ident("abcd")), Arc(0, 2, _ident("abce"))],
    )
    g = build_expansion_graph(normalize(inst))
    assert len(g.trees) == 4
    te = g.trees[3]
    assert te.origin == "expansion"
    assert te.responsible == (0, next(iter(inst.trees[0].inner_ids())))
    # both children now point at the expansion tree
    assert {(a.source, a.target) for a in g.arcs[2:]} == {(1, 3), (2, 3)}
    assert sorted(te.tree.leaf_labels()) == ["e0", "e1", "e2"]


def test_two_shared_edges_need_no_expansion():
    """Children overlapping in only two of the parent's edges cannot
    disagree, so nothing is added."""
    inst = Instance(
        [universal("abcdef"), universal("abcd"), universal("abef")],
        [Arc(0, 1, _ident("abcd")), Arc(0, 2, _ident("abef"))],
    )
    g = build_expansion_graph(normalize(inst))
    assert len(g.trees) == 3 and len(g.arcs) == 2


def test_third_fixer_aborts():
    inst = Instance(
        [universal("abcde"), universal("abc"), universal("abd"), universal("abe")],
        [Arc(0, 1, _ident("abc")), Arc(0, 2, _ident("abd")), Arc(0, 3, _ident("abe"))],
    )
    with pytest.raises(NotOneCritical):
        build_expansion_graph(normalize(inst))


def test_input_double_arc_expands_once_then_records_permutation():
    inst = Instance(
        [universal("abcd"), universal("wxyz")],
        [
            Arc(0, 1, {"w": "a", "x": "b", "y": "c", "z": "d"}),
            Arc(0, 1, {"w": "b", "x": "c", "y": "d", "z": "a"}),
        ],
    )
    g = build_expansion_graph(normalize(inst))
    assert len(g.trees) == 3 and g.trees[2].origin == "expansion"
    assert len(g.double_arcs) == 1
    d = g.double_arcs[0]
    assert d.target == 2 and not d.parity
    assert sorted(d.perm) == sorted(g.trees[2].tree.leaf_labels())
    res = solve(inst)
    assert res.status == "ok" and not res.used_fallback


def test_double_arc_targets_are_sinks():
    for _, _, g in _graphs(5, 40):
        sources = {a.source for a in g.arcs}
        for d in g.double_arcs:
            assert d.target not in sources
            assert g.trees[d.target].origin == "expansion"


def test_expansion_size_bound():
    """|expansion| stays linear in p_max * trees + arcs."""
    for inst, norm, g in _graphs(6, 60, max_trees=5, max_leaves=7):
        p_max = max(
            (
                sum(t.kind(i) == P for i in t.inner_ids())
                for t in norm.trees
                if t.variant == "normal"
            ),
            default=0,
        )
        bound = 50 * (max(p_max, 1) * len(norm.trees) + len(norm.arcs) + 1)
        assert len(g.trees) - g.n_input <= bound


def test_expansion_degree_inequality():
    """P-node degrees of an expansion tree, against the degree of the node
    it was created for: sum deg(mu_i) <= deg(mu) + 2k - 2."""
    seen = 0
    for _, _, g in _graphs(7, 250, max_trees=5, max_leaves=7):
        for idx in range(g.n_input, len(g.trees)):
            et = g.trees[idx]
            t_idx, mu = et.responsible
            deg_mu = g.trees[t_idx].tree.degree(mu)
            p_nodes = [i for i in et.tree.inner_ids() if et.tree.kind(i) == P]
            if not p_nodes:
                continue
            total = sum(et.tree.degree(i) for i in p_nodes)
            assert total <= deg_mu + 2 * len(p_nodes) - 2
            seen += 1
    assert seen >= 20


def test_transitive_responsibility_bound():
    """Each input P-node is transitively responsible for at most
    3 * deg - 8 expansion trees on 2-fixed instances."""
    seen = 0
    for _, norm, g in _graphs(8, 80, max_trees=5, max_leaves=7):
        if not norm.two_fixed:
            continue
        counts: dict[tuple[int, int], int] = {}
        for idx in range(g.n_input, len(g.trees)):
            root = g.responsibility_root(idx)
            assert root is not None and root[0] < g.n_input
            counts[root] = counts.get(root, 0) + 1
        for (t_idx, mu), c in counts.items():
            deg = g.trees[t_idx].tree.degree(mu)
            assert c <= max(3 * deg - 8, 1)
            seen += 1
    assert seen >= 10


def test_arc_order_invariance():
    """Shuffling the arc list never changes solvability."""
    rng = random.Random(9)
    done = 0
    while done < 25:
        inst = random_instance(rng, max_trees=4, max_leaves=6)
        if len(inst.arcs) < 2:
            continue
        base = solve(inst).status
        for _ in range(4):
            arcs = inst.arcs[:]
            rng.shuffle(arcs)
            assert solve(Instance(inst.trees, arcs)).status == base
        done += 1


def test_expansion_graph_is_dag():
    for _, _, g in _graphs(10, 30):
        order = g.topo_order()
        pos = {i: k for k, i in enumerate(order)}
        for a in g.arcs:
            assert pos[a.source] < pos[a.target]
