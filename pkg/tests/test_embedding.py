"""Planar-embedding applications against exhaustive rotation-system search."""
from __future__ import annotations

import random

import pytest

from _gen import (
    graph_from_pairs,
    random_biconnected_planar,
    random_block_graph,
    random_rotation_constraints,
    random_sefe_pair,
    theta_pairs,
)
from pqordering.embedding import (
    Graph,
    InvalidConstraint,
    InvalidGraph,
    NotBiconnected,
    NotPlanar,
    NotSupported,
    edge_id,
    embedding_trees,
    generalize_cutvertices,
    is_planar_rotation,
    parse_edge_list,
    pq_embedding_representation,
    rotation_faces,
    rotation_from_solution,
    solve_partially_pq_constrained,
    solve_sefe,
    spqr_tree,
)
from pqordering.instance import normalize
from pqordering.oracle import (
    all_rotation_systems,
    brute_force_embeddings,
    brute_force_pq_constrained,
    brute_force_sefe,
    orders_of_tree,
    planar_by_euler,
)
from pqordering.orders import canonical_rotation, restrict
from pqordering.pqtree import PQTree, from_consecutive_sets
from pqordering.solver import solve

C5 = "a b\nb c\nc d\nd e\na e"
K4 = "a b\na c\na d\nb c\nb d\nc d"
DIAMOND = "a b\na c\nb c\nb d\nc d"
THETA222 = "s a\na t\ns b\nb t\ns c\nc t"
K5 = "a b\na c\na d\na e\nb c\nb d\nb e\nc d\nc e\nd e"
COMPOSITE = "a b\na c\na d\nb c\nb d\nc d\na e\nb e"
TWO_TRIANGLES = "v a\nv b\na b\nv c\nv d\nc d"


def frozen(systems):
    return {tuple(sorted(r.items())) for r in systems}


# ---------------------------------------------------------------------------
# parsing and rotation systems
# ---------------------------------------------------------------------------


def test_parse_edge_list():
    g = parse_edge_list("# triangle\nb a\n a c \nb c # last\n\n")
    assert g.vertices == ("a", "b", "c")
    assert g.edge_ids() == ["a b", "a c", "b c"]
    assert g.incident("a") == ["a b", "a c"]
    assert g.neighbors("b") == ["a", "c"]


@pytest.mark.parametrize(
    "text",
    ["", "a\n", "a b c\n", "a a\n", "a b\nb a\n"],
)
def test_parse_rejects(text):
    with pytest.raises(InvalidGraph):
        parse_edge_list(text)


def test_face_tracing():
    g = parse_edge_list(K4)
    good = {
        "a": ("a b", "a c", "a d"),
        "b": ("a b", "b d", "b c"),
        "c": ("a c", "b c", "c d"),
        "d": ("a d", "c d", "b d"),
    }
    assert rotation_faces(g, good) == 4
    assert is_planar_rotation(g, good)
    twisted = dict(good)
    twisted["a"] = ("a b", "a d", "a c")
    assert not is_planar_rotation(g, twisted)
    with pytest.raises(InvalidGraph):
        rotation_faces(g, {**good, "a": ("a b", "a c")})


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text,kinds",
    [
        (C5, {"S": 1, "Q": 5}),
        (K4, {"R": 1, "Q": 6}),
        (DIAMOND, {"P": 1, "S": 2, "Q": 5}),
        (THETA222, {"P": 1, "S": 3, "Q": 6}),
        (COMPOSITE, {"P": 1, "R": 1, "S": 1, "Q": 8}),
    ],
)
def test_spqr_kinds(text, kinds):
    t = spqr_tree(parse_edge_list(text))
    assert t.kind_counts() == kinds
    t.validate()


def test_spqr_rejects():
    with pytest.raises(NotBiconnected):
        spqr_tree(parse_edge_list("a b\nb c"))
    with pytest.raises(NotBiconnected):
        spqr_tree(parse_edge_list(TWO_TRIANGLES))
    with pytest.raises(NotBiconnected):
        spqr_tree(parse_edge_list("a b"))
    with pytest.raises(NotPlanar):
        spqr_tree(parse_edge_list(K5))


def test_spqr_deterministic():
    g = parse_edge_list(COMPOSITE)
    t1, t2 = spqr_tree(g), spqr_tree(g)
    assert [n.kind for n in t1.nodes] == [n.kind for n in t2.nodes]
    assert [n.edges for n in t1.nodes] == [n.edges for n in t2.nodes]
    assert t1.twins == t2.twins


def test_spqr_random_structure():
    rng = random.Random(11)
    for _ in range(40):
        g = random_biconnected_planar(rng)
        t = spqr_tree(g)
        t.validate()
        reals = sorted(e.real for n in t.nodes for e in n.edges if e.real)
        assert reals == g.edge_ids()


# ---------------------------------------------------------------------------
# embedding trees and brute-forced embeddings
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("text,count", [(C5, 1), (K4, 2), (DIAMOND, 2), (THETA222, 2), (COMPOSITE, 4)])
def test_embedding_counts(text, count):
    g = parse_edge_list(text)
    systems = brute_force_embeddings(g)
    assert len(systems) == count
    assert frozen(systems) == frozen(all_rotation_systems(g))
    for rot in systems:
        assert planar_by_euler(g, rot)


def test_embedding_trees_match_rotation_sets():
    rng = random.Random(12)
    graphs = [parse_edge_list(t) for t in (C5, K4, DIAMOND, THETA222, COMPOSITE)]
    graphs += [random_biconnected_planar(rng, n_max=6, m_max=9) for _ in range(25)]
    for g in graphs:
        systems = all_rotation_systems(g)
        trees = embedding_trees(g)
        for v in g.vertices:
            assert orders_of_tree(trees[v]) == {r[v] for r in systems}, (g.edges, v)


def test_representation_solutions_are_embeddings():
    rng = random.Random(13)
    graphs = [parse_edge_list(t) for t in (C5, K4, DIAMOND, THETA222, COMPOSITE)]
    graphs += [random_biconnected_planar(rng) for _ in range(25)]
    for g in graphs:
        rep = pq_embedding_representation(g)
        norm = normalize(rep.instance)
        assert norm.two_fixed and not norm.has_null
        res = solve(rep.instance)
        assert res.status == "ok" and not res.used_fallback
        rot = rotation_from_solution(rep, res)
        assert planar_by_euler(g, rot)


def test_every_embedding_satisfies_the_arcs():
    """Each brute-forced rotation system induces consistent orders on every
    consistency tree, read through any of its parent arcs."""
    for text in (C5, K4, DIAMOND, THETA222, COMPOSITE):
        g = parse_edge_list(text)
        rep = pq_embedding_representation(g)
        for rot in all_rotation_systems(g):
            orders = {i: canonical_rotation(rot[v]) for v, i in rep.vertex_tree.items()}
            for i, role in enumerate(rep.roles):
                if role != "consistency":
                    continue
                derived = set()
                for a in rep.instance.arcs:
                    if a.target != i:
                        continue
                    sub = restrict(orders[a.source], set(a.mapping.values()))
                    inv = {s: t for t, s in a.mapping.items()}
                    mapped = tuple(inv[x] for x in sub)
                    if a.reversing:
                        mapped = tuple(reversed(mapped))
                    derived.add(canonical_rotation(mapped))
                assert len(derived) == 1


def test_nonbiconnected_rejected_without_relaxation():
    with pytest.raises(NotBiconnected):
        pq_embedding_representation(parse_edge_list(TWO_TRIANGLES))


# ---------------------------------------------------------------------------
# constrained planarity
# ---------------------------------------------------------------------------


def q_tree(labels):
    n = len(labels)
    nodes = {i: ("leaf", (n,), lab) for i, lab in enumerate(labels)}
    nodes[n] = ("Q", tuple(range(n)), None)
    t = PQTree("normal", nodes)
    t.validate(canonical=False)
    return t


def test_constrained_k4():
    g = parse_edge_list(K4)
    res = solve_partially_pq_constrained(g, {"a": q_tree(["a b", "a c", "a d"])})
    assert res.status == "ok"
    assert res.rotation["a"] in {("a b", "a c", "a d"), ("a b", "a d", "a c")}
    assert is_planar_rotation(g, res.rotation)


def test_constrained_cutvertex_interleaving_infeasible():
    g = parse_edge_list(TWO_TRIANGLES)
    bad = q_tree(["a v", "c v", "b v", "d v"])
    res = solve_partially_pq_constrained(g, {"v": bad})
    assert res.status == "infeasible" and res.reason == "NullTree"
    assert brute_force_pq_constrained(g, {"v": bad}) is None
    good = q_tree(["a v", "b v", "c v", "d v"])
    res = solve_partially_pq_constrained(g, {"v": good})
    assert res.status == "ok"
    assert brute_force_pq_constrained(g, {"v": good}) is not None


def test_constrained_null_and_input_errors():
    g = parse_edge_list(K4)
    res = solve_partially_pq_constrained(g, {"a": PQTree.null()})
    assert res.status == "infeasible" and res.reason == "NullTree"
    with pytest.raises(InvalidConstraint):
        solve_partially_pq_constrained(g, {"z": q_tree(["a b", "a c", "a d"])})
    with pytest.raises(InvalidConstraint):
        solve_partially_pq_constrained(g, {"a": q_tree(["a b", "a c", "c d"])})


def test_constrained_nonplanar_input():
    res = solve_partially_pq_constrained(parse_edge_list(K5), {})
    assert res.status == "infeasible" and res.reason == "NotPlanar"
    assert all_rotation_systems(parse_edge_list(K5)) == []


def test_constrained_triple_expansion_path():
    """A bond pole whose star is pinned by both a consistency tree and a
    constraint tree goes through the expansion step."""
    g = parse_edge_list(DIAMOND)
    res = solve_partially_pq_constrained(g, {"b": q_tree(["a b", "b c", "b d"])})
    assert res.status == "ok" and not res.solve_result.used_fallback
    assert res.solve_result.stats.get("triples", 0) >= 1


def test_constrained_random_vs_brute():
    rng = random.Random(14)
    feasible = infeasible = 0
    for _ in range(80):
        g = random_biconnected_planar(rng)
        cons = random_rotation_constraints(rng, g)
        res = solve_partially_pq_constrained(g, cons)
        brute = brute_force_pq_constrained(g, cons, systems=brute_force_embeddings(g))
        assert (res.status == "ok") == (brute is not None), (g.edges, cons)
        if res.status == "ok":
            feasible += 1
            assert not res.solve_result.used_fallback
            assert normalize(res.representation.instance).two_fixed
            for v, t in cons.items():
                sub = canonical_rotation(restrict(res.rotation[v], t.leaf_labels()))
                assert sub in orders_of_tree(t)
        else:
            infeasible += 1
    assert feasible and infeasible


# ---------------------------------------------------------------------------
# cutvertex generalization
# ---------------------------------------------------------------------------


def test_two_triangles_combined_tree():
    g = parse_edge_list(TWO_TRIANGLES)
    rep = generalize_cutvertices(g)
    top = rep.instance.trees[rep.vertex_tree["v"]]
    inner = [(top.kind(i), top.degree(i)) for i in top.inner_ids()]
    assert inner == [("P", 3), ("P", 3)]
    res = solve(rep.instance)
    rot = rotation_from_solution(rep, res)
    # each triangle's edges stay consecutive around v
    assert canonical_rotation(restrict(rot["v"], {"a v", "b v"})) in orders_of_tree(
        PQTree.edge("a v", "b v")
    )
    pos = {e: i for i, e in enumerate(rot["v"])}
    gap1 = (pos["b v"] - pos["a v"]) % 4
    assert gap1 in (1, 3)


def test_three_nontrivial_blocks_unsupported():
    g = parse_edge_list("v a\nv b\na b\nv c\nv d\nc d\nv e\nv f\ne f")
    with pytest.raises(NotSupported) as exc:
        generalize_cutvertices(g)
    assert "v" in str(exc.value)


def test_trees_and_bridges_supported():
    g = parse_edge_list("a b\na c\na d")
    rep = generalize_cutvertices(g)
    res = solve(rep.instance)
    rot = rotation_from_solution(rep, res)
    assert sorted(rot["a"]) == ["a b", "a c", "a d"]


def test_disconnected_unsupported():
    g = Graph.build(["a", "b", "c", "d"], [("a", "b"), ("c", "d")])
    with pytest.raises(NotSupported):
        generalize_cutvertices(g)


def test_cutvertex_random_vs_brute():
    rng = random.Random(15)
    for _ in range(60):
        g = random_block_graph(rng)
        cons = random_rotation_constraints(rng, g, prob=0.4)
        res = solve_partially_pq_constrained(g, cons)
        brute = brute_force_pq_constrained(g, cons)
        assert (res.status == "ok") == (brute is not None), (g.edges, cons)
        if res.status == "ok":
            assert is_planar_rotation(g, res.rotation)
            assert normalize(res.representation.instance).two_fixed


# ---------------------------------------------------------------------------
# simultaneous embedding with fixed edges
# ---------------------------------------------------------------------------


def wheel(rim):
    pairs = [("v", str(x)) for x in rim]
    pairs += [(str(a), str(b)) for a, b in zip(rim, rim[1:] + rim[:1])]
    verts = sorted({x for p in pairs for x in p})
    return Graph.build(verts, pairs)


def test_sefe_identical_graphs():
    g = parse_edge_list(COMPOSITE)
    res = solve_sefe(g, g)
    assert res.status == "ok"
    assert res.rotation1 == res.rotation2
    assert is_planar_rotation(g, res.rotation1)


def test_sefe_conflicting_wheels():
    g1, g2 = wheel([1, 2, 3, 4]), wheel([1, 3, 2, 4])
    res = solve_sefe(g1, g2)
    assert res.status == "infeasible" and res.reason == "NullTree"
    assert brute_force_sefe(g1, g2) is None


def test_sefe_unsupported_inputs():
    tri1 = Graph.build(["a", "b", "c"], [("a", "b"), ("a", "c"), ("b", "c")])
    tri2 = Graph.build(["x", "y", "z"], [("x", "y"), ("x", "z"), ("y", "z")])
    with pytest.raises(NotSupported):
        solve_sefe(tri1, tri2)
    # shared vertices but a disconnected common graph
    path1 = parse_edge_list("a b\nb c\nc d\na d")
    path2 = parse_edge_list("a x\nx c\nc y\na y")
    with pytest.raises(NotSupported):
        solve_sefe(path1, path2)


def test_sefe_random_vs_brute():
    rng = random.Random(16)
    feasible = infeasible = 0
    for _ in range(70):
        g1, g2 = random_sefe_pair(rng)
        res = solve_sefe(g1, g2)
        brute = brute_force_sefe(
            g1,
            g2,
            systems1=brute_force_embeddings(g1),
            systems2=brute_force_embeddings(g2),
        )
        assert (res.status == "ok") == (brute is not None), (g1.edges, g2.edges)
        if res.status == "ok":
            feasible += 1
            shared = set(g1.edges) & set(g2.edges)
            for v in set(g1.vertices) & set(g2.vertices):
                ce = {edge_id(a, b) for (a, b) in shared if v in (a, b)}
                r1 = canonical_rotation(restrict(res.rotation1[v], ce))
                r2 = canonical_rotation(restrict(res.rotation2[v], ce))
                assert r1 == r2
        else:
            infeasible += 1
    assert feasible and infeasible


def test_sefe_with_private_blocks_vs_brute():
    rng = random.Random(17)
    for _ in range(40):
        g1, g2 = random_sefe_pair(rng, private_blocks=True)
        res = solve_sefe(g1, g2)
        brute = brute_force_sefe(g1, g2)
        assert (res.status == "ok") == (brute is not None), (g1.edges, g2.edges)
        if res.status == "ok":
            assert is_planar_rotation(g1, res.rotation1)
            assert is_planar_rotation(g2, res.rotation2)


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------


def test_deterministic_outputs():
    g = parse_edge_list(COMPOSITE)
    rep1 = pq_embedding_representation(g)
    rep2 = pq_embedding_representation(g)
    assert rep1.instance.to_json_obj() == rep2.instance.to_json_obj()
    r1 = solve_partially_pq_constrained(g, {})
    r2 = solve_partially_pq_constrained(g, {})
    assert r1.rotation == r2.rotation
    s1 = solve_sefe(g, g)
    s2 = solve_sefe(g, g)
    assert s1.rotation1 == s2.rotation1 and s1.rotation2 == s2.rotation2
