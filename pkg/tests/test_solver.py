"""Solver against the brute-force oracle, plus targeted constructions."""
from __future__ import annotations

import itertools
import random

import pytest

from _gen import labels, random_instance
from pqordering.instance import Arc, Instance, reduce_cyclic_ordering
from pqordering.oracle import (
    OracleBudget,
    brute_force_cyclic_ordering,
    brute_force_simultaneous_orders,
    orders_of_tree,
)
from pqordering.orders import canonical_rotation
from pqordering.solver import (
    SearchBudget,
    _two_sat,
    exhaustive_solve,
    order_rotations,
    q_orientations,
    solve,
    tree_realizes,
    verify_solution,
)
from pqordering.instance import normalize
from pqordering.pqtree import Q, from_consecutive_sets, universal


def _ident(labs):
    return {x: x for x in labs}


# ---------------------------------------------------------------------------
# order membership helpers
# ---------------------------------------------------------------------------


def test_order_rotations_membership_matches_enumeration():
    rng = random.Random(31)
    from _gen import random_tree

    for _ in range(80):
        t = random_tree(rng, rng.randint(3, 6))
        want = orders_of_tree(t)
        labs = sorted(t.leaf_labels())
        for perm in itertools.permutations(labs[1:]):
            order = (labs[0],) + perm
            assert tree_realizes(t, order) == (order in want)


def test_q_orientations_reports_reference_and_reversal():
    t = from_consecutive_sets("abcd", [{"a", "b"}, {"b", "c"}])
    [qnode] = [i for i in t.inner_ids() if t.kind(i) == Q]
    ref = tuple(
        t.label(v) if t.kind(v) == "leaf" else None for v in t.neighbors(qnode)
    )
    for order in orders_of_tree(t):
        flags = q_orientations(t, order)
        assert set(flags) == {qnode}


# ---------------------------------------------------------------------------
# 2-SAT
# ---------------------------------------------------------------------------


def test_two_sat_simple():
    a, b, c = "abc"
    assert _two_sat([a], []) is not None
    got = _two_sat([a, b], [(a, b, True)])
    assert got[a] == got[b]
    got = _two_sat([a, b], [(a, b, False)])
    assert got[a] != got[b]
    got = _two_sat([a, b, c], [(a, b, True), (b, c, False)])
    assert got[a] == got[b] != got[c]
    assert _two_sat([a, b], [(a, b, True), (a, b, False)]) is None
    # odd inequality cycle is unsatisfiable
    assert (
        _two_sat([a, b, c], [(a, b, False), (b, c, False), (c, a, False)]) is None
    )


def test_two_sat_random_against_enumeration():
    rng = random.Random(17)
    for _ in range(200):
        n = rng.randint(1, 6)
        vars_ = list(range(n))
        clauses = [
            (rng.randrange(n), rng.randrange(n), rng.random() < 0.5)
            for _ in range(rng.randint(0, 8))
        ]
        got = _two_sat(vars_, clauses)
        want = None
        for bits in itertools.product([False, True], repeat=n):
            if all((bits[a] == bits[b]) == eq for a, b, eq in clauses):
                want = bits
                break
        if want is None:
            assert got is None
        else:
            assert got is not None
            assert all((got[a] == got[b]) == eq for a, b, eq in clauses)


# ---------------------------------------------------------------------------
# targeted constructions
# ---------------------------------------------------------------------------


def test_null_tree_reason():
    parent = from_consecutive_sets("abcd", [{"a", "b"}, {"b", "c"}])
    child = from_consecutive_sets("abcd", [{"a", "c"}])
    inst = Instance([parent, child], [Arc(0, 1, _ident("abcd"))])
    res = solve(inst)
    assert res.status == "infeasible" and res.reason == "NullTree"
    assert brute_force_simultaneous_orders(inst) is None


def test_q_constraint_contradiction():
    """Two arcs pin a child's orientation to a parent Q-node in opposite
    senses."""
    parent = from_consecutive_sets("abcd", [{"a", "b"}, {"b", "c"}])
    inst = Instance(
        [parent, universal("abc")],
        [
            Arc(0, 1, {"a": "a", "b": "b", "c": "c"}),
            Arc(0, 1, {"a": "d", "b": "c", "c": "b"}),
        ],
    )
    res = solve(inst)
    assert res.status == "infeasible" and res.reason == "QConstraints"
    assert brute_force_simultaneous_orders(inst) is None
    # same two arcs, second one reversing: the senses agree again
    inst2 = Instance(
        [parent, universal("abc")],
        [
            Arc(0, 1, {"a": "a", "b": "b", "c": "c"}),
            Arc(0, 1, {"a": "d", "b": "c", "c": "b"}, reversing=True),
        ],
    )
    res2 = solve(inst2)
    assert res2.status == "ok"
    assert brute_force_simultaneous_orders(inst2) is not None


def test_double_arc_parity_conventions():
    """Parallel arcs build a permutation constraint; its satisfiability
    flips with cycle structure and the reversing flag."""
    four_cycle = [
        Arc(0, 1, {"w": "a", "x": "b", "y": "c", "z": "d"}),
        Arc(0, 1, {"w": "b", "x": "c", "y": "d", "z": "a"}),
    ]
    swap = [
        Arc(0, 1, {"w": "a", "x": "b", "y": "c", "z": "d"}),
        Arc(0, 1, {"w": "b", "x": "a", "y": "c", "z": "d"}),
    ]
    cases = [
        (four_cycle, False, True),  # rotation: preserving witness exists
        (swap, False, False),  # transposition: no preserving witness
        (swap, True, True),  # but a reversing witness exists
    ]
    for arcs, flip, want in cases:
        arcs = [Arc(a.source, a.target, dict(a.mapping)) for a in arcs]
        if flip:
            arcs[1].reversing = True
        inst = Instance([universal("abcd"), universal("wxyz")], arcs)
        res = solve(inst)
        brute = brute_force_simultaneous_orders(inst)
        assert (res.status == "ok") == want == (brute is not None)
        if not want:
            assert res.reason == "DoubleArc"
        assert not res.used_fallback


def test_not_one_critical_goes_to_fallback():
    inst = Instance(
        [universal("abcde"), universal("abc"), universal("abd"), universal("abe")],
        [Arc(0, 1, _ident("abc")), Arc(0, 2, _ident("abd")), Arc(0, 3, _ident("abe"))],
    )
    res = solve(inst)
    assert res.used_fallback
    assert (res.status == "ok") == (brute_force_simultaneous_orders(inst) is not None)


def test_solution_respects_q_assignment_keys():
    parent = from_consecutive_sets("abcde", [{"a", "b"}, {"b", "c"}])
    inst = Instance([parent, universal("abc")], [Arc(0, 1, _ident("abc"))])
    res = solve(inst)
    assert res.status == "ok"
    for key in res.q_assignment:
        tree_idx, node = key.split(".")
        t = inst.trees[int(tree_idx)]
        assert t.kind(int(node)) == Q


# ---------------------------------------------------------------------------
# randomized equivalence
# ---------------------------------------------------------------------------


def _compare(seed: int, count: int, **kw):
    rng = random.Random(seed)
    done = fallback = solvable = 0
    while done < count:
        inst = random_instance(rng, **kw)
        try:
            brute = brute_force_simultaneous_orders(inst, cap=400_000)
        except OracleBudget:
            continue
        try:
            res = solve(inst)
        except SearchBudget:
            continue
        done += 1
        fallback += res.used_fallback
        want = brute is not None
        assert (res.status == "ok") == want, (res.reason, inst.to_json_obj())
        if want:
            solvable += 1
            assert verify_solution(inst, res)
    return solvable, fallback


def test_random_instances_match_oracle():
    solvable, _ = _compare(41, 150, max_trees=4, max_leaves=6)
    assert solvable >= 30


def test_random_instances_without_parallel_arcs():
    solvable, _ = _compare(43, 100, max_trees=5, max_leaves=6, parallel=False)
    assert solvable >= 20


def test_two_fixed_main_route_matches_oracle():
    """Instances solved without the fallback exercise the expansion, 2-SAT
    and extension machinery; enough of them must occur."""
    rng = random.Random(47)
    main_route = 0
    for _ in range(400):
        inst = random_instance(rng, max_trees=4, max_leaves=6)
        try:
            brute = brute_force_simultaneous_orders(inst, cap=300_000)
        except OracleBudget:
            continue
        try:
            res = solve(inst)
        except SearchBudget:
            continue
        assert (res.status == "ok") == (brute is not None)
        if not res.used_fallback and res.two_fixed:
            main_route += 1
    assert main_route >= 150


def test_exhaustive_solve_equals_main_route():
    """The fallback and the expansion pipeline agree on instances both can
    decide."""
    rng = random.Random(53)
    done = 0
    while done < 60:
        inst = random_instance(rng, max_trees=3, max_leaves=5)
        norm = normalize(inst)
        if norm.has_null:
            continue
        try:
            fb = exhaustive_solve(norm, cap=100_000)
        except SearchBudget:
            continue
        res = solve(inst)
        assert (res.status == "ok") == (fb is not None)
        done += 1


# ---------------------------------------------------------------------------
# cyclic ordering end to end
# ---------------------------------------------------------------------------


def test_cyclic_ordering_small_exhaustive():
    for n in (3, 4):
        labs = labels(n)
        triples = [
            t for t in itertools.permutations(labs, 3) if t[0] == min(t)
        ]
        for k in (1, 2):
            for delta in itertools.combinations(triples, k):
                inst = reduce_cyclic_ordering(labs, list(delta))
                res = solve(inst)
                brute = brute_force_cyclic_ordering(labs, list(delta))
                assert (res.status == "ok") == bool(brute), delta


def test_cyclic_ordering_realizes_triples():
    rng = random.Random(61)
    labs = labels(5)
    all_triples = [t for t in itertools.permutations(labs, 3) if t[0] == min(t)]
    for _ in range(40):
        delta = rng.sample(all_triples, rng.randint(1, 4))
        inst = reduce_cyclic_ordering(labs, delta)
        res = solve(inst)
        assert (res.status == "ok") == bool(brute_force_cyclic_ordering(labs, delta))
        if res.status == "ok":
            order = res.orders[0]
            rev = tuple(reversed(order))

            def holds(o, t):
                pos = {x: i for i, x in enumerate(o)}
                i, j, k = pos[t[0]], pos[t[1]], pos[t[2]]
                return (j - i) % len(o) < (k - i) % len(o)

            assert all(holds(order, t) for t in delta) or all(
                holds(rev, t) for t in delta
            )
