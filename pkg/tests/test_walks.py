"""Walk builders, contraction, insertion partitions, and walk validation."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

import dualflow as df
from conftest import random_sub_tournament

WALK_POINTS = [
    (0, 0, 0, 0),
    (0, 1, 0, 1),
    (0, 1, "4/3", 1),
    (0, 1, "4/3", 2),
    (0, "2/3", "4/3", 2),
]


# ---------------------------------------------------------------------------
# contraction


def test_contract_example_edge(example):
    graph, costs = example
    contracted, new_costs, record = df.contract_edge(
        graph, costs, df.find_edge(graph, 0, 1)
    )
    assert contracted.node_count == 3
    # node 1 merged into node 0; old v2 -> 1, old v3 -> 2
    expected = {
        (2, 0): Fraction(-1),
        (1, 0): Fraction(0),
        (0, 2): Fraction(2),
        (0, 1): Fraction(4, 3),
        (1, 2): Fraction(10, 9),
    }
    assert dict(zip(contracted.edges, new_costs)) == expected
    assert record.node_map == (0, 0, 1, 2)
    assert record.shift == 0


def test_contract_two_node_graph():
    graph = df.Digraph(2, ((0, 1),))
    contracted, new_costs, record = df.contract_edge(graph, df.cost_vector([1]), 0)
    assert contracted.node_count == 1
    assert contracted.edges == ()
    assert new_costs == ()
    assert df.lift_point(record, df.Point.of(0)) == df.Point.of(0, 1)


def test_contract_negative_self_loop():
    graph = df.Digraph(2, ((0, 1), (1, 0)))
    with pytest.raises(df.NegativeSelfLoop):
        df.contract_edge(graph, df.cost_vector([1, -2]), 0)


def test_contract_face_empty():
    # making (0,1) tight forces u1 = 2, but the path 0->2->1 caps u1 at 0
    graph = df.Digraph(3, ((0, 1), (0, 2), (2, 1)))
    with pytest.raises(df.FaceEmpty):
        df.contract_edge(graph, df.cost_vector([2, 0, 0]), 0)


def test_contract_missing_edge(example):
    graph, costs = example
    with pytest.raises(df.EdgeMissing):
        df.contract_edge(graph, costs, 99)


def test_contract_anchor_removal(example):
    """Contracting an edge into the anchor relocates it with a shift."""
    graph, costs = example
    edge = df.find_edge(graph, 2, 0)  # head is the anchor
    contracted, new_costs, record = df.contract_edge(graph, costs, edge)
    assert record.removed_node == 0
    assert record.kept_node == 2
    assert record.shift == 0  # zero-cost edge: no numeric shift
    vertex = df.enumerate_vertices(contracted, new_costs).vertices[0]
    lifted = df.lift_point(record, vertex)
    assert lifted[df.ANCHOR] == 0
    assert df.is_feasible(graph, costs, lifted)
    assert edge in df.tight_graph(graph, costs, lifted)


# ---------------------------------------------------------------------------
# lift / project


def test_lift_walk_point(example):
    graph, costs = example
    _, _, record = df.contract_edge(graph, costs, df.find_edge(graph, 0, 1))
    lifted = df.lift_point(record, df.Point.of(0, "4/3", 2))
    assert lifted == df.Point.of(0, 1, "4/3", 2)


def test_lift_mechanical_for_infeasible_input(example):
    graph, costs = example
    _, _, record = df.contract_edge(graph, costs, df.find_edge(graph, 0, 1))
    # the contracted zero point is itself infeasible; the lift is mechanical
    lifted = df.lift_point(record, df.Point.of(0, 0, 0))
    assert lifted == df.Point.of(0, 1, 0, 0)


def test_lift_project_round_trip():
    rng = random.Random(61)
    done = 0
    while done < 20:
        graph, costs = random_sub_tournament(rng, rng.randint(2, 5))
        edge = rng.randrange(graph.edge_count)
        try:
            contracted, new_costs, record = df.contract_edge(graph, costs, edge)
        except df.FaceEmpty:
            continue
        done += 1
        for vertex in df.enumerate_vertices(contracted, new_costs).vertices:
            lifted = df.lift_point(record, vertex)
            assert df.is_feasible(graph, costs, lifted)
            assert edge in df.tight_graph(graph, costs, lifted)
            assert df.project_point(record, lifted) == vertex


def test_face_bijection():
    """Contracted vertices lift exactly onto the original vertices whose
    tight set contains the contracted edge."""
    rng = random.Random(67)
    done = 0
    while done < 25:
        graph, costs = random_sub_tournament(rng, rng.randint(2, 5))
        edge = rng.randrange(graph.edge_count)
        try:
            contracted, new_costs, record = df.contract_edge(graph, costs, edge)
        except df.FaceEmpty:
            continue
        done += 1
        lifted = sorted(
            df.lift_point(record, w).coords
            for w in df.enumerate_vertices(contracted, new_costs).vertices
        )
        on_face = sorted(
            v.coords
            for v in df.enumerate_vertices(graph, costs).vertices
            if edge in df.tight_graph(graph, costs, v)
        )
        assert lifted == on_face


# ---------------------------------------------------------------------------
# last_backward_edge


def test_last_backward_single_edge_path(example, near_vertex):
    graph, costs = example
    tree = df.tight_graph(graph, costs, near_vertex)
    edge, start_side, goal_side = df.last_backward_edge(graph, tree, 0, 3)
    assert edge == df.find_edge(graph, 3, 0)
    assert start_side == {0, 2}
    assert goal_side == {1, 3}


def test_last_backward_no_backward_edge():
    graph = df.Digraph(3, ((0, 1), (1, 2)))
    with pytest.raises(df.NoBackwardEdge):
        df.last_backward_edge(graph, frozenset({0, 1}), 0, 2)


def test_last_backward_other_target(example, near_vertex):
    graph, costs = example
    tree = df.tight_graph(graph, costs, near_vertex)
    edge, start_side, goal_side = df.last_backward_edge(graph, tree, 1, 3)
    assert edge == df.find_edge(graph, 3, 1)
    assert start_side == {1}
    assert goal_side == {0, 2, 3}


# ---------------------------------------------------------------------------
# insertion partitions


def test_insertion_partition_from_zero_vertex(example, near_vertex):
    graph, costs = example
    edge = df.find_edge(graph, 0, 3)
    circuit, sign = df.build_insertion_partition(graph, costs, near_vertex, edge)
    # nothing reaches v3 by tight paths, and v1, v2 stay connected to v0
    assert sorted(circuit.s_set) == [3]
    assert sign == 1
    step = df.max_step(graph, costs, near_vertex, circuit, sign)
    landed = df.apply_circuit_step(graph, costs, near_vertex, step)
    assert df.slack(graph, costs, landed, edge) < df.slack(
        graph, costs, near_vertex, edge
    )


def test_insertion_partition_absorbs_tight_chain():
    # tight edge 1 -> 2 pulls node 1 onto the goal side of edge (0, 2)
    graph = df.Digraph(3, ((0, 1), (1, 2), (0, 2)))
    costs = df.cost_vector([1, 0, 3])
    point = df.Point.of(0, "1/2", "1/2")
    circuit, sign = df.build_insertion_partition(
        graph, costs, point, df.find_edge(graph, 0, 2)
    )
    assert sorted(circuit.s_set) == [1, 2]
    assert sign == 1


def test_insertion_partition_full_absorption():
    # every node but the tail reaches the head by tight edges
    graph = df.Digraph(3, ((0, 1), (2, 1)))
    costs = df.cost_vector([1, 0])
    point = df.Point.of(0, 0, 0)
    circuit, sign = df.build_insertion_partition(
        graph, costs, point, df.find_edge(graph, 0, 1)
    )
    assert sorted(circuit.s_set) == [1, 2]
    assert sign == 1


def test_insertion_partition_strictly_reduces_slack(example, near_vertex):
    graph, costs = example
    edge = df.find_edge(graph, 1, 3)
    circuit, sign = df.build_insertion_partition(graph, costs, near_vertex, edge)
    step = df.max_step(graph, costs, near_vertex, circuit, sign)
    landed = df.apply_circuit_step(graph, costs, near_vertex, step)
    assert df.slack(graph, costs, landed, edge) < Fraction(4, 3)


def test_insertion_partition_path_conflict():
    # a tight directed path 0 -> 1 -> 2 while asking to insert loose (0, 2)
    graph = df.Digraph(3, ((0, 1), (1, 2), (0, 2)))
    costs = df.cost_vector([0, 0, 5])
    point = df.Point.of(0, 0, 0)
    with pytest.raises(df.PathConflict):
        df.build_insertion_partition(graph, costs, point, df.find_edge(graph, 0, 2))


def test_insertion_partition_rejects_tight_edge(example, near_vertex):
    graph, costs = example
    with pytest.raises(df.ValidationError):
        df.build_insertion_partition(
            graph, costs, near_vertex, df.find_edge(graph, 3, 0)
        )


def test_insertion_partition_negative_sign():
    # inserting an edge whose goal side captures the anchor flips the sign
    graph = df.Digraph(2, ((1, 0), (0, 1)))
    costs = df.cost_vector([1, 1])
    circuit, sign = df.build_insertion_partition(
        graph, costs, df.Point.of(0, 0), df.find_edge(graph, 1, 0)
    )
    assert sign == -1
    assert sorted(circuit.s_set) == [1]


# ---------------------------------------------------------------------------
# walk builders


def test_edge_walk_example(example, near_vertex, far_vertex):
    graph, costs = example
    walk = df.edge_walk(graph, costs, near_vertex, far_vertex)
    assert walk.points[0] == near_vertex
    assert walk.points[-1] == far_vertex
    assert 4 <= walk.length <= 10
    assert df.validate_walk(graph, costs, walk).valid


def test_edge_walk_trivial(example, near_vertex):
    graph, costs = example
    walk = df.edge_walk(graph, costs, near_vertex, near_vertex)
    assert walk.length == 0
    assert df.validate_walk(graph, costs, walk).valid


def test_edge_walk_adjacent_pair(example):
    graph, costs = example
    u, v = df.Point.of(*WALK_POINTS[0]), df.Point.of(*WALK_POINTS[1])
    walk = df.edge_walk(graph, costs, u, v)
    assert walk.length == 1


def test_edge_walk_rejects_degenerate_instance():
    graph = df.Digraph(2, ((0, 1), (1, 0)))
    costs = df.cost_vector([1, -1])
    vertex = df.Point.of(0, 1)
    with pytest.raises(df.DegenerateInstance):
        df.edge_walk(graph, costs, vertex, vertex)


def test_circuit_walk_example(example, near_vertex, far_vertex):
    graph, costs = example
    walk = df.circuit_walk(graph, costs, near_vertex, far_vertex)
    assert walk.points[0] == near_vertex
    assert walk.points[-1] == far_vertex
    assert 4 <= walk.length <= 6
    assert df.validate_walk(graph, costs, walk).valid


def test_circuit_walk_trivial(example, far_vertex):
    graph, costs = example
    walk = df.circuit_walk(graph, costs, far_vertex, far_vertex)
    assert walk.length == 0


def test_circuit_walk_degenerate_singleton():
    graph = df.Digraph(2, ((0, 1), (1, 0)))
    costs = df.cost_vector([1, -1])
    vertex = df.Point.of(0, 1)
    walk = df.circuit_walk(graph, costs, vertex, vertex)
    assert walk.length == 0


def test_circuit_walk_on_degenerate_instance():
    """Degeneracy is tolerated in circuit mode."""
    graph = df.Digraph(3, ((0, 1), (1, 2), (0, 2), (2, 0)))
    costs = df.cost_vector([1, 1, 2, -2])  # (0,2) tight whenever (0,1),(1,2) are
    vertices = df.enumerate_vertices(graph, costs).vertices
    report = df.degeneracy_report(graph, costs)
    assert not report.nondegenerate
    for u in vertices:
        for v in vertices:
            walk = df.circuit_walk(graph, costs, u, v)
            assert walk.points[-1] == v
            assert df.validate_walk(graph, costs, walk).valid
            assert walk.length <= 3


def test_builders_respect_bounds_random():
    rng = random.Random(71)
    for _ in range(30):
        n = rng.randint(3, 5)
        graph, costs = random_sub_tournament(rng, n)
        vertices = df.enumerate_vertices(graph, costs).vertices
        nondegenerate = df.degeneracy_report(graph, costs).nondegenerate
        edge_bound = min((n - 1) * graph.edge_count, (n**3 - n) // 6)
        circuit_bound = n * (n - 1) // 2
        for u in vertices:
            for v in vertices:
                walk = df.circuit_walk(graph, costs, u, v)
                assert walk.length <= circuit_bound
                assert df.validate_walk(graph, costs, walk).valid
                oracle_length = df.circuit_distance(graph, costs, u, v).length
                assert oracle_length <= walk.length
                if nondegenerate and u != v:
                    edge = df.edge_walk(graph, costs, u, v)
                    assert edge.length <= edge_bound
                    assert df.validate_walk(graph, costs, edge).valid
                    assert (
                        df.combinatorial_distance(graph, costs, u, v).length
                        <= edge.length
                    )


def test_edge_walk_succeeds_after_perturbation():
    graph = df.Digraph(3, ((0, 1), (1, 2), (0, 2), (2, 0)))
    costs = df.cost_vector([1, 1, 2, -2])
    assert not df.degeneracy_report(graph, costs).nondegenerate
    jiggled = df.perturb_costs(graph, costs, seed=13)
    if not df.feasibility_status(graph, jiggled).feasible:
        pytest.skip("perturbation broke feasibility for this seed")
    assert df.degeneracy_report(graph, jiggled).nondegenerate
    vertices = df.enumerate_vertices(graph, jiggled).vertices
    for u in vertices:
        for v in vertices:
            walk = df.edge_walk(graph, jiggled, u, v)
            assert df.validate_walk(graph, jiggled, walk).valid


# ---------------------------------------------------------------------------
# validate_walk


def test_validate_known_walk_both_modes(example):
    graph, costs = example
    points = [df.Point.of(*p) for p in WALK_POINTS]
    for mode in ("edge", "circuit"):
        walk = df.walk_from_points(graph, costs, points, mode)
        assert df.validate_walk(graph, costs, walk).valid


def test_validate_rejects_non_circuit_difference(example, near_vertex):
    graph, costs = example
    with pytest.raises(df.ValidationError):
        df.walk_from_points(
            graph, costs, [near_vertex, df.Point.of(0, 1, "4/3", 1)], "circuit"
        )


def test_validate_reports_non_circuit_difference(example, near_vertex):
    graph, costs = example
    # a genuine step recorded against the wrong destination
    step = df.max_step(
        graph, costs, near_vertex, df.PartitionCircuit(frozenset({3})), 1
    )
    walk = df.Walk((near_vertex, df.Point.of(0, 1, "4/3", 1)), (step,), "circuit")
    report = df.validate_walk(graph, costs, walk)
    assert not report.valid
    assert "0/1 direction" in report.violation


def test_validate_rejects_truncated_step(example, near_vertex):
    graph, costs = example
    circuit = df.PartitionCircuit(frozenset({3}))
    step = df.max_step(graph, costs, near_vertex, circuit, 1)
    halfway = df.Point.of(0, 0, 0, step.epsilon / 2)
    truncated = df.SignedStep(circuit, 1, step.epsilon / 2, step.entering_edges)
    walk = df.Walk((near_vertex, halfway), (truncated,), "circuit")
    report = df.validate_walk(graph, costs, walk)
    assert not report.valid
    assert "not maximal" in report.violation


def test_validate_rejects_infeasible_point(example, near_vertex):
    graph, costs = example
    walk = df.Walk((df.Point.of(0, 0, 0, 3),), (), "circuit")
    report = df.validate_walk(graph, costs, walk)
    assert not report.valid
    assert "infeasible" in report.violation


def test_validate_edge_mode_needs_vertices(example, near_vertex):
    graph, costs = example
    circuit = df.PartitionCircuit(frozenset({3}))
    step = df.max_step(graph, costs, near_vertex, circuit, 1)
    landed = df.apply_circuit_step(graph, costs, near_vertex, step)
    walk = df.Walk((near_vertex, landed), (step,), "edge")
    report = df.validate_walk(graph, costs, walk)
    assert not report.valid
    assert "not a vertex" in report.violation


# ---------------------------------------------------------------------------
# perturbation


def test_perturb_costs_shape_and_size(example):
    graph, costs = example
    jiggled = df.perturb_costs(graph, costs, seed=5)
    assert len(jiggled) == len(costs)
    for before, after in zip(costs, jiggled):
        assert 0 <= after - before < 1
        assert (after - before).denominator <= 10**9
