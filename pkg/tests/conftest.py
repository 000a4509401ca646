"""Shared fixtures and independent check helpers for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

import dualflow as df


@pytest.fixture(scope="session")
def example():
    return df.example_graph()


@pytest.fixture(scope="session")
def near_vertex():
    return df.Point.of(0, 0, 0, 0)


@pytest.fixture(scope="session")
def far_vertex():
    return df.Point.of(0, "2/3", "4/3", 2)


def random_sub_tournament(
    rng: random.Random, size: int, skip: float = 0.5
) -> tuple[df.Digraph, df.CostVector]:
    """Connected orientation of a random subset of the complete graph with
    nonnegative rational costs (denominators up to 20, values in [0, 3])."""
    while True:
        edges = []
        for i in range(size):
            for j in range(i + 1, size):
                roll = rng.random()
                if roll < skip:
                    continue
                edges.append((i, j) if roll < (1 + skip) / 2 else (j, i))
        try:
            graph = df.Digraph(size, tuple(edges))
        except df.ValidationError:
            continue
        costs = []
        for _ in edges:
            den = rng.randint(1, 20)
            costs.append(Fraction(rng.randint(0, 3 * den), den))
        return graph, tuple(costs)


def rational_rank(rows: list[list[Fraction]]) -> int:
    """Rank of a rational matrix by Gaussian elimination (independent of the
    package's own linear algebra, which there is none of)."""
    matrix = [row[:] for row in rows]
    rank = 0
    cols = len(matrix[0]) if matrix else 0
    for col in range(cols):
        pivot = None
        for r in range(rank, len(matrix)):
            if matrix[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        factor = matrix[rank][col]
        matrix[rank] = [x / factor for x in matrix[rank]]
        for r in range(len(matrix)):
            if r != rank and matrix[r][col] != 0:
                scale = matrix[r][col]
                matrix[r] = [a - scale * b for a, b in zip(matrix[r], matrix[rank])]
        rank += 1
    return rank


def constraint_rows(
    graph: df.Digraph, edge_indices, with_anchor: bool = True
) -> list[list[Fraction]]:
    """Normal vectors of tight edge constraints, optionally plus the anchor row."""
    rows = []
    for i in edge_indices:
        tail, head = graph.edges[i]
        row = [Fraction(0)] * graph.node_count
        row[head] += 1
        row[tail] -= 1
        rows.append(row)
    if with_anchor:
        anchor_row = [Fraction(0)] * graph.node_count
        anchor_row[df.ANCHOR] = Fraction(1)
        rows.append(anchor_row)
    return rows


def definitional_is_vertex(graph: df.Digraph, costs, point: df.Point) -> bool:
    """A feasible point is a vertex iff its tight constraints pin it down:
    the tight normals plus the anchor row must have full rank."""
    tight = df.tight_graph(graph, costs, point)
    return rational_rank(constraint_rows(graph, tight)) == graph.node_count


def geometric_adjacency(graph: df.Digraph, costs, u: df.Point, v: df.Point) -> bool:
    """Vertices span an edge iff their common tight constraints cut the space
    down to one dimension (rank node_count - 1 including the anchor row)."""
    common = df.tight_graph(graph, costs, u) & df.tight_graph(graph, costs, v)
    return rational_rank(constraint_rows(graph, common)) == graph.node_count - 1
