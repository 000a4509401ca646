"""Core model: directed graphs with exact rational costs and the polyhedron
``{u : u_head - u_tail <= cost for every edge, u[0] = 0}``.

All numeric data is :class:`fractions.Fraction`; node 0 is always the anchor
whose coordinate is pinned to zero.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import (
    DimensionMismatch,
    FormatError,
    InfeasiblePoint,
    InfeasibleTree,
    InstanceTooLarge,
    ValidationError,
)

Rational = Fraction

ANCHOR = 0

DEFAULT_TREE_CAP = 10**6


def rational(value: int | str | Fraction) -> Fraction:
    """Parse a rational from an integer, ``P/Q`` string, or Fraction.

    Rejects zero or negative denominators in ``P/Q`` form.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    text = value.strip()
    if "/" in text:
        head, _, tail = text.partition("/")
        try:
            num, den = int(head), int(tail)
        except ValueError as exc:
            raise FormatError(f"bad rational {text!r}") from exc
        if den == 0:
            raise ValidationError(f"zero denominator in {text!r}")
        if den < 0:
            raise ValidationError(f"negative denominator in {text!r}")
        return Fraction(num, den)
    try:
        return Fraction(int(text))
    except ValueError as exc:
        raise FormatError(f"bad rational {text!r}") from exc


def rational_str(value: Fraction) -> str:
    """Canonical text form: ``P`` for integers, ``P/Q`` otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Digraph:
    """Directed graph on nodes ``0..node_count-1`` with node 0 as anchor.

    No self-loops, no duplicate (tail, head) pairs, underlying undirected
    graph connected.  Antiparallel edge pairs are allowed.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.node_count < 1:
            raise ValidationError("graph needs at least one node")
        seen = set()
        for tail, head in self.edges:
            if not (0 <= tail < self.node_count and 0 <= head < self.node_count):
                raise ValidationError(f"edge ({tail},{head}) out of range")
            if tail == head:
                raise ValidationError(f"self-loop at node {tail}")
            if (tail, head) in seen:
                raise ValidationError(f"duplicate edge ({tail},{head})")
            seen.add((tail, head))
        if not _covers_all(self.node_count, self.edges, range(self.node_count)):
            raise ValidationError("underlying undirected graph is disconnected")

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def _covers_all(
    node_count: int,
    edges: Iterable[tuple[int, int]],
    nodes: Iterable[int],
) -> bool:
    """True iff ``nodes`` is nonempty and connected via the given undirected edges."""
    nodes = set(nodes)
    if not nodes:
        return False
    adj: dict[int, list[int]] = {v: [] for v in nodes}
    for tail, head in edges:
        if tail in nodes and head in nodes:
            adj[tail].append(head)
            adj[head].append(tail)
    start = next(iter(nodes))
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen == nodes


@lru_cache(maxsize=256)
def underlying_adjacency(graph: Digraph) -> tuple[tuple[int, ...], ...]:
    """Undirected neighbor lists (deduplicated) of the graph."""
    adj: list[set[int]] = [set() for _ in range(graph.node_count)]
    for tail, head in graph.edges:
        adj[tail].add(head)
        adj[head].add(tail)
    return tuple(tuple(sorted(a)) for a in adj)


def component_count(graph: Digraph, edge_indices: Iterable[int]) -> int:
    """Number of connected components of the subgraph on all nodes with the
    given undirected edges; isolated nodes count."""
    parent = list(range(graph.node_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = graph.node_count
    for i in edge_indices:
        tail, head = graph.edges[i]
        root_t, root_h = find(tail), find(head)
        if root_t != root_h:
            parent[root_t] = root_h
            count -= 1
    return count


def connected_in_underlying(graph: Digraph, nodes: Iterable[int]) -> bool:
    """True iff the node subset induces a connected underlying subgraph."""
    nodes = set(nodes)
    if not nodes:
        return False
    adj = underlying_adjacency(graph)
    start = next(iter(nodes))
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w in nodes and w not in seen:
                seen.add(w)
                queue.append(w)
    return seen == nodes


CostVector = tuple[Fraction, ...]


def cost_vector(values: Iterable[int | str | Fraction]) -> CostVector:
    return tuple(rational(v) for v in values)


def check_costs(graph: Digraph, costs: Sequence[Fraction]) -> None:
    if len(costs) != graph.edge_count:
        raise DimensionMismatch(
            f"{len(costs)} costs for {graph.edge_count} edges"
        )


@dataclass(frozen=True)
class Point:
    """A candidate member of the polyhedron; coordinate 0 is pinned to zero."""

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coords:
            raise ValidationError("empty point")
        if self.coords[ANCHOR] != 0:
            raise ValidationError("anchor coordinate must be zero")

    @classmethod
    def of(cls, *values: int | str | Fraction) -> "Point":
        return cls(tuple(rational(v) for v in values))

    def __getitem__(self, index: int) -> Fraction:
        return self.coords[index]

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


SpanningTree = frozenset[int]

TightEdgeSet = frozenset[int]


# ---------------------------------------------------------------------------
# file format


def parse_graph(text: str) -> tuple[Digraph, CostVector]:
    """Parse the line-oriented graph format.

    Comment lines start with ``#``; the first payload line is ``nodes N``;
    every following line is ``edge TAIL HEAD COST`` with COST an integer or
    ``P/Q``.
    """
    node_count: int | None = None
    edges: list[tuple[int, int]] = []
    costs: list[Fraction] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if node_count is None:
            if tokens[0] != "nodes" or len(tokens) != 2:
                raise FormatError(f"line {lineno}: expected 'nodes N'")
            try:
                node_count = int(tokens[1])
            except ValueError as exc:
                raise FormatError(f"line {lineno}: bad node count") from exc
            if node_count < 1:
                raise ValidationError(f"line {lineno}: need at least one node")
            continue
        if tokens[0] != "edge" or len(tokens) != 4:
            raise FormatError(f"line {lineno}: expected 'edge TAIL HEAD COST'")
        try:
            tail, head = int(tokens[1]), int(tokens[2])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: bad node index") from exc
        edges.append((tail, head))
        costs.append(rational(tokens[3]))
    if node_count is None:
        raise FormatError("missing 'nodes N' line")
    return Digraph(node_count, tuple(edges)), tuple(costs)


def serialize_graph(graph: Digraph, costs: Sequence[Fraction]) -> str:
    """Inverse of :func:`parse_graph`; normalizes whitespace and rationals,
    preserves edge order."""
    check_costs(graph, costs)
    lines = [f"nodes {graph.node_count}"]
    for (tail, head), cost in zip(graph.edges, costs):
        lines.append(f"edge {tail} {head} {rational_str(cost)}")
    return "\n".join(lines) + "\n"


def load_graph(path: str) -> tuple[Digraph, CostVector]:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_graph(handle.read())


def save_graph(path: str, graph: Digraph, costs: Sequence[Fraction]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize_graph(graph, costs))


# ---------------------------------------------------------------------------
# feasibility and tightness


def slack(
    graph: Digraph, costs: Sequence[Fraction], point: Point, edge_index: int
) -> Fraction:
    """Slack of one edge inequality: ``cost - (u_head - u_tail)``."""
    tail, head = graph.edges[edge_index]
    return costs[edge_index] - point[head] + point[tail]


def is_feasible(graph: Digraph, costs: Sequence[Fraction], point: Point) -> bool:
    """True iff every edge inequality holds exactly."""
    check_costs(graph, costs)
    if len(point) != graph.node_count:
        raise DimensionMismatch(
            f"point has {len(point)} coords for {graph.node_count} nodes"
        )
    return all(
        point[head] - point[tail] <= costs[i]
        for i, (tail, head) in enumerate(graph.edges)
    )


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: Point | None


def feasibility_status(graph: Digraph, costs: Sequence[Fraction]) -> FeasibilityResult:
    """Decide whether the polyhedron is nonempty.

    Runs Bellman-Ford relaxation with an implicit zero-label source; the
    system is infeasible exactly when a negative-cost directed cycle exists.
    On success the shifted labels give a feasible witness point.
    """
    check_costs(graph, costs)
    labels = [Fraction(0)] * graph.node_count
    changed = True
    for _ in range(graph.node_count - 1):
        if not changed:
            break
        changed = False
        for i, (tail, head) in enumerate(graph.edges):
            candidate = labels[tail] + costs[i]
            if candidate < labels[head]:
                labels[head] = candidate
                changed = True
    for i, (tail, head) in enumerate(graph.edges):
        if labels[tail] + costs[i] < labels[head]:
            return FeasibilityResult(False, None)
    anchor_label = labels[ANCHOR]
    witness = Point(tuple(lab - anchor_label for lab in labels))
    return FeasibilityResult(True, witness)


def tight_graph(
    graph: Digraph, costs: Sequence[Fraction], point: Point
) -> TightEdgeSet:
    """Indices of edges whose inequality is tight at the point."""
    check_costs(graph, costs)
    if len(point) != graph.node_count:
        raise DimensionMismatch(
            f"point has {len(point)} coords for {graph.node_count} nodes"
        )
    tight = []
    for i, (tail, head) in enumerate(graph.edges):
        gap = costs[i] - point[head] + point[tail]
        if gap < 0:
            raise InfeasiblePoint("tight_graph requires a feasible point")
        if gap == 0:
            tight.append(i)
    return frozenset(tight)


def check_spanning_tree(graph: Digraph, tree: Iterable[int]) -> SpanningTree:
    """Validate a set of edge indices as a spanning tree of the graph."""
    tree = frozenset(tree)
    for i in tree:
        if not (0 <= i < graph.edge_count):
            raise ValidationError(f"edge index {i} out of range")
    if len(tree) != graph.node_count - 1:
        raise ValidationError(
            f"tree has {len(tree)} edges, expected {graph.node_count - 1}"
        )
    if graph.node_count > 1 and not _covers_all(
        graph.node_count, [graph.edges[i] for i in tree], range(graph.node_count)
    ):
        raise ValidationError("edge set does not span the graph")
    return tree


def vertex_from_tree(
    graph: Digraph, costs: Sequence[Fraction], tree: Iterable[int]
) -> Point:
    """The unique point with anchor zero making all tree edges tight.

    Raises :class:`InfeasibleTree` when that point violates a non-tree
    inequality.
    """
    check_costs(graph, costs)
    tree = check_spanning_tree(graph, tree)
    coords: list[Fraction | None] = [None] * graph.node_count
    coords[ANCHOR] = Fraction(0)
    incident: dict[int, list[int]] = {v: [] for v in range(graph.node_count)}
    for i in tree:
        tail, head = graph.edges[i]
        incident[tail].append(i)
        incident[head].append(i)
    queue = deque([ANCHOR])
    while queue:
        v = queue.popleft()
        for i in incident[v]:
            tail, head = graph.edges[i]
            other = head if tail == v else tail
            if coords[other] is None:
                # tight edge: u_head - u_tail = cost
                if tail == v:
                    coords[other] = coords[v] + costs[i]
                else:
                    coords[other] = coords[v] - costs[i]
                queue.append(other)
    point = Point(tuple(coords))  # type: ignore[arg-type]
    if not is_feasible(graph, costs, point):
        raise InfeasibleTree(
            f"tree point {tuple(map(rational_str, point))} violates an inequality"
        )
    return point


def is_vertex(graph: Digraph, costs: Sequence[Fraction], point: Point) -> bool:
    """True iff the tight graph touches every node and is connected."""
    tight = tight_graph(graph, costs, point)  # validates feasibility
    if graph.node_count == 1:
        return True
    return _covers_all(
        graph.node_count, [graph.edges[i] for i in tight], range(graph.node_count)
    )


# ---------------------------------------------------------------------------
# spanning tree enumeration


def count_spanning_trees(graph: Digraph) -> int:
    """Number of spanning trees of the underlying multigraph (matrix-tree)."""
    n = graph.node_count
    if n == 1:
        return 1
    # integer Laplacian with multiplicities; drop the anchor row/column
    lap = [[0] * n for _ in range(n)]
    for tail, head in graph.edges:
        lap[tail][tail] += 1
        lap[head][head] += 1
        lap[tail][head] -= 1
        lap[head][tail] -= 1
    minor = [row[1:] for row in lap[1:]]
    return _int_determinant(minor)


def _int_determinant(matrix: list[list[int]]) -> int:
    """Bareiss fraction-free elimination; exact for integer matrices."""
    m = [row[:] for row in matrix]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def enumerate_spanning_trees(
    graph: Digraph, cap: int = DEFAULT_TREE_CAP
) -> Iterator[SpanningTree]:
    """Yield every spanning tree (as a frozenset of edge indices).

    Counts first via the matrix-tree theorem and raises
    :class:`InstanceTooLarge` when the count exceeds ``cap``.
    """
    total = count_spanning_trees(graph)
    if total > cap:
        raise InstanceTooLarge(f"{total} spanning trees exceed cap {cap}")
    n = graph.node_count
    if n == 1:
        yield frozenset()
        return
    m = graph.edge_count

    def rec(index: int, chosen: list[int], parent: list[int]) -> Iterator[SpanningTree]:
        if len(chosen) == n - 1:
            yield frozenset(chosen)
            return
        if index == m:
            return
        tail, head = graph.edges[index]
        root_t = _find(parent, tail)
        root_h = _find(parent, head)
        if root_t == root_h:
            # cycle edge: skipping it cannot disconnect anything
            yield from rec(index + 1, chosen, parent)
            return
        # include the edge
        merged = parent[:]
        merged[root_t] = root_h
        chosen.append(index)
        yield from rec(index + 1, chosen, merged)
        chosen.pop()
        # exclude it, but only if the rest can still span
        if _spannable(graph, parent, index + 1):
            yield from rec(index + 1, chosen, parent)

    yield from rec(0, [], list(range(n)))


def _find(parent: list[int], v: int) -> int:
    while parent[v] != v:
        parent[v] = parent[parent[v]]
        v = parent[v]
    return v


def _spannable(graph: Digraph, parent: list[int], start: int) -> bool:
    """Can the components in ``parent`` still be joined by edges >= start?"""
    probe = parent[:]
    components = len({_find(probe, v) for v in range(graph.node_count)})
    for i in range(start, graph.edge_count):
        tail, head = graph.edges[i]
        rt, rh = _find(probe, tail), _find(probe, head)
        if rt != rh:
            probe[rt] = rh
            components -= 1
            if components == 1:
                return True
    return components == 1


# ---------------------------------------------------------------------------
# degeneracy


@dataclass(frozen=True)
class DegeneracyReport:
    nondegenerate: bool
    witnesses: tuple[Point, ...]


def degeneracy_report(
    graph: Digraph, costs: Sequence[Fraction], tree_cap: int = DEFAULT_TREE_CAP
) -> DegeneracyReport:
    """Check whether every vertex has exactly ``node_count - 1`` tight edges.

    Witnesses are the vertices whose tight graphs contain an undirected
    cycle, i.e. carry extra tight inequalities.
    """
    check_costs(graph, costs)
    witnesses: list[Point] = []
    seen: set[tuple[Fraction, ...]] = set()
    for tree in enumerate_spanning_trees(graph, cap=tree_cap):
        try:
            vertex = vertex_from_tree(graph, costs, tree)
        except InfeasibleTree:
            continue
        if vertex.coords in seen:
            continue
        seen.add(vertex.coords)
        tight = tight_graph(graph, costs, vertex)
        if len(tight) > graph.node_count - 1:
            witnesses.append(vertex)
    witnesses.sort(key=lambda p: p.coords)
    return DegeneracyReport(not witnesses, tuple(witnesses))
