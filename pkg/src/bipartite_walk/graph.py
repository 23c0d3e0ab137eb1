"""Complete bipartite graphs, marked-vertex configurations and arc indexing.

Vertices are numbered ``X = {0..n1-1}`` and ``Y = {n1..n1+n2-1}``.  Directed
arcs are laid out tail-major: every X-tailed arc first (tail ascending, head
ascending), then every Y-tailed arc.  With this layout the amplitudes of the
X-tailed arcs reshape to an ``(n1, n2)`` array whose row ``x`` is the coin
block of vertex ``x``, and likewise ``(n2, n1)`` for Y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple


class InvalidArgument(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class GraphSpec:
    """The complete bipartite graph K(n1, n2)."""

    n1: int
    n2: int

    def __post_init__(self) -> None:
        for name, value in (("n1", self.n1), ("n2", self.n2)):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InvalidArgument(f"{name} must be a positive integer, got {value!r}")

    @property
    def n_vertices(self) -> int:
        return self.n1 + self.n2

    @property
    def arc_count(self) -> int:
        return 2 * self.n1 * self.n2

    @property
    def x_arcs(self) -> int:
        """Number of X-tailed arcs; they occupy indices ``[0, x_arcs)``."""
        return self.n1 * self.n2

    def in_x(self, v: int) -> bool:
        self._check_vertex(v)
        return v < self.n1

    def degree(self, v: int) -> int:
        return self.n2 if self.in_x(v) else self.n1

    def neighbors(self, v: int) -> range:
        if self.in_x(v):
            return range(self.n1, self.n1 + self.n2)
        return range(0, self.n1)

    def arc_index(self, tail: int, head: int) -> int:
        """Dense index of the arc ``tail -> head``."""
        if self.in_x(tail) == self.in_x(head):
            raise InvalidArgument(f"({tail}, {head}) is not an arc: endpoints in the same set")
        if tail < self.n1:
            return tail * self.n2 + (head - self.n1)
        return self.x_arcs + (tail - self.n1) * self.n1 + head

    def arc(self, index: int) -> "ArcIndex":
        """Inverse of :meth:`arc_index`."""
        if not 0 <= index < self.arc_count:
            raise InvalidArgument(f"arc index {index} outside [0, {self.arc_count})")
        if index < self.x_arcs:
            tail, j = divmod(index, self.n2)
            return ArcIndex(tail, self.n1 + j, index)
        i, head = divmod(index - self.x_arcs, self.n1)
        return ArcIndex(self.n1 + i, head, index)

    def reverse_index(self, index: int) -> int:
        a = self.arc(index)
        return self.arc_index(a.head, a.tail)

    def arcs(self) -> Iterable["ArcIndex"]:
        for i in range(self.arc_count):
            yield self.arc(i)

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n_vertices:
            raise InvalidArgument(f"vertex {v} outside [0, {self.n_vertices})")


class ArcIndex(NamedTuple):
    tail: int
    head: int
    dense_index: int


@dataclass(frozen=True)
class MarkConfig:
    """Marked vertices of a :class:`GraphSpec`, split by partite set.

    ``marked_x`` holds indices into X (``0..n1-1``) and ``marked_y`` indices
    into Y (``0..n2-1``, i.e. vertex id minus ``n1``).
    """

    graph: GraphSpec
    marked_x: tuple[int, ...]
    marked_y: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        g = self.graph
        for name, marked, size in (("X", self.marked_x, g.n1), ("Y", self.marked_y, g.n2)):
            if len(set(marked)) != len(marked):
                raise InvalidArgument(f"duplicate marked vertex in set {name}")
            if any(not 0 <= m < size for m in marked):
                raise InvalidArgument(f"marked vertex outside set {name} of size {size}")
        if not self.marked_x and not self.marked_y:
            raise InvalidArgument("at least one vertex must be marked (k1 + k2 >= 1)")

    @property
    def k1(self) -> int:
        return len(self.marked_x)

    @property
    def k2(self) -> int:
        return len(self.marked_y)

    def class_sizes(self) -> dict[str, int]:
        """Sizes of the vertex classes: a, b marked (X, Y); c, d unmarked (X, Y).

        With marks in X only, every Y vertex is adjacent to a marked vertex and
        the classes collapse to a (marked X), b (all of Y), c (unmarked X).
        """
        g = self.graph
        if self.k2 == 0:
            return {"a": self.k1, "b": g.n2, "c": g.n1 - self.k1}
        return {"a": self.k1, "b": self.k2, "c": g.n1 - self.k1, "d": g.n2 - self.k2}

    def is_marked(self, v: int) -> bool:
        if self.graph.in_x(v):
            return v in self.marked_x
        return (v - self.graph.n1) in self.marked_y


def build_graph(n1: int, n2: int) -> GraphSpec:
    return GraphSpec(n1, n2)


def mark(graph: GraphSpec, k1: int, k2: int = 0) -> MarkConfig:
    """Mark the first ``k1`` vertices of X and the first ``k2`` of Y."""
    if not 0 <= k1 <= graph.n1:
        raise InvalidArgument(f"k1={k1} outside [0, n1={graph.n1}]")
    if not 0 <= k2 <= graph.n2:
        raise InvalidArgument(f"k2={k2} outside [0, n2={graph.n2}]")
    return MarkConfig(graph, tuple(range(k1)), tuple(range(k2)))


def mark_vertices(graph: GraphSpec, vertices: Iterable[int]) -> MarkConfig:
    """Mark an arbitrary set of vertex ids."""
    xs, ys = [], []
    for v in sorted(set(vertices)):
        if graph.in_x(v):
            xs.append(v)
        else:
            ys.append(v - graph.n1)
    return MarkConfig(graph, tuple(xs), tuple(ys))
