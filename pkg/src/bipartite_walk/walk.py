"""Full-space coined quantum walk search, one step being ``U = S C Q``.

Nothing here materializes a ``2*n1*n2``-square matrix.  Using the tail-major
arc layout of :mod:`bipartite_walk.graph`, the X-tailed amplitudes are an
``(n1, n2)`` array ``ax[x, y] = <x y|psi>`` and the Y-tailed ones an
``(n2, n1)`` array ``ay[y, x] = <y x|psi>``.  Then

* the oracle negates rows of marked vertices,
* the Grover coin maps each row ``r`` to ``2*mean(r) - r``,
* the flip-flop shift is ``(ax, ay) -> (ay.T, ax.T)``,

so a step costs O(arcs).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import GraphSpec, InvalidArgument, MarkConfig

NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class WalkState:
    """Unit-norm amplitude vector over the directed arcs of ``graph``."""

    amplitudes: np.ndarray
    graph: GraphSpec

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.graph.arc_count,):
            raise InvalidArgument(
                f"expected {self.graph.arc_count} amplitudes, got shape {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidArgument(f"state is not normalized (norm {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    def blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """Views ``(ax, ay)`` of shapes ``(n1, n2)`` and ``(n2, n1)``."""
        return _split(self.amplitudes, self.graph)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def vertex_probabilities(self) -> np.ndarray:
        """Position-measurement distribution (coin marginalized)."""
        ax, ay = self.blocks()
        return np.concatenate([np.sum(np.abs(ax) ** 2, axis=1), np.sum(np.abs(ay) ** 2, axis=1)])


@dataclass(frozen=True, eq=False)
class ProbabilityTrace:
    """Success probabilities per timestep, split by partite set.

    ``t`` starts at 0, so a trace of ``steps`` steps has ``steps + 1`` rows.
    """

    t: np.ndarray
    p_x: np.ndarray
    p_y: np.ndarray
    p_total: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.t)
        if not (len(self.p_x) == len(self.p_y) == len(self.p_total) == n):
            raise InvalidArgument("trace columns have different lengths")
        if n and np.max(np.abs(self.p_total - self.p_x - self.p_y)) > 1e-12:
            raise InvalidArgument("p_total != p_x + p_y")
        for col in (self.p_x, self.p_y, self.p_total):
            if n and (col.min() < -1e-12 or col.max() > 1 + 1e-12):
                raise InvalidArgument("probability outside [0, 1]")

    @classmethod
    def from_columns(cls, p_x, p_y) -> "ProbabilityTrace":
        p_x = np.asarray(p_x, dtype=float)
        p_y = np.asarray(p_y, dtype=float)
        return cls(np.arange(len(p_x)), p_x, p_y, p_x + p_y)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def rows(self) -> list[tuple[int, float, float, float]]:
        return [
            (int(t), float(a), float(b), float(c))
            for t, a, b, c in zip(self.t, self.p_x, self.p_y, self.p_total)
        ]

    def max_deviation(self, other: "ProbabilityTrace") -> float:
        if len(self) != len(other):
            raise InvalidArgument("traces have different lengths")
        return float(
            max(
                np.max(np.abs(self.p_x - other.p_x)),
                np.max(np.abs(self.p_y - other.p_y)),
                np.max(np.abs(self.p_total - other.p_total)),
            )
        )


def _split(vec: np.ndarray, g: GraphSpec) -> tuple[np.ndarray, np.ndarray]:
    nx = g.x_arcs
    return vec[:nx].reshape(g.n1, g.n2), vec[nx:].reshape(g.n2, g.n1)


def _check_marks(g: GraphSpec, marks: MarkConfig) -> None:
    if marks.graph != g:
        raise InvalidArgument(
            f"marks belong to K({marks.graph.n1},{marks.graph.n2}), state to K({g.n1},{g.n2})"
        )


def initial_state_vertices(graph: GraphSpec) -> WalkState:
    """Uniform over vertices, each vertex's amplitude spread evenly over its arcs."""
    n = graph.n_vertices
    amps = np.empty(graph.arc_count, dtype=np.complex128)
    amps[: graph.x_arcs] = 1.0 / np.sqrt(n * graph.n2)
    amps[graph.x_arcs :] = 1.0 / np.sqrt(n * graph.n1)
    return WalkState(amps, graph)


def initial_state_edges(graph: GraphSpec) -> WalkState:
    """Uniform over arcs."""
    amps = np.full(graph.arc_count, 1.0 / np.sqrt(graph.arc_count), dtype=np.complex128)
    return WalkState(amps, graph)


def initial_state(graph: GraphSpec, which: str) -> WalkState:
    if which == "vertices":
        return initial_state_vertices(graph)
    if which == "edges":
        return initial_state_edges(graph)
    raise InvalidArgument(f"initial state must be 'vertices' or 'edges', got {which!r}")


def random_state(graph: GraphSpec, rng: np.random.Generator) -> WalkState:
    v = rng.normal(size=graph.arc_count) + 1j * rng.normal(size=graph.arc_count)
    return WalkState(v / np.linalg.norm(v), graph)


# Array kernels. Each returns a fresh vector and never touches its input.


def _oracle(vec: np.ndarray, g: GraphSpec, marks: MarkConfig) -> np.ndarray:
    out = vec.copy()
    ax, ay = _split(out, g)
    if marks.marked_x:
        ax[list(marks.marked_x)] *= -1
    if marks.marked_y:
        ay[list(marks.marked_y)] *= -1
    return out


def _coin(vec: np.ndarray, g: GraphSpec) -> np.ndarray:
    ax, ay = _split(vec, g)
    cx = 2.0 * ax.mean(axis=1, keepdims=True) - ax
    cy = 2.0 * ay.mean(axis=1, keepdims=True) - ay
    return np.concatenate([cx.ravel(), cy.ravel()])


def _shift(vec: np.ndarray, g: GraphSpec) -> np.ndarray:
    ax, ay = _split(vec, g)
    return np.concatenate([ay.T.ravel(), ax.T.ravel()])


def _step(vec: np.ndarray, g: GraphSpec, marks: MarkConfig | None) -> np.ndarray:
    ax, ay = _split(vec, g)
    ax = ax.copy()
    ay = ay.copy()
    if marks is not None:
        if marks.marked_x:
            ax[list(marks.marked_x)] *= -1
        if marks.marked_y:
            ay[list(marks.marked_y)] *= -1
    ax = 2.0 * ax.mean(axis=1, keepdims=True) - ax
    ay = 2.0 * ay.mean(axis=1, keepdims=True) - ay
    return np.concatenate([ay.T.ravel(), ax.T.ravel()])


def _marked_probabilities(vec: np.ndarray, g: GraphSpec, marks: MarkConfig) -> tuple[float, float]:
    ax, ay = _split(vec, g)
    px = float(np.sum(np.abs(ax[list(marks.marked_x)]) ** 2)) if marks.marked_x else 0.0
    py = float(np.sum(np.abs(ay[list(marks.marked_y)]) ** 2)) if marks.marked_y else 0.0
    return px, py


def apply_oracle(state: WalkState, marks: MarkConfig) -> WalkState:
    _check_marks(state.graph, marks)
    return WalkState(_oracle(state.amplitudes, state.graph, marks), state.graph)


def apply_coin(state: WalkState) -> WalkState:
    return WalkState(_coin(state.amplitudes, state.graph), state.graph)


def apply_shift(state: WalkState) -> WalkState:
    return WalkState(_shift(state.amplitudes, state.graph), state.graph)


def step(state: WalkState, marks: MarkConfig) -> WalkState:
    """One search step ``S C Q``."""
    _check_marks(state.graph, marks)
    return WalkState(_step(state.amplitudes, state.graph, marks), state.graph)


def walk_only_step(state: WalkState) -> WalkState:
    """One step ``S C`` without querying the oracle."""
    return WalkState(_step(state.amplitudes, state.graph, None), state.graph)


def evolve(state: WalkState, marks: MarkConfig, steps: int) -> ProbabilityTrace:
    """Apply ``steps`` search steps, recording marked-vertex probability at every t."""
    if steps < 0:
        raise InvalidArgument(f"steps must be >= 0, got {steps}")
    g = state.graph
    _check_marks(g, marks)
    p_x = np.empty(steps + 1)
    p_y = np.empty(steps + 1)
    vec = state.amplitudes
    for t in range(steps + 1):
        p_x[t], p_y[t] = _marked_probabilities(vec, g, marks)
        if t < steps:
            vec = _step(vec, g, marks)
    return ProbabilityTrace.from_columns(p_x, p_y)


def evolve_state(state: WalkState, marks: MarkConfig, steps: int) -> WalkState:
    """The state after ``steps`` search steps."""
    _check_marks(state.graph, marks)
    vec = state.amplitudes
    for _ in range(steps):
        vec = _step(vec, state.graph, marks)
    return WalkState(vec, state.graph)
