"""Exact dynamics in the invariant subspaces of the search operator.

Vertices that the walk cannot tell apart fall into classes: ``a`` marked in X,
``c`` unmarked in X, and in Y either ``b`` (all of Y when only X holds marks)
or ``b``/``d`` (marked/unmarked Y).  Uniform superpositions over the arcs
between two classes span a subspace that ``U`` maps into itself: 4D with
marks in one set, 8D with marks in both.

Reduced operators are available in closed form and by conjugating the
full-space step with a basis; the two must agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import GraphSpec, InvalidArgument, MarkConfig, build_graph, mark
from .walk import ProbabilityTrace, WalkState, _split, _step

LABELS_ONESET = ("ab", "ba", "bc", "cb")
LABELS_BOTHSETS = ("ab", "ad", "ba", "bc", "cb", "cd", "da", "dc")

# Labels whose tail is a marked vertex, split by the set holding the tail.
_MARKED_X = {"ab", "ad"}
_MARKED_Y_BOTHSETS = {"ba", "bc"}

UNITARY_TOL = 1e-12
PROJECTION_TOL = 1e-10


class DegenerateBasisError(InvalidArgument):
    """A vertex class is empty, so the reduced basis does not exist."""


class ProjectionLossError(ValueError):
    def __init__(self, residual: float):
        super().__init__(f"state leaves the subspace: residual norm {residual:.3e}")
        self.residual = residual


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal full-space vectors, one row per label."""

    graph: GraphSpec
    labels: tuple[str, ...]
    vectors: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.labels)

    @property
    def basis_vectors(self) -> list[WalkState]:
        return [WalkState(v, self.graph) for v in self.vectors]

    def gram(self) -> np.ndarray:
        return self.vectors.conj() @ self.vectors.T

    def project(self, vec: np.ndarray) -> np.ndarray:
        return self.vectors.conj() @ vec

    def residual(self, vec: np.ndarray) -> float:
        """Norm of the component of ``vec`` outside the span."""
        return float(np.linalg.norm(vec - self.vectors.T @ self.project(vec)))

    def closure_residuals(self, marks: MarkConfig) -> np.ndarray:
        """``||(I - P) U b_i||`` for every basis vector."""
        return np.array([self.residual(_step(b, self.graph, marks)) for b in self.vectors])


@dataclass(frozen=True, eq=False)
class ReducedState:
    coords: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=np.complex128)
        if coords.shape != (len(self.labels),):
            raise InvalidArgument(f"{len(self.labels)} coordinates expected, got {coords.shape}")
        norm = np.linalg.norm(coords)
        if abs(norm - 1.0) > PROJECTION_TOL:
            raise InvalidArgument(f"reduced state is not normalized (norm {norm!r})")
        object.__setattr__(self, "coords", coords)


@dataclass(frozen=True, eq=False)
class ReducedOperator:
    matrix: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        d = len(self.labels)
        if m.shape != (d, d):
            raise InvalidArgument(f"{d}x{d} matrix expected, got {m.shape}")
        err = np.max(np.abs(m.conj().T @ m - np.eye(d)))
        if err > UNITARY_TOL:
            raise InvalidArgument(f"reduced operator is not unitary (error {err:.3e})")
        object.__setattr__(self, "matrix", m)


def _class_basis(
    graph: GraphSpec, classes: dict[str, tuple[bool, list[int]]], labels: tuple[str, ...]
) -> SubspaceBasis:
    # classes: name -> (in X?, members as indices within their set)
    vectors = np.zeros((len(labels), graph.arc_count), dtype=np.complex128)
    for row, label in zip(vectors, labels):
        tail_in_x, tails = classes[label[0]]
        _, heads = classes[label[1]]
        ax, ay = _split(row, graph)
        block = ax if tail_in_x else ay
        block[np.ix_(tails, heads)] = 1.0 / np.sqrt(len(tails) * len(heads))
    return SubspaceBasis(graph, labels, vectors)


def basis_oneset(graph: GraphSpec, marks: MarkConfig) -> SubspaceBasis:
    if marks.k2 != 0:
        raise InvalidArgument("one-set basis needs all marked vertices in X (k2 = 0)")
    if marks.k1 >= graph.n1:
        raise DegenerateBasisError(
            f"k1 = n1 = {graph.n1}: no unmarked X vertex, |bc> and |cb> are undefined; "
            "use the full simulation"
        )
    a = list(marks.marked_x)
    c = [x for x in range(graph.n1) if x not in set(a)]
    classes = {"a": (True, a), "c": (True, c), "b": (False, list(range(graph.n2)))}
    return _class_basis(graph, classes, LABELS_ONESET)


def basis_bothsets(graph: GraphSpec, marks: MarkConfig) -> SubspaceBasis:
    if marks.k1 == 0 or marks.k2 == 0:
        raise DegenerateBasisError(
            "both-sets basis needs marks in X and in Y; use the one-set (4D) model"
        )
    if marks.k1 == graph.n1 or marks.k2 == graph.n2:
        raise DegenerateBasisError(
            "a partite set is fully marked, so an unmarked class is empty; "
            "use the full simulation"
        )
    a = list(marks.marked_x)
    b = list(marks.marked_y)
    c = [x for x in range(graph.n1) if x not in set(a)]
    d = [y for y in range(graph.n2) if y not in set(b)]
    classes = {"a": (True, a), "c": (True, c), "b": (False, b), "d": (False, d)}
    return _class_basis(graph, classes, LABELS_BOTHSETS)


def _check_oneset(n1: int, k: int) -> None:
    if not 1 <= k <= n1 - 1:
        raise InvalidArgument(f"need 1 <= k <= n1 - 1, got k={k}, n1={n1}")


def reduced_operator_oneset(n1: int, k: int) -> ReducedOperator:
    """4x4 search operator in the (ab, ba, bc, cb) basis; independent of n2."""
    _check_oneset(n1, k)
    cos_t = 1.0 - 2.0 * k / n1
    sin_t = 2.0 / n1 * np.sqrt(k * (n1 - k))
    m = np.array(
        [
            [0.0, -cos_t, sin_t, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, sin_t, cos_t, 0.0],
        ]
    )
    return ReducedOperator(m, LABELS_ONESET)


def reduced_operator_bothsets(n1: int, n2: int, k1: int, k2: int) -> ReducedOperator:
    """8x8 search operator in the (ab, ad, ba, bc, cb, cd, da, dc) basis."""
    _check_oneset(n1, k1)
    _check_oneset(n2, k2)
    c1 = 1.0 - 2.0 * k1 / n1
    s1 = 2.0 / n1 * np.sqrt(k1 * (n1 - k1))
    c2 = 1.0 - 2.0 * k2 / n2
    s2 = 2.0 / n2 * np.sqrt(k2 * (n2 - k2))
    m = np.zeros((8, 8))
    m[0, 2], m[0, 3] = c1, -s1
    m[1, 6], m[1, 7] = -c1, s1
    m[2, 0], m[2, 1] = c2, -s2
    m[3, 4], m[3, 5] = -c2, s2
    m[4, 2], m[4, 3] = -s1, -c1
    m[5, 6], m[5, 7] = s1, c1
    m[6, 0], m[6, 1] = -s2, -c2
    m[7, 4], m[7, 5] = s2, c2
    return ReducedOperator(m, LABELS_BOTHSETS)


def conjugated_operator(basis: SubspaceBasis, marks: MarkConfig) -> ReducedOperator:
    """Matrix elements ``<b_i|U|b_j>`` computed with the full-space step."""
    images = np.array([_step(b, basis.graph, marks) for b in basis.vectors])
    return ReducedOperator(basis.vectors.conj() @ images.T, basis.labels)


def reduce_state(state: WalkState, basis: SubspaceBasis) -> ReducedState:
    if state.graph != basis.graph:
        raise InvalidArgument("state and basis live on different graphs")
    residual = basis.residual(state.amplitudes)
    if residual > PROJECTION_TOL:
        raise ProjectionLossError(residual)
    return ReducedState(basis.project(state.amplitudes), basis.labels)


def lift(state: ReducedState, basis: SubspaceBasis) -> WalkState:
    if state.labels != basis.labels:
        raise InvalidArgument("reduced state and basis use different labels")
    return WalkState(basis.vectors.T @ state.coords, basis.graph)


def reduced_initial_oneset(n1: int, n2: int, k: int, which: str) -> ReducedState:
    """Closed-form coordinates of |s> ("vertices") or |sigma> ("edges")."""
    _check_oneset(n1, k)
    if which == "vertices":
        coords = np.array(
            [np.sqrt(k), np.sqrt(n2 / n1 * k), np.sqrt(n2 / n1 * (n1 - k)), np.sqrt(n1 - k)]
        ) / np.sqrt(n1 + n2)
    elif which == "edges":
        coords = np.array(
            [np.sqrt(k * n2), np.sqrt(k * n2), np.sqrt(n2 * (n1 - k)), np.sqrt(n2 * (n1 - k))]
        ) / np.sqrt(2 * n1 * n2)
    else:
        raise InvalidArgument(f"initial state must be 'vertices' or 'edges', got {which!r}")
    return ReducedState(coords, LABELS_ONESET)


def reduced_initial_bothsets(n1: int, n2: int, k1: int, k2: int, which: str) -> ReducedState:
    _check_oneset(n1, k1)
    _check_oneset(n2, k2)
    u1, u2 = n1 - k1, n2 - k2
    # Arc-count weights per label: |tail class| * |head class|.
    counts = np.array([k1 * k2, k1 * u2, k2 * k1, k2 * u1, u1 * k2, u1 * u2, u2 * k1, u2 * u1])
    if which == "vertices":
        # Each arc from a tail of degree d carries 1/sqrt(N d).
        degree = np.array([n2, n2, n1, n1, n2, n2, n1, n1])
        coords = np.sqrt(counts / degree) / np.sqrt(n1 + n2)
    elif which == "edges":
        coords = np.sqrt(counts) / np.sqrt(2 * n1 * n2)
    else:
        raise InvalidArgument(f"initial state must be 'vertices' or 'edges', got {which!r}")
    return ReducedState(coords, LABELS_BOTHSETS)


def reduced_evolve(init: ReducedState, op: ReducedOperator, steps: int) -> ProbabilityTrace:
    if init.labels != op.labels:
        raise InvalidArgument("state and operator use different bases")
    if steps < 0:
        raise InvalidArgument(f"steps must be >= 0, got {steps}")
    labels = init.labels
    # In the one-set basis "b" is all of Y, which holds no marked vertex.
    marked_y = _MARKED_Y_BOTHSETS if labels == LABELS_BOTHSETS else set()
    ix = [i for i, lab in enumerate(labels) if lab in _MARKED_X]
    iy = [i for i, lab in enumerate(labels) if lab in marked_y]
    p_x = np.empty(steps + 1)
    p_y = np.empty(steps + 1)
    v = init.coords
    for t in range(steps + 1):
        amp2 = np.abs(v) ** 2
        p_x[t] = amp2[ix].sum()
        p_y[t] = amp2[iy].sum() if iy else 0.0
        v = op.matrix @ v
    return ProbabilityTrace.from_columns(p_x, p_y)


def simulate_reduced(n1: int, n2: int, k1: int, k2: int, which: str, steps: int) -> ProbabilityTrace:
    """Reduced-space trace for any configuration with non-empty vertex classes.

    Marks confined to Y are handled by exchanging the roles of X and Y.
    """
    g = build_graph(n1, n2)
    mark(g, k1, k2)  # range checks
    if k2 == 0:
        if k1 >= n1:
            raise DegenerateBasisError(f"k1 = n1 = {n1}: reduced model undefined, use engine=full")
        return reduced_evolve(
            reduced_initial_oneset(n1, n2, k1, which), reduced_operator_oneset(n1, k1), steps
        )
    if k1 == 0:
        if k2 >= n2:
            raise DegenerateBasisError(f"k2 = n2 = {n2}: reduced model undefined, use engine=full")
        tr = reduced_evolve(
            reduced_initial_oneset(n2, n1, k2, which), reduced_operator_oneset(n2, k2), steps
        )
        return ProbabilityTrace.from_columns(tr.p_y, tr.p_x)
    if k1 >= n1 or k2 >= n2:
        raise DegenerateBasisError(
            "a partite set is fully marked: reduced model undefined, use engine=full"
        )
    return reduced_evolve(
        reduced_initial_bothsets(n1, n2, k1, k2, which),
        reduced_operator_bothsets(n1, n2, k1, k2),
        steps,
    )
