import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bipartite_walk.graph import InvalidArgument, build_graph, mark
from bipartite_walk.walk import (
    ProbabilityTrace,
    WalkState,
    apply_coin,
    apply_oracle,
    apply_shift,
    evolve,
    evolve_state,
    initial_state,
    random_state,
    step,
    walk_only_step,
)
from reference import dense_operators, dense_trace

small = st.tuples(st.integers(1, 8), st.integers(1, 8))


def _marks(n1, n2, draw):
    k1 = draw(st.integers(0, n1))
    k2 = draw(st.integers(0 if k1 else 1, n2))
    return mark(build_graph(n1, n2), k1, k2)


@given(small, st.data())
def test_operators_match_dense_reference(sizes, data):
    n1, n2 = sizes
    marks = _marks(n1, n2, data.draw)
    g = marks.graph
    s, c, q = dense_operators(n1, n2, set(marks.marked_x) | {n1 + y for y in marks.marked_y})
    psi = random_state(g, np.random.default_rng(n1 * 31 + n2))
    v = psi.amplitudes
    assert np.allclose(apply_shift(psi).amplitudes, s @ v, atol=1e-13)
    assert np.allclose(apply_coin(psi).amplitudes, c @ v, atol=1e-13)
    assert np.allclose(apply_oracle(psi, marks).amplitudes, q @ v, atol=1e-13)
    assert np.allclose(step(psi, marks).amplitudes, s @ c @ q @ v, atol=1e-13)
    assert np.allclose(walk_only_step(psi).amplitudes, s @ c @ v, atol=1e-13)


@given(small, st.data())
def test_involutions(sizes, data):
    marks = _marks(*sizes, data.draw)
    psi = random_state(marks.graph, np.random.default_rng(7))
    for op in (apply_shift, apply_coin, lambda p: apply_oracle(p, marks)):
        assert np.max(np.abs(op(op(psi)).amplitudes - psi.amplitudes)) < 1e-12


@settings(max_examples=20, deadline=None)
@given(small, st.data())
def test_long_run_norm(sizes, data):
    marks = _marks(*sizes, data.draw)
    psi = random_state(marks.graph, np.random.default_rng(3))
    assert abs(evolve_state(psi, marks, 1000).norm() - 1.0) < 1e-10


@given(small, st.data(), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(sizes, data, a, b):
    marks = _marks(*sizes, data.draw)
    rng = np.random.default_rng(11)
    p, q = random_state(marks.graph, rng), random_state(marks.graph, rng)
    combo = a * p.amplitudes + (1j * b) * q.amplitudes
    nrm = np.linalg.norm(combo)
    if nrm < 1e-6:
        return
    lhs = step(WalkState(combo / nrm, marks.graph), marks).amplitudes
    rhs = (a * step(p, marks).amplitudes + 1j * b * step(q, marks).amplitudes) / nrm
    assert np.allclose(lhs, rhs, atol=1e-12)


@pytest.mark.parametrize("init", ["vertices", "edges"])
@pytest.mark.parametrize("n1,n2,k1,k2", [(5, 4, 2, 0), (4, 6, 1, 2), (3, 3, 3, 1)])
def test_trace_matches_dense(n1, n2, k1, k2, init):
    marks = mark(build_graph(n1, n2), k1, k2)
    marked = set(range(k1)) | {n1 + y for y in range(k2)}
    px, py = dense_trace(n1, n2, marked, init, 30)
    tr = evolve(initial_state(marks.graph, init), marks, 30)
    assert len(tr) == 31
    assert np.allclose(tr.p_x, px, atol=1e-12)
    assert np.allclose(tr.p_y, py, atol=1e-12)


def test_marked_set_symmetry():
    # Which vertices are marked does not matter, only how many.
    g = build_graph(9, 6)
    from bipartite_walk.graph import mark_vertices

    a = evolve(initial_state(g, "vertices"), mark(g, 2, 1), 40)
    b = evolve(initial_state(g, "vertices"), mark_vertices(g, [4, 8, 13]), 40)
    assert a.max_deviation(b) < 1e-12


def test_initial_states_normalized_and_uniform():
    g = build_graph(7, 3)
    s = initial_state(g, "vertices")
    assert np.allclose(s.vertex_probabilities(), 1 / 10)
    e = initial_state(g, "edges")
    assert np.allclose(np.abs(e.amplitudes) ** 2, 1 / 42)
    with pytest.raises(InvalidArgument):
        initial_state(g, "uniform")


def test_state_validation():
    g = build_graph(2, 2)
    with pytest.raises(InvalidArgument):
        WalkState(np.ones(8), g)
    with pytest.raises(InvalidArgument):
        WalkState(np.ones(3) / np.sqrt(3), g)


def test_foreign_marks_rejected():
    psi = initial_state(build_graph(3, 3), "edges")
    with pytest.raises(InvalidArgument):
        step(psi, mark(build_graph(3, 4), 1))


def test_trace_validation():
    with pytest.raises(InvalidArgument):
        ProbabilityTrace(np.arange(2), np.array([0.1, 0.2]), np.array([0.1, 0.2]), np.array([0.2, 0.5]))
    with pytest.raises(InvalidArgument):
        ProbabilityTrace.from_columns([1.2], [0.0])
