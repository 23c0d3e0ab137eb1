import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bipartite_walk.graph import InvalidArgument, build_graph, mark
from bipartite_walk.reduced import (
    LABELS_BOTHSETS,
    LABELS_ONESET,
    DegenerateBasisError,
    ProjectionLossError,
    ReducedOperator,
    ReducedState,
    basis_bothsets,
    basis_oneset,
    conjugated_operator,
    lift,
    reduce_state,
    reduced_evolve,
    reduced_initial_bothsets,
    reduced_initial_oneset,
    reduced_operator_bothsets,
    reduced_operator_oneset,
    simulate_reduced,
)
from bipartite_walk.walk import evolve, initial_state, random_state, step


def test_oneset_basis_closed_and_orthonormal():
    g = build_graph(9, 5)
    marks = mark(g, 3)
    b = basis_oneset(g, marks)
    assert b.labels == LABELS_ONESET
    assert np.allclose(b.gram(), np.eye(4), atol=1e-14)
    assert np.max(b.closure_residuals(marks)) < 1e-12


def test_bothsets_basis_closed_and_orthonormal():
    g = build_graph(9, 5)
    marks = mark(g, 3, 2)
    b = basis_bothsets(g, marks)
    assert b.labels == LABELS_BOTHSETS
    assert np.allclose(b.gram(), np.eye(8), atol=1e-14)
    assert np.max(b.closure_residuals(marks)) < 1e-12


@given(st.integers(2, 40), st.integers(1, 40), st.data())
def test_oneset_closed_form_equals_conjugation(n1, n2, data):
    k = data.draw(st.integers(1, n1 - 1))
    g = build_graph(n1, n2)
    marks = mark(g, k)
    conj = conjugated_operator(basis_oneset(g, marks), marks)
    assert np.max(np.abs(conj.matrix - reduced_operator_oneset(n1, k).matrix)) < 1e-12


@given(st.integers(2, 30), st.integers(2, 30), st.data())
def test_bothsets_closed_form_equals_conjugation(n1, n2, data):
    k1 = data.draw(st.integers(1, n1 - 1))
    k2 = data.draw(st.integers(1, n2 - 1))
    g = build_graph(n1, n2)
    marks = mark(g, k1, k2)
    conj = conjugated_operator(basis_bothsets(g, marks), marks)
    assert np.max(np.abs(conj.matrix - reduced_operator_bothsets(n1, n2, k1, k2).matrix)) < 1e-12


@pytest.mark.parametrize("which", ["vertices", "edges"])
def test_initial_states_project_exactly(which):
    g = build_graph(11, 6)
    m1, m2 = mark(g, 4), mark(g, 4, 2)
    s = initial_state(g, which)
    r1 = reduce_state(s, basis_oneset(g, m1))
    assert np.allclose(r1.coords, reduced_initial_oneset(11, 6, 4, which).coords, atol=1e-14)
    r2 = reduce_state(s, basis_bothsets(g, m2))
    assert np.allclose(r2.coords, reduced_initial_bothsets(11, 6, 4, 2, which).coords, atol=1e-14)


def test_lift_commutes_with_step():
    g = build_graph(8, 7)
    marks = mark(g, 2, 3)
    b = basis_bothsets(g, marks)
    r = reduced_initial_bothsets(8, 7, 2, 3, "vertices")
    op = reduced_operator_bothsets(8, 7, 2, 3)
    after = lift(ReducedState(op.matrix @ r.coords, r.labels), b)
    assert np.allclose(after.amplitudes, step(lift(r, b), marks).amplitudes, atol=1e-13)


def test_projection_loss_detected():
    g = build_graph(6, 6)
    b = basis_oneset(g, mark(g, 2))
    with pytest.raises(ProjectionLossError) as info:
        reduce_state(random_state(g, np.random.default_rng(0)), b)
    assert info.value.residual > 0.5


@settings(max_examples=15, deadline=None)
@given(st.integers(10, 120), st.integers(10, 120), st.data(), st.sampled_from(["vertices", "edges"]))
def test_reduced_equals_full(n1, n2, data, which):
    k1 = data.draw(st.integers(0, n1 - 1))
    k2 = data.draw(st.integers(0 if k1 else 1, n2 - 1))
    g = build_graph(n1, n2)
    full = evolve(initial_state(g, which), mark(g, k1, k2), 100)
    assert full.max_deviation(simulate_reduced(n1, n2, k1, k2, which, 100)) < 1e-9


@pytest.mark.parametrize(
    "cfg", [(5, 5, 5, 0), (5, 5, 0, 5), (3, 997, 3, 2), (4, 6, 1, 6)]
)
def test_fully_marked_set_is_degenerate(cfg):
    with pytest.raises(DegenerateBasisError, match="engine=full"):
        simulate_reduced(*cfg, "vertices", 5)


def test_bases_reject_wrong_model():
    g = build_graph(6, 6)
    with pytest.raises(InvalidArgument):
        basis_oneset(g, mark(g, 2, 1))
    with pytest.raises(DegenerateBasisError):
        basis_bothsets(g, mark(g, 2))


def test_operator_must_be_unitary():
    with pytest.raises(InvalidArgument):
        ReducedOperator(np.ones((4, 4)), LABELS_ONESET)


def test_reduced_evolve_label_mismatch():
    with pytest.raises(InvalidArgument):
        reduced_evolve(reduced_initial_oneset(5, 5, 1, "edges"), reduced_operator_bothsets(5, 5, 1, 1), 3)
