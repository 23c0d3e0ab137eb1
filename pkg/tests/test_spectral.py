import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bipartite_walk import spectral as sp
from bipartite_walk.graph import InvalidArgument
from bipartite_walk.reduced import (
    reduced_initial_oneset,
    reduced_operator_bothsets,
    reduced_operator_oneset,
    simulate_reduced,
)


@given(st.integers(2, 10**6), st.data())
def test_oneset_eigenpairs(n1, data):
    k = data.draw(st.integers(1, n1 - 1))
    op = reduced_operator_oneset(n1, k).matrix
    dec = sp.exact_eigensystem_oneset(n1, k)
    assert max(p.residual(op) for p in dec.pairs) < 1e-12
    assert np.allclose(dec.eigenvectors.conj().T @ dec.eigenvectors, np.eye(4), atol=1e-12)


@pytest.mark.parametrize("which", sp.INITS)
@pytest.mark.parametrize("n1,n2,k", [(400, 400, 3), (400, 1, 3), (37, 50, 4), (9, 2, 8)])
def test_initial_decomposition(n1, n2, k, which):
    dec = sp.decompose_initial_oneset(n1, n2, k, which)
    init = reduced_initial_oneset(n1, n2, k, which).coords
    assert np.allclose(dec.reconstruct(), init, atol=1e-13)
    op = reduced_operator_oneset(n1, k).matrix
    assert np.allclose(dec.evolve(7), np.linalg.matrix_power(op, 7) @ init, atol=1e-12)


@given(st.integers(2, 500), st.integers(1, 500), st.data(), st.sampled_from(sp.INITS))
def test_closed_form_matches_reduced(n1, n2, data, which):
    k = data.draw(st.integers(1, n1 - 1))
    tr = simulate_reduced(n1, n2, k, 0, which, 60)
    cf = [sp.closed_form_prob_oneset(n1, n2, k, which, t) for t in range(61)]
    assert np.max(np.abs(tr.p_total - cf)) < 1e-9


def test_runtime_oneset_values():
    pred = sp.runtime_oneset(400, 400, 3, "vertices")
    assert pred.runtime_even == 18 and pred.runtime_odd == 19
    assert pred.t_even == pytest.approx(17.116, abs=1e-3)
    assert pred.t_asymptotic == pytest.approx(18.138, abs=1e-3)
    s = sp.runtime_oneset(400, 200, 3, "vertices")
    assert (s.p_even_max, s.p_odd_max) == pytest.approx((2 / 3, 1 / 3))


def test_nearest_even():
    assert [sp.nearest_even(x) for x in (16.9, 17.1, 18.9, 19.2, 0.4)] == [16, 18, 18, 20, 0]


def test_canonical_phase():
    v = np.array([1j, 0, -2j, 1e-20])
    w = sp.canonical_phase(v)
    assert w[2] == pytest.approx(2.0)
    assert np.allclose(np.abs(w), np.abs(v))


@pytest.mark.parametrize("cfg", [(600, 400, 3, 2), (400, 600, 3, 2), (10**4, 10**4, 7, 1), (500, 700, 3, 5)])
def test_perturbative_matches_closed_forms(cfg):
    pert = sp.perturbative_eigensystem_bothsets(*cfg)
    ref = sp.asymptotic_eigensystem_bothsets(*cfg)
    assert np.max(np.abs(pert.eigenvalues - ref.eigenvalues)) < 1e-10
    for a, b in zip(pert.pairs, ref.pairs):
        assert np.max(np.abs(sp.canonical_phase(a.eigenvector) - sp.canonical_phase(b.eigenvector))) < 1e-10


def test_asymptotic_vectors_orthonormal():
    vecs = sp.asymptotic_eigensystem_bothsets(600, 400, 3, 2).eigenvectors
    assert np.allclose(vecs.conj().T @ vecs, np.eye(8), atol=1e-14)


def test_leading_operator_blocks():
    u0 = sp.leading_operator()
    plus, minus = sp.degenerate_basis()
    assert np.allclose(plus @ u0 @ plus.T, np.eye(4))
    assert np.allclose(minus @ u0 @ minus.T, -np.eye(4))


def test_first_order_expansion():
    # U = U0 + e1 W1 + e2 W2 + O(e^2).
    n1, n2, k1, k2 = 10**8, 10**8, 3, 5
    exact = reduced_operator_bothsets(n1, n2, k1, k2).matrix
    diff = np.max(np.abs(exact - sp.perturbed_operator(n1, n2, k1, k2)))
    assert diff < 10 * (k2 / n2)


def test_perturbative_residual_slope():
    ns = [10**3, 10**4, 10**5, 10**6]
    res = []
    for n in ns:
        op = reduced_operator_bothsets(n, n, 1, 1).matrix
        res.append(max(p.residual(op) for p in sp.perturbative_eigensystem_bothsets(n, n, 1, 1).pairs))
    slope = np.polyfit(np.log(ns), np.log(res), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.05)


def test_numerical_eigensystem_residuals():
    op = reduced_operator_bothsets(60, 40, 7, 2)
    dec = sp.numerical_eigensystem(op)
    assert max(p.residual(op.matrix) for p in dec.pairs) < 1e-12


@pytest.mark.parametrize("which", sp.INITS)
@pytest.mark.parametrize("cfg", [(600, 400, 3, 2), (400, 600, 3, 2), (30000, 20000, 3, 2)])
def test_asymptotic_formula_within_regime_bound(cfg, which):
    pred = sp.runtimes_bothsets(*cfg, which)
    steps = int(2 * pred.t_x)
    tr = simulate_reduced(*cfg, which, steps)
    asym = np.array([sp.asymptotic_prob_bothsets(*cfg, which, t) for t in range(steps + 1)])
    dev = max(np.max(np.abs(tr.p_x - asym[:, 0])), np.max(np.abs(tr.p_y - asym[:, 1])),
              np.max(np.abs(tr.p_total - asym[:, 2])))
    assert dev <= 1.25 * pred.regime_quality


def test_bothsets_regime_checks():
    with pytest.raises(InvalidArgument):
        sp.angles_bothsets(4, 4, 3, 3)
    with pytest.raises(InvalidArgument):
        sp.angles_bothsets(400, 400, 3, 0)
    ang = sp.angles_bothsets(400, 600, 3, 2)
    assert ang.beta < 0


@pytest.mark.parametrize(
    "cfg,row",
    [
        ((400, 400, 3, 0), 1), ((400, 1, 3, 0), 2), ((200, 400, 3, 0), 3), ((400, 400, 0, 3), 1),
        ((1, 400, 0, 3), 2), ((600, 400, 3, 2), 4), ((400, 600, 2, 2), 5), ((400, 400, 2, 3), 6),
        ((400, 600, 3, 2), 7), ((600, 400, 2, 3), 8), ((400, 600, 2, 3), 4), ((400, 700, 2, 3), 7),
    ],
)
def test_classify_case(cfg, row):
    assert sp.classify_case(*cfg) == row


def test_table_summary_formulas():
    r1 = sp.table_summary(400, 400, 3, 0)
    assert r1.t_star == pytest.approx(math.pi / (2 * math.sqrt(2)) * math.sqrt(800 / 3))
    assert r1.p_star_vertices == 0.5
    r2 = sp.table_summary(400, 1, 3, 0)
    assert r2.p_star_vertices == pytest.approx(400 / 401)
    r7 = sp.table_summary(400, 600, 3, 2)
    assert (r7.t_x, r7.t_y) == pytest.approx((math.pi / 2 * math.sqrt(400 / 3), math.pi / 2 * math.sqrt(300)))
    assert r7.p_set_vertices == pytest.approx(0.6)
