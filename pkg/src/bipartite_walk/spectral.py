"""Spectral data and closed-form predictions for the reduced search operators.

Marks in one set: the 4x4 operator has an exact eigensystem in terms of the
angle ``phi = theta/2`` with ``cos(theta) = 1 - 2k/n1``, which gives exact
success probabilities at even and odd steps and exact runtimes.

Marks in both sets: the 8x8 operator is only solved asymptotically
(``k_i << n_i``).  :func:`perturbative_eigensystem_bothsets` runs degenerate
perturbation theory: the leading-order operator has eigenvalues +1 and -1,
each four-fold degenerate, and the first-order terms are diagonalized inside
each degenerate block.  The eigenvalues come out as ``+-exp(+-i alpha)`` and
``+-exp(+-i beta)`` with ``sin(alpha) = e2 + e1``, ``sin(beta) = e2 - e1``,
``e1 = sqrt(k1/n1)``, ``e2 = sqrt(k2/n2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import eigen
from .graph import InvalidArgument
from .reduced import (
    LABELS_BOTHSETS,
    LABELS_ONESET,
    ReducedOperator,
    reduced_operator_bothsets,
    reduced_operator_oneset,
)

INITS = ("vertices", "edges")


@dataclass(frozen=True)
class AngleParams:
    theta: float | None = None
    phi: float | None = None
    alpha: float | None = None
    beta: float | None = None


@dataclass(frozen=True, eq=False)
class EigenPair:
    eigenvalue: complex
    eigenvector: np.ndarray

    def residual(self, matrix: np.ndarray) -> float:
        v = self.eigenvector
        return float(np.linalg.norm(matrix @ v - self.eigenvalue * v))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    pairs: list[EigenPair]
    labels: tuple[str, ...]
    init_coefficients: np.ndarray | None = None
    angles: AngleParams | None = None

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.eigenvalue for p in self.pairs])

    @property
    def eigenvectors(self) -> np.ndarray:
        """Eigenvectors as columns."""
        return np.column_stack([p.eigenvector for p in self.pairs])

    def reconstruct(self) -> np.ndarray:
        return self.eigenvectors @ self.init_coefficients

    def evolve(self, t: int) -> np.ndarray:
        """Reduced state after ``t`` steps, from the eigen-expansion."""
        return self.eigenvectors @ (self.init_coefficients * self.eigenvalues**t)


@dataclass(frozen=True)
class Prediction:
    """Predicted runtimes and maximum success probabilities.

    One-set fields are ``t_even``..``p_odd_max``; both-sets fields are
    ``t_x``..``p_y_max``.  ``runtime_even``/``runtime_odd`` are the integer
    step counts: the nearest even integer to ``t_even``, plus one.
    """

    t_even: float | None = None
    t_odd: float | None = None
    runtime_even: int | None = None
    runtime_odd: int | None = None
    t_asymptotic: float | None = None
    p_even_max: float | None = None
    p_odd_max: float | None = None
    t_x: float | None = None
    t_y: float | None = None
    t_x_small_angle: float | None = None
    t_y_small_angle: float | None = None
    p_x_max: float | None = None
    p_y_max: float | None = None
    regime_quality: float | None = None


def _check_init(which: str) -> None:
    if which not in INITS:
        raise InvalidArgument(f"initial state must be 'vertices' or 'edges', got {which!r}")


def canonical_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate ``v`` so that its last non-negligible entry is real positive."""
    v = np.asarray(v, dtype=np.complex128)
    nz = np.flatnonzero(np.abs(v) > tol * max(np.max(np.abs(v)), 1.0))
    if nz.size == 0:
        return v.copy()
    last = v[nz[-1]]
    return v * (abs(last) / last)


# Marks in one set ---------------------------------------------------------------


def angles_oneset(n1: int, k: int) -> AngleParams:
    if not 1 <= k <= n1 - 1:
        raise InvalidArgument(f"need 1 <= k <= n1 - 1, got k={k}, n1={n1}")
    theta = math.acos(1.0 - 2.0 * k / n1)
    return AngleParams(theta=theta, phi=theta / 2)


def exact_eigensystem_oneset(n1: int, k: int) -> SpectralDecomposition:
    """Closed-form eigenpairs of the 4x4 one-set operator, in (ab, ba, bc, cb) order."""
    ang = angles_oneset(n1, k)
    e = np.exp(1j * ang.phi)
    ec = np.conj(e)
    pairs = [
        EigenPair(-ec, np.array([1j, 1j * e, -e, 1]) / 2),
        EigenPair(ec, np.array([1j, -1j * e, e, 1]) / 2),
        EigenPair(-e, np.array([-1j, -1j * ec, -ec, 1]) / 2),
        EigenPair(e, np.array([-1j, 1j * ec, ec, 1]) / 2),
    ]
    return SpectralDecomposition(pairs, LABELS_ONESET, angles=ang)


def decompose_initial_oneset(n1: int, n2: int, k: int, which: str) -> SpectralDecomposition:
    """Eigen-expansion coefficients of |s> or |sigma> in closed form."""
    _check_init(which)
    base = exact_eigensystem_oneset(n1, k)
    e = np.exp(1j * base.angles.phi)
    ec = np.conj(e)
    u, m = math.sqrt(n1 - k), math.sqrt(k)
    if which == "vertices":
        r = math.sqrt(n2 / n1)
        denom = 2 * math.sqrt(n1 + n2)
    else:
        r = 1.0
        denom = 2 * math.sqrt(2 * n1)
    coeffs = np.array(
        [
            u - 1j * m - ec * r * (u + 1j * m),
            u - 1j * m + ec * r * (u + 1j * m),
            u + 1j * m - e * r * (u - 1j * m),
            u + 1j * m + e * r * (u - 1j * m),
        ]
    ) / denom
    return SpectralDecomposition(base.pairs, LABELS_ONESET, coeffs, base.angles)


def closed_form_prob_oneset(n1: int, n2: int, k: int, which: str, t: int) -> float:
    """Exact success probability at step ``t`` with all marks in X."""
    _check_init(which)
    if t < 0:
        raise InvalidArgument(f"t must be >= 0, got {t}")
    phi = angles_oneset(n1, k).phi
    u, m = math.sqrt(n1 - k), math.sqrt(k)
    if t % 2 == 0:
        amp = u * math.sin(phi * t) + m * math.cos(phi * t)
        scale = 1.0 / (n1 + n2) if which == "vertices" else 1.0 / (2 * n1)
    else:
        amp = u * math.sin(phi * (t + 1)) - m * math.cos(phi * (t + 1))
        scale = n2 / (n1 * (n1 + n2)) if which == "vertices" else 1.0 / (2 * n1)
    return scale * amp * amp


def nearest_even(x: float) -> int:
    return 2 * int(math.floor(x / 2 + 0.5))


def runtime_oneset(n1: int, n2: int, k: int, which: str) -> Prediction:
    _check_init(which)
    phi = angles_oneset(n1, k).phi
    t_even = math.acos(math.sqrt(k / n1)) / phi
    r_even = nearest_even(t_even)
    if which == "vertices":
        p_even, p_odd = n1 / (n1 + n2), n2 / (n1 + n2)
    else:
        p_even = p_odd = 0.5
    return Prediction(
        t_even=t_even,
        t_odd=t_even + 1,
        runtime_even=r_even,
        runtime_odd=r_even + 1,
        t_asymptotic=math.pi / 2 * math.sqrt(n1 / k),
        p_even_max=p_even,
        p_odd_max=p_odd,
    )


# Marks in both sets ------------------------------------------------------------


def _check_bothsets(n1: int, n2: int, k1: int, k2: int) -> tuple[float, float]:
    if k1 < 1 or k2 < 1:
        raise InvalidArgument("marks in both sets required (k1, k2 >= 1); use the one-set model")
    if k1 > n1 or k2 > n2:
        raise InvalidArgument(f"k1={k1}, k2={k2} exceed set sizes n1={n1}, n2={n2}")
    e1, e2 = math.sqrt(k1 / n1), math.sqrt(k2 / n2)
    if e1 + e2 > 1.0:
        raise InvalidArgument(
            f"sqrt(k1/n1) + sqrt(k2/n2) = {e1 + e2:.3f} > 1: outside the small-k regime"
        )
    return e1, e2


def angles_bothsets(n1: int, n2: int, k1: int, k2: int) -> AngleParams:
    e1, e2 = _check_bothsets(n1, n2, k1, k2)
    return AngleParams(alpha=math.asin(e2 + e1), beta=math.asin(e2 - e1))


def regime_quality(n1: int, n2: int, k1: int, k2: int) -> float:
    """``sqrt(max(k1/n1, k2/n2))``: the order of the asymptotic truncation error."""
    return math.sqrt(max(k1 / n1, k2 / n2))


def leading_operator() -> np.ndarray:
    """The both-sets operator with every ``k_i/n_i`` term dropped."""
    u0 = np.zeros((8, 8))
    for i, j, v in [(0, 2, 1), (1, 6, -1), (2, 0, 1), (3, 4, -1),
                    (4, 3, -1), (5, 7, 1), (6, 1, -1), (7, 5, 1)]:
        u0[i, j] = v
    return u0


def first_order_terms() -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of ``sqrt(k1/n1)`` and ``sqrt(k2/n2)`` in the expansion of the operator."""
    w1 = np.zeros((8, 8))
    w2 = np.zeros((8, 8))
    for i, j, v in [(0, 3, -2), (1, 7, 2), (4, 2, -2), (5, 6, 2)]:
        w1[i, j] = v
    for i, j, v in [(2, 1, -2), (3, 5, 2), (6, 0, -2), (7, 4, 2)]:
        w2[i, j] = v
    return w1, w2


def perturbed_operator(n1: int, n2: int, k1: int, k2: int) -> np.ndarray:
    e1, e2 = math.sqrt(k1 / n1), math.sqrt(k2 / n2)
    w1, w2 = first_order_terms()
    return leading_operator() + e1 * w1 + e2 * w2


def degenerate_basis() -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors of the leading operator as rows: the +1 block, then the -1 block."""
    plus = np.array([
        [0, 0, 0, 0, 0, 1, 0, 1],
        [0, -1, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, -1, 1, 0, 0, 0],
        [1, 0, 1, 0, 0, 0, 0, 0],
    ]) / math.sqrt(2)
    minus = np.array([
        [0, 0, 0, 0, 0, -1, 0, 1],
        [0, 1, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 1, 1, 0, 0, 0],
        [-1, 0, 1, 0, 0, 0, 0, 0],
    ]) / math.sqrt(2)
    return plus, minus


def effective_matrices(n1: int, n2: int, k1: int, k2: int) -> tuple[np.ndarray, np.ndarray]:
    """``<v_i|U'|v_j>`` restricted to each degenerate block of the leading operator."""
    up = perturbed_operator(n1, n2, k1, k2)
    plus, minus = degenerate_basis()
    return plus @ up @ plus.T, minus @ up @ minus.T


# Order of the output pairs: (block eigenvalue, sign of the e1 shift, sign of
# the e2 shift). The shift of an eigenvalue mu of block lam0 is
# mu = lam0 + i*(s1*e1 + s2*e2); this fixes which of alpha/beta it carries.
_PAIR_ORDER = [
    (1, -1, -1),   # exp(-i alpha)
    (1, 1, 1),     # exp(+i alpha)
    (1, 1, -1),    # exp(-i beta)
    (1, -1, 1),    # exp(+i beta)
    (-1, -1, -1),  # -exp(+i alpha)
    (-1, 1, 1),    # -exp(-i alpha)
    (-1, 1, -1),   # -exp(+i beta)
    (-1, -1, 1),   # -exp(-i beta)
]


def perturbative_eigensystem_bothsets(n1: int, n2: int, k1: int, k2: int) -> SpectralDecomposition:
    """Asymptotic eigenpairs of the both-sets operator by degenerate perturbation theory.

    Inside each degenerate block the first-order matrix is diagonalized; any
    eigenvalue that is still degenerate (``k1/n1 == k2/n2`` makes beta vanish)
    is split by the ``sqrt(k1/n1)`` part of the perturbation alone, which
    commutes with the rest.  An eigenvalue ``lam0 * (1 + i s)`` of the
    effective matrix is reported as ``lam0 * exp(i asin(s))``.
    """
    e1, e2 = _check_bothsets(n1, n2, k1, k2)
    w1, w2 = first_order_terms()
    blocks = degenerate_basis()
    eff = effective_matrices(n1, n2, k1, k2)
    found: dict[tuple[int, int, int], EigenPair] = {}
    for lam0, basis, m in zip((1, -1), blocks, eff):
        g1 = basis @ w1 @ basis.T
        g2 = basis @ w2 @ basis.T
        for coeffs in _diagonalize_block(m, g1):
            shift = coeffs.conj() @ (m @ coeffs) - lam0
            s1 = np.imag(coeffs.conj() @ g1 @ coeffs)
            s2 = np.imag(coeffs.conj() @ g2 @ coeffs)
            key = (lam0, int(np.sign(s1)), int(np.sign(s2)))
            s = float(np.imag(shift / lam0))
            vec = canonical_phase(basis.T @ coeffs)
            found[key] = EigenPair(lam0 * np.exp(1j * math.asin(s)), vec)
    if len(found) != 8:
        raise RuntimeError("perturbative eigenvectors could not be labeled")
    pairs = [found[key] for key in _PAIR_ORDER]
    return SpectralDecomposition(pairs, LABELS_BOTHSETS, angles=angles_bothsets(n1, n2, k1, k2))


def _diagonalize_block(m: np.ndarray, splitter: np.ndarray, tol: float = 1e-9) -> list[np.ndarray]:
    values, vectors = eigen.eig(m)
    out = []
    used = np.zeros(len(values), dtype=bool)
    for i in range(len(values)):
        if used[i]:
            continue
        cluster = np.flatnonzero(~used & (np.abs(values - values[i]) < tol))
        used[cluster] = True
        vs = vectors[:, cluster]
        if len(cluster) > 1:
            _, rot = eigen.eig(vs.conj().T @ splitter @ vs)
            vs = vs @ rot
        out.extend(vs.T)
    return out


def asymptotic_eigensystem_bothsets(n1: int, n2: int, k1: int, k2: int) -> SpectralDecomposition:
    """Closed-form asymptotic eigenpairs in the order of ``_PAIR_ORDER``.

    Each vector is written in the (ab, ad, ba, bc, cb, cd, da, dc) basis and
    scaled so its last entry is +1/(2 sqrt 2).
    """
    ang = angles_bothsets(n1, n2, k1, k2)
    a, b = ang.alpha, ang.beta
    i = 1j
    rows = [
        ([1, i, 1, i, -i, 1, -i, 1], np.exp(-i * a)),
        ([1, -i, 1, -i, i, 1, i, 1], np.exp(i * a)),
        ([-1, -i, -1, i, -i, 1, i, 1], np.exp(-i * b)),
        ([-1, i, -1, -i, i, 1, -i, 1], np.exp(i * b)),
        ([-1, i, 1, -i, -i, -1, i, 1], -np.exp(i * a)),
        ([-1, -i, 1, i, i, -1, -i, 1], -np.exp(-i * a)),
        ([1, -i, -1, -i, -i, -1, -i, 1], -np.exp(i * b)),
        ([1, i, -1, i, i, -1, i, 1], -np.exp(-i * b)),
    ]
    pairs = [EigenPair(lam, np.array(v, dtype=complex) / (2 * math.sqrt(2))) for v, lam in rows]
    return SpectralDecomposition(pairs, LABELS_BOTHSETS, angles=ang)


def numerical_eigensystem(op: ReducedOperator) -> SpectralDecomposition:
    values, vectors = eigen.eig(op.matrix)
    pairs = [EigenPair(complex(lam), canonical_phase(v)) for lam, v in zip(values, vectors.T)]
    return SpectralDecomposition(pairs, op.labels)


def exact_eigensystem_bothsets(n1: int, n2: int, k1: int, k2: int) -> SpectralDecomposition:
    """Eigenpairs of the exact 8x8 operator, computed numerically."""
    return numerical_eigensystem(reduced_operator_bothsets(n1, n2, k1, k2))


def asymptotic_prob_bothsets(
    n1: int, n2: int, k1: int, k2: int, which: str, t: int
) -> tuple[float, float, float]:
    """Asymptotic ``(p_x, p_y, p_total)`` at step ``t`` with marks in both sets."""
    _check_init(which)
    ang = angles_bothsets(n1, n2, k1, k2)
    sx = math.sin((ang.alpha - ang.beta) * t / 2) ** 2
    sy = math.sin((ang.alpha + ang.beta) * t / 2) ** 2
    if which == "edges":
        px, py = sx / 2, sy / 2
    elif t % 2 == 0:
        px, py = n1 * sx / (n1 + n2), n2 * sy / (n1 + n2)
    else:
        px, py = n2 * sx / (n1 + n2), n1 * sy / (n1 + n2)
    return px, py, px + py


def runtimes_bothsets(n1: int, n2: int, k1: int, k2: int, which: str) -> Prediction:
    """Per-set runtimes and maxima.

    For |s> the maximum in each set depends on the parity of the step;
    ``p_x_max``/``p_y_max`` report the better parity, ``max(n1, n2)/(n1+n2)``.
    """
    _check_init(which)
    ang = angles_bothsets(n1, n2, k1, k2)
    p = max(n1, n2) / (n1 + n2) if which == "vertices" else 0.5
    return Prediction(
        t_x=math.pi / (ang.alpha - ang.beta),
        t_y=math.pi / (ang.alpha + ang.beta),
        t_x_small_angle=math.pi / 2 * math.sqrt(n1 / k1),
        t_y_small_angle=math.pi / 2 * math.sqrt(n2 / k2),
        p_x_max=p,
        p_y_max=p,
        regime_quality=regime_quality(n1, n2, k1, k2),
    )


# Summary table -----------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    """Asymptotic runtime and maximum success probability for one case.

    Rows 1-4 fill ``t_star`` and ``p_star_*``; rows 5-8 predict each set
    separately and fill the ``t_x``/``t_y``/``p_*`` per-set fields.
    """

    row: int
    case: str
    t_star: float | None = None
    p_star_vertices: float | None = None
    p_star_edges: float | None = None
    t_x: float | None = None
    t_y: float | None = None
    p_set_vertices: float | None = None
    p_set_edges: float | None = None


def classify_case(n1: int, n2: int, k1: int, k2: int) -> int:
    """Summary-table row (1-8) matching the relations among n1, n2, k1, k2.

    Rows 5-8 are symmetric under exchanging X and Y, so ``k1 > k2`` is
    accepted where the table is written for ``k1 < k2``.
    """
    if k1 < 0 or k2 < 0 or k1 + k2 == 0 or k1 > n1 or k2 > n2:
        raise InvalidArgument(f"no summary row for n1={n1}, n2={n2}, k1={k1}, k2={k2}")
    if k1 == 0 or k2 == 0:
        big, small = (n1, n2) if k2 == 0 else (n2, n1)
        if big == small:
            return 1
        return 2 if big > small else 3
    if Fraction(k1, n1) == Fraction(k2, n2):
        return 4
    if k1 == k2:
        return 5
    if n1 == n2:
        return 6
    return 7 if n1 < n2 else 8


_CASE_TEXT = {
    1: "marks in one set, n1 = n2",
    2: "marks in one set, marked set larger",
    3: "marks in one set, marked set smaller",
    4: "k1/n1 = k2/n2",
    5: "k1 = k2, n1 != n2",
    6: "k1 != k2, n1 = n2",
    7: "k1 != k2, n1 < n2",
    8: "k1 != k2, n1 > n2",
}


def table_summary(n1: int, n2: int, k1: int, k2: int) -> TableRow:
    """Evaluate the summary-table formulas for the matching case.

    Row 4's runtime is the tabulated ``pi/(2 sqrt 2) sqrt(n1/k1)``; the
    per-set runtime from :func:`runtimes_bothsets` is ``pi/2 sqrt(n1/k1)``.
    """
    row = classify_case(n1, n2, k1, k2)
    text = _CASE_TEXT[row]
    q = math.pi / (2 * math.sqrt(2))
    if row <= 3:
        nm, k = (n1, k1) if k2 == 0 else (n2, k2)
        other = n1 + n2 - nm
        t = q * math.sqrt((n1 + n2) / k) if row == 1 else math.pi / 2 * math.sqrt(nm / k)
        p_s = max(nm, other) / (n1 + n2)
        return TableRow(row, text, t_star=t, p_star_vertices=p_s, p_star_edges=0.5)
    if row == 4:
        return TableRow(row, text, t_star=q * math.sqrt(n1 / k1), p_star_vertices=1.0, p_star_edges=1.0)
    if row == 6:
        n = n1 + n2
        t_x, t_y = q * math.sqrt(n / k1), q * math.sqrt(n / k2)
    else:
        t_x, t_y = math.pi / 2 * math.sqrt(n1 / k1), math.pi / 2 * math.sqrt(n2 / k2)
    return TableRow(
        row, text, t_x=t_x, t_y=t_y,
        p_set_vertices=max(n1, n2) / (n1 + n2), p_set_edges=0.5,
    )


def reduced_operator(n1: int, n2: int, k1: int, k2: int) -> ReducedOperator:
    if k2 == 0:
        return reduced_operator_oneset(n1, k1)
    return reduced_operator_bothsets(n1, n2, k1, k2)
