"""Dense eigensolver for small complex matrices.

Householder reduction to Hessenberg form, then single-shift complex QR
(Wilkinson shifts, Givens rotations) down to a Schur form ``A = Z T Z^H``.
Eigenvectors come from back-substitution on ``T``; for normal matrices
(everything unitary in this package) the Schur vectors already are
eigenvectors and are returned directly, which keeps degenerate eigenspaces
orthonormal.

Meant for the 4x4 and 8x8 operators here, not for large problems.
"""

from __future__ import annotations

import numpy as np

EPS = np.finfo(float).eps


class ConvergenceError(RuntimeError):
    pass


def hessenberg(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(H, Q)`` with ``a = Q H Q^H`` and ``H`` upper Hessenberg."""
    h = np.array(a, dtype=np.complex128)
    n = h.shape[0]
    q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        x = h[k + 1 :, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, :])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        q[:, k + 1 :] -= 2.0 * np.outer(q[:, k + 1 :] @ v, v.conj())
        h[k + 2 :, k] = 0.0
    return h, q


def _givens(a: complex, b: complex) -> tuple[complex, complex]:
    # G = [[conj(c), conj(s)], [-s, c]] maps (a, b) to (r, 0).
    r = np.hypot(abs(a), abs(b))
    if r == 0.0:
        return 1.0 + 0j, 0j
    return a / r, b / r


def _wilkinson_shift(h: np.ndarray, hi: int) -> complex:
    a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
    c, d = h[hi, hi - 1], h[hi, hi]
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr / 4 - det)
    mu1, mu2 = tr / 2 + disc, tr / 2 - disc
    return mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2


def schur(a: np.ndarray, max_iter: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur form: returns ``(T, Z)`` with ``a = Z T Z^H``."""
    h, z = hessenberg(a)
    n = h.shape[0]
    scale = max(np.max(np.abs(h)), np.finfo(float).tiny)
    hi = n - 1
    its = 0
    while hi > 0:
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if abs(h[lo, lo - 1]) <= EPS * (s if s > 0 else scale):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        its += 1
        if its > max_iter:
            raise ConvergenceError(f"QR iteration did not converge at index {hi}")
        if its % 11 == 10:
            mu = h[hi, hi] + abs(h[hi, hi - 1])  # exceptional shift
        else:
            mu = _wilkinson_shift(h, hi)

        for j in range(lo, hi + 1):
            h[j, j] -= mu
        rotations = []
        for j in range(lo, hi):
            c, s = _givens(h[j, j], h[j + 1, j])
            rows = h[[j, j + 1], j:].copy()
            h[j, j:] = np.conj(c) * rows[0] + np.conj(s) * rows[1]
            h[j + 1, j:] = -s * rows[0] + c * rows[1]
            h[j + 1, j] = 0.0
            rotations.append((j, c, s))
        for j, c, s in rotations:
            for m in (h[: hi + 1], z):
                cols = m[:, [j, j + 1]].copy()
                m[:, j] = cols[:, 0] * c + cols[:, 1] * s
                m[:, j + 1] = -cols[:, 0] * np.conj(s) + cols[:, 1] * np.conj(c)
        for j in range(lo, hi + 1):
            h[j, j] += mu
    return np.triu(h), z


def eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and unit-norm eigenvectors (as columns) of a square matrix."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"square matrix expected, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.complex128), np.empty((0, 0), dtype=np.complex128)
    t, z = schur(a)
    values = np.diag(t).copy()
    norm = max(np.max(np.abs(a)), np.finfo(float).tiny)
    off = np.max(np.abs(np.triu(t, 1))) if n > 1 else 0.0
    if off <= 100 * n * EPS * norm:
        return values, z

    smin = EPS * norm
    y = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        y[i, i] = 1.0
        for j in range(i - 1, -1, -1):
            denom = t[j, j] - t[i, i]
            if abs(denom) < smin:
                denom = smin
            y[j, i] = -(t[j, j + 1 : i + 1] @ y[j + 1 : i + 1, i]) / denom
    vectors = z @ y
    vectors /= np.linalg.norm(vectors, axis=0)
    return values, vectors
