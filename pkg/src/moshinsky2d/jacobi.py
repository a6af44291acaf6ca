"""Cyclic Jacobi eigensolver for dense real symmetric matrices.

Each sweep visits every off-diagonal pair once, in round-robin (tournament)
order: the ``m - 1`` rounds of a sweep each hold ``m // 2`` disjoint pairs,
so the rotations of one round commute and are applied together as
vectorized row and column updates.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError

MAX_SWEEPS = 30
OFF_TOL = 1e-14


def _round_robin(m):
    """Rounds of disjoint ``(p, q)`` pairs covering every pair of ``range(m)`` once."""
    players = list(range(m)) + ([-1] if m % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        p, q = [], []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a >= 0 and b >= 0:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=int), np.array(q, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a):
    upper = np.triu(a, 1)
    return np.sqrt(2.0 * np.sum(upper * upper))


def jacobi_eigh(
    matrix, *, vectors: bool = False, tol: float = OFF_TOL, max_sweeps: int = MAX_SWEEPS
):
    """Eigen-decomposition of a symmetric matrix.

    Parameters
    ----------
    matrix : array_like, shape (m, m)
        Symmetric input; only its symmetric part is used.
    vectors : bool
        Also accumulate the orthogonal eigenvector matrix.
    tol : float
        Stop once the off-diagonal Frobenius norm is below ``tol * ||M||_F``.

    Returns
    -------
    eigenvalues : ndarray
        Descending.
    eigenvectors : ndarray, only if ``vectors``
        Columns matching ``eigenvalues``.
    sweeps : int
        Sweeps performed.

    Raises
    ------
    ConvergenceError
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need a square matrix, got shape {a.shape}")
    a = 0.5 * (a + a.T)
    m = a.shape[0]
    v = np.eye(m) if vectors else None
    threshold = tol * np.linalg.norm(a)
    # pairs below this cannot keep the off-diagonal norm above threshold
    negligible = threshold / max(m, 1)
    rounds = _round_robin(m)
    sweeps = 0
    while _off_norm(a) > threshold:
        if sweeps == max_sweeps:
            raise ConvergenceError(
                f"Jacobi: off-diagonal norm {_off_norm(a):.3e} above "
                f"{threshold:.3e} after {max_sweeps} sweeps"
            )
        sweeps += 1
        for p, q in rounds:
            apq = a[p, q]
            active = np.abs(apq) > negligible
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            tan = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            tan = np.where(theta == 0.0, 1.0, tan)
            cos = 1.0 / np.sqrt(tan * tan + 1.0)
            sin = tan * cos
            # exact diagonal update; the row/column passes would add rounding
            diag_p = a[p, p] - tan * apq
            diag_q = a[q, q] + tan * apq
            # A <- J^T A J with J acting on the (p, q) planes
            rows_p, rows_q = a[p, :], a[q, :]
            a[p, :] = cos[:, None] * rows_p - sin[:, None] * rows_q
            a[q, :] = sin[:, None] * rows_p + cos[:, None] * rows_q
            cols_p, cols_q = a[:, p], a[:, q]
            a[:, p] = cols_p * cos - cols_q * sin
            a[:, q] = cols_p * sin + cols_q * cos
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = diag_p
            a[q, q] = diag_q
            if v is not None:
                vp, vq = v[:, p], v[:, q]
                v[:, p] = vp * cos - vq * sin
                v[:, q] = vp * sin + vq * cos
    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues)[::-1]
    if vectors:
        return eigenvalues[order], v[:, order], sweeps
    return eigenvalues[order], sweeps
