"""Gauss-Legendre quadrature by Newton iteration on P_m."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

NEWTON_TOL = 1e-15
NEWTON_MAX_STEPS = 100


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    lo: float
    hi: float

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    def __len__(self):
        return len(self.nodes)


def _legendre_and_derivative(m, x):
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(1, m):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = m * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_legendre(m: int, lo: float = -1.0, hi: float = 1.0) -> QuadratureRule:
    """``m``-point Gauss-Legendre rule on ``[lo, hi]``, nodes ascending."""
    if m < 1:
        raise ValueError(f"need at least one node, got m={m}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if m == 1:
        x = np.zeros(1)
        dp = np.ones(1)
    else:
        k = np.arange(1, m + 1)
        x = np.cos(math.pi * (k - 0.25) / (m + 0.5))
        for _ in range(NEWTON_MAX_STEPS):
            p, dp = _legendre_and_derivative(m, x)
            step = p / dp
            x = x - step
            if np.max(np.abs(step)) <= NEWTON_TOL:
                break
        else:
            raise ConvergenceError(
                f"Gauss-Legendre Newton iteration did not converge for m={m}"
            )
        _, dp = _legendre_and_derivative(m, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    half = 0.5 * (hi - lo)
    return QuadratureRule(
        nodes=lo + half * (x + 1.0), weights=half * w, lo=float(lo), hi=float(hi)
    )
