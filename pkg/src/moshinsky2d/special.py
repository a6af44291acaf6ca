"""Generalized Laguerre polynomials and exponentially scaled Bessel I_l.

Both functions accept scalars or numpy arrays for ``x`` and return the same
shape (a Python float for scalar input).
"""

import math

import numpy as np

# series below, Miller recurrence above
SERIES_MAX_X = 30.0

_RESCALE_AT = 1e200


def _as_output(values, scalar):
    return float(values) if scalar else values


def laguerre(n, alpha, x):
    """Generalized Laguerre polynomial ``L_n^alpha(x)`` by upward recurrence.

    ``(k+1) L_{k+1} = (2k + 1 + alpha - x) L_k - (k + alpha) L_{k-1}``
    """
    if n < 0:
        raise ValueError(f"degree must be ≥ 0, got {n}")
    if alpha <= -1:
        raise ValueError(f"alpha must be > -1, got {alpha}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return _as_output(prev, scalar)
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return _as_output(cur, scalar)


def _ive_series(l, x):
    # e^{-x} sum_k (x/2)^{2k+l} / (k! (k+l)!), all terms positive
    half = 0.5 * x
    safe = np.where(x > 0, half, 1.0)
    log_lead = l * np.log(safe) - math.lgamma(l + 1) - x
    term = np.where(x > 0, np.exp(log_lead), 1.0 if l == 0 else 0.0)
    total = term.copy()
    q = half * half
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + l))
        total += term
        if not np.any(term > 1e-17 * total):
            break
    return total


def _miller_start(l, xmax):
    # I_k/I_0 ~ exp(-k^2/2x) below k ~ x; sqrt(80 x) buys ~1e-17
    return l + 30 + int(math.sqrt(80.0 * xmax))


def _ive_miller(l, x):
    # downward recurrence I_{k-1} = (2k/x) I_k + I_{k+1}, normalized with
    # I_0 + 2 sum_{k>=1} I_k = e^x
    start = _miller_start(l, float(np.max(x)))
    upper = np.zeros_like(x)
    cur = np.full_like(x, 1e-300)
    total = np.zeros_like(x)
    picked = np.zeros_like(x)
    two_over_x = 2.0 / x
    for k in range(start, 0, -1):
        # cur holds I_k, upper I_{k+1}
        if k == l:
            picked = cur.copy()
        total += 2.0 * cur
        lower = k * two_over_x * cur + upper
        upper, cur = cur, lower
        big = cur > _RESCALE_AT
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            cur *= scale
            upper *= scale
            total *= scale
            picked *= scale
    total += cur
    if l == 0:
        picked = cur
    return picked / total


def bessel_i_scaled(l, x):
    """``exp(-x) * I_l(x)`` for integer order and ``x >= 0``.

    Finite for every ``x``, including arguments where ``I_l`` alone
    overflows. Negative orders map to ``|l|``.
    """
    l = abs(int(l))
    scalar = np.ndim(x) == 0
    shape = np.shape(x)
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if np.any(x < 0):
        raise ValueError("bessel_i_scaled needs x ≥ 0")
    out = np.empty_like(x)
    small = x <= SERIES_MAX_X
    if np.any(small):
        out[small] = _ive_series(l, x[small])
    if np.any(~small):
        out[~small] = _ive_miller(l, x[~small])
    if scalar:
        return float(out[0])
    return out.reshape(shape)
