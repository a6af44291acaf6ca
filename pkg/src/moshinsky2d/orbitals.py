"""The one-particle density matrix kernel and its natural orbitals.

Kernel in polar coordinates::

    rho(r, r') = A exp(-B/2 (r^2 + r'^2) + C/2 r r' cos(phi - phi'))

with the partial-wave expansion ``rho = rho_0/2pi + sum_{l>=1} rho_l cos(l dphi)/pi``
and ``rho_l(r, r') = sum_n lambda_nl v_nl(r) v_nl(r')``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DerivedParams, occupancy
from .special import bessel_i_scaled

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PolarPoint:
    r: float
    phi: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"radius must be ≥ 0, got {self.r}")
        object.__setattr__(self, "phi", math.fmod(self.phi, TWO_PI) % TWO_PI)


@dataclass(frozen=True)
class OrbitalIndex:
    n: int
    l: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"radial index n must be ≥ 0, got {self.n}")


_RESCALE_AT = 1e150


def radial_orbitals(d: DerivedParams, l: int, n_max: int, r) -> np.ndarray:
    """``v_nl(r)`` for every ``n <= n_max`` at fixed ``l``; shape ``(n_max + 1,) + r.shape``.

    Runs the recurrence of the normalized Laguerre functions
    ``f_n = sqrt(n!/(n+|l|)!) L_n^|l|``::

        sqrt((n+1)(n+1+|l|)) f_{n+1} = (2n+1+|l|-x) f_n - sqrt(n(n+|l|)) f_{n-1}

    on a mantissa with a per-point log scale that absorbs
    ``sqrt(2 z^2) x^(|l|/2) exp(-x/2)``, so neither factorials nor large
    ``x = z^2 r^2`` can overflow.
    """
    l = abs(l)
    r = np.asarray(r, dtype=float)
    x = d.z2 * r * r
    with np.errstate(divide="ignore"):
        log_x = np.log(x)
    log_scale = 0.5 * math.log(2.0 * d.z2) - 0.5 * math.lgamma(l + 1) - 0.5 * x
    if l:
        log_scale = log_scale + 0.5 * l * log_x
    log_scale = np.broadcast_to(log_scale, x.shape).copy()
    out = np.empty((n_max + 1,) + x.shape)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    out[0] = np.exp(log_scale)
    for n in range(n_max):
        nxt = ((2 * n + 1 + l - x) * cur - math.sqrt(n * (n + l)) * prev) / math.sqrt(
            (n + 1) * (n + 1 + l)
        )
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE_AT
        if np.any(big):
            factor = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            cur = cur * factor
            prev = prev * factor
            log_scale = log_scale - np.log(factor)
        out[n + 1] = cur * np.exp(log_scale)
    return out


def radial_orbital(d: DerivedParams, idx: OrbitalIndex, r):
    """Radial natural orbital ``v_nl(r)``, normalized with measure ``r dr``.

    ``v_nl = sqrt(2 n! z^2/(n+|l|)!) (z r)^|l| exp(-z^2 r^2/2) L_n^|l|(z^2 r^2)``
    """
    scalar = np.ndim(r) == 0
    out = radial_orbitals(d, idx.l, idx.n, r)[idx.n]
    return float(out) if scalar else out


def natural_orbital(d: DerivedParams, idx: OrbitalIndex, p: PolarPoint) -> complex:
    """``u_nl(r, phi) = v_nl(r) exp(i l phi) / sqrt(2 pi)``."""
    amp = radial_orbital(d, idx, p.r) / math.sqrt(TWO_PI)
    angle = idx.l * p.phi
    return complex(amp * math.cos(angle), amp * math.sin(angle))


def rdm_kernel(d: DerivedParams, p: PolarPoint, q: PolarPoint) -> float:
    """Full one-particle density matrix ``rho(p, q)``."""
    radial = p.r * p.r + q.r * q.r
    cross = p.r * q.r * math.cos(p.phi - q.phi)
    return d.a_norm * math.exp(-0.5 * d.b_coef * radial + 0.5 * d.c_coef * cross)


def rdm_partial(d: DerivedParams, l: int, r, r2):
    """Partial-wave component ``rho_l(r, r') = 2 A pi exp(-B(r^2+r'^2)/2) I_l(C r r'/2)``.

    Evaluated as ``exp(x - B(r^2+r'^2)/2) * [exp(-x) I_l(x)]``; the combined
    exponent is never positive because ``2B > C``.
    """
    scalar = np.ndim(r) == 0 and np.ndim(r2) == 0
    r, r2 = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(r2, dtype=float))
    x = 0.5 * d.c_coef * r * r2
    exponent = x - 0.5 * d.b_coef * (r * r + r2 * r2)
    out = TWO_PI * d.a_norm * np.exp(exponent) * bessel_i_scaled(l, x)
    return float(out) if scalar else out


def truncated_partial(d: DerivedParams, l: int, r, r2, n_max: int):
    """``sum_{n <= n_max} lambda_nl v_nl(r) v_nl(r')``."""
    lam = np.array([occupancy(d, n, l) for n in range(n_max + 1)])
    keep = int(np.count_nonzero(lam))
    if keep == 0:
        return np.zeros(np.broadcast(np.asarray(r), np.asarray(r2)).shape)[()]
    v = radial_orbitals(d, l, keep - 1, r)
    v2 = v if r2 is r else radial_orbitals(d, l, keep - 1, r2)
    return np.tensordot(lam[:keep], v * v2, axes=1)


def reconstruct_rdm(
    d: DerivedParams, p: PolarPoint, q: PolarPoint, n_max: int, l_max: int
) -> float:
    """Truncated Schmidt sum over ``n <= n_max`` and ``|l| <= l_max``.

    Uses the real cosine form, pairing ``+l`` with ``-l``.
    """
    if n_max < 0 or l_max < 0:
        raise ValueError("cutoffs must be ≥ 0")
    dphi = p.phi - q.phi
    total = truncated_partial(d, 0, p.r, q.r, n_max) / TWO_PI
    for l in range(1, l_max + 1):
        total += truncated_partial(d, l, p.r, q.r, n_max) * math.cos(l * dphi) / math.pi
    return float(total)


def reconstruct_diagonal(d: DerivedParams, r, n_max: int, l_max: int):
    """``rho_trunc(r, r)`` on an array of radii (angle difference zero)."""
    r = np.asarray(r, dtype=float)
    total = truncated_partial(d, 0, r, r, n_max) / TWO_PI
    for l in range(1, l_max + 1):
        total = total + truncated_partial(d, l, r, r, n_max) / math.pi
    return np.asarray(total) * np.ones_like(r)
