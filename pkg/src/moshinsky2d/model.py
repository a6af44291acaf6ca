"""Closed-form parameters, occupancies and participation measures.

Everything here is a pure function of the particle number ``N`` and the
interaction strength ``Lambda`` (dimensionless: lengths in sqrt(hbar/m w),
Lambda in m w^2). The Hardy-Hille parameter ``t`` and every quantity derived
from it are evaluated in cancellation-free forms built on
``s = sqrt(4B^2 - C^2)``::

    t     = C^2 / (2B + s)^2        sqrt(t) = C / (2B + s)
    1 - t = 2s / (2B + s)           1 + t   = 4B / (2B + s)

so that nothing degrades when ``C << B`` (strong interaction) or ``C = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, ResourceLimitError

#: default hard cap on the number of (n, l) entries in an occupancy table
MAX_TABLE_ENTRIES = 1_000_000

# t**e is taken through exp(e*log t) past this exponent
_POW_LOG_THRESHOLD = 64.0


@dataclass(frozen=True)
class SystemParams:
    """Physical inputs: number of bosons and pair interaction strength."""

    n_particles: int
    lam: float

    def __post_init__(self):
        validate(self.n_particles, self.lam)

    @property
    def lambda_min(self) -> float:
        return -1.0 / (2.0 * self.n_particles)


def validate(n_particles, lam):
    """Raise :class:`DomainError` naming the violated bound."""
    if isinstance(n_particles, bool) or int(n_particles) != n_particles:
        raise DomainError(f"n_particles must be an integer, got {n_particles!r}")
    if n_particles < 2:
        raise DomainError(f"n_particles must be ≥ 2, got {n_particles}")
    lam = float(lam)
    if not math.isfinite(lam):
        raise DomainError(f"lambda must be finite, got {lam}")
    bound = -1.0 / (2.0 * n_particles)
    if lam <= bound:
        raise DomainError(
            f"lambda must be > -1/(2N) = {bound:.17g} for N={n_particles}, got {lam}"
        )


@dataclass(frozen=True)
class DerivedParams:
    """Kernel parameters ``omega, gamma, A, B, C`` plus ``t``, ``z^2`` and ``s``."""

    omega: float
    gamma: float
    a_norm: float
    b_coef: float
    c_coef: float
    t: float
    z2: float
    s: float

    @property
    def sqrt_t(self) -> float:
        return self.c_coef / (2.0 * self.b_coef + self.s)

    @property
    def one_minus_t(self) -> float:
        return 2.0 * self.s / (2.0 * self.b_coef + self.s)

    @property
    def one_plus_t(self) -> float:
        return 4.0 * self.b_coef / (2.0 * self.b_coef + self.s)

    @property
    def z(self) -> float:
        return math.sqrt(self.z2)

    @property
    def diag_decay(self) -> float:
        """``B - C/2``, the Gaussian decay rate of the kernel diagonal."""
        return self.omega / self.gamma

    def replace(self, **changes) -> "DerivedParams":
        # test hook for sensitivity canaries; bypasses all invariants
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return DerivedParams(**values)


def derive_params(p: SystemParams) -> DerivedParams:
    """Closed-form kernel and Hardy-Hille parameters for ``(N, Lambda)``.

    Raises
    ------
    DomainError
        If ``N < 2`` or ``Lambda <= -1/(2N)``.
    """
    validate(p.n_particles, p.lam)
    n = float(p.n_particles)
    lam = float(p.lam)
    omega = math.sqrt(1.0 + 2.0 * lam * n)
    # 1 - omega without cancellation near Lambda = 0
    one_minus_omega = -2.0 * lam * n / (1.0 + omega)
    gamma = (n - 1.0 + omega) / n
    a_norm = omega / (math.pi * gamma)
    c_coef = (one_minus_omega / n) ** 2 * (n - 1.0) / gamma
    decay = omega / gamma  # B - C/2
    b_coef = decay + 0.5 * c_coef
    s = math.sqrt(2.0 * decay * (2.0 * b_coef + c_coef))
    t = (c_coef / (2.0 * b_coef + s)) ** 2
    return DerivedParams(
        omega=omega,
        gamma=gamma,
        a_norm=a_norm,
        b_coef=b_coef,
        c_coef=c_coef,
        t=t,
        z2=0.5 * s,
        s=s,
    )


def t_power(t: float, exponent: float) -> float:
    """``t**exponent`` with ``0**0 = 1`` and a clean zero on underflow."""
    if exponent == 0:
        return 1.0
    if t == 0.0:
        return 0.0
    if exponent > _POW_LOG_THRESHOLD:
        return math.exp(exponent * math.log(t))
    return t**exponent


def occupancy(d: DerivedParams, n: int, l: int) -> float:
    """Occupancy ``lambda_nl`` of the natural orbital ``u_nl``."""
    if n < 0:
        raise DomainError(f"radial index n must be ≥ 0, got {n}")
    if d.t == 0.0:
        return 1.0 if (n == 0 and l == 0) else 0.0
    prefactor = math.pi * d.a_norm * d.one_minus_t / d.z2
    return prefactor * t_power(d.t, n + 0.5 * abs(l))


def collective_occupancy(d: DerivedParams, l: int) -> float:
    """Fraction ``eta_l`` of particles carrying angular momentum ``l``.

    The number of particles in the fragment is ``N * eta_l``.
    """
    if d.t == 0.0:
        return 1.0 if l == 0 else 0.0
    return math.pi * d.a_norm / d.z2 * t_power(d.sqrt_t, abs(l))


def participation_collective(d: DerivedParams) -> float:
    """Effective number of angular-momentum fragments, ``(sum_l eta_l^2)^-1``."""
    if d.t == 0.0:
        return 1.0
    pa = math.pi * d.a_norm
    return d.s**3 / (8.0 * d.b_coef * pa * pa)


def participation_total(d: DerivedParams) -> float:
    """Effective number of natural orbitals, ``(sum_nl lambda_nl^2)^-1``."""
    if d.t == 0.0:
        return 1.0
    pa = math.pi * d.a_norm
    return d.s**2 / (4.0 * pa * pa)


def participation_fragment(d: DerivedParams) -> float:
    """Effective number of radial orbitals inside one ``l`` fragment.

    Equal to ``(1 + t)/(1 - t)`` for every ``l``.
    """
    if d.t == 0.0:
        return 1.0
    return 2.0 * d.b_coef / d.s


# -- large-Lambda and large-N asymptotics ----------------------------------


@dataclass(frozen=True)
class AsymptoticEstimates:
    eta_l_approx: float
    k_eta_approx: float
    condensate_occ_approx: float
    beta_n: float


def beta(n_particles: int) -> float:
    """``N^(3/4) / (2^(1/4) sqrt(N - 1))``."""
    if n_particles < 2:
        raise DomainError(f"n_particles must be ≥ 2, got {n_particles}")
    n = float(n_particles)
    return n**0.75 / (2.0**0.25 * math.sqrt(n - 1.0))


def asymptotic_eta(p: SystemParams, l: int) -> float:
    """Two-term strong-interaction estimate of ``eta_l``.

    Only meaningful for large Lambda; at Lambda of order one it is far off
    and no warning is issued.
    """
    if p.lam <= 0:
        raise DomainError(f"asymptotic_eta needs lambda > 0, got {p.lam}")
    b = beta(p.n_particles)
    return b * p.lam**-0.25 - 2.0 * abs(l) * b * b * p.lam**-0.5


def asymptotic_k_eta(p: SystemParams) -> float:
    """Leading strong-interaction estimate ``K_eta ~ 2 Lambda^(1/4) / beta(N)``."""
    if p.lam <= 0:
        raise DomainError(f"asymptotic_k_eta needs lambda > 0, got {p.lam}")
    return 2.0 * p.lam**0.25 / beta(p.n_particles)


def condensate_deficit_large_n(p: SystemParams) -> float:
    """Large-N estimate ``sqrt(Lambda / 2N)`` of the depletion ``1 - lambda_00``."""
    if p.lam < 0:
        raise DomainError(f"condensate estimate needs lambda ≥ 0, got {p.lam}")
    return math.sqrt(p.lam / (2.0 * p.n_particles))


def asymptotic_estimates(p: SystemParams, l: int = 0) -> AsymptoticEstimates:
    return AsymptoticEstimates(
        eta_l_approx=asymptotic_eta(p, l),
        k_eta_approx=asymptotic_k_eta(p),
        condensate_occ_approx=1.0 - condensate_deficit_large_n(p),
        beta_n=beta(p.n_particles),
    )


# -- truncation of the geometric spectrum ------------------------------------


def _radial_tail(d: DerivedParams, n_max: int) -> float:
    # fraction of each l-fragment beyond n_max
    return t_power(d.t, n_max + 1)


def _angular_tail(d: DerivedParams, l_max: int) -> float:
    # sum of eta_l over |l| > l_max
    q = d.sqrt_t
    return 2.0 * t_power(q, l_max + 1) / (1.0 + q)


def tail_mass(d: DerivedParams, n_max: int, l_max: int) -> float:
    """Exact occupancy outside ``0 <= n <= n_max, |l| <= l_max``."""
    a = _radial_tail(d, n_max)
    b = _angular_tail(d, l_max)
    return a + b * (1.0 - a)


def _smallest_exponent(base: float, bound: float) -> int:
    """Smallest ``k >= 1`` with ``base**k <= bound`` (``0 <= base < 1``)."""
    if base == 0.0 or base <= bound:
        return 1
    k = max(1, int(math.ceil(math.log(bound) / math.log(base))) - 1)
    while t_power(base, k) > bound:
        k += 1
    while k > 1 and t_power(base, k - 1) <= bound:
        k -= 1
    return k


def cutoffs_for_tail(d: DerivedParams, epsilon: float) -> tuple[int, int, float]:
    """Smallest ``(n_max, l_max)`` whose exact tail mass is at most ``epsilon``.

    "Smallest" means fewest table entries ``(n_max + 1)(2 l_max + 1)``, ties
    going to the smaller ``l_max``. Returns ``(n_max, l_max, tail_mass)``.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if d.t == 0.0:
        return 0, 0, 0.0
    q = d.sqrt_t
    # angular tail 2 q^(L+1)/(1+q) must stay strictly below epsilon
    l_lo = _smallest_exponent(q, 0.5 * epsilon * (1.0 + q)) - 1
    while _angular_tail(d, l_lo) >= epsilon:
        l_lo += 1
    n_floor = _smallest_exponent(d.t, epsilon) - 1

    best = None
    l_max = l_lo
    while True:
        b = _angular_tail(d, l_max)
        room = (epsilon - b) / (1.0 - b)
        n_max = _smallest_exponent(d.t, room) - 1
        while n_max > 0 and tail_mass(d, n_max - 1, l_max) <= epsilon:
            n_max -= 1
        while tail_mass(d, n_max, l_max) > epsilon:
            n_max += 1
        size = (n_max + 1) * (2 * l_max + 1)
        if best is None or size < best[0]:
            best = (size, n_max, l_max)
        if (n_floor + 1) * (2 * (l_max + 1) + 1) > best[0] or n_max <= n_floor:
            break
        l_max += 1
    _, n_max, l_max = best
    return n_max, l_max, tail_mass(d, n_max, l_max)


@dataclass(frozen=True)
class OccupancyTable:
    """Occupancies on ``0 <= n <= n_max, |l| <= l_max`` with the exact tail mass."""

    params: DerivedParams
    n_max: int
    l_max: int
    entries: list = field(repr=False)
    tail_mass: float

    def total(self) -> float:
        return math.fsum(occ for _, _, occ in self.entries)

    def sorted_entries(self):
        """Entries by descending occupancy; ties by ``n``, ``|l|``, then ``+l`` first."""
        return sorted(self.entries, key=lambda e: (-e[2], e[0], abs(e[1]), -e[1]))


def build_occupancy_table(
    d: DerivedParams,
    epsilon: float | None = None,
    *,
    n_max: int | None = None,
    l_max: int | None = None,
    max_entries: int = MAX_TABLE_ENTRIES,
) -> OccupancyTable:
    """Enumerate ``lambda_nl`` up to cutoffs chosen from ``epsilon`` or given explicitly.

    Raises
    ------
    ResourceLimitError
        If the table would hold more than ``max_entries`` entries.
    """
    if epsilon is not None:
        if n_max is not None or l_max is not None:
            raise DomainError("give either epsilon or explicit (n_max, l_max), not both")
        n_max, l_max, _ = cutoffs_for_tail(d, epsilon)
    elif n_max is None or l_max is None:
        raise DomainError("explicit truncation needs both n_max and l_max")
    if n_max < 0 or l_max < 0:
        raise DomainError("cutoffs must be ≥ 0")
    size = (n_max + 1) * (2 * l_max + 1)
    if size > max_entries:
        raise ResourceLimitError(
            f"occupancy table would hold {size} entries (n_max={n_max}, "
            f"l_max={l_max}); limit is {max_entries}"
        )
    entries = []
    for n in range(n_max + 1):
        for l in range(-l_max, l_max + 1):
            entries.append((n, l, occupancy(d, n, l)))
    return OccupancyTable(
        params=d,
        n_max=n_max,
        l_max=l_max,
        entries=entries,
        tail_mass=tail_mass(d, n_max, l_max),
    )
