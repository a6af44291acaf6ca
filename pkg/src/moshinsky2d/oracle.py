"""Numerical cross-checks of the closed forms.

The radial eigenproblem ``int rho_l(r, r') v(r') r' dr' = lambda v(r)`` is
discretized by the Nystrom method on Gauss-Legendre nodes and symmetrized
by the similarity ``sqrt(w_i r_i)``. The angular Fourier integral of the
full kernel is done by the trapezoidal rule, which never touches a Bessel
function. None of this calls the occupancy formulas; comparisons happen in
:func:`verify_all`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import model
from .jacobi import jacobi_eigh
from .model import DerivedParams, SystemParams
from .orbitals import OrbitalIndex, radial_orbital, rdm_partial, reconstruct_diagonal
from .quadrature import QuadratureRule, gauss_legendre

NEGATIVE_SLACK = 1e-10


def choose_radial_domain(
    d: DerivedParams, epsilon: float, n_max: int = 0, l_max: int = 0
) -> float:
    """Outer radius covering both the kernel decay and the orbitals up to the cutoffs.

    ``max(sqrt(ln(1/eps)/(B - C/2)), 1.5 sqrt(4 n_max + 2 l_max + 2) / z)``
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    decay = math.sqrt(math.log(1.0 / epsilon) / d.diag_decay)
    turning = 1.5 * math.sqrt(4 * n_max + 2 * abs(l_max) + 2) / math.sqrt(d.z2)
    return max(decay, turning)


def orbital_radius(d: DerivedParams, n_max: int, l_max: int, epsilon: float) -> float:
    """Radius beyond which ``x^(2n+|l|) e^-x`` (``x = z^2 r^2``) is below ``epsilon``."""
    power = 2 * n_max + abs(l_max) + 1
    x = math.log(1.0 / epsilon)
    for _ in range(50):
        x = math.log(1.0 / epsilon) + power * math.log(max(x, 1.0))
    return math.sqrt(x / d.z2)


def nystrom_matrix(d: DerivedParams, l: int, rule: QuadratureRule) -> np.ndarray:
    root = np.sqrt(rule.weights * rule.nodes)
    r = rule.nodes
    kernel = rdm_partial(d, l, r[:, None], r[None, :])
    m = root[:, None] * kernel * root[None, :]
    # product order leaves ulp-level asymmetry
    return 0.5 * (m + m.T)


@dataclass
class NystromResult:
    l: int
    grid: QuadratureRule = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    r_max: float
    m: int
    resolution_defect: float

    def leading(self, count: int) -> np.ndarray:
        """Top ``count`` eigenvalues with small negative noise clamped to zero."""
        vals = self.eigenvalues[:count]
        return np.where((vals < 0) & (vals > -NEGATIVE_SLACK), 0.0, vals)


def _spectrum(d, l, m, r_max):
    rule = gauss_legendre(m, 0.0, r_max)
    eigenvalues, _ = jacobi_eigh(nystrom_matrix(d, l, rule))
    return rule, eigenvalues


def nystrom_spectrum(
    d: DerivedParams, l: int, m: int, r_max: float, *, refine: bool = True
) -> NystromResult:
    """Eigenvalues of the discretized partial-wave kernel, descending.

    With ``refine`` the problem is solved again on ``2m`` nodes and the
    largest shift of the top ``m`` eigenvalues is stored as
    ``resolution_defect``; otherwise that field is NaN.
    """
    if m < 8:
        raise ValueError(f"need m ≥ 8 nodes, got {m}")
    rule, eigenvalues = _spectrum(d, l, m, r_max)
    defect = math.nan
    if refine:
        _, fine = _spectrum(d, l, 2 * m, r_max)
        defect = float(np.max(np.abs(fine[:m] - eigenvalues)))
    return NystromResult(
        l=l, grid=rule, eigenvalues=eigenvalues, r_max=r_max, m=m, resolution_defect=defect
    )


def fourier_partial(d: DerivedParams, l: int, r, r2, m_theta: int):
    """``int_0^{2pi} rho(r, r', theta) cos(l theta) d theta`` by the trapezoidal rule."""
    if m_theta < 4 * (abs(l) + 1):
        raise ValueError(f"m_theta must be ≥ 4(|l|+1) = {4 * (abs(l) + 1)}")
    scalar = np.ndim(r) == 0 and np.ndim(r2) == 0
    r, r2 = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(r2, dtype=float))
    theta = 2.0 * math.pi * np.arange(m_theta) / m_theta
    base = -0.5 * d.b_coef * (r * r + r2 * r2)
    cross = 0.5 * d.c_coef * r * r2
    integrand = np.exp(base[..., None] + cross[..., None] * np.cos(theta)) * np.cos(l * theta)
    out = d.a_norm * (2.0 * math.pi / m_theta) * integrand.sum(axis=-1)
    return float(out) if scalar else out


def angular_nodes_for(d: DerivedParams, l: int, r_max: float) -> int:
    """Trapezoid node count resolving ``exp(x cos theta)`` for ``x <= C r_max^2 / 2``."""
    x = 0.5 * d.c_coef * r_max * r_max
    m_theta = int(math.ceil(x + 12.0 * math.sqrt(x) + 40.0))
    return max(64, 4 * (abs(l) + 1), m_theta + m_theta % 2)


def orthonormality_matrix(d: DerivedParams, n_cap: int, l_cap: int, rule: QuadratureRule):
    """Gram matrix of ``u_nl`` for ``n <= n_cap, |l| <= l_cap`` under ``rule``.

    Radial overlaps (weight ``r``) come from the quadrature; entries with
    ``l != l'`` are zero through the angular factor and are set exactly.

    Returns
    -------
    gram : ndarray
    indices : list of (n, l)
    """
    indices = [(n, l) for l in range(-l_cap, l_cap + 1) for n in range(n_cap + 1)]
    r = rule.nodes
    values = {idx: radial_orbital(d, OrbitalIndex(*idx), r) for idx in indices}
    size = len(indices)
    gram = np.zeros((size, size))
    for i, (n, l) in enumerate(indices):
        for j, (n2, l2) in enumerate(indices):
            if l == l2:
                gram[i, j] = rule.integrate(r * values[(n, l)] * values[(n2, l2)])
    return gram, indices


def diagonal_defect(d: DerivedParams, n_max: int, l_max: int, rule: QuadratureRule) -> float:
    """``2 pi int r (rho - rho_trunc)(r, r) dr`` by quadrature."""
    r = rule.nodes
    full = d.a_norm * np.exp(-d.diag_decay * r * r)
    trunc = reconstruct_diagonal(d, r, n_max, l_max)
    return 2.0 * math.pi * rule.integrate(r * (full - trunc))


# -- aggregate verification ---------------------------------------------------


@dataclass(frozen=True)
class VerifyConfig:
    level: str = "quick"
    m: int = 200
    n_check: int = 8
    l_check: int = 6
    domain_eps: float = 1e-14
    tail_eps: float = 1e-10
    ortho_n: int = 3
    ortho_l: int = 3
    ortho_nodes: int = 200
    grid_points: int = 5
    nystrom_tol: float = 1e-8
    sum_rule_tol: float = 1e-6
    fourier_tol: float = 1e-10
    ortho_tol: float = 1e-9
    reconstruction_tol: float = 1e-8
    identity_tol: float = 1e-12
    participation_tol: float = 1e-14
    refinement_tol: float = 1e-10


@dataclass
class CheckResult:
    name: str
    deviation: float
    threshold: float
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    n_particles: int
    lam: float
    level: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "n_particles": self.n_particles,
            "lambda": self.lam,
            "level": self.level,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }


def _check(name, deviation, threshold, detail=""):
    deviation = float(deviation)
    return CheckResult(name, deviation, threshold, bool(deviation <= threshold), detail)


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def check_param_identities(d: DerivedParams, cfg: VerifyConfig) -> CheckResult:
    b_match = (1.0 + 2.0 * d.t / d.one_minus_t) * d.z2
    c_match = 4.0 * d.sqrt_t * d.z2 / d.one_minus_t
    two_pi_a = 2.0 * math.pi * d.a_norm
    lhs = two_pi_a * (2.0 * d.b_coef + d.s + d.c_coef)
    rhs = d.s * (2.0 * d.b_coef + d.s - d.c_coef)
    dev = max(_rel(b_match, d.b_coef), _rel(c_match, d.c_coef), _rel(lhs, rhs), _rel(d.z2, d.s / 2))
    return _check("parameter_identities", dev, cfg.identity_tol)


def check_nystrom(d: DerivedParams, cfg: VerifyConfig, r_max: float):
    """Nystrom-vs-analytic deviation, sum rule and (full level) grid refinement."""
    count = cfg.n_check + 1
    worst = 0.0
    worst_at = ""
    traces = {}
    refinement = 0.0
    for l in range(cfg.l_check + 1):
        res = nystrom_spectrum(d, l, cfg.m, r_max, refine=cfg.level == "full")
        numeric = res.leading(count)
        exact = np.array([model.occupancy(d, n, l) for n in range(count)])
        dev = float(np.max(np.abs(numeric - exact)))
        if dev > worst:
            worst, worst_at = dev, f"l={l}"
        traces[l] = math.fsum(res.eigenvalues)
        if cfg.level == "full":
            refinement = max(refinement, res.resolution_defect)
    checks = [_check("nystrom_vs_analytic", worst, cfg.nystrom_tol, worst_at)]

    # partial waves |l| <= l_check counted with their -l partners
    total = traces[0] + 2.0 * math.fsum(traces[l] for l in range(1, cfg.l_check + 1))
    q = d.sqrt_t
    eta0 = model.collective_occupancy(d, 0)
    outside = 0.0 if d.t == 0 else 2.0 * eta0 * model.t_power(q, cfg.l_check + 1) / (1.0 - q)
    checks.append(_check("nystrom_sum_rule", abs(total + outside - 1.0), cfg.sum_rule_tol))
    if cfg.level == "full":
        checks.append(_check("nystrom_grid_refinement", refinement, cfg.refinement_tol))
    return checks


def check_domain_doubling(d: DerivedParams, cfg: VerifyConfig, r_max: float) -> CheckResult:
    worst = 0.0
    for l in range(min(cfg.l_check, 3) + 1):
        base = nystrom_spectrum(d, l, cfg.m, r_max, refine=False).leading(6)
        wide = nystrom_spectrum(d, l, 2 * cfg.m, 2.0 * r_max, refine=False).leading(6)
        worst = max(worst, float(np.max(np.abs(base - wide))))
    return _check("nystrom_domain_doubling", worst, cfg.refinement_tol)


def check_fourier(d: DerivedParams, cfg: VerifyConfig, r_max: float) -> CheckResult:
    grid = np.linspace(0.0, r_max, cfg.grid_points)
    r, r2 = np.meshgrid(grid, grid, indexing="ij")
    worst = 0.0
    for l in range(cfg.l_check + 1):
        m_theta = angular_nodes_for(d, l, r_max)
        numeric = fourier_partial(d, l, r, r2, m_theta)
        closed = rdm_partial(d, l, r, r2)
        worst = max(worst, float(np.max(np.abs(numeric - closed))))
    return _check("fourier_vs_bessel", worst, cfg.fourier_tol)


def check_orthonormality(d: DerivedParams, cfg: VerifyConfig) -> CheckResult:
    r_max = max(
        choose_radial_domain(d, cfg.domain_eps, cfg.ortho_n, cfg.ortho_l),
        orbital_radius(d, cfg.ortho_n, cfg.ortho_l, cfg.domain_eps),
    )
    rule = gauss_legendre(cfg.ortho_nodes, 0.0, r_max)
    n_cap = cfg.ortho_n if d.t > 0 else 0
    l_cap = cfg.ortho_l if d.t > 0 else 0
    gram, _ = orthonormality_matrix(d, n_cap, l_cap, rule)
    dev = float(np.max(np.abs(np.abs(gram) - np.eye(len(gram)))))
    return _check("orbital_orthonormality", dev, cfg.ortho_tol)


def check_reconstruction(d: DerivedParams, cfg: VerifyConfig) -> CheckResult:
    n_max, l_max, tail = model.cutoffs_for_tail(d, cfg.tail_eps)
    r_max = max(
        choose_radial_domain(d, cfg.domain_eps, n_max, l_max),
        orbital_radius(d, n_max, l_max, cfg.domain_eps),
    )
    rule = gauss_legendre(cfg.ortho_nodes, 0.0, r_max)
    defect = diagonal_defect(d, n_max, l_max, rule)
    return _check(
        "schmidt_reconstruction",
        abs(defect - tail),
        cfg.reconstruction_tol,
        f"n_max={n_max} l_max={l_max} tail={tail:.3e}",
    )


def check_participation_identity(d: DerivedParams, cfg: VerifyConfig) -> CheckResult:
    k = model.participation_total(d)
    product = model.participation_fragment(d) * model.participation_collective(d)
    return _check("k_equals_kappa_k_eta", _rel(k, product), cfg.participation_tol)


def verify_all(
    p: SystemParams, config: VerifyConfig | None = None, *, perturb=None
) -> VerificationReport:
    """Run every cross-check for one ``(N, Lambda)``; failures are data.

    ``perturb`` maps the derived parameters to a corrupted copy and exists
    so tests can confirm the checks are sensitive.
    """
    cfg = config or VerifyConfig()
    d = model.derive_params(p)
    if perturb is not None:
        d = perturb(d)
    r_max = choose_radial_domain(d, cfg.domain_eps, cfg.n_check, cfg.l_check)
    checks = [check_param_identities(d, cfg)]
    checks.extend(check_nystrom(d, cfg, r_max))
    checks.append(check_fourier(d, cfg, r_max))
    checks.append(check_orthonormality(d, cfg))
    checks.append(check_reconstruction(d, cfg))
    checks.append(check_participation_identity(d, cfg))
    if cfg.level == "full":
        checks.append(check_domain_doubling(d, cfg, r_max))
    return VerificationReport(p.n_particles, p.lam, cfg.level, checks)
