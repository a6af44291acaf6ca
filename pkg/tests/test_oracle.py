import math

import numpy as np
import pytest

from moshinsky2d.model import SystemParams, collective_occupancy, derive_params, occupancy
from moshinsky2d.oracle import (
    VerifyConfig,
    angular_nodes_for,
    choose_radial_domain,
    fourier_partial,
    nystrom_matrix,
    nystrom_spectrum,
    orthonormality_matrix,
    verify_all,
)
from moshinsky2d.orbitals import rdm_partial
from moshinsky2d.quadrature import gauss_legendre

FREE = derive_params(SystemParams(2, 0.0))
TWO_ONE = derive_params(SystemParams(2, 1.0))


def test_domain_formula():
    assert choose_radial_domain(FREE, 1e-12) == pytest.approx(5.256521769756932, rel=1e-14)
    d = TWO_ONE
    expected = max(
        math.sqrt(math.log(1e14) / d.diag_decay), 1.5 * math.sqrt(4 * 8 + 2 * 6 + 2) / d.z
    )
    assert choose_radial_domain(d, 1e-14, 8, 6) == pytest.approx(expected, rel=1e-15)
    with pytest.raises(ValueError):
        choose_radial_domain(d, 0.0)


def test_domain_grows_with_cutoffs_and_precision():
    d = TWO_ONE
    assert choose_radial_domain(d, 1e-14) >= choose_radial_domain(d, 1e-8)
    assert choose_radial_domain(d, 1e-10, 20, 0) >= choose_radial_domain(d, 1e-10, 5, 0)
    assert choose_radial_domain(d, 1e-10, 0, 20) >= choose_radial_domain(d, 1e-10, 0, 5)


def test_nystrom_matrix_is_symmetric():
    rule = gauss_legendre(40, 0.0, 6.0)
    m = nystrom_matrix(TWO_ONE, 2, rule)
    assert np.array_equal(m, m.T)


def test_nystrom_free_spectrum():
    r_max = choose_radial_domain(FREE, 1e-14, 8, 6)
    res = nystrom_spectrum(FREE, 0, 64, r_max, refine=False)
    assert res.leading(1)[0] == pytest.approx(1.0, abs=1e-13)
    assert np.max(np.abs(res.leading(9)[1:])) <= 1e-13
    res = nystrom_spectrum(FREE, 3, 64, r_max, refine=False)
    assert np.max(np.abs(res.leading(9))) <= 1e-13


@pytest.mark.parametrize("l", [0, 1, 3, 6])
def test_nystrom_matches_occupancies(l):
    d = TWO_ONE
    r_max = choose_radial_domain(d, 1e-14, 8, 6)
    res = nystrom_spectrum(d, l, 128, r_max, refine=False)
    exact = np.array([occupancy(d, n, l) for n in range(9)])
    assert np.max(np.abs(res.leading(9) - exact)) <= 1e-12


def test_nystrom_trace_is_collective_occupancy():
    d = TWO_ONE
    r_max = choose_radial_domain(d, 1e-14, 8, 6)
    for l in (0, 2):
        res = nystrom_spectrum(d, l, 128, r_max, refine=False)
        assert math.fsum(res.eigenvalues) == pytest.approx(collective_occupancy(d, l), rel=1e-12)


def test_nystrom_error_falls_as_nodes_double():
    d = derive_params(SystemParams(500, 1e4))
    r_max = choose_radial_domain(d, 1e-14, 8, 6)
    exact = np.array([occupancy(d, n, 0) for n in range(9)])
    errors = [
        np.max(np.abs(nystrom_spectrum(d, 0, m, r_max, refine=False).leading(9) - exact))
        for m in (16, 32, 64)
    ]
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-10


def test_nystrom_refinement_and_domain_doubling():
    d = TWO_ONE
    r_max = choose_radial_domain(d, 1e-14, 8, 6)
    res = nystrom_spectrum(d, 1, 100, r_max)
    assert res.resolution_defect <= 1e-12
    wide = nystrom_spectrum(d, 1, 200, 2 * r_max, refine=False)
    assert np.max(np.abs(res.leading(6) - wide.leading(6))) <= 1e-12
    assert math.isnan(nystrom_spectrum(d, 1, 16, r_max, refine=False).resolution_defect)
    with pytest.raises(ValueError):
        nystrom_spectrum(d, 1, 4, r_max)


def test_fourier_matches_bessel():
    d = TWO_ONE
    r_max = choose_radial_domain(d, 1e-14, 8, 6)
    grid = np.linspace(0, r_max, 5)
    r, r2 = np.meshgrid(grid, grid, indexing="ij")
    for l in range(7):
        m_theta = angular_nodes_for(d, l, r_max)
        got = fourier_partial(d, l, r, r2, m_theta)
        assert np.max(np.abs(got - rdm_partial(d, l, r, r2))) <= 1e-10


def test_fourier_converged_in_node_count():
    a = fourier_partial(TWO_ONE, 0, 1.0, 1.0, 64)
    b = fourier_partial(TWO_ONE, 0, 1.0, 1.0, 32)
    assert abs(a - b) < 1e-10
    assert a == pytest.approx(0.6188664933105211, rel=1e-13)


def test_fourier_rejects_too_few_nodes():
    with pytest.raises(ValueError):
        fourier_partial(TWO_ONE, 3, 1.0, 1.0, 12)


def test_orthonormality_gram():
    d = derive_params(SystemParams(50, 0.1))
    rule = gauss_legendre(200, 0.0, 12.0 / d.z)
    gram, indices = orthonormality_matrix(d, 3, 3, rule)
    assert len(indices) == 4 * 7
    assert np.max(np.abs(gram - np.eye(len(gram)))) <= 1e-9


@pytest.mark.parametrize("n,lam", [(2, 0.0), (2, 1.0), (500, 1e4)])
def test_verify_all_passes(n, lam):
    report = verify_all(SystemParams(n, lam))
    assert report.passed, [c for c in report.checks if not c.passed]
    names = {c.name for c in report.checks}
    assert {"nystrom_vs_analytic", "fourier_vs_bessel", "schmidt_reconstruction"} <= names


def test_verify_full_level_adds_checks():
    report = verify_all(SystemParams(2, 1.0), VerifyConfig(level="full", m=100))
    names = [c.name for c in report.checks]
    assert "nystrom_grid_refinement" in names and "nystrom_domain_doubling" in names
    assert report.passed
    data = report.to_dict()
    assert data["passed"] is True and data["level"] == "full"


def test_verify_detects_corrupted_parameters():
    report = verify_all(SystemParams(2, 1.0), perturb=lambda d: d.replace(t=d.t * 1.01))
    assert not report.passed
    failed = {c.name for c in report.checks if not c.passed}
    assert "nystrom_vs_analytic" in failed
