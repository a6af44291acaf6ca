import numpy as np
import pytest

from moshinsky2d.errors import ConvergenceError
from moshinsky2d.jacobi import _round_robin, jacobi_eigh
from moshinsky2d.quadrature import gauss_legendre


def test_one_point_rule():
    rule = gauss_legendre(1, -1, 1)
    assert rule.nodes.tolist() == [0.0]
    assert rule.weights.tolist() == [2.0]


def test_two_point_rule():
    rule = gauss_legendre(2, -1, 1)
    assert rule.nodes == pytest.approx([-1 / np.sqrt(3), 1 / np.sqrt(3)], abs=1e-15)
    assert rule.weights == pytest.approx([1.0, 1.0], abs=1e-15)


def test_polynomial_exactness():
    rule = gauss_legendre(20, 0, 1)
    assert abs(rule.integrate(rule.nodes**5) - 1 / 6) <= 1e-15
    assert rule.integrate(rule.nodes**39) == pytest.approx(1 / 40, rel=1e-13)


@pytest.mark.parametrize("m", [3, 17, 64, 200, 400])
def test_rule_invariants_and_numpy_agreement(m):
    rule = gauss_legendre(m, 0.0, 3.5)
    assert np.all(np.diff(rule.nodes) > 0)
    assert rule.nodes[0] > 0 and rule.nodes[-1] < 3.5
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(3.5, rel=1e-12)
    x, w = np.polynomial.legendre.leggauss(m)
    assert np.allclose(rule.nodes, 1.75 * (x + 1), atol=1e-14)
    assert np.allclose(rule.weights, 1.75 * w, rtol=1e-12)


def test_rule_rejects_bad_input():
    with pytest.raises(ValueError):
        gauss_legendre(0)
    with pytest.raises(ValueError):
        gauss_legendre(4, 1.0, 1.0)


@pytest.mark.parametrize("m", [2, 5, 8, 11])
def test_round_robin_covers_each_pair_once(m):
    seen = []
    for p, q in _round_robin(m):
        assert len(set(p) | set(q)) == 2 * len(p)
        seen += list(zip(p.tolist(), q.tolist()))
    assert sorted(seen) == [(i, j) for i in range(m) for j in range(i + 1, m)]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_jacobi_reconstructs_random_symmetric(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((50, 50))
    a = a + a.T
    w, v, _ = jacobi_eigh(a, vectors=True)
    norm = np.linalg.norm(a)
    assert np.linalg.norm(v @ np.diag(w) @ v.T - a) <= 1e-12 * norm
    assert np.linalg.norm(v.T @ v - np.eye(50)) <= 1e-12
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(w, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-12 * norm)


def test_jacobi_small_cases():
    w, sweeps = jacobi_eigh(np.diag([1.0, 3.0, 2.0]))
    assert w.tolist() == [3.0, 2.0, 1.0] and sweeps == 0
    w, _ = jacobi_eigh([[2.0, 1.0], [1.0, 2.0]])
    assert w == pytest.approx([3.0, 1.0], abs=1e-15)
    w, _ = jacobi_eigh([[5.0]])
    assert w.tolist() == [5.0]


def test_jacobi_low_rank_psd():
    rng = np.random.default_rng(7)
    basis = np.linalg.qr(rng.standard_normal((60, 60)))[0]
    spectrum = 0.5 ** np.arange(60)
    a = basis @ np.diag(spectrum) @ basis.T
    w, _ = jacobi_eigh(a)
    assert np.max(np.abs(w - spectrum)) <= 1e-14
    assert np.max(np.abs(w[30:] - spectrum[30:])) <= 1e-15


def test_jacobi_reports_exhausted_sweeps():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((30, 30))
    with pytest.raises(ConvergenceError):
        jacobi_eigh(a + a.T, max_sweeps=1)


def test_jacobi_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigh(np.zeros((2, 3)))
