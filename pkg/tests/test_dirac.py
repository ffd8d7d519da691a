"""Dirac 场的叶状形式：Clifford 代数、旋量 boost、Dirac 动量与平面波残差。"""

import numpy as np
import pytest

from dirac import (
    STANDARD,
    SpinorBoost,
    composition_residual,
    derivative_kernel_residual,
    dirac_bar,
    dirac_momentum,
    dirac_pi_to_psibar,
    dirac_residual,
    gamma_prime0,
    hamiltonian_invariance,
    momentum_covariance_residual,
    on_shell_energy,
    plane_wave_spinor,
    random_omega,
    rest_density,
    slash_square_residual,
    spinor_boost_checks,
)
from foliation import Foliation, FoliationError, random_timelike
from utils import random_unitary


def _on_shell(spatial, m):
    p = np.concatenate([[0.0], spatial])
    p[0] = on_shell_energy(p, m)
    return p


def test_clifford_algebra():
    assert STANDARD.clifford_residual() < 1e-14
    assert STANDARD.similar(random_unitary(np.random.default_rng(3), 4)).clifford_residual() < 1e-13
    np.testing.assert_allclose(STANDARD.gamma5 @ STANDARD.gamma5, np.eye(4), atol=1e-14)


def test_slash_square_for_any_norm(rng):
    for _ in range(5):
        fol = random_timelike(rng, 4)
        assert slash_square_residual(fol) < 1e-12 * max(1.0, fol.norm_sq) * 10


def test_gamma_prime0_requires_unit_foliation():
    with pytest.raises(FoliationError):
        gamma_prime0(Foliation.from_rapidity(0.4, dim=4, norm=2.0))
    with pytest.raises(ValueError):
        gamma_prime0(Foliation.canonical(2))


def test_spinor_boost_requires_antisymmetric_generator():
    omega = np.zeros((4, 4))
    omega[0, 1] = 0.3
    with pytest.raises(ValueError):
        SpinorBoost(omega)


@pytest.mark.parametrize("boost", [SpinorBoost.boost(0.7), SpinorBoost.boost(-0.4, axis=3),
                                   SpinorBoost.rotation(1.1, (2, 3))])
def test_spinor_covariance(boost):
    assert boost.covariance_residual() < 1e-12


def test_random_generators(rng):
    for _ in range(10):
        omega = random_omega(rng)
        np.testing.assert_array_equal(omega, -omega.T)
        report = spinor_boost_checks(omega)
        assert report.covariance_residual < 1e-12
        assert not report.rotation_only
    rotation = spinor_boost_checks(random_omega(rng, rotations_only=True))
    assert rotation.rotation_only
    assert rotation.unitarity_defect < 1e-12


def test_boost_is_not_unitary():
    assert SpinorBoost.boost(0.5).unitarity_defect() > 1e-3


def test_commuting_generators_compose():
    assert composition_residual(SpinorBoost.boost(0.3), SpinorBoost.boost(0.45)) < 1e-12
    boost = SpinorBoost.boost(0.6)
    np.testing.assert_allclose(boost.matrix @ boost.inverse().matrix, np.eye(4), atol=1e-12)


def test_plane_wave_normalization():
    p = _on_shell([0.3, -0.2, 0.5], 1.3)
    for branch in (0, 1):
        u = plane_wave_spinor(p, 1.3, branch)
        assert abs(dirac_bar(u) @ u - 2 * 1.3) < 1e-12
    with pytest.raises(ValueError):
        plane_wave_spinor(p, 1.3, branch=2)


def test_dirac_residual_vanishes_on_shell():
    fol = Foliation.from_rapidity(0.8, dim=4, direction=(1.0, 2.0, -1.0))
    p = _on_shell([0.4, 0.1, -0.7], 1.0)
    for branch in (0, 1):
        residual, on_shell = dirac_residual(p, branch, fol, 1.0)
        assert on_shell
        assert residual < 1e-10
    residual, on_shell = dirac_residual(p + np.array([0.2, 0.0, 0.0, 0.0]), 0, fol, 1.0)
    assert not on_shell
    assert residual > 1e-3


def test_momentum_round_trip_and_covariance(rng):
    fol = Foliation.from_rapidity(0.5, dim=4, direction=(0.0, 1.0, 1.0))
    psi_bar = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    pi = dirac_momentum(psi_bar, fol)
    np.testing.assert_allclose(dirac_pi_to_psibar(pi, fol), psi_bar, atol=1e-12)
    assert momentum_covariance_residual(psi_bar, fol, SpinorBoost.boost(0.4, axis=2)) < 1e-12


def test_hamiltonian_density_is_scalar(rng):
    fol = Foliation.from_rapidity(0.3, dim=4)
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    pi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    p = _on_shell([0.2, 0.5, -0.1], 1.0)
    boost = SpinorBoost.from_omega(random_omega(rng, scale=0.3))
    assert hamiltonian_invariance(psi, pi, fol, 1.0, p, boost) < 1e-10


def test_derivative_kernel_has_no_normal_component():
    assert derivative_kernel_residual(Foliation.from_rapidity(0.9, dim=4, direction=(1.0, 0.0, 1.0))) < 1e-12


def test_rest_frame_density():
    density, expected = rest_density(1.7)
    assert abs(density - expected) < 1e-12
