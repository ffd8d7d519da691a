"""KG 模式引擎：E_p(n)、小 τ 极限、传播子恢复、Matsubara 求和与叶状间关系。"""

import math

import numpy as np
import pytest

from foliation import BoostMatrix, Foliation, random_boost, random_timelike
from kg_modes import (
    AccuracyError,
    CutoffError,
    PropagatorConfig,
    SingularityError,
    bessel_crosscheck,
    covariance_check,
    discrete_p0_modes,
    energy_Ep,
    energy_Ep_frame,
    extended_single_particle_shift,
    feynman_oracle,
    feynman_propagator,
    foliation_bogoliubov,
    frame_components,
    matsubara_correlator,
    momentum_correlator,
    momentum_grid,
    partial_fraction_identity,
    resolution_study,
    single_particle_shift,
    small_tau_remainder,
    thermal_oscillator,
    vacuum_energy_scaling,
)


def test_energy_at_rest_frame():
    fol = Foliation.canonical()
    assert abs(energy_Ep([0.4, 0.75], fol, 1.0) - 1.25) < 1e-15


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_energy_forms_agree_and_are_covariant(rng, dim):
    fol = random_timelike(rng, dim)
    p = rng.standard_normal((6, dim))
    np.testing.assert_allclose(energy_Ep(p, fol, 0.8), energy_Ep_frame(p, fol, 0.8), rtol=1e-10)
    boost = random_boost(rng, 1.0, dim)
    boosted = energy_Ep(p @ boost.matrix.T, fol.boosted(boost), 0.8)
    np.testing.assert_allclose(boosted, energy_Ep(p, fol, 0.8), rtol=1e-11)
    np.testing.assert_allclose(energy_Ep(p, fol.scaled(1.7), 0.8), 1.7 * energy_Ep(p, fol, 0.8), rtol=1e-12)


def test_small_tau_remainder_is_linear():
    cfg = PropagatorConfig()
    remainders, slope = small_tau_remainder([0.3, 0.5], Foliation.canonical(), cfg, [1e-3, 1e-4])
    assert remainders[1] < remainders[0]
    assert abs(slope - 1.0) < 0.02


def test_momentum_correlator_is_diagonal():
    cfg = PropagatorConfig()
    assert momentum_correlator([0.3, 0.5], Foliation.canonical(), cfg, k=[0.3, 0.6]) == 0j


def test_on_shell_momentum_hits_pole():
    cfg = PropagatorConfig(tau=1e-6, eps_reg=1e-9)
    with pytest.raises(SingularityError):
        momentum_correlator([1.0, 0.0], Foliation.canonical(), cfg)


def test_partial_fraction_identity(rng):
    p = rng.uniform(-3.0, 3.0, (50, 2))
    _, _, exact = partial_fraction_identity(p, 1.0, 1e-3)
    assert exact.max() < 1e-9
    _, _, leading = partial_fraction_identity(p, 1.0, 1e-3, mode="leading")
    assert leading.max() < 1e-1
    with pytest.raises(ValueError):
        partial_fraction_identity(p, 1.0, 1e-3, mode="other")


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("delta_kind", ["spacelike", "timelike"])
def test_propagator_recovers_feynman(dim, delta_kind):
    cfg = PropagatorConfig(dim=dim)
    delta = np.zeros(dim)
    if delta_kind == "spacelike":
        delta[0], delta[1] = 0.3, 1.2
    else:
        delta[0], delta[1] = 1.4, 0.5
    value = feynman_propagator(delta, Foliation.canonical(dim), cfg)
    oracle = feynman_oracle(delta, cfg.mass, dim)
    assert abs(value - oracle) / abs(oracle) < 1e-2


def test_covariance_compares_independent_quadratures():
    cfg = PropagatorConfig()
    fol = Foliation.from_rapidity(0.6, norm=1.8)
    x, y = np.array([0.2, 1.1]), np.array([-0.1, -0.4])
    boost = BoostMatrix.from_rapidity([0.5])
    _, _, rel = covariance_check(x, y, fol, boost, cfg)
    # 两侧的超平面参数化不同，求积误差不同但同为 O(h²)
    assert 1e-9 < rel < 1e-3
    _, _, rel_fine = covariance_check(x, y, fol, boost, cfg.with_resolution(2 * cfg.resolution))
    assert rel_fine < rel / 3
    assert covariance_check(x, y, fol, BoostMatrix.from_rapidity([0.0]), cfg)[2] == 0.0
    with pytest.raises(CutoffError):
        covariance_check(x, y, fol, BoostMatrix.from_rapidity([1.5]), cfg)
    with pytest.raises(ValueError):
        covariance_check(np.zeros(3), np.ones(3), Foliation.canonical(3), BoostMatrix.identity(3),
                         PropagatorConfig(dim=3))


def test_propagator_depends_on_regulator_through_damping():
    fol = Foliation.from_rapidity(0.6, norm=1.8)
    delta = np.array([0.3, 1.5])
    t_prime, _ = frame_components(delta, fol)
    value = feynman_propagator(delta, fol, PropagatorConfig(eps_reg=1e-3))
    damped = feynman_propagator(delta, fol, PropagatorConfig(eps_reg=1e-2))
    assert abs(damped / value - math.exp(-9e-3 * fol.norm * abs(t_prime))) < 1e-10
    assert abs(damped / value - 1.0) > 1e-3


def test_spacelike_error_estimate_shrinks_fourfold():
    coarse, fine = resolution_study(np.array([0.0, 1.0]), Foliation.canonical(), PropagatorConfig())
    assert 3.8 < coarse / fine < 4.2


def test_light_cone_is_rejected():
    with pytest.raises(AccuracyError):
        feynman_propagator([1.0, 1.0], Foliation.canonical(), PropagatorConfig())


def test_large_tau_is_rejected():
    with pytest.raises(AccuracyError):
        feynman_propagator([0.0, 1.0], Foliation.canonical(), PropagatorConfig(tau=0.1))


def test_config_validation():
    with pytest.raises(ValueError):
        PropagatorConfig(mass=0.0)
    with pytest.raises(ValueError):
        PropagatorConfig(dim=4)
    with pytest.raises(ValueError):
        PropagatorConfig(resolution=9)


def test_bessel_crosscheck():
    assert bessel_crosscheck(1.0, 1.0) < 1e-7


@pytest.mark.parametrize("theta", [0.0, 0.7, 2.0])
def test_matsubara_sum_matches_thermal_oscillator(theta):
    value = matsubara_correlator(theta, 2.0, 2000, energy=1.0)
    expected = thermal_oscillator(theta, 1.0, 2.0)
    assert abs(value - expected) / expected < 1e-8


def test_matsubara_errors():
    with pytest.raises(ValueError):
        matsubara_correlator(3.0, 2.0, 2000, energy=1.0)
    with pytest.raises(ValueError):
        matsubara_correlator(0.5, 2.0, 2000)
    with pytest.raises(AccuracyError):
        matsubara_correlator(0.5, 2.0, 1, energy=1.0)


def test_foliation_bogoliubov():
    p = [1.5, 0.2]
    alpha, beta = foliation_bogoliubov(p, Foliation.canonical(), Foliation.canonical(), 1.0)
    assert abs(alpha - 1.0) < 1e-12 and abs(beta) < 1e-12
    alpha, beta = foliation_bogoliubov(p, Foliation.canonical(), Foliation.from_rapidity(0.6), 1.0)
    assert abs(beta) > 1e-3
    assert abs(alpha ** 2 - beta ** 2 - 1.0) < 1e-12


def test_vacuum_energy_is_homogeneous():
    grid = momentum_grid(5.0, 21)
    assert grid[0].shape == (441, 2)
    _, _, ratio = vacuum_energy_scaling(Foliation.from_rapidity(0.3), 2.5, grid, 1.0)
    assert abs(ratio - 2.5) < 1e-12


@pytest.mark.parametrize("n", [1, 3, 6])
def test_discrete_p0_modes_rebuild_shift(n):
    omegas, residual, _ = discrete_p0_modes(n, 0.2)
    assert residual < 1e-12
    assert omegas[0] == 0.0
    assert abs(omegas[-1] - 2 * math.pi * (n - 1) / (n * 0.2)) < 1e-12


def test_extended_shift_restricts_to_single_particle_shift():
    np.testing.assert_array_equal(extended_single_particle_shift(4, 0.2), single_particle_shift(4))
