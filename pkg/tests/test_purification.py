"""广义纯化：成对真空的重叠、Bogoliubov 系数、湮灭残差、约化态与赝熵。"""

import math

import numpy as np
import pytest

import purification
from models import NumericPolicy
from operator_core import Operator, pauli
from purification import (
    SMALL_STATE_DIM,
    ModeSpectrum,
    SpectrumError,
    TraceError,
    TruncatedFockSpace,
    TruncationError,
    annihilation_check,
    bogoliubov_coeffs,
    closed_form_occupancy,
    closed_form_overlap,
    conjugate_annihilation_check,
    leading_eigenvalue,
    number_operator,
    occupancy_truncation_bound,
    pseudo_entropy,
    purified_vacua,
    purify_operator,
    qubit_generalized_state,
    reduced_state,
    required_n_max,
    thermal_target,
    truncated_overlap,
    weak_value,
)
from utils import random_density_matrix, random_matrix


def test_single_mode_overlap():
    spectrum = ModeSpectrum((1.0 + 0.5j,))
    state = purified_vacua(spectrum, TruncatedFockSpace(40))
    assert abs(state.overlap - truncated_overlap(spectrum, 40)) < 1e-12
    assert abs(state.overlap - closed_form_overlap(spectrum)) < 1e-12


def test_two_mode_overlap_is_product():
    policy = NumericPolicy(truncation_bound=1e-3)
    spectrum = ModeSpectrum((2.0, 2.5 - 0.3j))
    state = purified_vacua(spectrum, TruncatedFockSpace(5, modes=2, policy=policy))
    assert state.shape == (6, 6, 6, 6)
    assert abs(state.overlap - truncated_overlap(spectrum, 5)) < 1e-12


def test_required_n_max():
    assert required_n_max(1.0, 1e-12) == 28
    with pytest.raises(TruncationError) as info:
        purified_vacua(ModeSpectrum((1.0,)), TruncatedFockSpace(10))
    assert info.value.required_n_max == 28


def test_small_real_part_is_not_materialized():
    with pytest.raises(TruncationError):
        purified_vacua(ModeSpectrum((0.3,)), TruncatedFockSpace(200, policy=NumericPolicy(dimension_cap=2 ** 16)))
    # 闭式仍然可用
    assert abs(closed_form_overlap(ModeSpectrum((0.3,))) - 1.0 / (1.0 - math.exp(-0.3))) < 1e-12


def test_spectrum_requires_positive_real_part():
    with pytest.raises(SpectrumError):
        ModeSpectrum((0.0,))
    with pytest.raises(SpectrumError):
        ModeSpectrum(())
    with pytest.raises(SpectrumError):
        bogoliubov_coeffs(-1.0)


def test_bogoliubov_coefficients():
    pair = bogoliubov_coeffs(1.0)
    assert abs(pair.u - 1.257772) < 1e-6
    assert abs(pair.v + 0.762878) < 1e-6
    assert pair.hyperbolic_residual < 1e-12
    assert bogoliubov_coeffs(0.7 + 2.1j).hyperbolic_residual < 1e-12


@pytest.mark.parametrize("lam", [1.0, 1.5 + 0.8j])
def test_ladder_operators_annihilate_vacua(lam):
    fock = TruncatedFockSpace(required_n_max(lam, 1e-24))
    state = purified_vacua(ModeSpectrum((lam,)), fock)
    assert annihilation_check(state, lam, fock) < 1e-8
    assert conjugate_annihilation_check(state, lam, fock) < 1e-8


def test_reduced_state_is_thermal():
    lam = 1.2 - 0.4j
    state = purified_vacua(ModeSpectrum((lam,)), TruncatedFockSpace(40))
    np.testing.assert_allclose(reduced_state(state).data, thermal_target(lam, 40), atol=1e-13)


def test_occupancy_weak_value():
    lam = 1.0 + 0.3j
    n_max = 40
    state = purified_vacua(ModeSpectrum((lam,)), TruncatedFockSpace(n_max))
    occupancy = weak_value(state, number_operator(n_max))
    assert abs(occupancy - closed_form_occupancy(lam)) <= occupancy_truncation_bound(lam, n_max) + 1e-12


def test_purify_operator_reduces_to_normalized_input(rng):
    x = Operator(random_matrix(rng, 3), (3,))
    state = purify_operator(x)
    np.testing.assert_allclose(reduced_state(state).data, x.data / x.trace(), atol=1e-12)
    obs = Operator(random_matrix(rng, 3), (3,))
    expected = np.trace(obs.data @ x.data) / x.trace()
    assert abs(weak_value(state, obs) - expected) < 1e-12


def test_qubit_state_reduces_to_unit_trace():
    state = qubit_generalized_state(pauli(1), 0.3)
    assert abs(state.overlap - math.cos(0.6) / 2) < 1e-12
    assert abs(reduced_state(state).trace() - 1.0) < 1e-12


def test_pseudo_entropy_of_density_matrix(rng):
    assert abs(pseudo_entropy(np.eye(2) / 2) - math.log(2)) < 1e-12
    rho = random_density_matrix(rng, 4)
    p = np.linalg.eigvalsh(rho)
    assert abs(pseudo_entropy(rho) - (-np.sum(p * np.log(p)))) < 1e-10
    with pytest.raises(TraceError):
        pseudo_entropy(np.eye(2))


def test_pseudo_entropy_of_rank_one_state(rng):
    state = purify_operator(Operator(random_matrix(rng, 2), (2,)))
    assert abs(pseudo_entropy(state)) < 1e-10


def test_pseudo_entropy_of_large_purified_vacua():
    state = purified_vacua(ModeSpectrum((1.0 + 0.5j,)), TruncatedFockSpace(40))
    assert state.ket.dim > SMALL_STATE_DIM
    assert abs(leading_eigenvalue(state) - 1.0) < 1e-10
    assert abs(pseudo_entropy(state)) < 1e-10


def test_iterative_spectrum_matches_dense(monkeypatch):
    state = qubit_generalized_state(pauli(1), 0.3)
    # 缓存的重叠翻倍后 R 的非零本征值为 1/2
    object.__setattr__(state, "overlap", 2 * state.overlap)
    dense = pseudo_entropy(state)
    assert abs(dense - 0.5 * math.log(2)) < 1e-10
    monkeypatch.setattr(purification, "SMALL_STATE_DIM", 0)
    assert abs(pseudo_entropy(state) - dense) < 1e-10
