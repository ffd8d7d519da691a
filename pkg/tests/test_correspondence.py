"""扩展关联函数与 Heisenberg 对照、热约化、单量子比特 Pauli 表。"""

import math

import numpy as np
import pytest
from scipy import linalg

from correspondence import (
    ActionKindError,
    InsertionList,
    extended_correlator,
    normalized_correlator,
    pauli_extended_state,
    pauli_oracle_table,
    pauli_reconstruction_residual,
    spectral_partition,
    thermal_oracle,
    thermal_reduction,
    verify_map,
)
from extended import ExtendedSpace, build_action, build_action_wick
from operator_core import DegenerateNormalizationError, Operator, ShapeError, StateVector, pauli
from utils import random_hermitian, random_matrix


def test_verify_map_random_trials():
    reports = verify_map(ExtendedSpace(2, 3, 0.1), trials=20, seed=1)
    assert len(reports) == 20
    assert all(r.passed for r in reports)
    assert max(r.abs_diff for r in reports) < 1e-10


def test_verify_map_time_dependent():
    reports = verify_map(ExtendedSpace(3, 2, 0.2), trials=10, seed=4, time_dependent=True)
    assert all(r.passed for r in reports)


def test_verify_map_is_independent_of_worker_count():
    space = ExtendedSpace(2, 2, 0.1)
    serial = verify_map(space, trials=8, seed=11, workers=1)
    threaded = verify_map(space, trials=8, seed=11, workers=3)
    assert [r.extended_value for r in serial] == [r.extended_value for r in threaded]


def test_free_evolution_orders_later_insertions_to_the_left(rng):
    space = ExtendedSpace(2, 3, 0.1)
    action = build_action(space, Operator(np.zeros((2, 2)), (2,)))
    a, b, c = (Operator(random_matrix(rng, 2), (2,)) for _ in range(3))
    value = extended_correlator(action, InsertionList.of((1, a), (2, b), (3, c)))
    assert abs(value - np.trace(c.data @ b.data @ a.data)) < 1e-13


def test_two_slice_free_correlator_is_swap_test(rng):
    action = build_action(ExtendedSpace(2, 2, 0.1), Operator(np.zeros((2, 2)), (2,)))
    a, b = (Operator(random_matrix(rng, 2), (2,)) for _ in range(2))
    value = extended_correlator(action, InsertionList.of((1, a), (2, b)))
    assert abs(value - np.trace(b.data @ a.data)) < 1e-12


def test_insertions_must_be_strictly_ordered():
    with pytest.raises(ShapeError):
        InsertionList.of((1, pauli(1)), (1, pauli(3)))


def test_initial_state_must_be_normalized():
    action = build_action(ExtendedSpace(2, 2, 0.1), pauli(1))
    with pytest.raises(ShapeError):
        extended_correlator(action, InsertionList(), StateVector(np.array([1.0, 1.0]), (2,)))


def test_normalized_correlator_degenerate_trace():
    eps = 0.25
    # U = diag(e^{−iπ/4}, e^{iπ/4})，U² 的迹为零
    h = pauli(3) * (math.pi / (4 * eps))
    action = build_action(ExtendedSpace(2, 2, eps), h)
    with pytest.raises(DegenerateNormalizationError):
        normalized_correlator(action, InsertionList.of((1, pauli(1))))


def test_thermal_reduction_is_boltzmann_operator(rng):
    d, n, eps = 3, 4, 0.25
    h = Operator(random_hermitian(rng, d), (d,))
    action = build_action_wick(ExtendedSpace(d, n, eps), h)
    reduced = thermal_reduction(action)
    np.testing.assert_allclose(reduced.data, linalg.expm(-n * eps * h.data), atol=1e-10)
    partition = spectral_partition(h, n * eps)
    assert abs(action.matrix.trace() - partition) / partition < 1e-12


def test_thermal_correlator_matches_oracle(rng):
    d, n, eps = 2, 3, 0.3
    h = Operator(random_hermitian(rng, d), (d,))
    ins = InsertionList.of((1, Operator(random_matrix(rng, d), (d,))), (3, Operator(random_matrix(rng, d), (d,))))
    action = build_action_wick(ExtendedSpace(d, n, eps), h)
    oracle = thermal_oracle(h, ins, eps, n)
    assert abs(extended_correlator(action, ins) - oracle) / abs(oracle) < 1e-10


def test_thermal_reduction_requires_wick_action():
    action = build_action(ExtendedSpace(2, 2, 0.1), pauli(1))
    with pytest.raises(ActionKindError):
        thermal_reduction(action)


def test_pauli_table_for_sigma_x():
    eps = 0.3
    rho_bar, coefficients = pauli_extended_state(pauli(1), eps)
    oracle = pauli_oracle_table(pauli(1), eps)
    assert np.abs(coefficients - oracle).max() < 1e-12
    assert pauli_reconstruction_residual(rho_bar, coefficients) < 1e-12
    assert abs(coefficients[0, 0] - math.cos(2 * eps)) < 1e-12
