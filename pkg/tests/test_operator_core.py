"""稠密线性代数底座：形状检查、偏迹、矩阵指数、广义态。"""

import numpy as np
import pytest
from scipy import linalg

from models import NumericPolicy
from operator_core import (
    DegenerateNormalizationError,
    GeneralizedState,
    Operator,
    ResourceLimitError,
    ShapeError,
    StateVector,
    check_dimension,
    eig_spectrum,
    identity,
    is_unitary,
    matrix_exp,
    partial_trace,
    pauli,
    permutation_operator,
    tensor_product,
)
from utils import random_hermitian, random_matrix, random_unit_vector


def test_operator_rejects_mismatched_shape():
    with pytest.raises(ShapeError):
        Operator(np.eye(4), (3,))
    with pytest.raises(ShapeError):
        Operator(np.ones((2, 3)), (2,))


def test_matmul_requires_same_factor_shape():
    with pytest.raises(ShapeError):
        Operator(np.eye(4), (4,)) @ Operator(np.eye(4), (2, 2))


def test_partial_trace_of_product(rng):
    a = Operator(random_matrix(rng, 2), (2,))
    b = Operator(random_matrix(rng, 3), (3,))
    ab = tensor_product(a, b)
    assert ab.shape == (2, 3)
    np.testing.assert_allclose(partial_trace(ab, keep=[0]).data, a.data * b.trace(), atol=1e-14)
    np.testing.assert_allclose(partial_trace(ab, keep=[1]).data, b.data * a.trace(), atol=1e-14)
    full = partial_trace(ab, keep=[])
    assert full.shape == (1,)
    assert abs(full.data[0, 0] - a.trace() * b.trace()) < 1e-14


def test_partial_trace_rejects_bad_factor():
    with pytest.raises(ShapeError):
        partial_trace(identity((2, 2)), keep=[2])


def test_matrix_exp_matches_expm(rng):
    h = Operator(random_hermitian(rng, 4), (4,))
    u = matrix_exp(h, -0.3j)
    np.testing.assert_allclose(u.data, linalg.expm(-0.3j * h.data), atol=1e-13)
    assert is_unitary(u)

    general = Operator(random_matrix(rng, 3), (3,))
    np.testing.assert_allclose(matrix_exp(general, 0.7).data, linalg.expm(0.7 * general.data), atol=1e-13)


def test_matrix_exp_of_zero_scale_is_identity(rng):
    h = Operator(random_hermitian(rng, 3), (3,))
    assert np.array_equal(matrix_exp(h, 0).data, np.eye(3))


def test_dimension_cap():
    policy = NumericPolicy(dimension_cap=8)
    check_dimension(8, policy)
    with pytest.raises(ResourceLimitError):
        check_dimension(16, policy)
    with pytest.raises(ResourceLimitError):
        tensor_product(identity((4,)), identity((4,)), policy)


def test_generalized_state_is_rank_one_projector(rng):
    ket = StateVector(random_unit_vector(rng, 6), (2, 3))
    bra = StateVector(random_unit_vector(rng, 6), (2, 3))
    state = GeneralizedState(ket, bra, 1)
    assert state.system_shape == (2,)
    assert state.environment_shape == (3,)
    idempotence, trace = state.projector_residuals()
    assert idempotence < 1e-12
    assert trace < 1e-12


def test_generalized_state_rejects_orthogonal_pair():
    with pytest.raises(DegenerateNormalizationError):
        GeneralizedState(StateVector.basis(0, (2,)), StateVector.basis(1, (2,)), 1)


def test_eig_spectrum_sorted_by_real_part():
    values = eig_spectrum(Operator(np.diag([1.0, 3.0, 2.0]), (3,)))
    np.testing.assert_allclose(values, [3.0, 2.0, 1.0])


def test_permutation_must_preserve_shape():
    with pytest.raises(ShapeError):
        permutation_operator((2, 3), [1, 0])
    swap = permutation_operator((2, 2), [1, 0])
    # |01⟩ ↦ |10⟩
    assert swap.data[2, 1] == 1.0


def test_pauli_algebra():
    x, y, z = pauli(1), pauli(2), pauli(3)
    np.testing.assert_allclose((x @ y).data, 1j * z.data)
    np.testing.assert_allclose((z @ z).data, np.eye(2))
