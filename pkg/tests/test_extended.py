"""扩展空间：循环平移、离散作用量、受控作用量与条件化。"""

import numpy as np
import pytest
from scipy import linalg

from extended import (
    ExtendedSpace,
    build_action,
    build_action_timedep,
    build_action_wick,
    build_controlled_action,
    condition_on_foliation,
    controlled_operator,
    cyclic_shift,
    cyclicity_residual,
    embed_at_slice,
    history_state,
    shift_power_residual,
)
from models import ActionKind
from operator_core import Operator, ResourceLimitError, ShapeError, StateVector, is_unitary, pauli
from utils import random_hermitian, random_matrix, random_unit_vector


def _basis_index(bits):
    return int("".join(str(b) for b in bits), 2)


@pytest.mark.parametrize("before, after", [((0, 1, 1), (1, 0, 1)), ((0, 0, 1), (1, 0, 0))])
def test_shift_moves_each_slice_forward(before, after):
    shift = cyclic_shift(ExtendedSpace(2, 3, 0.1)).data
    image = shift[:, _basis_index(before)]
    assert image[_basis_index(after)] == 1.0
    assert np.count_nonzero(image) == 1


@pytest.mark.parametrize("d, n", [(2, 1), (2, 4), (3, 3)])
def test_shift_power_is_identity(d, n):
    assert shift_power_residual(ExtendedSpace(d, n, 0.2)) == 0.0


def test_action_trace_without_insertions(rng):
    space = ExtendedSpace(3, 3, 0.15)
    h = Operator(random_hermitian(rng, 3), (3,))
    action = build_action(space, h)
    assert action.kind is ActionKind.UNITARY
    assert is_unitary(action.matrix)
    expected = np.trace(linalg.expm(-1j * 0.15 * 3 * h.data))
    assert abs(action.matrix.trace() - expected) < 1e-12


def test_non_hermitian_generator_is_not_unitary(rng):
    space = ExtendedSpace(2, 2, 0.1)
    action = build_action(space, Operator(random_matrix(rng, 2), (2,)))
    assert action.kind is ActionKind.TIME_DEPENDENT


def test_equal_hamiltonian_list_matches_build_action(rng):
    space = ExtendedSpace(2, 3, 0.2)
    h = Operator(random_hermitian(rng, 2), (2,))
    same = build_action_timedep(space, h_list=[h] * 3)
    assert same.kind is ActionKind.TIME_DEPENDENT
    np.testing.assert_allclose(same.matrix.data, build_action(space, h).matrix.data, atol=1e-14)


def test_timedep_requires_exactly_one_source():
    space = ExtendedSpace(2, 2, 0.1)
    with pytest.raises(ShapeError):
        build_action_timedep(space)
    with pytest.raises(ShapeError):
        build_action_timedep(space, h_list=[pauli(1)])


def test_wick_action_kind(rng):
    action = build_action_wick(ExtendedSpace(2, 2, 0.3), Operator(random_hermitian(rng, 2), (2,)))
    assert action.kind is ActionKind.WICK_ROTATED


def test_embed_out_of_range():
    space = ExtendedSpace(2, 2, 0.1)
    with pytest.raises(ShapeError):
        embed_at_slice(space, pauli(1), 3)
    with pytest.raises(ShapeError):
        embed_at_slice(space, Operator(np.eye(3), (3,)), 1)


def test_space_dimension_cap():
    with pytest.raises(ResourceLimitError):
        ExtendedSpace(2, 15, 0.1)


def test_cyclicity(rng):
    space = ExtendedSpace(2, 3, 0.1)
    action = build_action(space, Operator(random_hermitian(rng, 2), (2,)))
    probe = Operator(random_matrix(rng, space.dim), space.shape)
    assert cyclicity_residual(action, probe) < 1e-12


def test_conditioning_recovers_single_foliation_action(rng):
    family = [Operator(random_hermitian(rng, 2), (2,)) for _ in range(3)]
    controlled = build_controlled_action(ExtendedSpace(2, 2, 0.2, foliation_dim=3), family)
    assert controlled.kind is ActionKind.CONTROLLED
    single = ExtendedSpace(2, 2, 0.2)
    for k, h in enumerate(family):
        conditioned = condition_on_foliation(controlled, k)
        assert conditioned.kind is ActionKind.UNITARY
        np.testing.assert_allclose(conditioned.matrix.data, build_action(single, h).matrix.data, atol=1e-12)
    with pytest.raises(ShapeError):
        condition_on_foliation(controlled, 3)


def test_controlled_operator_annihilates_history_state(rng):
    dim = 4
    ops, states = [], []
    for _ in range(2):
        omega = random_unit_vector(rng, dim)
        projector = np.eye(dim) - np.outer(omega, omega.conj())
        ops.append(Operator(random_matrix(rng, dim) @ projector, (2, 2)))
        states.append(StateVector(omega, (2, 2)))
    image = controlled_operator(ops).data @ history_state(states).data
    assert np.linalg.norm(image) < 1e-12
