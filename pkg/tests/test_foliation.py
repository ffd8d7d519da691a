"""叶状向量与 Lorentz 变换。"""

import math

import numpy as np
import pytest

from foliation import (
    BoostError,
    BoostMatrix,
    Foliation,
    FoliationError,
    lorentz_algebra_residual,
    minkowski_dot,
    random_boost,
    random_timelike,
)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_frame_is_orthogonal_and_complete(rng, dim):
    for _ in range(5):
        fol = random_timelike(rng, dim, max_rapidity=1.5)
        orth, completeness = fol.frame_residuals()
        assert orth < 1e-12 * max(1.0, fol.norm_sq) * 10
        assert completeness < 1e-11


@pytest.mark.parametrize("n", [(1.0, 1.0), (1.0, 2.0), (-1.0, 0.0), (1.0, 0.0, 0.0, 0.0, 0.0), (float("nan"), 0.0)])
def test_rejects_invalid_foliation(n):
    with pytest.raises(FoliationError):
        Foliation(n)


def test_from_rapidity_norm():
    fol = Foliation.from_rapidity(0.7, dim=3, direction=(1.0, 1.0), norm=2.5)
    assert abs(fol.norm - 2.5) < 1e-12
    with pytest.raises(FoliationError):
        fol.require_unit()
    Foliation.from_rapidity(0.7).require_unit()


def test_boost_preserves_norm(rng):
    fol = random_timelike(rng, 4)
    boost = random_boost(rng, 1.0, 4)
    assert abs(fol.boosted(boost).norm_sq - fol.norm_sq) < 1e-12 * fol.norm_sq * 10


def test_boost_validation():
    with pytest.raises(BoostError):
        BoostMatrix(np.diag([2.0, 1.0]))
    with pytest.raises(BoostError):
        BoostMatrix(np.diag([1.0, -1.0]))
    with pytest.raises(BoostError):
        BoostMatrix(np.diag([-1.0, -1.0]))
    BoostMatrix.rotation(0.4)


def test_inverse_composes_to_identity(rng):
    boost = random_boost(rng, 1.2, 3)
    product = boost.compose(boost.inverse())
    np.testing.assert_allclose(product.matrix, np.eye(3), atol=1e-12)


def test_generator_exponential_matches_rapidity():
    omega = np.zeros((2, 2))
    omega[0, 1], omega[1, 0] = 0.8, -0.8
    boost = BoostMatrix.from_generator(omega)
    assert abs(boost.matrix[0, 0] - math.cosh(0.8)) < 1e-12
    assert abs(boost.rapidity - 0.8) < 1e-10
    np.testing.assert_allclose(boost.matrix, BoostMatrix.from_rapidity([0.8]).matrix, atol=1e-12)


def test_minkowski_dot_signature():
    assert minkowski_dot([2.0, 1.0], [3.0, 4.0]) == 2.0


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_lorentz_algebra(dim):
    assert lorentz_algebra_residual(dim) < 1e-14
