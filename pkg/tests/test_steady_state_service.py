import math

import numpy as np
import pytest

from freefront.core.exceptions import DomainError
from freefront.services.steady_state_service import steady_state_service
from freefront.utils.numerics import convergence_order


def test_below_threshold_gives_zero_profile():
    profile = steady_state_service.solve_logistic_bvp(d=1.0, rate=1.0, l=1.0)
    assert not profile.positive
    assert np.all(profile.values == 0.0)


def test_threshold_itself_is_not_positive():
    l = 0.5 * math.pi
    assert not steady_state_service.is_positive_branch(1.0, 1.0, l)
    assert steady_state_service.is_positive_branch(1.0, 1.0, l * (1 + 1e-9))


def test_positive_profile_shape_and_residual():
    profile = steady_state_service.solve_logistic_bvp(d=1.0, rate=1.0, l=5.0)
    V = profile.values
    assert profile.positive
    assert profile.boundary_error == 0.0
    assert 0.0 < V[0] < 1.0
    assert np.all(V[:-1] > 0)
    assert np.all(np.diff(V) <= 0)
    assert steady_state_service.residual_logistic(profile, 1.0, 1.0) <= 1e-9


def test_profile_converges_under_refinement():
    coarse = steady_state_service.solve_logistic_bvp(d=0.5, rate=2.0, l=2.0, n_grid=128)
    fine = steady_state_service.solve_logistic_bvp(d=0.5, rate=2.0, l=2.0, n_grid=256)
    assert coarse.values[0] == pytest.approx(fine.values[0], abs=1e-3)
    np.testing.assert_allclose(coarse.values, fine.values[::2], atol=1e-3)


def test_long_habitat_reaches_carrying_capacity_at_origin():
    profile = steady_state_service.solve_logistic_bvp(d=1.0, rate=1.0, l=20.0)
    assert profile.values[0] == pytest.approx(1.0, rel=0.01)


def test_positive_branch_switches_on_once_along_length():
    lengths = np.linspace(0.5, 3.0, 26)
    flags = np.array([steady_state_service.is_positive_branch(1.0, 1.0, l) for l in lengths])
    assert not flags[0] and flags[-1]
    assert np.count_nonzero(flags[1:] != flags[:-1]) == 1
    assert lengths[np.argmax(flags)] > 0.5 * math.pi


def test_origin_value_converges_at_second_order():
    origin = [
        steady_state_service.solve_logistic_bvp(d=0.5, rate=2.0, l=2.0, n_grid=n).values[0]
        for n in (64, 128, 256)
    ]
    assert convergence_order(*origin) >= 1.8


def test_invalid_length_rejected():
    with pytest.raises(DomainError, match="l must be positive"):
        steady_state_service.solve_logistic_bvp(d=1.0, rate=1.0, l=0.0)


def test_uniqueness_from_random_starts():
    report = steady_state_service.check_uniqueness(
        d=1.0, rate=1.0, l=3.0, n_grid=128, starts=4, seed=3
    )
    assert report.converged == 4
    assert report.unique


def test_uniqueness_needs_positive_branch():
    with pytest.raises(DomainError):
        steady_state_service.check_uniqueness(d=1.0, rate=1.0, l=1.0)
