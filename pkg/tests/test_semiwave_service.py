import math

import numpy as np
import pytest

from freefront.core.exceptions import DomainError, OutOfRegime
from freefront.schemas.model_schema import ModelParams
from freefront.schemas.semiwave_schema import SemiWaveProblem
from freefront.schemas.solver_schema import InitialData, SolverConfig
from freefront.services.classify_service import classify_service
from freefront.services.pde_service import pde_service
from freefront.services.semiwave_service import Shot, semiwave_service

TOL = 1e-8


def test_shot_classification_brackets_the_speed():
    prob = SemiWaveProblem(a=1.0, bcoef=1.0, d=1.0, rho=1.0)
    y_max = semiwave_service.default_y_max(prob)
    assert semiwave_service.shoot(prob, 1e-6, y_max) is Shot.UNDERSHOOT
    assert semiwave_service.shoot(prob, 1.999, y_max) is Shot.OVERSHOOT


def test_large_stefan_number_creeps_towards_kpp_speed():
    ratios = []
    for rho in (10.0, 1e3, 1e6):
        prob = SemiWaveProblem(a=1.0, bcoef=1.0, d=1.0, rho=rho)
        solution = semiwave_service.solve_semi_wave(prob, tol=TOL)
        assert solution.converged
        ratios.append(solution.c / (2.0 * math.sqrt(prob.a * prob.d)))

    assert ratios[0] < ratios[1] < ratios[2] < 1.0
    assert ratios[1] == pytest.approx(0.8612, abs=1e-3)
    assert ratios[2] >= 0.93


def test_small_stefan_number_limit():
    prob = SemiWaveProblem(a=1.0, bcoef=1.0, d=1.0, rho=1e-3)
    solution = semiwave_service.solve_semi_wave(prob, tol=1e-10)
    ratio = (solution.c / math.sqrt(prob.a * prob.d)) / prob.stefan_number
    assert ratio == pytest.approx(1.0 / math.sqrt(3.0), rel=0.05)

    report = semiwave_service.asymptotics(prob, solution)
    assert report.small_rho_ratio == pytest.approx(ratio)


def test_profile_is_monotone_and_reaches_capacity():
    prob = SemiWaveProblem(a=2.0, bcoef=0.5, d=1.5, rho=3.0)
    solution = semiwave_service.solve_semi_wave(prob, tol=TOL)

    assert 0 < solution.c < prob.c_max
    assert solution.q[0] == 0.0
    assert solution.q_prime[0] * prob.rho == pytest.approx(solution.c, rel=1e-12)
    assert solution.monotone
    assert solution.tail_gap <= 10 * TOL
    assert np.all(np.diff(solution.y_grid) > 0)
    assert solution.ode_residual <= 1e-6


def test_speed_grows_with_rho():
    speeds = [
        semiwave_service.solve_semi_wave(
            SemiWaveProblem(a=1.0, bcoef=1.0, d=1.0, rho=rho), tol=TOL
        ).c
        for rho in (0.1, 1.0, 10.0)
    ]
    assert speeds[0] < speeds[1] < speeds[2] < 2.0


def test_speed_bracket_orders_lower_and_upper():
    p = ModelParams(lam=2.0, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=1.0)
    c_lower, c_upper = semiwave_service.speed_bracket(p)
    assert 0 < c_lower < c_upper
    assert c_lower < 2.0 * math.sqrt(p.effective_prey_rate)
    assert c_upper < 2.0 * math.sqrt(p.lam)


def test_speed_bracket_creeps_towards_kpp_limits():
    p = ModelParams(lam=2.0, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=1e3)
    c1 = 2.0 * math.sqrt(p.effective_prey_rate)
    c2 = 2.0 * math.sqrt(p.lam)

    c_lower, c_upper = semiwave_service.speed_bracket(p)
    assert c_lower / c1 == pytest.approx(0.8612, abs=1e-3)
    assert c_lower / c1 < c_upper / c2 < 1.0

    c_lower, c_upper = semiwave_service.speed_bracket(p.with_rho(1e6))
    assert 0.93 <= c_lower / c1 < 1.0
    assert 0.93 <= c_upper / c2 < 1.0


def test_speed_bracket_requires_prey_survival():
    p = ModelParams(lam=1.0, mu=1.0, b=2.0, c=1.0, d=1.0, m=1.0, rho=1.0)
    with pytest.raises(OutOfRegime):
        semiwave_service.speed_bracket(p)


def test_monotonicity_grid_must_ascend():
    base = SemiWaveProblem(a=1.0, bcoef=1.0, d=1.0, rho=1.0)
    with pytest.raises(DomainError):
        semiwave_service.monotone_in_rho_and_a(base, [1.0, 0.5], [1.0])


@pytest.mark.slow
def test_monotone_in_rho_and_a():
    base = SemiWaveProblem(a=1.0, bcoef=1.0, d=1.0, rho=1.0)
    report = semiwave_service.monotone_in_rho_and_a(
        base, [0.1, 0.5, 1.0, 5.0, 10.0], [0.5, 1.0, 1.5, 2.0, 3.0]
    )
    assert report.passed
    assert len(report.speeds) == 5
    assert all(len(row) == 5 for row in report.speeds)


@pytest.mark.slow
def test_logistic_front_runs_at_the_semiwave_speed():
    rate, rho = 1.0, 100.0
    init = InitialData(h0=2.0, amp_u=1.0, amp_v=1.0)
    cfg = SolverConfig(n_grid=800, t_max=40.0, snapshot_every=10_000)
    traj = pde_service.simulate_logistic(rate, rho, init, cfg)
    slope = classify_service.estimate_speed(traj)

    wave = semiwave_service.solve_semi_wave(SemiWaveProblem(a=rate, bcoef=1.0, d=1.0, rho=rho))
    assert slope == pytest.approx(wave.c, rel=0.02)
