import math

import pytest

from freefront.core.exceptions import PremiseViolated
from freefront.schemas.model_schema import ModelParams
from freefront.schemas.solver_schema import InitialData, SolverConfig
from freefront.services.compare_service import compare_service
from freefront.services.pde_service import pde_service


@pytest.fixture
def compare_solver() -> SolverConfig:
    return SolverConfig(n_grid=64, t_max=2.0, snapshot_every=20)


def test_upper_solution_constants(barrier_params, small_init):
    upper = compare_service.build_decaying_upper_solution(barrier_params, small_init)
    k2 = math.pi**2
    assert upper.delta == pytest.approx(0.2896, abs=1e-4)
    assert upper.alpha == pytest.approx(0.5 * (k2 - 2.0))
    assert upper.gamma == upper.alpha
    assert upper.C == pytest.approx(0.1)
    assert upper.rho0 == pytest.approx(
        upper.delta * upper.gamma * 0.25 / (upper.C * math.pi), rel=1e-12
    )
    assert upper.sigma(0.0) == pytest.approx(0.5 * (1 + 0.5 * upper.delta))
    assert upper.sigma_limit == pytest.approx(0.5 * (1 + upper.delta))


def test_upper_solution_premise(barrier_params):
    with pytest.raises(PremiseViolated):
        compare_service.build_decaying_upper_solution(
            barrier_params, InitialData(h0=1.2, amp_u=0.1, amp_v=0.1)
        )


def test_upper_ordering_holds(barrier_params, small_init, compare_solver):
    upper = compare_service.build_decaying_upper_solution(barrier_params, small_init)
    assert barrier_params.rho <= upper.rho0
    traj = pde_service.simulate(barrier_params, small_init, compare_solver)
    report = compare_service.verify_upper_ordering(traj, upper)
    assert report.passed
    assert {c.check for c in report.checks} == {"u_below_w", "h_below_sigma"}
    assert traj.h_end < upper.sigma_limit


def test_upper_ordering_rejects_large_rho(barrier_params, small_init, compare_solver):
    upper = compare_service.build_decaying_upper_solution(barrier_params, small_init)
    fast = barrier_params.with_rho(2.0 * upper.rho0)
    traj = pde_service.simulate(fast, small_init, compare_solver)
    with pytest.raises(PremiseViolated):
        compare_service.verify_upper_ordering(traj, upper)


def test_logistic_sandwich_holds(barrier_params, small_init, compare_solver):
    report = compare_service.verify_logistic_sandwich(barrier_params, small_init, compare_solver)
    assert report.passed
    assert [c.check for c in report.checks] == [
        "u_lower",
        "u_upper",
        "v_lower",
        "v_upper",
        "h_lower",
        "h_upper",
    ]


def test_logistic_sandwich_non_strict_reports_instead_of_raising(compare_solver):
    p = ModelParams(lam=3.0, mu=1.0, b=0.5, c=0.5, d=0.5, m=2.0, rho=0.5)
    init = InitialData(h0=1.0, amp_u=0.5, amp_v=0.5)
    report = compare_service.verify_logistic_sandwich(p, init, compare_solver, strict=False)
    assert len(report.checks) == 6
    assert all(c.tol == pytest.approx(1e-3) for c in report.checks)
    assert report.get("u_upper") is not None
    assert report.get("missing") is None


@pytest.fixture
def vanishing_params() -> ModelParams:
    return ModelParams(lam=2.0, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=1e-3)


def test_sandwich_margins_skip_the_pinned_ties(barrier_params, small_init, compare_solver):
    report = compare_service.verify_logistic_sandwich(barrier_params, small_init, compare_solver)
    # coupling strictly separates u and v from their logistic bounds
    for name in ("u_upper", "v_lower"):
        assert report.get(name).worst_margin < 0.0
        assert report.get(name).location["t"] > 0.0


@pytest.mark.slow
def test_orderings_on_a_vanishing_run(vanishing_params, small_init):
    cfg = SolverConfig(n_grid=400, t_max=200.0, snapshot_every=500)
    upper = compare_service.build_decaying_upper_solution(vanishing_params, small_init)
    assert vanishing_params.rho <= upper.rho0
    traj = pde_service.simulate(vanishing_params, small_init, cfg)
    assert compare_service.verify_upper_ordering(traj, upper, tol=1e-3).passed
    assert compare_service.verify_logistic_sandwich(
        vanishing_params, small_init, cfg, tol=1e-3
    ).passed


@pytest.mark.slow
def test_sandwich_on_a_spreading_coexist_run():
    p = ModelParams(lam=1.5, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=100.0)
    init = InitialData(h0=3.0, amp_u=1.0, amp_v=1.0)
    cfg = SolverConfig(n_grid=400, t_max=40.0, snapshot_every=200)
    report = compare_service.verify_logistic_sandwich(p, init, cfg, tol=1e-3)
    assert report.passed
    # h0 lies beyond (pi/2) lambda^(-1/2): no decaying upper solution exists
    with pytest.raises(PremiseViolated):
        compare_service.build_decaying_upper_solution(p, init)


@pytest.mark.slow
def test_sandwich_violations_do_not_grow_under_refinement(vanishing_params, small_init):
    reports = [
        compare_service.verify_logistic_sandwich(
            vanishing_params,
            small_init,
            SolverConfig(n_grid=n_grid, t_max=20.0, snapshot_every=100),
            strict=False,
        )
        for n_grid in (100, 200)
    ]
    coarse, fine = ({c.check: c.worst_margin for c in r.checks} for r in reports)
    for name, margin in fine.items():
        assert max(margin, 0.0) <= max(coarse[name], 0.0)
    assert reports[1].passed
