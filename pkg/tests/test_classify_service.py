import math

import numpy as np
import pytest

from freefront.core.exceptions import (
    BracketError,
    DomainError,
    EstimateUnavailable,
    OutOfRegime,
)
from freefront.schemas.classify_schema import ClassificationRules, Verdict
from freefront.schemas.model_schema import ModelParams
from freefront.schemas.solver_schema import InitialData, SolverConfig
from freefront.services.classify_service import (
    VerdictMonitor,
    classify_service,
    resolve_rules,
    run_and_classify,
)
from freefront.services.model_service import model_service
from freefront.services.pde_service import pde_service
from freefront.services.semiwave_service import semiwave_service

LAMBDA = 0.5 * math.pi


@pytest.fixture
def desk_solver() -> SolverConfig:
    return SolverConfig(n_grid=400, t_max=200.0, snapshot_every=500)


def test_resolve_rules_defaults(barrier_params, rules):
    r = resolve_rules(barrier_params, rules, t_max=200.0, h0=0.5)
    assert r.barrier == pytest.approx(LAMBDA)
    assert r.spread_level == pytest.approx(LAMBDA * 1.05)
    assert r.tol_h == pytest.approx(1e-6 * LAMBDA / 200.0)
    assert r.tol_u == pytest.approx(2e-4)
    assert r.window == pytest.approx(10.0)


def test_initial_data_beyond_barrier_spreads_immediately(barrier_params, rules, desk_solver):
    init = InitialData(h0=1.05 * LAMBDA, amp_u=0.1, amp_v=0.1)
    outcome, traj = run_and_classify(barrier_params, init, desk_solver, rules)
    assert outcome.verdict is Verdict.SPREADING
    assert outcome.evidence.rule == "initial_crossing"
    assert outcome.evidence.t == 0.0
    assert traj.stop_reason == "Spreading"
    assert traj.times.shape[0] == 2


def test_small_habitat_and_small_rho_vanishes(rules, desk_solver):
    p = ModelParams(lam=2.0, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=1e-3)
    init = InitialData(h0=0.5, amp_u=0.1, amp_v=0.1)
    outcome, traj = run_and_classify(p, init, desk_solver, rules, stop_on_spreading=False)

    assert outcome.verdict is Verdict.VANISHING
    assert outcome.evidence.rule == "stalled_front_and_prey"
    assert outcome.h_inf_estimate <= LAMBDA * 1.02
    assert traj.stop_reason == "Vanishing"
    assert traj.fronts_monotone

    limit = classify_service.verify_predator_limit(traj, outcome, rules)
    assert limit.branch == "extinct"
    assert limit.sup_v <= 1e-3
    assert limit.passed


def test_small_habitat_and_large_rho_spreads(rules, desk_solver):
    p = ModelParams(lam=2.0, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=1e3)
    init = InitialData(h0=0.5, amp_u=0.1, amp_v=0.1)
    outcome, traj = run_and_classify(p, init, desk_solver, rules)
    assert outcome.verdict is Verdict.SPREADING
    assert outcome.evidence.rule == "barrier_crossing"
    assert traj.h_end > LAMBDA * 1.05


def test_short_run_is_undetermined(barrier_params, rules):
    init = InitialData(h0=1.0, amp_u=0.5, amp_v=0.1)
    cfg = SolverConfig(n_grid=64, t_max=1.0, snapshot_every=10)
    traj = pde_service.simulate(barrier_params, init, cfg)
    outcome = classify_service.classify_run(traj, barrier_params, rules)
    assert outcome.verdict is Verdict.UNDETERMINED
    assert outcome.evidence.rule in {"barrier_crossing", "stalled_front_and_prey"}

    with pytest.raises(EstimateUnavailable):
        classify_service.estimate_speed(traj)


def test_verdict_monitor_ignores_spreading_when_asked(barrier_params, rules):
    monitor = VerdictMonitor(barrier_params, rules, t_max=10.0, h0=2.0, stop_on_spreading=False)
    assert monitor.started_beyond
    eager = VerdictMonitor(barrier_params, rules, t_max=10.0, h0=2.0)
    state = pde_service._start(np.array([1.0, 0.5, 0.0]), np.zeros(3), 2.0, 1.0)
    assert monitor(state) is None
    assert eager(state) == "Spreading"


def test_moving_frame_sample(barrier_params, small_init, short_solver):
    traj = pde_service.simulate(barrier_params, small_init, short_solver)
    at_origin = classify_service.moving_frame_sample(traj, 0.0)
    np.testing.assert_array_equal(at_origin.u, [snap.u[0] for snap in traj.snapshots])

    ahead = classify_service.moving_frame_sample(traj, 100.0)
    assert np.all(ahead.u[1:] == 0.0)
    assert np.all(ahead.v[1:] == 0.0)

    with pytest.raises(DomainError):
        classify_service.moving_frame_sample(traj, -1.0)


def test_equilibrium_error_series_needs_coexistence(barrier_params, small_init, short_solver):
    traj = pde_service.simulate(barrier_params, small_init, short_solver)
    with pytest.raises(OutOfRegime):
        classify_service.equilibrium_error_series(traj)


def test_equilibrium_error_series(coexist_params, short_solver):
    init = InitialData(h0=1.0, amp_u=0.8, amp_v=1.2)
    traj = pde_service.simulate(coexist_params, init, short_solver)
    times, errors = classify_service.equilibrium_error_series(traj)
    assert times.shape == errors.shape
    assert times[0] == 0.0
    assert np.all(errors >= 0)


def test_predator_persists_when_the_habitat_exceeds_its_threshold(rules):
    p = ModelParams(lam=2.0, mu=1.0, b=1.0, c=1.0, d=0.05, m=1.0, rho=1e-3)
    assert p.predator_threshold_length < 0.5
    init = InitialData(h0=0.5, amp_u=0.1, amp_v=0.1)
    cfg = SolverConfig(n_grid=400, t_max=40.0, snapshot_every=500)
    traj = pde_service.simulate(p, init, cfg)
    outcome = classify_service.classify_run(traj, p, rules)
    assert outcome.verdict is Verdict.VANISHING

    limit = classify_service.verify_predator_limit(traj, outcome, rules)
    assert limit.branch == "persistent"
    assert limit.h_inf > limit.threshold
    assert limit.relative_error < 0.05
    assert limit.passed


def test_predator_limit_rejects_spreading_outcome(barrier_params, rules, desk_solver):
    init = InitialData(h0=2.0, amp_u=0.1, amp_v=0.1)
    outcome, traj = run_and_classify(barrier_params, init, desk_solver, rules)
    with pytest.raises(DomainError):
        classify_service.verify_predator_limit(traj, outcome, rules)


def test_rho_bracket_must_straddle_the_threshold(rules, long_solver):
    p = ModelParams(lam=2.0, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=1.0)
    init = InitialData(h0=0.5, amp_u=0.1, amp_v=0.1)
    with pytest.raises(BracketError):
        classify_service.find_rho_critical(p, init, long_solver, (1e-4, 1e-3), n_bisect=0, rules=rules)


def test_h0_band_needs_cosine_data(barrier_params, long_solver):
    init = InitialData(
        h0=1.0,
        family="sampled",
        x=[0.0, 0.5, 0.75, 1.0],
        u0=[0.1, 0.075, 0.04375, 0.0],
        v0=[0.1, 0.075, 0.04375, 0.0],
    )
    with pytest.raises(DomainError):
        classify_service.find_h0_band(barrier_params, init, long_solver, (0.5, 2.0), n_bisect=1)


@pytest.mark.slow
def test_find_rho_critical_brackets_a_verdict_change(rules, long_solver):
    p = ModelParams(lam=2.0, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=1.0)
    init = InitialData(h0=0.5, amp_u=0.1, amp_v=0.1)
    estimate = classify_service.find_rho_critical(
        p, init, long_solver, (1e-3, 1e3), n_bisect=4, rules=rules
    )
    assert 1e-3 <= estimate.lower < estimate.upper <= 1e3
    assert estimate.probes[0] == (1e-3, Verdict.VANISHING)
    assert estimate.probes[1] == (1e3, Verdict.SPREADING)
    assert estimate.runs >= 2


@pytest.mark.slow
def test_spreading_speed_sits_in_semiwave_bracket():
    p = ModelParams(lam=2.0, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=100.0)
    init = InitialData(h0=2.0, amp_u=1.0, amp_v=1.0)
    cfg = SolverConfig(n_grid=400, t_max=40.0, snapshot_every=1000)
    outcome, traj = run_and_classify(p, init, cfg, ClassificationRules(), stop_on_spreading=False)
    assert outcome.verdict is Verdict.SPREADING
    speed = classify_service.estimate_speed(traj)
    c_lower, c_upper = semiwave_service.speed_bracket(p)
    assert c_lower * 0.98 <= speed <= c_upper * 1.02


@pytest.fixture(scope="module")
def coexist_spreading_run():
    p = ModelParams(lam=1.5, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=100.0)
    init = InitialData(h0=3.0, amp_u=1.0, amp_v=1.0)
    cfg = SolverConfig(n_grid=400, t_max=40.0, snapshot_every=50)
    outcome, traj = run_and_classify(p, init, cfg, ClassificationRules(), stop_on_spreading=False)
    return p, outcome, traj


def _final_quarter(times: np.ndarray) -> np.ndarray:
    return times >= 0.75 * times[-1]


@pytest.mark.slow
def test_coexist_run_spreads_inside_the_semiwave_bracket(coexist_spreading_run):
    p, outcome, traj = coexist_spreading_run
    assert outcome.verdict is Verdict.SPREADING
    assert outcome.evidence.rule == "initial_crossing"
    c_lower, c_upper = semiwave_service.speed_bracket(p)
    assert c_lower * 0.98 <= outcome.speed_estimate <= c_upper * 1.02


@pytest.mark.slow
def test_origin_settles_on_the_coexistence_state(coexist_spreading_run):
    p, outcome, traj = coexist_spreading_run
    eq = model_service.equilibrium_closed_form(p)
    series = classify_service.moving_frame_sample(traj, 0.0)
    tail = _final_quarter(series.times)
    assert tail.sum() >= 5
    np.testing.assert_allclose(series.u[tail], eq.u_star, rtol=0.01)
    np.testing.assert_allclose(series.v[tail], eq.v_star, rtol=0.01)
    assert outcome.equilibrium_error <= 0.01 * eq.u_star


@pytest.mark.slow
def test_observer_faster_than_the_kpp_speed_sees_nothing(coexist_spreading_run):
    p, _, traj = coexist_spreading_run
    k = 1.5 * model_service.speed_constants(p, K=p.mu + p.c).c2
    series = classify_service.moving_frame_sample(traj, k)
    ahead = np.array([k * snap.t >= snap.h for snap in traj.snapshots])
    crossing = int(np.argmax(ahead))
    assert ahead[crossing:].all()
    assert series.times[crossing] < 0.75 * traj.t_end
    assert np.all(series.u[crossing:] == 0.0)
    assert np.all(series.v[crossing:] == 0.0)


@pytest.mark.slow
def test_equilibrium_error_stays_small_over_the_tail(coexist_spreading_run):
    p, _, traj = coexist_spreading_run
    times, errors = classify_service.equilibrium_error_series(traj)
    tail = errors[_final_quarter(times)]
    assert tail.max() <= 0.01 * model_service.equilibrium_closed_form(p).u_star
    assert tail[-1] <= tail[0] + 1e-6
