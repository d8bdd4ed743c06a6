import math

import pytest
import numpy as np

from inertialab.reports.schema import ValidationError, NumericalError
from inertialab.spectral_core import Spectrum, State
from inertialab.models import (
    zero_model,
    constant_forcing,
    rotation_model,
    chafee_infante_model,
)
from inertialab.dynamics import (
    integrate,
    integrate_batch,
    TrajectorySegment,
    SaddleProblem,
    solve_saddle,
    saddle_window,
    weighted_norm,
    dissipativity_probe,
    random_ball,
    log_convexity_check,
    lipschitz_growth_check,
    smoothing_check,
    high_mode_dissipativity,
    almost_equivalence_ratio,
    decay_rate_fit,
    log_decay_fit,
)

from .fixtures import *


def test_linear_part_is_exact(linear_spectrum):
    model = zero_model(linear_spectrum)
    traj = integrate(model, State(np.ones(16), linear_spectrum), T=1.0, dt=0.01)
    assert traj.coeffs[-1] == pytest.approx(np.exp(-linear_spectrum.values))
    assert traj.model is model


def test_constant_forcing_is_exact(linear_spectrum):
    c = np.linspace(1.0, 2.0, 16)
    model = constant_forcing(linear_spectrum, c)
    u0 = State(np.zeros(16), linear_spectrum)
    traj = integrate(model, u0, T=0.7, dt=0.05)
    lam = linear_spectrum.values
    assert traj.final.coeffs == pytest.approx(c * (1 - np.exp(-0.7 * lam)) / lam)


def test_step_is_shrunk_to_hit_the_horizon(linear_spectrum):
    traj = integrate(zero_model(linear_spectrum), State(np.ones(16), linear_spectrum), T=1.0, dt=0.3)
    assert len(traj) == 5
    assert traj.dt == pytest.approx(0.25)
    assert traj.times[-1] == 1.0
    assert traj.at(0.5).coeffs == pytest.approx(traj.coeffs[2])
    with pytest.raises(ValidationError):
        traj.index_at(1.5)


def test_integrate_rejects_bad_inputs(linear_spectrum):
    u0 = State(np.ones(16), linear_spectrum)
    with pytest.raises(ValidationError):
        integrate(zero_model(linear_spectrum), u0, T=1.0, dt=-0.1)
    with pytest.raises(ValidationError):
        integrate(zero_model(linear_spectrum), u0, T=-1.0, dt=0.1)
    # dt * L = 1 exceeds the stability budget
    with pytest.raises(ValidationError):
        integrate(rotation_model(linear_spectrum, 1, 2.0), u0, T=1.0, dt=0.5)

    other = Spectrum(values=np.arange(1, 9, dtype=float))
    with pytest.raises(ValidationError):
        integrate(zero_model(other), u0, T=1.0, dt=0.1)


def test_batch_matches_single_runs(linear_spectrum):
    model = rotation_model(linear_spectrum, 3, 1.0)
    U0 = np.random.default_rng(5).standard_normal((3, 16))
    times, coeffs = integrate_batch(model, U0, T=0.5, dt=0.01)
    assert coeffs.shape == (times.size, 3, 16)
    single = integrate(model, State(U0[1], linear_spectrum), T=0.5, dt=0.01)
    assert np.allclose(coeffs[:, 1], single.coeffs)


def test_trajectory_csv_has_one_column_per_mode(linear_spectrum):
    traj = integrate(zero_model(linear_spectrum), State(np.ones(16), linear_spectrum), T=0.2, dt=0.1)
    lines = traj.to_csv().splitlines()
    assert lines[0] == ','.join(['t'] + [f'c{n}' for n in range(1, 17)])
    assert len(lines) == 4


def test_saddle_solution_with_constant_forcing(linear_spectrum):
    times = np.linspace(0.0, 10.0, 1001)
    forcing = np.zeros((times.size, 16))
    forcing[:, 0] = 1.0     # low mode, mu = 1 - 4.5
    forcing[:, 4] = 1.0     # high mode, mu = 5 - 4.5
    problem = SaddleProblem(spectrum=linear_spectrum, N=4, times=times, forcing=forcing)
    assert (problem.alpha, problem.theta) == (4.5, 0.5)

    u = solve_saddle(problem).coeffs
    # high modes start from 0 on the left, low modes end at 0 on the right
    assert u[:, 4] == pytest.approx((1 - np.exp(-0.5 * times)) / 0.5)
    assert u[:, 0] == pytest.approx(-(1 - np.exp(-3.5 * (10.0 - times))) / 3.5, rel=1e-9, abs=1e-12)
    assert np.all(u[:, [1, 2, 3, 5]] == 0)


def test_saddle_problem_validation(linear_spectrum):
    times = np.array([0.0, 0.1, 0.3])
    with pytest.raises(ValidationError):
        SaddleProblem(spectrum=linear_spectrum, N=4, times=times, forcing=np.zeros((3, 16)))
    times = np.linspace(0.0, 1.0, 11)
    with pytest.raises(ValidationError):
        SaddleProblem(spectrum=linear_spectrum, N=4, times=times, forcing=np.zeros((11, 16)), eps=0.6)
    with pytest.raises(ValidationError):
        SaddleProblem(spectrum=linear_spectrum, N=4, times=times, forcing=np.zeros((10, 16)))


def test_saddle_needs_a_gap():
    spectrum = Spectrum(values=[1.0, 2.0, 2.0, 3.0])
    times = np.linspace(0.0, 1.0, 11)
    problem = SaddleProblem(spectrum=spectrum, N=2, times=times, forcing=np.ones((11, 4)))
    with pytest.raises(ValidationError):
        solve_saddle(problem)


def test_window_and_weighted_norm(linear_spectrum):
    assert saddle_window(0.5, 1e-10) == pytest.approx(10 * math.log(10) / 0.5)

    times = np.linspace(0.0, 1.0, 101)
    coeffs = np.zeros((101, 16))
    coeffs[:, 2] = 1.0
    flat = TrajectorySegment(times=times, coeffs=coeffs, spectrum=linear_spectrum)
    assert weighted_norm(flat) == pytest.approx(1.0)
    assert weighted_norm(flat, eps=1.0, tau=0.0) == pytest.approx(math.sqrt((1 - math.exp(-2)) / 2), rel=1e-4)


def test_random_ball_is_seeded():
    pts = random_ball(6, 50, 2.0, seed=11)
    assert pts.shape == (50, 6)
    assert np.all(np.linalg.norm(pts, axis=1) <= 2.0)
    assert np.array_equal(pts, random_ball(6, 50, 2.0, seed=11))


def test_dissipativity_of_chafee_infante():
    model = chafee_infante_model(M=8)
    starts = random_ball(8, 8, 5.0, seed=3)
    report = dissipativity_probe(model, starts, horizon=2.0, dt=0.002)
    assert report.samples == 8
    assert report.alpha > 0
    assert report.absorbing_radius == pytest.approx(2 * math.sqrt(report.C_star))
    assert report.C_star < 25.0


def test_dissipativity_needs_a_bounded_model(linear_spectrum):
    with pytest.raises(ValidationError):
        dissipativity_probe(rotation_model(linear_spectrum, 2, 1.0), np.ones((2, 16)), horizon=1.0)


def test_log_convexity_for_the_linear_flow(linear_spectrum):
    model = zero_model(linear_spectrum)
    rng = np.random.default_rng(8)
    traj1 = integrate(model, State(rng.standard_normal(16), linear_spectrum), T=2.0, dt=0.01)
    traj2 = integrate(model, State(rng.standard_normal(16), linear_spectrum), T=2.0, dt=0.01)
    assert log_convexity_check(traj1, traj2, t=0.5, T=1.0).passed
    with pytest.raises(ValidationError):
        log_convexity_check(traj1, traj2, t=1.0, T=1.0)


def test_difference_growth_and_smoothing():
    model = chafee_infante_model(M=8)
    rng = np.random.default_rng(21)
    U1 = 0.3 * rng.standard_normal((4, 8))
    U2 = U1 + 0.01 * rng.standard_normal((4, 8))
    check, C = lipschitz_growth_check(model, U1, U2, T=1.0, dt=0.002)
    assert check.passed
    assert C >= 0

    zero = zero_model(model.spectrum)
    check, C = smoothing_check(zero, U1, U2, T=1.0, dt=0.002)
    assert check.passed
    assert C <= 1 / math.e + 1e-9


def test_high_modes_decay_under_the_linear_flow(linear_spectrum):
    u0 = np.random.default_rng(2).standard_normal((3, 16))
    u0[:, 4] = 0.0
    R, checks = high_mode_dissipativity(zero_model(linear_spectrum), u0, [4], T=1.0, dt=0.01)
    assert R == {4: 0.0}
    assert all(check.passed for check in checks)


def test_almost_equivalence_on_a_line(linear_spectrum):
    cloud = np.zeros((30, 16))
    cloud[:, 0] = np.linspace(-1.0, 1.0, 30)
    ratio = almost_equivalence_ratio(cloud, linear_spectrum, seed=1)
    assert 0 < ratio <= 1 / math.sqrt(math.log(2)) + 1e-12
    with pytest.raises(ValidationError):
        almost_equivalence_ratio(cloud[:1], linear_spectrum)


def test_decay_rate_fit_recovers_a_quadratic_exponent():
    t = np.linspace(0.0, 2.0, 50)
    fit = decay_rate_fit(t, np.exp(-2 * t - 0.5 * t ** 2), floor=1e-12)
    assert fit.exp_rate == pytest.approx(-2.0)
    assert fit.quad_coeff == pytest.approx(-0.5)
    assert fit.r2 == pytest.approx(1.0)
    assert not fit.floored


def test_decay_rate_fit_drops_underflow():
    t = np.linspace(0.0, 1.0, 11)
    norms = np.exp(-3 * t)
    norms[-3:] = 0.0
    fit = decay_rate_fit(t, norms)
    assert fit.floored and fit.n_used == 8
    assert fit.exp_rate == pytest.approx(-3.0)

    with pytest.raises(ValidationError):
        decay_rate_fit(t, np.where(t > 0.1, 0.0, 1.0))


def test_log_decay_fit():
    t = np.linspace(0.0, 1.0, 20)
    fit = log_decay_fit(t, -1000.0 * t ** 2)
    assert fit.quad_coeff == pytest.approx(-1000.0)
    with pytest.raises(NumericalError):
        log_decay_fit(t, np.full(20, -np.inf))
