import json
import math

import pytest
import numpy as np

from inertialab.reports.schema import ValidationError, NumericalError
from inertialab.spectral_core import Spectrum
from inertialab.models import zero_model, constant_forcing, rotation_model, linear_model, chafee_infante_model
from inertialab.gap_analysis import find_gaps
from inertialab.manifold import (
    GridSpec,
    ManifoldGraph,
    build_graph_lp,
    build_graph_bvp,
    build_manifold,
    lp_contraction_checks,
    off_manifold_starts,
    default_schedule,
    declared_lipschitz,
    inertial_form,
    tracking_verify,
    cone_check,
    squeezing_check,
    graph_invariance_check,
    backward_decay_fit,
)

from .fixtures import *


@pytest.fixture
def small_spectrum():
    """lambda = 1, 2, 4, 8: alpha = 3, theta = 1 at N = 2"""
    return Spectrum(values=[1.0, 2.0, 4.0, 8.0], source='small')


@pytest.fixture
def forced_model(small_spectrum):
    # the graph of u' + Au = c with c in the high modes is Q u = c / lambda
    return constant_forcing(small_spectrum, np.array([0.0, 0.0, 1.0, 2.0]))


def test_lp_graph_of_the_linear_flow_is_flat(small_spectrum):
    point = build_graph_lp(zero_model(small_spectrum), 2, [0.3, -0.7], dt=0.01)
    assert point.value == (0.0, 0.0)
    assert point.method == 'lp'
    assert point.iterations == 1


def test_lp_graph_under_constant_forcing(forced_model):
    point = build_graph_lp(forced_model, 2, [0.3, -0.7], dt=0.01)
    assert point.Q == pytest.approx([0.25, 0.25], rel=1e-3)
    assert point.max_ratio <= 1e-6


def test_bvp_graph_under_constant_forcing(forced_model):
    point = build_graph_bvp(forced_model, 2, [0.3, -0.7], tol=1e-7, dt=0.01)
    assert point.Q == pytest.approx([0.25, 0.25], rel=1e-6)
    assert point.method == 'bvp'
    assert point.residual <= 1e-8
    assert point.T in default_schedule(1.0)


def test_lp_needs_theta_above_L(linear_spectrum):
    with pytest.raises(ValidationError):
        build_graph_lp(rotation_model(linear_spectrum, 1, 2.0), 1, [0.1], dt=0.01)


def test_point_builders_check_the_low_point(small_spectrum):
    with pytest.raises(ValidationError):
        build_graph_lp(zero_model(small_spectrum), 2, [0.1, 0.2, 0.3], dt=0.01)


def test_default_schedule_doubles():
    assert default_schedule(1.0, 8.0) == [1.0, 2.0, 4.0, 8.0]
    assert default_schedule(0.5, 8.0) == [2.0, 4.0, 8.0, 16.0]


def test_declared_lipschitz(linear_spectrum):
    assert declared_lipschitz(zero_model(linear_spectrum), 3) == 1.0
    assert declared_lipschitz(rotation_model(linear_spectrum, 3, 2.0), 3) == math.inf


def test_build_manifold_on_a_grid(forced_model):
    manifold = build_manifold(forced_model, 2, GridSpec(radius=1.0, points=3), dt=0.01, workers=2)
    assert manifold.values.shape == (3, 3, 2)
    assert manifold.grid_points.shape == (9, 2)
    assert manifold.lipschitz_est <= 1e-6
    assert all(check.passed for check in manifold.checks())
    assert manifold([0.1, 0.2]) == pytest.approx([0.25, 0.25], rel=1e-3)
    assert manifold.lift(np.zeros((5, 2))).shape == (5, 4)
    with pytest.raises(ValidationError):
        manifold([1.5, 0.0])


def test_manifold_json_keeps_the_grid(forced_model):
    manifold = build_manifold(forced_model, 2, GridSpec(radius=1.0, points=2), dt=0.01)
    restored = ManifoldGraph.from_json(json.loads(manifold.to_json()), model=forced_model)
    assert np.allclose(restored.values, manifold.values)
    assert restored.declared_K == 1.0
    assert restored.source == 'small'


def test_build_manifold_rejects_bad_inputs(small_spectrum):
    model = zero_model(small_spectrum)
    with pytest.raises(ValidationError) as exc:
        build_manifold(model, 2, GridSpec(radius=1.0, points=3), method='lpp')
    assert 'lp' in exc.value.hints[0]
    with pytest.raises(ValidationError):
        build_manifold(model, 2, GridSpec(radius=0.0, points=3))


def test_cubic_interpolation_needs_four_points():
    with pytest.raises(ValidationError):
        ManifoldGraph(N=1, M=3, axes=(np.linspace(-1, 1, 3),), values=np.zeros((3, 2)),
                      method='lp', interpolation='cubic')


def test_inertial_form_needs_a_matching_model(small_spectrum, linear_spectrum):
    manifold = build_manifold(zero_model(small_spectrum), 2, GridSpec(radius=1.0, points=2), dt=0.01)
    with pytest.raises(ValidationError):
        inertial_form(manifold, zero_model(linear_spectrum))
    reduced = inertial_form(manifold)
    assert reduced([0.5, 0.5]) == pytest.approx([-0.5, -1.0])


def test_tracking_rate_of_the_forced_flow(forced_model):
    manifold = build_manifold(forced_model, 2, GridSpec(radius=1.0, points=3), dt=0.01)
    report = tracking_verify(forced_model, manifold, np.array([0.5, -0.3, 2.0, 0.25]), T_fit=1.0, dt=0.01)
    # the distance to the manifold trajectory is a single e^{-4t} mode
    assert report.rate == pytest.approx(4.0, rel=1e-4)
    assert report.r2 == pytest.approx(1.0)
    # fitted from t = 1 / lambda_3 = 0.25 on
    assert report.fit_points == 76
    assert report.settle == pytest.approx(0.25)
    assert report.endpoint_mismatch < 1e-6

    on_graph = tracking_verify(forced_model, manifold, manifold.lift(np.array([0.5, -0.3])), T_fit=1.0, dt=0.01)
    assert on_graph.max_distance < 1e-9
    assert on_graph.fit_points == 0 and math.isnan(on_graph.rate)


def test_lp_graph_of_a_one_way_coupling(small_spectrum):
    # F(u) = eps u_1 e_2: on the graph u_2 = c u_1 with -c = -2c + eps, so Phi(p) = (eps p, 0, 0)
    B = np.zeros((4, 4))
    B[1, 0] = 0.2
    point = build_graph_lp(linear_model(small_spectrum, B), 1, [0.7], dt=1e-3)
    assert np.allclose(point.Q, [0.14, 0.0, 0.0], rtol=0, atol=1e-8)
    assert point.iterations <= 3


def test_bvp_graph_of_a_one_way_coupling(small_spectrum):
    B = np.zeros((4, 4))
    B[1, 0] = 0.2
    point = build_graph_bvp(linear_model(small_spectrum, B), 1, [0.7], tol=1e-7, dt=1e-3)
    assert np.allclose(point.Q, [0.14, 0.0, 0.0], rtol=0, atol=1e-6)


@pytest.fixture(scope='module')
def chafee_infante():
    """lambda = 2, 5, 10, ...; L/theta is about 0.7 at the first cut N = 2"""
    return chafee_infante_model(M=8)


def test_lp_and_bvp_graphs_agree(chafee_infante):
    for u_plus in ([0.3, -0.2], [-0.1, 0.25]):
        lp = np.array(build_graph_lp(chafee_infante, 2, u_plus, dt=1e-3).Q)
        bvp = np.array(build_graph_bvp(chafee_infante, 2, u_plus, dt=1e-3).Q)
        assert np.max(np.abs(lp)) > 1e-5
        assert np.max(np.abs(lp - bvp)) <= 1e-4 * np.max(np.abs(lp))


def test_odd_nonlinearity_gives_an_odd_graph(chafee_infante):
    manifold = build_manifold(chafee_infante, 2, GridSpec(radius=0.3, points=3), dt=1e-3)
    assert np.max(np.abs(manifold.values)) > 0
    assert np.allclose(manifold.values[::-1, ::-1], -manifold.values, rtol=0, atol=1e-12)
    # below the gap threshold the graph stays 1-Lipschitz
    assert manifold.lipschitz_est <= 1.0


def test_lp_contraction_matches_the_gap_ratio():
    model = chafee_infante_model(M=32)
    N = find_gaps(model.spectrum, model.lipschitz_L)[0].N
    manifold = build_manifold(model, N, GridSpec(radius=0.5, points=2))
    checks = lp_contraction_checks(manifold, model)
    assert [check.name for check in checks] == ['largest contraction ratio', 'most contraction iterations']
    assert all(check.passed for check in checks)

    bvp = build_manifold(zero_model(model.spectrum), N, GridSpec(radius=0.5, points=2), method='bvp', dt=0.01)
    with pytest.raises(ValidationError):
        lp_contraction_checks(bvp, model)


def test_off_manifold_starts(chafee_infante):
    manifold = build_manifold(chafee_infante, 2, GridSpec(radius=0.5, points=3), dt=1e-3)
    U0 = off_manifold_starts(chafee_infante, manifold, 4, 0.05, 0.02, seed=1, dt=1e-3)
    assert U0.shape == (4, 8)
    assert np.all(np.linalg.norm(U0[:, :2], axis=1) <= 0.05)
    for u0 in U0:
        Q = np.array(build_graph_lp(chafee_infante, 2, u0[:2], dt=1e-3).Q)
        assert 0.01 <= abs(u0[2] - Q[0]) <= 0.02
        assert np.allclose(u0[3:], Q[1:], rtol=0, atol=1e-12)
    with pytest.raises(ValidationError):
        off_manifold_starts(chafee_infante, manifold, 4, 0.05, 0.0)


def test_tracking_rate_of_the_cubic_flow(chafee_infante):
    manifold = build_manifold(chafee_infante, 2, GridSpec(radius=0.5, points=5), dt=1e-3)
    U0 = off_manifold_starts(chafee_infante, manifold, 3, 0.025, 0.02, seed=3, dt=1e-3)
    for u0 in U0:
        report = tracking_verify(chafee_infante, manifold, u0, T_fit=1.0, dt=1e-3)
        # near 0 the displacement along e_3 decays like e^{-(lambda_3 - f'(0)) t} = e^{-9t}
        assert report.rate >= 0.8 * 5
        assert report.rate == pytest.approx(9.0, abs=0.5)
        assert abs(report.quad_coeff) <= 0.05
        assert report.fit_points >= 3


def test_cone_inequality_holds_for_the_linear_flow(linear_spectrum):
    rng = np.random.default_rng(9)
    U1, U2 = rng.standard_normal((20, 16)), rng.standard_normal((20, 16))
    report = cone_check(zero_model(linear_spectrum), U1, U2, N=4, T=0.5, dt=0.01)
    assert report.mu == 0.5
    assert report.violations == 0
    assert report.invariance_violations == 0
    assert all(check.passed for check in report.checks())


def test_rotation_breaks_the_cone(linear_spectrum):
    rng = np.random.default_rng(10)
    U1, U2 = rng.standard_normal((20, 16)), rng.standard_normal((20, 16))
    report = cone_check(rotation_model(linear_spectrum, 1, 2.0), U1, U2, N=1, T=2.0, dt=0.01)
    assert report.mu == 0.0
    assert report.violations > 0
    assert report.first_violation_time is not None
    assert not report.checks()[0].passed


def test_squeezing_rate_of_a_high_mode(linear_spectrum):
    U1 = np.zeros((2, 16))
    U1[:, 4] = [1.0, -2.0]
    report = squeezing_check(zero_model(linear_spectrum), U1, np.zeros_like(U1), N=4, gamma_target=0.4, T=1.0, dt=0.01)
    assert report.gamma == pytest.approx(5.0)
    assert report.gamma_shifted == pytest.approx(0.5)
    assert report.pairs_used == 2
    assert report.checks()[0].passed


def test_squeezing_without_pairs_outside_the_cone(linear_spectrum):
    U1 = np.zeros((3, 16))
    U1[:, 0] = 1.0
    report = squeezing_check(zero_model(linear_spectrum), U1, np.zeros_like(U1), N=4, gamma_target=0.4, dt=0.01)
    assert report.pairs_used == 0
    assert math.isnan(report.gamma)


def test_flat_graph_is_invariant(small_spectrum):
    model = zero_model(small_spectrum)
    manifold = build_manifold(model, 2, GridSpec(radius=1.0, points=3), dt=0.01)
    check, interp_error = graph_invariance_check(model, manifold, samples=6, T=0.5, dt=0.01, seed=1)
    assert check.passed
    assert interp_error == 0.0


def test_backward_decay_of_the_reduced_flow(small_spectrum):
    manifold = build_manifold(zero_model(small_spectrum), 2, GridSpec(radius=1.0, points=3), dt=0.01)
    eps, C, r2 = backward_decay_fit(manifold, [0.0, 0.01], T=1.0, dt=0.01)
    assert eps == pytest.approx(-2.0, rel=1e-6)
    assert C == pytest.approx(1.0)
    assert r2 == pytest.approx(1.0)

    with pytest.raises(NumericalError):
        backward_decay_fit(manifold, [0.0, 0.5], T=2.0, dt=0.01)
