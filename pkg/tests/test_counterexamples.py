import math

import pytest
import numpy as np

from inertialab.reports.schema import ValidationError
from inertialab.spectral_core import Spectrum
from inertialab.counterexamples import (
    COUNTEREXAMPLES,
    c1_obstruction_spectra,
    obstruction_fields,
    rotation_block_roots,
    build_periodic_operator,
    poincare_map,
    superexp_decay,
    nonuniform_ratios,
    predicted_multipliers,
    floquet_orbit_cloud,
    kick_sequences,
    smoothness_budget,
    kick_layout,
    simulate_segments,
    segments_attractor,
)
from inertialab.counterexamples.floquet import target_mode, chain_log_norm, log_multiplier

from .fixtures import *


def linear(M):
    return Spectrum(values=np.arange(1, M + 1, dtype=float), source='linear')


def test_catalog_names():
    assert set(COUNTEREXAMPLES) == {'c1', 'floquet', 'segments'}


### C^1 obstruction

def test_rotation_block_roots():
    alpha, omega = rotation_block_roots(1.0, 2.0, 1.0)
    assert alpha == -1.5
    assert omega == pytest.approx(math.sqrt(3) / 2)
    # no rotation once the gap reaches 2L
    assert rotation_block_roots(1.0, 3.0, 1.0) == (-2.0, 0.0)


def test_obstruction_has_a_parity_conflict():
    report = c1_obstruction_spectra(linear(10), L=1.5)
    assert report.parity_conflict
    assert report.plus_real == 0.5
    assert report.minus_real_count == 0
    assert report.plus_real_count == 1
    assert report.tail_modes == [10]
    assert all(check.passed for check in report.checks)
    assert report._asdict()['parity_conflict'] is True


def test_obstruction_blocks_for_the_linear_spectrum():
    report = c1_obstruction_spectra(linear(9), L=1.0)
    assert report.L0 == 1.0
    assert len(report.minus_blocks) == 4
    for alpha, omega in report.minus_blocks[:1]:
        assert alpha == -1.5
        assert omega == pytest.approx(math.sqrt(3) / 2)
    assert report.tail_modes == [9]
    # L = lambda_1 leaves u_plus without an unstable direction
    assert not report.parity_conflict


def test_obstruction_needs_rotation_strength():
    with pytest.raises(ValidationError):
        c1_obstruction_spectra(linear(6), L=0.4)


def test_obstruction_fields_vanish_at_the_equilibria():
    spectrum = linear(6)
    minus, plus = obstruction_fields(spectrum, 1.5, amp=10.0)
    u = np.zeros(6)
    u[0] = -10.0
    assert np.allclose(minus.vector_field(u), 0.0)
    u[0] = 10.0
    assert np.allclose(plus.vector_field(u), 0.0)
    assert minus.lipschitz_L == pytest.approx(1.5)
    assert plus.lipschitz_L == pytest.approx(1.5)


### Floquet shift

def test_shift_targets():
    assert [target_mode(j) for j in (1, 2, 3, 4, 5)] == [3, 1, 5, 2, 7]


def test_multipliers_for_the_linear_spectrum():
    mu = predicted_multipliers(linear(8), T=1.0)
    assert mu[0] == pytest.approx(math.exp(-2.0))
    assert mu[1] == pytest.approx(math.exp(-4.0))
    lam = linear(12).values
    for N in range(1, 6):
        assert chain_log_norm(lambda j: log_multiplier(lam, 1.0, j), 2, N) == pytest.approx(-(2 + 2 * N * (N - 1)))


def test_periodic_operator_checks():
    op = build_periodic_operator(linear(9), T=1.0)
    assert all(check.passed for check in op.checks)
    assert op.L == op.norm_sup
    assert op.period == 2.0
    assert op.growth_bounds == (1.0, 1.0)
    # Phi vanishes at x = 0
    assert np.allclose(op.at_time(0.0), 0.0)


def test_periodic_operator_validation():
    with pytest.raises(ValidationError):
        build_periodic_operator(linear(9), T=0.0)
    with pytest.raises(ValidationError):
        build_periodic_operator(linear(2), T=1.0)
    with pytest.raises(ValidationError):
        build_periodic_operator(linear(9), T=1.0, L=0.4)


def test_period_map_is_a_weighted_shift():
    op = build_periodic_operator(linear(9), T=1.0)
    report = poincare_map(op)
    assert all(check.passed for check in report.checks)
    assert report.measured_log_mu(2) == pytest.approx(-2.0, rel=1e-6)
    assert list(report.targets[:2]) == [3, 1]
    with pytest.raises(ValidationError):
        report.measured_log_mu(9)
    with pytest.raises(ValidationError):
        poincare_map(op, dt=0.01)

    lines = report.to_csv().splitlines()
    assert lines[0] == 'source,target,log_measured,log_predicted,rel_error,residual'


def test_superexponential_decay():
    op = build_periodic_operator(linear(9), T=1.0)
    table = superexp_decay(op, poincare_map(op), N_iter=5)
    assert list(table.log_product) == pytest.approx([-2.0, -6.0, -14.0, -26.0, -42.0])
    assert table.fit.quad_coeff == pytest.approx(-2.0)
    assert all(check.passed for check in table.checks)
    with pytest.raises(ValidationError):
        superexp_decay(op, poincare_map(op), N_iter=6)


def test_nonuniform_decay_constants():
    op = build_periodic_operator(linear(73), T=1.0)
    table = nonuniform_ratios(op)
    betas = [row['beta_n'] for row in table.rows]
    assert betas == pytest.approx([6.5, 50 / 9, 5.125])
    assert table.beta == pytest.approx(5.125)
    assert all(check.passed for check in table.checks)
    assert table.to_csv().splitlines()[0] == 'n,k,N,log_first_max,beta_n,log_middle_max,gamma_n,map_gap'


def test_nonuniform_decay_on_the_measured_map():
    op = build_periodic_operator(linear(21), T=1.0)
    table = nonuniform_ratios(op, n_values=[4], report=poincare_map(op))
    assert table.rows[0]['map_gap'] <= 1e-6
    with pytest.raises(ValidationError):
        nonuniform_ratios(op, n_values=[9])


def test_orbit_cloud_follows_the_chain():
    op = build_periodic_operator(linear(9), T=1.0)
    cloud = floquet_orbit_cloud(poincare_map(op))
    assert cloud.shape == (7, 9)
    assert np.all(cloud[0] == 0)
    assert np.allclose(np.linalg.norm(cloud[1:], axis=1), 1.0)
    # e_2 -> e_1 -> e_3 -> e_5 -> e_7 -> e_9
    assert abs(cloud[-1][8]) == pytest.approx(1.0)


### Orthogonal segments

def test_kick_sequences():
    B, E, lam = kick_sequences([1, 2])
    assert list(B) == pytest.approx([1.0, math.exp(-math.log(2) ** 2)])
    assert list(E) == [1.0, 0.25]
    assert list(lam) == [1.0, 2.0]


def test_smoothness_budget():
    n = np.arange(1, 201)
    B, E, lam = kick_sequences(n)
    assert smoothness_budget(B, E, lam, s=1.0, k=1.0).finite
    assert not smoothness_budget(n ** -2.0, E, lam, s=1.0, k=1.0).finite
    with pytest.raises(ValidationError):
        smoothness_budget(B[:3], E[:3], lam[:3], s=1.0, k=1.0)


def test_kick_layout_windows():
    B, E, _ = kick_sequences(np.arange(1, 5))
    layout = kick_layout(linear(6), B, E)
    assert layout.count == 4
    assert list(layout.lengths) == pytest.approx(list(B / np.arange(1, 5)))
    for n in range(4):
        assert float(layout.psi(n, layout.centers[n])) == pytest.approx(1.0)
    for phi in layout.gap_angles():
        assert np.all(layout.forcing(math.cos(phi), math.sin(phi)) == 0)
    assert list(layout.theta([0.1, 0.75, 3.0])) == pytest.approx([0.0, 1.0, 0.0])


def test_kick_layout_validation():
    B, E, _ = kick_sequences(np.arange(1, 5))
    with pytest.raises(ValidationError):
        kick_layout(linear(6), B[::-1], E)
    with pytest.raises(ValidationError):
        kick_layout(linear(6), B, np.full(4, 2.0))
    with pytest.raises(ValidationError):
        kick_layout(linear(3), B, E)


def test_segments_attractor():
    B, E, _ = kick_sequences(np.arange(1, 4))
    attractor = segments_attractor(linear(3), B, E, pts_per_segment=10)
    assert all(check.passed for check in attractor.checks)
    cloud = attractor.cloud()
    assert np.all(cloud[0] == 0)
    assert np.all(np.count_nonzero(np.abs(cloud) > 1e-12, axis=1) <= 1)
    assert list(np.max(cloud, axis=0)) == pytest.approx(list(attractor.layout.lengths), rel=1e-6)

    with pytest.raises(ValidationError):
        simulate_segments(attractor.layout, [1.0, 0.0], horizon=1.0)
