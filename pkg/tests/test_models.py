import math

import pytest
import numpy as np
from scipy.integrate import quad

from inertialab.reports.schema import ValidationError
from inertialab.spectral_core import Spectrum, State, shell_projector
from inertialab.gap_analysis import shell_search
from inertialab.models import (
    is_sum_of_two_squares_mask,
    is_sum_of_three_squares_mask,
    lattice_counts,
    spectrum_interval,
    spectrum_torus2d,
    spectrum_torus3d,
    spectrum_sphere2,
    build_spectrum,
    CollocationGrid,
    smooth_step,
    radial_cutoff,
    rotation_model,
    chafee_infante_model,
    limit_cycle_model,
    estimate_lipschitz,
    spatial_average_multiplier,
    spatial_averaging_defect,
    build_model,
)

from .fixtures import *


def test_two_squares_mask_matches_brute_force():
    n_max = 500
    brute = np.zeros(n_max + 1, dtype=bool)
    for a in range(23):
        for b in range(23):
            if a * a + b * b <= n_max:
                brute[a * a + b * b] = True
    assert np.array_equal(is_sum_of_two_squares_mask(n_max), brute)


def test_three_squares_excludes_legendre_form():
    mask = is_sum_of_three_squares_mask(200)
    assert not mask[7] and not mask[28] and not mask[112]
    assert mask[6] and mask[27] and mask[29]


def test_lattice_counts_small_values():
    r2 = lattice_counts(25, 2)
    assert list(r2[:6]) == [1, 4, 4, 0, 4, 8]
    assert r2[25] == 12
    r3 = lattice_counts(3, 3)
    assert list(r3) == [1, 6, 12, 8]


def test_torus2d_spectrum_has_lattice_multiplicity():
    spectrum = spectrum_torus2d(10)
    levels, mult = spectrum.levels()
    assert list(levels) == [1, 2, 4, 5, 8, 9, 10]
    assert list(mult) == [4, 4, 4, 8, 4, 4, 8]
    assert spectrum.labels.shape == (36, 2)
    assert np.array_equal(np.sum(spectrum.labels ** 2, axis=1), spectrum.values)


def test_sphere_and_interval_spectra():
    sphere = spectrum_sphere2(3)
    assert sphere.M == 3 + 5 + 7
    assert list(sphere.levels()[0]) == [2, 6, 12]

    interval = spectrum_interval(4, a_const=1.0, alpha=1.0)
    assert list(interval.values) == [2, 5, 10, 17]
    with pytest.raises(ValidationError):
        spectrum_interval(1)


def test_build_spectrum_suggests_close_names():
    with pytest.raises(ValidationError) as exc:
        build_spectrum('torus2', modes=8)
    assert 'torus2d' in exc.value.hints[0]


def test_interval_grid_matches_sine_basis():
    grid = CollocationGrid.for_spectrum(spectrum_interval(8))
    x = grid.x[0]
    e3 = np.zeros(8)
    e3[2] = 1.0
    assert np.allclose(grid.to_grid(e3), math.sqrt(2 / math.pi) * np.sin(3 * x))


def test_torus_grid_product_stays_on_kept_modes():
    spectrum = spectrum_torus2d(5)
    grid = CollocationGrid.for_spectrum(spectrum)
    coeffs = np.random.default_rng(3).standard_normal(spectrum.M)
    values = grid.to_grid(coeffs)
    assert np.allclose(grid.from_grid(values), coeffs)
    # the L2 norm of a function equals the norm of its coefficients
    assert np.sum(values ** 2) * grid.cell_volume == pytest.approx(np.sum(coeffs ** 2))


def cubic_prime(x, u):
    return 3 * u ** 2 - 1


@pytest.fixture
def torus3d_grid():
    """|p|^2 <= 6: the norm 3 and norm 4 levels sit at indices 19..26 and 27..32"""
    return CollocationGrid.for_spectrum(spectrum_torus3d(6))


def test_spatial_average_of_constants_and_zero_mean_terms(torus3d_grid):
    u = State(0.1 * np.random.default_rng(4).standard_normal(torus3d_grid.M), torus3d_grid.spectrum)
    assert spatial_average_multiplier(u, lambda x, u: np.full(np.shape(u), 2.5), torus3d_grid) == pytest.approx(2.5)

    zero = State.zeros(torus3d_grid.spectrum)
    assert abs(spatial_average_multiplier(zero, lambda x, u: np.cos(x[0]) + 0 * u, torus3d_grid)) < 1e-12

    interval = CollocationGrid.for_spectrum(spectrum_interval(8))
    u = State(np.zeros(8), interval.spectrum)
    assert spatial_average_multiplier(u, lambda x, u: np.full(np.shape(u), 2.5), interval) == pytest.approx(2.5)


def test_spatial_average_matches_quadrature(torus3d_grid):
    coeffs = 0.2 * np.random.default_rng(5).standard_normal(torus3d_grid.M)
    u = State(coeffs, torus3d_grid.spectrum)
    fine = torus3d_grid.refined()
    expected = np.mean(cubic_prime(fine.x, fine.to_grid(coeffs)))
    assert spatial_average_multiplier(u, cubic_prime, torus3d_grid) == pytest.approx(expected, abs=1e-10)

    # on the interval f'(0) = -1 at both Dirichlet ends enters the rule
    interval = CollocationGrid.for_spectrum(spectrum_interval(6))
    c = np.array([0.5, -0.3, 0.2, 0.1, -0.1, 0.05])
    n = np.arange(1, 7)
    profile = lambda x: math.sqrt(2 / math.pi) * np.sum(c * np.sin(n * x))
    expected = quad(lambda x: cubic_prime(x, profile(x)), 0, math.pi, epsabs=1e-13)[0] / math.pi
    u = State(c, interval.spectrum)
    assert spatial_average_multiplier(u, cubic_prime, interval) == pytest.approx(expected, abs=1e-10)


def test_averaging_defect_of_scalar_multipliers(torus3d_grid):
    rng = np.random.default_rng(6)
    u = State(0.2 * rng.standard_normal(torus3d_grid.M), torus3d_grid.spectrum)
    v = State(rng.standard_normal(torus3d_grid.M), torus3d_grid.spectrum)
    constant = lambda x, u: np.full(np.shape(u), -1.5)
    assert spatial_averaging_defect(u, v, 26, 0.5, constant, torus3d_grid) < 1e-10

    outside = np.zeros(torus3d_grid.M)
    outside[:18] = rng.standard_normal(18)
    assert spatial_averaging_defect(u, State(outside, u.spectrum), 26, 0.5, cubic_prime, torus3d_grid) == 0.0


def test_averaging_defect_matches_the_gram_matrix(torus3d_grid):
    rng = np.random.default_rng(7)
    spectrum = torus3d_grid.spectrum
    u = State(0.3 * rng.standard_normal(spectrum.M), spectrum)
    v = State(rng.standard_normal(spectrum.M), spectrum)
    shell = np.array(shell_projector(spectrum, 26, 0.5).shell) - 1

    fine = torus3d_grid.refined()
    basis = fine.to_grid(np.eye(spectrum.M)[shell])
    weight = cubic_prime(fine.x, fine.to_grid(u.coeffs))
    gram = np.einsum('mabc,abc,nabc->mn', basis, weight, basis) * fine.cell_volume
    expected = np.linalg.norm(gram @ v.coeffs[shell] - np.mean(weight) * v.coeffs[shell])

    assert expected > 1e-3
    assert spatial_averaging_defect(u, v, 26, 0.5, cubic_prime, torus3d_grid) == pytest.approx(expected, rel=1e-9)


def test_averaging_defect_vanishes_on_separated_shells(torus3d_grid):
    # the norm 3 and 4 shell has no two points within distance sqrt(2), so multipliers
    # built from modes with |p|^2 <= 2 act on it as their mean; |p| = 2 reaches across it
    assert 3 in shell_search(0.5, 1.5, 3)
    v = State(np.random.default_rng(8).standard_normal(torus3d_grid.M), torus3d_grid.spectrum)
    u = State.zeros(torus3d_grid.spectrum)

    near = lambda x, u: 2 + 0.5 * np.cos(x[0]) + 0.3 * np.sin(x[0] + x[1]) + 0 * u
    far = lambda x, u: 2 + 0.5 * np.cos(2 * x[0]) + 0 * u
    assert spatial_averaging_defect(u, v, 26, 0.5, near, torus3d_grid) < 1e-10
    assert spatial_averaging_defect(u, v, 26, 0.5, far, torus3d_grid) > 1e-2


def test_cut_off_profiles():
    s = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    assert list(smooth_step(s)) == pytest.approx([0.0, 0.0, 0.5, 1.0, 1.0])
    assert list(radial_cutoff(np.array([0.0, 1.0, 1.5, 2.0, 3.0]))) == pytest.approx([1.0, 1.0, 0.5, 0.0, 0.0])


def test_rotation_model_is_a_rotation():
    model = rotation_model(spectrum_interval(4), 1, 2.0)
    assert model.lipschitz_L == pytest.approx(2.0)
    u = np.array([1.0, 0.0, 0.0, 0.0])
    assert list(model(u)) == pytest.approx([0.0, 2.0, 0.0, 0.0])


def test_chafee_infante_declared_constant_holds():
    model = chafee_infante_model(M=8)
    assert list(model.spectrum.values[:3]) == [2, 5, 10]
    assert estimate_lipschitz(model, samples=200, scale=0.5, seed=1) <= model.lipschitz_L
    assert np.allclose(model(np.zeros(8)), 0.0)


def test_chafee_infante_is_odd():
    model = chafee_infante_model(M=8)
    u = np.random.default_rng(0).standard_normal(8) * 0.2
    assert np.allclose(model(-u), -model(u))


def test_limit_cycle_model():
    model = limit_cycle_model(M=4)
    assert list(model.spectrum.values) == [1, 1, 9, 16]
    # on the unit circle the planar field is a pure rotation
    u = np.array([1.0, 0.0, 0.0, 0.0])
    field = model.vector_field(u)
    assert field[0] == pytest.approx(0.0, abs=1e-12)
    assert field[1] == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        limit_cycle_model(M=2)


def test_build_model_lookup():
    assert build_model('zero', modes=5).lipschitz_L == 0.0
    assert build_model('limit-cycle', modes=5).M == 5
    with pytest.raises(ValidationError):
        build_model('chaffee-infante', modes=5)


def test_spectrum_record_is_json_ready(linear_spectrum):
    info = linear_spectrum._asdict()
    assert info['schema'] == 'Spectrum'
    assert info['source'] == 'linear'
    assert isinstance(Spectrum(values=info['values'], source=info['source']), Spectrum)
