import math

import pytest
import numpy as np

from inertialab.reports.schema import ValidationError
from inertialab.spectral_core import Spectrum
from inertialab.reduction import (
    PointCloud,
    box_counting_dim,
    doubling_factor,
    log_doubling_factor,
    separated_count,
    eps_sequence,
    orthogonal_segments_set,
    cube_vertices_set,
    log_doubling_lower_bound,
    cube_growth_ratio,
    random_projector,
    mane_experiment,
    injective_fraction,
    log_lipschitz_fit,
    romanov_check,
)

from .fixtures import *


def segment(n=2000, dim=3):
    points = np.zeros((n, dim))
    points[:, 0] = np.linspace(0.0, 1.0, n)
    return points


def square(k=60, dim=3):
    x, y = np.meshgrid(np.linspace(0.0, 1.0, k), np.linspace(0.0, 1.0, k), indexing='ij')
    points = np.zeros((k * k, dim))
    points[:, 0], points[:, 1] = x.ravel(), y.ravel()
    return points


def test_grid_dimension_of_a_segment_and_a_square():
    line = box_counting_dim(segment())
    assert line.dim == pytest.approx(1.0, abs=1e-6)
    assert line.r2 == pytest.approx(1.0)

    plane = box_counting_dim(square())
    assert plane.dim == pytest.approx(2.0, abs=1e-6)
    # scales resolving the cloud point by point are left out of the fit
    assert not all(plane.fit_mask)


def test_net_dimension_of_a_segment():
    estimate = box_counting_dim(segment(n=1000), method='net')
    assert estimate.dim == pytest.approx(1.0, abs=0.1)
    assert estimate.to_csv().splitlines()[0] == 'eps,count,fit'


def test_dimension_of_a_single_point():
    estimate = box_counting_dim(np.ones((5, 3)))
    assert estimate.dim == 0.0


def test_dimension_input_errors():
    with pytest.raises(ValidationError):
        box_counting_dim(segment(), eps_range=[0.1, 0.05, 0.02])
    with pytest.raises(ValidationError):
        box_counting_dim(segment(), method='boxes')


def test_point_cloud_norms(linear_spectrum):
    with pytest.raises(ValidationError):
        PointCloud(points=np.ones((3, 16)), s=2.0)
    cloud = PointCloud(points=np.ones((3, 16)), s=2.0, spectrum=linear_spectrum)
    assert cloud.embedded()[0] == pytest.approx(linear_spectrum.values)
    assert len(cloud) == 3


def test_doubling_of_a_segment_is_bounded():
    line = doubling_factor(segment(n=400), 0.1)
    assert 2 <= line <= 4
    assert doubling_factor(square(k=40), 0.1) > line
    with pytest.raises(ValidationError):
        doubling_factor(segment(), 0.0)


def test_log_doubling_factor():
    assert 0 < log_doubling_factor(segment(n=400), [0.5, 0.05, 0.02]) < 2
    assert log_doubling_factor(np.zeros((3, 2)), [0.05]) == 0.0
    with pytest.raises(ValidationError):
        log_doubling_factor(segment(n=400), [0.5, 0.1])


def test_separated_count_on_a_segment():
    assert separated_count(segment(n=101), center=0, radius=1.0, sep=0.25) == 5


def test_eps_sequences():
    assert list(eps_sequence('power2', 3)) == pytest.approx([1.0, 0.25, 1 / 9])
    assert eps_sequence('loglog', 4)[0] == 1.0
    assert eps_sequence('gauss', 2, beta=0.5)[1] == pytest.approx(math.exp(-2.0))
    with pytest.raises(ValidationError):
        eps_sequence('cubic', 3)


def test_orthogonal_segments_are_on_the_axes():
    eps = eps_sequence('power2', 5)
    points = orthogonal_segments_set(eps, pts_per_seg=10)
    assert points.shape[1] == 5
    assert np.all(np.count_nonzero(points, axis=1) <= 1)
    assert list(points.max(axis=0)) == pytest.approx(list(eps))
    assert np.any(np.all(points == 0, axis=1))
    with pytest.raises(ValidationError):
        orthogonal_segments_set([0.1, 0.2])


def test_cube_vertices():
    eps = eps_sequence('gauss', 3, beta=0.1)
    points = cube_vertices_set(eps, [2, 3])
    assert points.shape == (1 + 3 + 7, 5)
    assert points[:, 2:].max() == pytest.approx(eps[2])
    with pytest.raises(ValidationError):
        cube_vertices_set(eps, [4])


def test_log_doubling_bounds():
    bound = log_doubling_lower_bound('gauss', [1, 2])
    assert math.isnan(bound[0])
    assert bound[1] == pytest.approx(math.log(2) / math.log(4))
    assert cube_growth_ratio([4])[0] == pytest.approx(2 / math.log(4) ** 2)


def test_random_projector_has_orthonormal_rows():
    P = random_projector(6, 3, seed=4)
    assert P.shape == (3, 6)
    assert np.allclose(P @ P.T, np.eye(3))
    assert np.array_equal(P, random_projector(6, 3, seed=4))
    with pytest.raises(ValidationError):
        random_projector(3, 4)


def test_projection_of_a_planar_set():
    rng = np.random.default_rng(6)
    points = np.zeros((200, 6))
    points[:, :2] = rng.random((200, 2))

    experiments = mane_experiment(points, 3, n_seeds=5, seed=100)
    assert [e.seed for e in experiments] == [100, 101, 102, 103, 104]
    assert injective_fraction(experiments) == 1.0

    coordinate = np.eye(6)[:2]
    exact, = mane_experiment(points, 2, projector=coordinate, seed=1)
    assert exact.margin == pytest.approx(1.0)
    assert exact.holder_exponent == pytest.approx(1.0)
    exponent, _, _ = log_lipschitz_fit(points, coordinate)
    assert exponent == pytest.approx(0.0, abs=1e-9)


def test_romanov_qualifying_cuts():
    spectrum = Spectrum(values=[1.0, 2.0, 3.0, 4.0])
    t = np.linspace(-1.0, 1.0, 15)
    points = np.zeros((15, 4))
    points[:, 0], points[:, 2] = t, 2 * t

    report = romanov_check(points, spectrum, L_candidates=[1.0, 2.0, 3.0])
    # every difference is a multiple of (1, 0, 2, 0)
    assert report.qualifying_N == {1.0: 3, 2.0: 1, 3.0: 1}
    assert report.ratio_min == pytest.approx(math.sqrt(37 / 5))
    assert report.ratio_max == pytest.approx(report.ratio_min)
    assert report.pairs == 105
    assert report._asdict()['qualifying_N'] == {'1.0': 3, '2.0': 1, '3.0': 1}

    with pytest.raises(ValidationError):
        romanov_check(points[:, :3], spectrum, L_candidates=[1.0])
    with pytest.raises(ValidationError):
        romanov_check(np.zeros((4, 4)), spectrum, L_candidates=[1.0])
