import math

import pytest
import numpy as np

from inertialab.reports.schema import ValidationError
from inertialab.spectral_core import (
    Spectrum,
    State,
    ConeForm,
    check_cut,
    sobolev_norm,
    project_low,
    project_high,
    shell_projector,
    cone_value,
    semigroup_apply,
    split_constants,
    dichotomy_norms,
)

from .fixtures import *


def test_spectrum_rejects_unsorted_or_nonpositive():
    with pytest.raises(ValidationError):
        Spectrum(values=[2.0, 1.0, 3.0])
    with pytest.raises(ValidationError):
        Spectrum(values=[0.0, 1.0])
    with pytest.raises(ValidationError):
        Spectrum(values=[1.0])


def test_spectrum_values_are_read_only(linear_spectrum):
    with pytest.raises(ValueError):
        linear_spectrum.values[0] = 5.0


def test_eigenvalue_is_one_based(linear_spectrum):
    assert linear_spectrum.eigenvalue(1) == 1.0
    assert linear_spectrum.eigenvalue(16) == 16.0
    with pytest.raises(ValidationError):
        linear_spectrum.eigenvalue(0)


def test_check_cut_needs_a_next_eigenvalue(linear_spectrum):
    assert check_cut(linear_spectrum, 15) == 15
    with pytest.raises(ValidationError):
        check_cut(linear_spectrum, 16)
    with pytest.raises(ValidationError):
        check_cut(linear_spectrum, True)


def test_projections_split_the_state(linear_spectrum):
    u = State(np.linspace(-1, 1, 16), linear_spectrum)
    low, high = project_low(u, 5), project_high(u, 5)
    assert np.allclose((low + high).coeffs, u.coeffs)
    assert np.all(low.coeffs[5:] == 0)
    assert np.all(high.coeffs[:5] == 0)
    assert np.dot(low.coeffs, high.coeffs) == 0


def test_sobolev_norm_weights_by_eigenvalue(linear_spectrum):
    u = State.basis(linear_spectrum, 4) * 3.0
    assert sobolev_norm(u, 0) == pytest.approx(3.0)
    assert sobolev_norm(u, 1) == pytest.approx(6.0)
    assert u.norm(2) == pytest.approx(12.0)


def test_cone_form_sign(linear_spectrum):
    e1, e3 = State.basis(linear_spectrum, 1), State.basis(linear_spectrum, 3)
    assert cone_value(e1, 2) == -1.0
    assert cone_value(e3, 2) == 1.0
    assert cone_value(e1 + e3, 2) == 0.0
    batch = np.stack([e1.coeffs, e3.coeffs])
    assert list(ConeForm(2)(batch)) == [-1.0, 1.0]


def test_shell_projector_on_linear_spectrum(linear_spectrum):
    split = shell_projector(linear_spectrum, 8, 2.0)
    assert split.shell == (6, 7, 8, 9, 10, 11)
    assert split.low == (1, 2, 3, 4, 5)
    assert split.high == tuple(range(12, 17))
    with pytest.raises(ValidationError):
        shell_projector(linear_spectrum, 2, 2.5)


def test_semigroup_is_exact_and_forward_only(linear_spectrum):
    u = State(np.ones(16), linear_spectrum)
    v = semigroup_apply(u, 0.5)
    assert v.coeffs[2] == pytest.approx(math.exp(-1.5))
    with pytest.raises(ValidationError):
        semigroup_apply(u, -0.1)


def test_split_constants_and_dichotomy(linear_spectrum):
    alpha, theta = split_constants(linear_spectrum, 4)
    assert (alpha, theta) == (4.5, 0.5)

    high, low = dichotomy_norms(linear_spectrum, 4, 2.0)
    assert high == pytest.approx(math.exp(-theta * 2.0))
    assert math.isnan(low)

    high, low = dichotomy_norms(linear_spectrum, 4, -2.0)
    assert low == pytest.approx(math.exp(-theta * 2.0))
    assert math.isnan(high)
