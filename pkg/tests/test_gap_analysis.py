import pytest

from inertialab.reports.schema import ValidationError
from inertialab.models import spectrum_interval, spectrum_torus2d
from inertialab.gap_analysis import (
    GAP_CSV_COLS,
    gap_condition,
    gap_condition_beta,
    gap_condition_ck,
    level_cuts,
    find_gaps,
    find_gaps_ck,
    level_gaps,
    max_gap_table,
    weight_balance,
    shell_search,
    shell_points,
    verify_shell_pairwise,
    spatial_averaging_constants,
    check_averaging_cutoff,
    cauchy_schwarz_check,
    cutoff_monotonicity_check,
)

from .fixtures import *


def test_gap_condition_is_strict(linear_spectrum):
    holds, report = gap_condition(linear_spectrum, 3, 0.4)
    assert holds and not report.boundary
    assert (report.alpha, report.theta) == (3.5, 0.5)

    holds, report = gap_condition(linear_spectrum, 3, 0.5)
    assert not holds
    assert report.boundary


def test_find_gaps_on_interval():
    spectrum = spectrum_interval(10)
    gaps = find_gaps(spectrum, 5.0)
    # lambda_{N+1} - lambda_N = 2N + 1
    assert [gap.N for gap in gaps] == [5, 6, 7, 8, 9]
    assert [gap.N for gap in find_gaps(spectrum, 5.0, count=2)] == [5, 6]
    assert gaps[0].to_csv(cols=GAP_CSV_COLS).startswith('5,')


def test_beta_condition_balances_the_interval():
    spectrum = spectrum_interval(12)
    # (2N+1) / ((N+1) + N) = 1 for every cut when beta = -1
    for N in range(1, 12):
        holds, report = gap_condition_beta(spectrum, N, 0.99, -1.0)
        assert holds
        assert report.ratio == pytest.approx(1.0)
    assert find_gaps(spectrum, 1.0, beta=-1.0) == []


def test_beta_zero_matches_plain_condition():
    spectrum = spectrum_interval(12)
    for N in range(1, 12):
        plain, _ = gap_condition(spectrum, N, 4.0)
        weighted, _ = gap_condition_beta(spectrum, N, 4.0, 0.0)
        assert plain == weighted


def test_beta_out_of_range():
    with pytest.raises(ValidationError):
        find_gaps(spectrum_interval(6), 1.0, beta=0.5)
    with pytest.raises(ValidationError):
        gap_condition_beta(spectrum_interval(6), 2, 1.0, -2.0)


def test_shifted_alpha_balances_weights():
    spectrum = spectrum_interval(12)
    low, high = weight_balance(spectrum, 4, -1.0)
    assert low == pytest.approx(high)


def test_ck_condition():
    spectrum = spectrum_interval(10)
    assert find_gaps_ck(spectrum, 2, 0.4) == [1]
    assert gap_condition_ck(spectrum, 1, 1, 0.4)
    with pytest.raises(ValidationError):
        gap_condition_ck(spectrum, 1, 0, 0.4)


def test_cuts_skip_inside_multiplicities():
    spectrum = spectrum_torus2d(10)
    assert list(level_cuts(spectrum)) == [4, 8, 12, 20, 24, 28]
    levels, widths = level_gaps(spectrum)
    assert list(levels) == [1, 2, 4, 5, 8, 9]
    assert list(widths) == [1, 2, 1, 3, 1, 1]
    # the only gap wider than 2.8 opens above lambda = 5
    assert [gap.N for gap in find_gaps(spectrum, 1.4)] == [20]


def test_max_gap_table():
    rows = max_gap_table(spectrum_torus2d(10), bounds=[3.0, 10.0])
    assert rows[0] == (3.0, 1.0, 1.0)
    assert rows[1] == (10.0, 3.0, 5.0)


def test_shell_search_finds_separated_shells():
    # k = 1/2 holds the norms N and N + 1; a unit step changes the norm parity, so the only
    # close pairs cross between the two norms through a point of norm N with a zero coordinate
    assert shell_search(0.5, 1, 12) == [3, 6, 7, 11, 12]
    for N in (3, 6, 7, 11, 12):
        assert verify_shell_pairwise(0.5, 1, N)
        assert len(shell_points(0.5, N)) >= 1


def test_shell_search_agrees_with_pairwise_distances():
    found = shell_search(0.5, 1.5, 60)
    assert 3 in found
    assert found == [N for N in range(1, 61) if verify_shell_pairwise(0.5, 1.5, N)]


def test_wide_shells_are_never_separated():
    # every shell of half-width 2 up to N = 2000 has two points within distance 3
    assert shell_search(2, 3, 2000) == []


def test_shell_search_trivial_limits():
    # only the origin is within rho < 1, so every nonempty shell qualifies
    assert shell_search(2, 0.5, 50) == list(range(1, 51))
    # a shell holding every lattice point contains unit differences
    assert shell_search(1000, 1, 20) == []


def test_rejected_shell_fails_pairwise_check():
    found = set(shell_search(2, 3, 200))
    rejected = [N for N in range(1, 201) if N not in found]
    assert rejected
    assert not verify_shell_pairwise(2, 3, rejected[0])


def test_spatial_averaging_constants():
    assert spatial_averaging_constants(theta=10.0, L=1.0, k=8.0, delta=0.1, alpha=5.0)
    assert not spatial_averaging_constants(theta=1.0, L=1.0, k=8.0, delta=0.1, alpha=5.0)
    with pytest.raises(ValidationError):
        spatial_averaging_constants(theta=10.0, L=1.0, k=4.0, delta=0.1, alpha=5.0)


def test_averaging_cutoff_properties():
    assert all(check.passed for check in check_averaging_cutoff(1.0))
    with pytest.raises(ValidationError):
        check_averaging_cutoff(1.0, R1=100.0)


def test_polarised_inequalities():
    assert cauchy_schwarz_check(dim=8, samples=500, seed=2).passed
    assert cutoff_monotonicity_check(spectrum_interval(8), 3, 1.0, samples=300, seed=4).passed
