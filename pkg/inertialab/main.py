__package__ = 'inertialab'

import sys
import json
import math
import platform
from pathlib import Path
from difflib import get_close_matches
from configparser import ConfigParser, Error as ConfigParserError

from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .util import enforce_types, default_rng
from .config_stubs import ConfigDict, ExperimentParamDict
from .config import (
    CONFIG,
    CONFIG_SCHEMA,
    USER_CONFIG,
    ANSI,
    VERSION,
    OUTPUT_DIR,
    CONFIG_FILE,
    REPORT_SCHEMA_FILE,
    IS_TTY,
    USE_COLOR,
    SEED,
    PYTHON_VERSION,
    NUMPY_VERSION,
    SCIPY_VERSION,
    get_real_name,
    load_config_val,
    load_all_config,
    write_config_file,
    check_output_path,
    stderr,
    hint,
)
from .logging_util import (
    printable_config,
    log_run_started,
    log_experiment_started,
    log_experiment_finished,
    log_run_finished,
    log_output_written,
    log_lab_error,
    log_numerical_failure,
    ExperimentTimer,
)
from .reports.schema import (
    LabError,
    ValidationError,
    NumericalError,
    CheckResult,
    ExperimentConfig,
    ExperimentReport,
)
from .reports.json import write_json_report
from .reports.csv import rows_to_csv, columns_to_csv
from .system import write_output
from .spectral_core import Spectrum, check_cut
from .models import (
    NonlinearityModel,
    SPECTRA,
    MODELS,
    build_spectrum,
    build_model,
    rotation_model,
    spectrum_interval,
    spectrum_to_csv,
)
from .gap_analysis import (
    GAP_CSV_COLS,
    find_gaps,
    find_gaps_ck,
    level_gaps,
    shell_points,
    verify_shell_pairwise,
    shell_search as search_shells,
)
from .dynamics import random_ball, attractor_sample
from .manifold import (
    POINT_BUILDERS,
    GridSpec,
    build_manifold,
    lp_contraction_checks,
    graph_invariance_check,
    off_manifold_starts,
    tracking_verify,
    squeezing_check,
    cone_check as cone_inequality_check,
)
from .reduction import (
    box_counting_dim,
    doubling_factor,
    separated_count,
    eps_sequence,
    orthogonal_segments_set,
    cube_vertices_set,
    log_doubling_lower_bound,
    mane_experiment,
    injective_fraction,
    romanov_check,
    EPS_RULES,
)
from .counterexamples import (
    COUNTEREXAMPLES,
    c1_obstruction_spectra,
    build_periodic_operator,
    poincare_map,
    superexp_decay,
    nonuniform_ratios,
    floquet_orbit_cloud,
    kick_sequences,
    segments_attractor,
    segments_cloud,
    smoothness_budget,
)


class Outcome(NamedTuple):
    checks: List[CheckResult]
    data: Dict[str, Any]
    tables: Dict[str, str]


class Experiment(NamedTuple):
    func: Callable[..., Outcome]
    description: str
    params: ExperimentParamDict


# config keys echoed into every json report (paths and terminal state would break determinism)
REPORT_CONFIG_KEYS = ('SEED', *CONFIG_SCHEMA['NUMERICS_CONFIG'].keys())


### Shared experiment plumbing

def _seeded() -> ExperimentParamDict:
    return {'seed': {'type': int, 'default': lambda c: c['SEED']}}


def _model_params(model: str='chafee-infante', modes: int=8) -> ExperimentParamDict:
    return {
        'model':            {'type': str,   'default': model, 'choices': tuple(MODELS)},
        'modes':            {'type': int,   'default': modes, 'positive': True},
        'N':                {'type': int,   'default': None, 'positive': True},
    }


def _manifold_params() -> ExperimentParamDict:
    return {
        **_model_params(),
        'method':           {'type': str,   'default': 'lp', 'choices': tuple(POINT_BUILDERS)},
        'radius':           {'type': float, 'default': 0.5, 'positive': True},
        'points':           {'type': int,   'default': 5, 'positive': True},
        'interpolation':    {'type': str,   'default': 'linear', 'choices': ('linear', 'cubic')},
        'dt':               {'type': float, 'default': lambda c: c['TIME_STEP'], 'positive': True},
        'tol':              {'type': float, 'default': lambda c: c['MANIFOLD_TOL'], 'positive': True},
        'workers':          {'type': int,   'default': 1, 'positive': True},
    }


def _model_and_cut(model: str, modes: int, N: Optional[int]) -> Tuple[NonlinearityModel, int]:
    """build the model and, without an explicit N, take the first cut that satisfies the gap condition"""
    built = build_model(model, modes=modes)
    if N is None:
        gaps = find_gaps(built.spectrum, built.lipschitz_L, count=1)
        if not gaps:
            raise ValidationError(
                f'No cut of the {model} spectrum with {modes} modes satisfies the gap condition for L={built.lipschitz_L:.4g}',
                hints=('Pass --N explicitly, or raise --modes.',),
            )
        N = gaps[0].N
    return built, check_cut(built.spectrum, N)


def _manifold(built: NonlinearityModel, N: int, method: str, radius: float, points: int,
              interpolation: str, dt: float, tol: float, workers: int):
    return build_manifold(
        built, N, GridSpec(radius=radius, points=points), method=method, tol=tol, dt=dt,
        interpolation=interpolation, workers=workers,
    )


def _counterexample_spectrum(name: str, modes: int) -> Spectrum:
    if name == 'linear':
        return Spectrum(values=np.arange(1, modes + 1, dtype=float), source='linear')
    spectrum = build_spectrum(name, modes=modes)
    return spectrum.truncated(min(modes, spectrum.M))


### Experiment runners

def _gap_find(spectrum: str, modes: int, lmax: int, a: float, alpha: float, L: float, beta: float,
              count: Optional[int], k: Optional[int]) -> Outcome:
    spec = build_spectrum(spectrum, modes=modes, lmax=lmax, a=a, alpha=alpha)
    gaps = find_gaps(spec, L, beta=beta, count=count)
    _, widths = level_gaps(spec)

    checks = [
        CheckResult.compare('qualifying cuts', len(gaps), '>=', 1,
                            detail=f'{spec.source} with {spec.M} modes, L={L:g}, beta={beta:g}'),
        CheckResult.flag('every reported cut satisfies the condition', all(gap.holds for gap in gaps)),
    ]
    data: Dict[str, Any] = {
        'spectrum': spec.source,
        'M': spec.M,
        'lambda_max': float(spec.values[-1]),
        'max_level_gap': float(widths.max()) if widths.size else 0.0,
        'qualifying_N': [gap.N for gap in gaps],
    }
    if k is not None:
        smooth = find_gaps_ck(spec, k, L, beta=beta, count=count)
        checks.append(CheckResult.compare(f'C^{k} qualifying cuts', len(smooth), '>=', 1))
        data['qualifying_N_ck'] = smooth

    rows = [[getattr(gap, col) for col in GAP_CSV_COLS] for gap in gaps]
    return Outcome(checks, data, {
        'gaps': rows_to_csv(rows, cols=GAP_CSV_COLS),
        'spectrum': spectrum_to_csv(spec),
    })


def _shell_search(k: float, rho: float, N_max: int, verify: int) -> Outcome:
    found = search_shells(k, rho, N_max)
    rechecked = found[:verify]
    failed = [N for N in rechecked if not verify_shell_pairwise(k, rho, N)]
    checks = [
        CheckResult.compare('qualifying N', len(found), '>=', 1, detail=f'k={k:g}, rho={rho:g}, N <= {N_max}'),
        CheckResult.compare('pairwise re-verification failures', len(failed), '<=', 0,
                            detail=f'{len(rechecked)} re-verified' + (f', failed: {failed}' if failed else '')),
    ]
    table = columns_to_csv({
        'N': found,
        'shell_points': [len(shell_points(k, N)) for N in found],
    })
    return Outcome(checks, {'qualifying_N': found, 'reverified': rechecked}, {'shells': table})


def _manifold_build(model: str, modes: int, N: Optional[int], method: str, radius: float, points: int,
                    interpolation: str, dt: float, tol: float, workers: int, compare: bool, seed: int) -> Outcome:
    built, N = _model_and_cut(model, modes, N)
    graph = _manifold(built, N, method, radius, points, interpolation, dt, tol, workers)
    invariance, interp_error = graph_invariance_check(built, graph, dt=dt, seed=seed)

    checks = [*graph.checks(), invariance]
    data: Dict[str, Any] = {'manifold': graph, 'interpolation_error': interp_error}
    if method == 'lp':
        checks.extend(lp_contraction_checks(graph, built))
    if compare:
        other_method = next(name for name in POINT_BUILDERS if name != method)
        other = _manifold(built, N, other_method, radius, points, interpolation, dt, tol, workers)
        if other_method == 'lp':
            checks.extend(lp_contraction_checks(other, built))
        scale = max(float(np.max(np.abs(graph.values))), 1e-3 * radius)
        agreement = float(np.max(np.abs(graph.values - other.values))) / scale
        checks.append(CheckResult.compare(f'{method} vs {other_method} agreement', agreement, '<=', 1e-4,
                                          detail=f'{len(graph.grid_points)} grid points'))
        data['agreement'] = agreement

    mesh = graph.grid_points
    cols = [f'p{i}' for i in range(1, N + 1)] + [f'q{j}' for j in range(N + 1, graph.M + 1)]
    table = rows_to_csv(np.hstack([mesh, graph.values.reshape(len(mesh), -1)]).tolist(), cols=cols)
    return Outcome(checks, data, {'graph': table})


def _track_verify(model: str, modes: int, N: Optional[int], method: str, radius: float, points: int,
                  interpolation: str, dt: float, tol: float, workers: int, starts: int, T_fit: float,
                  start_radius: Optional[float], offset: float, seed: int) -> Outcome:
    built, N = _model_and_cut(model, modes, N)
    graph = _manifold(built, N, method, radius, points, interpolation, dt, tol, workers)
    U0 = off_manifold_starts(built, graph, starts, start_radius or radius / 20, offset, seed=seed, dt=dt)
    tracks = [tracking_verify(built, graph, u0, T_fit, dt=dt) for u0 in U0]

    lam_N = float(built.spectrum.values[N - 1])
    rates = np.array([track.rate for track in tracks])
    quads = np.abs([track.quad_coeff for track in tracks])
    checks = [
        CheckResult.compare('slowest tracking rate', float(np.min(rates)), '>=', 0.8 * lam_N,
                            detail=f'{starts} starts, lambda_N={lam_N:g}'),
        CheckResult.compare('largest |quadratic coefficient|', float(np.max(quads)), '<=', 0.05),
    ]
    summary = [
        {'rate': t.rate, 'constant': t.constant, 'r2': t.r2, 'quad_coeff': t.quad_coeff,
         'fit_points': t.fit_points, 'initial_distance': t.initial_distance,
         'endpoint_mismatch': t.endpoint_mismatch}
        for t in tracks
    ]
    table = rows_to_csv(
        [[i + 1, t.rate, t.constant, t.r2, t.quad_coeff, t.initial_distance, t.endpoint_mismatch]
         for i, t in enumerate(tracks)],
        cols=['start', 'rate', 'constant', 'r2', 'quad_coeff', 'initial_distance', 'endpoint_mismatch'],
    )
    return Outcome(checks, {'N': N, 'lambda_N': lam_N, 'tracks': summary}, {'tracking': table})


def _cone_check(model: str, modes: int, N: Optional[int], L: float, pairs: int, T: float, dt: float,
                radius: float, expect_violations: bool, gamma_target: Optional[float], seed: int) -> Outcome:
    if model == 'rotation':
        built = rotation_model(spectrum_interval(modes, a_const=1.0, alpha=1.0), N or 1, L)
        N = check_cut(built.spectrum, N or 1)
    else:
        built, N = _model_and_cut(model, modes, N)
    U1 = random_ball(built.M, pairs, radius, seed)
    U2 = random_ball(built.M, pairs, radius, seed + 1)
    report = cone_inequality_check(built, U1, U2, N, T=T, dt=dt)

    if expect_violations:
        checks = [CheckResult.compare('cone inequality violations', report.violations, '>=', 1,
                                      detail=f'{report.pairs} pairs, gap below 2L expected to break the cone')]
    else:
        checks = report.checks()
    data: Dict[str, Any] = {
        'cone': report,
        'gap': float(built.spectrum.values[N] - built.spectrum.values[N - 1]),
        'two_L': 2 * built.lipschitz_L,
    }
    if gamma_target is not None:
        squeezing = squeezing_check(built, U1, U2, N, gamma_target, T=T, dt=dt)
        checks.extend(squeezing.checks())
        data['squeezing'] = squeezing
    return Outcome(checks, data, {})


EXPECTED_DIMENSION = {
    'segment': (1.0, 0.15),
    'square': (2.0, 0.2),
    'limit-cycle': (1.0, 0.2),
}


def _dimension_estimate(cloud: str, points: int, method: str, model: str, modes: int, n_traj: int,
                        burn_in: float, dt: float, n_max: int, rule: str, cube_max: int, beta: float,
                        seed: int) -> Outcome:
    rng = default_rng(seed)

    if cloud == 'orthogonal-segments':
        eps = eps_sequence(rule, n_max, beta)
        segments = orthogonal_segments_set(eps)
        doubling = np.array([doubling_factor(segments, float(eps[n - 1]), centers=[0]) for n in range(1, n_max + 1)])
        n = np.arange(1, n_max + 1)
        checks = [CheckResult.compare('min D_eps_n - n', int(np.min(doubling - n)), '>=', 0,
                                      detail=f'{rule} scales, n <= {n_max}')]
        table = columns_to_csv({
            'n': n, 'eps': eps, 'doubling': doubling,
            'log_doubling_lower_bound': log_doubling_lower_bound(rule, n, beta),
        })
        return Outcome(checks, {'doubling': doubling, 'points': len(segments)}, {'doubling': table})

    if cloud == 'cube-vertices':
        if cube_max > 12:
            raise ValidationError(f'cube_max={cube_max} needs 2^{cube_max} vertices per cube, at most 12 is supported')
        eps = eps_sequence('gauss', cube_max, beta)
        cubes = cube_vertices_set(eps, list(range(1, cube_max + 1)))
        n = np.arange(1, cube_max + 1)
        counts = np.array([separated_count(cubes, 0, float(eps[k - 1]) * math.sqrt(k), float(eps[k - 1])) for k in n])
        checks = [CheckResult.flag('eps_n-separated vertices equal 2^n', bool(np.all(counts == 2 ** n)),
                                   measured=int(np.max(np.abs(counts - 2 ** n))))]
        table = columns_to_csv({'n': n, 'eps': eps, 'separated': counts, 'vertices': 2 ** n})
        return Outcome(checks, {'separated': counts, 'points': len(cubes)}, {'cubes': table})

    if cloud == 'segment':
        coords = np.outer(rng.random(points), np.ones(3)) / math.sqrt(3)
        expected = EXPECTED_DIMENSION['segment']
    elif cloud == 'square':
        coords = rng.random((points, 2))
        expected = EXPECTED_DIMENSION['square']
    else:
        built = build_model(model, modes=modes)
        coords = attractor_sample(built, n_traj, burn_in, keep=max(points // n_traj, 1), seed=seed, dt=dt)
        expected = EXPECTED_DIMENSION.get(model)

    estimate = box_counting_dim(coords, method=method)
    if expected is not None:
        target, width = expected
        checks = [CheckResult.compare('|dimension - expected|', abs(estimate.dim - target), '<=', width,
                                      detail=f'dim={estimate.dim:.4f}, expected {target:g}')]
    else:
        checks = [CheckResult.compare('dimension fit r^2', estimate.r2, '>=', 0.9)]
    return Outcome(checks, {'estimate': estimate, 'points': len(coords)}, {'counts': estimate.to_csv()})


def _mane_project(model: str, modes: int, N: int, seeds: int, n_traj: int, burn_in: float, keep: int,
                  dt: float, L_candidates: List[float], seed: int) -> Outcome:
    built = build_model(model, modes=modes)
    cloud = attractor_sample(built, n_traj, burn_in, keep, seed=seed, dt=dt)
    experiments = mane_experiment(cloud, N, n_seeds=seeds, seed=seed)
    fraction = injective_fraction(experiments)
    holder = float(np.nanmedian([e.holder_exponent for e in experiments]))
    romanov = romanov_check(cloud, built.spectrum, L_candidates, seed=seed)

    checks = [
        CheckResult.compare('injective fraction', fraction, '>=', 0.95, detail=f'{seeds} random rank-{N} projectors'),
        CheckResult.compare('median Hölder exponent', holder, '>=', 0.8),
    ]
    table = rows_to_csv(
        [[e.seed, e.margin, e.injective, e.holder_exponent, e.holder_r2] for e in experiments],
        cols=['seed', 'margin', 'injective', 'holder_exponent', 'holder_r2'],
    )
    data = {'points': len(cloud), 'injective_fraction': fraction, 'holder_median': holder,
            'projections': experiments, 'romanov': romanov}
    return Outcome(checks, data, {'projections': table})


def _c1_run(spectrum: Spectrum, L: Optional[float], amp: float) -> Outcome:
    lam = spectrum.values
    if L is None:
        L = max(float(np.max(np.diff(lam))) / 2, float(lam[0])) + 0.5
    obstruction = c1_obstruction_spectra(spectrum, L, amp)
    checks = [*obstruction.checks, CheckResult.flag('manifold dimension parity conflict', obstruction.parity_conflict)]
    rows = [
        [side, float(eig.real), float(eig.imag)]
        for side, eigs in (('minus', obstruction.minus_eigs), ('plus', obstruction.plus_eigs))
        for eig in eigs
    ]
    return Outcome(checks, {'obstruction': obstruction}, {'eigenvalues': rows_to_csv(rows, cols=['equilibrium', 're', 'im'])})


def _floquet_run(spectrum: Spectrum, T: float, amplitude: float, L: Optional[float], dt: Optional[float],
                 N_iter: Optional[int], n_values: Optional[List[int]], workers: int) -> Outcome:
    M = spectrum.M
    op = build_periodic_operator(spectrum, T=T, amplitude=amplitude, L=L)
    report = poincare_map(op, dt=dt, workers=workers)
    decay = superexp_decay(op, report, N_iter=min(12, (M + 1) // 2) if N_iter is None else N_iter)
    if n_values is None:
        n_values = [n for n in (4, 9, 16) if 2 * (2 * n + math.isqrt(n)) + 1 <= M]

    checks = [*op.checks, *report.checks, *decay.checks]
    data: Dict[str, Any] = {'operator': op, 'poincare': report, 'decay': decay}
    tables = {'multipliers': report.to_csv(), 'decay': decay.to_csv()}
    if n_values:
        ratios = nonuniform_ratios(op, n_values, report)
        checks.extend(ratios.checks)
        data['nonuniform'] = ratios
        tables['nonuniform'] = ratios.to_csv()

    # only an odd truncation lets the shift orbit of e_2 reach the top mode
    if M % 2:
        romanov = romanov_check(floquet_orbit_cloud(report), spectrum, [1.0, 10.0], N_range=range(1, M))
        checks.append(CheckResult.flag('no spectral cut separates the orbit',
                                       all(N is None for N in romanov.qualifying_N.values())))
        data['romanov'] = romanov
    return Outcome(checks, data, tables)


def _segments_run(spectrum: Spectrum, kicks: int, kappa: float, s: float, k: float) -> Outcome:
    B, E, _ = kick_sequences(np.arange(1, kicks + 1))
    attractor = segments_attractor(spectrum, B, E)
    cloud = segments_cloud(attractor)
    lengths = attractor.layout.lengths
    doubling = np.array([doubling_factor(cloud, float(lengths[n]) * (1 + 1e-6), centers=[0]) for n in range(kicks)])
    n = np.arange(1, kicks + 1)
    budget = smoothness_budget(*kick_sequences(np.arange(1, 10 ** 4 + 1), kappa), s=s, k=k)

    checks = [
        *attractor.checks,
        CheckResult.compare('min D_length_n - n', int(np.min(doubling - n)), '>=', 0, detail=f'{kicks} segments'),
        CheckResult.flag(f'kick field bounded in C^{k:g}(H^{s:g})', budget.finite, measured=budget.tail_slope),
    ]
    table = columns_to_csv({'n': n, 'length': lengths, 'doubling': doubling})
    return Outcome(checks, {'attractor': attractor, 'doubling': doubling, 'budget': budget}, {'segments': table})


def _counterexample_run(which: str, spectrum: str, modes: int, T: float, amplitude: float, L: Optional[float],
                        amp: float, dt: Optional[float], N_iter: Optional[int], n_values: Optional[List[int]],
                        kicks: int, kappa: float, s: float, k: float, workers: int) -> Outcome:
    spec = _counterexample_spectrum(spectrum, modes)
    if which == 'c1':
        return _c1_run(spec, L, amp)
    if which == 'floquet':
        return _floquet_run(spec, T, amplitude, L, dt, N_iter, n_values, workers)
    return _segments_run(spec, kicks, kappa, s, k)


### Experiment catalog

EXPERIMENTS: Dict[str, Experiment] = {
    'gap-find': Experiment(_gap_find, 'cuts N of a spectrum satisfying the (beta-weighted) spectral gap condition', {
        'spectrum':         {'type': str,   'default': 'torus2d', 'choices': tuple(SPECTRA)},
        'modes':            {'type': int,   'default': lambda c: c['GALERKIN_MODES'], 'positive': True},
        'lmax':             {'type': int,   'default': 1000, 'positive': True},
        'a':                {'type': float, 'default': 0.0},
        'alpha':            {'type': float, 'default': 0.0},
        'L':                {'type': float, 'default': 1.0, 'positive': True},
        'beta':             {'type': float, 'default': 0.0},
        'count':            {'type': int,   'default': None, 'positive': True},
        'k':                {'type': int,   'default': None, 'positive': True},
    }),
    'shell-search': Experiment(_shell_search, 'integer shells on the 3D torus with no two lattice points closer than rho', {
        'k':                {'type': float, 'default': 0.5, 'positive': True},
        'rho':              {'type': float, 'default': 1.5, 'positive': True},
        'N_max':            {'type': int,   'default': 2000, 'positive': True},
        'verify':           {'type': int,   'default': 5},
    }),
    'manifold-build': Experiment(_manifold_build, 'tabulate the inertial manifold graph on a grid of low-mode points', {
        **_manifold_params(),
        'compare':          {'type': bool,  'default': False},
        **_seeded(),
    }),
    'track-verify': Experiment(_track_verify, 'exponential tracking of random trajectories by trajectories on the manifold', {
        **_manifold_params(),
        'starts':           {'type': int,   'default': 20, 'positive': True},
        'T_fit':            {'type': float, 'default': 2.0, 'positive': True},
        'start_radius':     {'type': float, 'default': None, 'positive': True},
        'offset':           {'type': float, 'default': 0.02, 'positive': True},
        **_seeded(),
    }),
    'cone-check': Experiment(_cone_check, 'cone invariance and squeezing along random trajectory pairs', {
        **_model_params(),
        'model':            {'type': str,   'default': 'chafee-infante', 'choices': (*MODELS, 'rotation')},
        'L':                {'type': float, 'default': 2.0, 'positive': True},
        'pairs':            {'type': int,   'default': 1000, 'positive': True},
        'T':                {'type': float, 'default': 1.0, 'positive': True},
        'dt':               {'type': float, 'default': lambda c: c['TIME_STEP'], 'positive': True},
        'radius':           {'type': float, 'default': 1.0, 'positive': True},
        'expect_violations': {'type': bool, 'default': False},
        'gamma_target':     {'type': float, 'default': None},
        **_seeded(),
    }),
    'dimension-estimate': Experiment(_dimension_estimate, 'box counting and doubling factors of test sets and sampled attractors', {
        'cloud':            {'type': str,   'default': 'segment',
                             'choices': ('segment', 'square', 'attractor', 'orthogonal-segments', 'cube-vertices')},
        'points':           {'type': int,   'default': 10000, 'positive': True},
        'method':           {'type': str,   'default': 'grid', 'choices': ('grid', 'net')},
        'model':            {'type': str,   'default': 'limit-cycle', 'choices': tuple(MODELS)},
        'modes':            {'type': int,   'default': 8, 'positive': True},
        'n_traj':           {'type': int,   'default': 20, 'positive': True},
        'burn_in':          {'type': float, 'default': 20.0, 'positive': True},
        'dt':               {'type': float, 'default': lambda c: c['TIME_STEP'], 'positive': True},
        'n_max':            {'type': int,   'default': 30, 'positive': True},
        'rule':             {'type': str,   'default': 'power2', 'choices': tuple(EPS_RULES)},
        'cube_max':         {'type': int,   'default': 8, 'positive': True},
        'beta':             {'type': float, 'default': 1.0, 'positive': True},
        **_seeded(),
    }),
    'mane-project': Experiment(_mane_project, 'random rank-N projections of a sampled attractor: injectivity and Hölder inverse', {
        'model':            {'type': str,   'default': 'limit-cycle', 'choices': tuple(MODELS)},
        'modes':            {'type': int,   'default': 8, 'positive': True},
        'N':                {'type': int,   'default': 3, 'positive': True},
        'seeds':            {'type': int,   'default': 100, 'positive': True},
        'n_traj':           {'type': int,   'default': 10, 'positive': True},
        'burn_in':          {'type': float, 'default': 20.0, 'positive': True},
        'keep':             {'type': int,   'default': 200, 'positive': True},
        'dt':               {'type': float, 'default': lambda c: c['TIME_STEP'], 'positive': True},
        'L_candidates':     {'type': list,  'default': [1.0, 2.0, 5.0]},
        **_seeded(),
    }),
    'counterexample-run': Experiment(_counterexample_run, 'the C^1 parity obstruction, the Floquet weighted shift or the orthogonal segments', {
        'which':            {'type': str,   'default': 'floquet', 'choices': tuple(COUNTEREXAMPLES)},
        'spectrum':         {'type': str,   'default': 'linear', 'choices': ('linear', *SPECTRA)},
        'modes':            {'type': int,   'default': 16, 'positive': True},
        'T':                {'type': float, 'default': 1.0, 'positive': True},
        'amplitude':        {'type': float, 'default': 1.0, 'positive': True},
        'L':                {'type': float, 'default': None, 'positive': True},
        'amp':              {'type': float, 'default': 10.0, 'positive': True},
        'dt':               {'type': float, 'default': None, 'positive': True},
        'N_iter':           {'type': int,   'default': None, 'positive': True},
        'n_values':         {'type': list,  'default': None},
        'kicks':            {'type': int,   'default': 10, 'positive': True},
        'kappa':            {'type': float, 'default': 2.0, 'positive': True},
        's':                {'type': float, 'default': 2.0},
        'k':                {'type': float, 'default': 3.0},
        'workers':          {'type': int,   'default': 1, 'positive': True},
    }),
}


def _suggest(name: str, options) -> str:
    close = get_close_matches(name, list(options), n=1)
    return f'Did you mean {close[0]}?' if close else f'Available: {", ".join(options)}'


def _as_text(val: Any) -> str:
    if isinstance(val, (list, tuple, dict)):
        return json.dumps(list(val) if isinstance(val, tuple) else val)
    return str(val)


@enforce_types
def validate_experiment(kind: str, params: Optional[Dict[str, Any]]=None, name: Optional[str]=None) -> ExperimentConfig:
    """parse and range-check the options of one experiment, filling in defaults"""

    if kind not in EXPERIMENTS:
        raise ValidationError(f'Unknown experiment kind: {kind}', hints=(_suggest(kind, EXPERIMENTS),))

    schema = EXPERIMENTS[kind].params
    params = params or {}
    for key in params:
        if key not in schema:
            raise ValidationError(f'Unknown {kind} option: {key}', hints=(_suggest(key, schema),))

    raw = {key: _as_text(val) for key, val in params.items() if val is not None and _as_text(val) != ''}
    validated: Dict[str, Any] = {}
    for key, spec in schema.items():
        try:
            val = load_config_val(key, default=spec['default'], type=spec['type'], config=CONFIG, config_file_vars=raw)
        except ValueError as e:
            raise ValidationError(str(e).replace('configuration option', f'{kind} option'))

        if spec.get('positive') and val is not None and not val > 0:
            raise ValidationError(f'{kind} option {key} must be positive, got {val}')
        if 'choices' in spec and val not in spec['choices']:
            raise ValidationError(f'Invalid {kind} option {key}={val}', hints=(_suggest(str(val), spec['choices']),))
        validated[key] = val

    return ExperimentConfig(kind=kind, params=validated, name=name)


def _table_path(out_path: Path, label: Optional[str], table: str) -> Path:
    stem = f'{out_path.stem}-{label}-{table}' if label else f'{out_path.stem}-{table}'
    return out_path.with_name(f'{stem}.csv')


def _report_config(config: ConfigDict=CONFIG) -> Dict[str, Any]:
    return {key: config[key] for key in REPORT_CONFIG_KEYS}


@enforce_types
def run_experiments(experiments: List[Tuple[str, Dict[str, Any], Optional[str]]],
                    out: Optional[str]=None,
                    force: bool=False) -> List[ExperimentReport]:
    """validate every entry, run them in order, then write the json report and csv tables"""

    try:
        configs = [validate_experiment(kind, params, name) for kind, params, name in experiments]
    except LabError as err:
        log_lab_error(err)
        raise SystemExit(err.exit_code)

    out_path = check_output_path(out, force=force) if out else None

    log_run_started(len(configs))
    reports: List[ExperimentReport] = []
    tables: Dict[Path, str] = {}
    for exp in configs:
        log_experiment_started(exp.label, exp.params)
        timer = ExperimentTimer(exp.label)
        try:
            outcome = EXPERIMENTS[exp.kind].func(**exp.params)
        except NumericalError as err:
            timer.end()
            log_numerical_failure(err, kind=exp.label)
            raise SystemExit(err.exit_code)
        except LabError as err:
            timer.end()
            log_lab_error(err, kind=exp.label)
            raise SystemExit(err.exit_code)
        timer.end()

        report = ExperimentReport(
            kind=exp.kind,
            config=exp.params,
            checks=outcome.checks,
            data=outcome.data,
            seed=exp.seed,
            start_ts=timer.start_ts,
            end_ts=timer.end_ts,
        )
        log_experiment_finished(report)
        reports.append(report)

        if out_path:
            label = exp.label if len(configs) > 1 else None
            for table, text in outcome.tables.items():
                tables[_table_path(out_path, label, table)] = text

    if out_path:
        try:
            for path, text in tables.items():
                write_output(path, text, force=force)
                log_output_written(str(path), 'table')
            write_json_report(out_path, reports, _report_config(), force=True)
        except LabError as err:
            log_lab_error(err)
            raise SystemExit(err.exit_code)
        log_output_written(str(out_path), 'report')

    log_run_finished(str(out_path) if out_path else None)
    return reports


def _finish(reports: List[ExperimentReport]) -> List[ExperimentReport]:
    if not all(report.passed for report in reports):
        raise SystemExit(1)
    return reports


### Subcommands

@enforce_types
def help(out_dir: Path=OUTPUT_DIR) -> None:
    """Print the Inertialab help message and usage"""

    from .cli import list_subcommands, display_first, meta_cmds, main_cmds, experiment_cmds

    all_subcommands = list_subcommands()
    COMMANDS_HELP_TEXT = '\n    '.join(
        f'{cmd.ljust(20)} {summary}'
        for cmd, summary in all_subcommands.items()
        if cmd in meta_cmds
    ) + '\n\n    ' + '\n    '.join(
        f'{cmd.ljust(20)} {summary}'
        for cmd, summary in all_subcommands.items()
        if cmd in main_cmds
    ) + '\n\n    ' + '\n    '.join(
        f'{cmd.ljust(20)} {summary}'
        for cmd, summary in all_subcommands.items()
        if cmd in experiment_cmds
    )
    others = [cmd for cmd in all_subcommands if cmd not in display_first]
    if others:
        COMMANDS_HELP_TEXT += '\n\n    ' + '\n    '.join(
            f'{cmd.ljust(20)} {all_subcommands[cmd]}' for cmd in others
        )

    print('''{green}Inertialab v{}: numerical checks for inertial manifolds and spectral gaps.{reset}

{lightred}Output directory:{reset}
    {}

{lightred}Usage:{reset}
    inertialab [command] [--help] [--version] [...args]

{lightred}Commands:{reset}
    {}

{lightred}Common experiment flags:{reset}
    --seed --out --dt --modes --tol --force

{lightred}Example Use:{reset}
    inertialab list
    inertialab gap-find --spectrum torus2d --lmax 100000 --L 3 --out gaps.json
    inertialab shell-search --k 0.5 --rho 1.5 --N-max 2000
    inertialab counterexample-run --which floquet --T 1 --modes 16 --out floquet.json

    inertialab config --set TIME_STEP=0.0005
    inertialab run experiments.ini --out report.json

{lightred}Documentation:{reset}
    README.md in the inertialab package directory
'''.format(VERSION, out_dir, COMMANDS_HELP_TEXT, **ANSI))


@enforce_types
def version(quiet: bool=False, out_dir: Path=OUTPUT_DIR) -> None:
    """Print the Inertialab version and dependency information"""

    if quiet:
        print(VERSION)
        return

    # Inertialab v0.3.0
    # Cpython Linux Linux-6.1.0-x86_64-with-glibc2.36 x86_64
    print('Inertialab v{}'.format(VERSION))
    p = platform.uname()
    print(
        sys.implementation.name.title(),
        p.system,
        platform.platform(),
        p.machine,
    )
    print(
        f'IS_TTY={IS_TTY}',
        f'USE_COLOR={USE_COLOR}',
        f'SEED={SEED}',
    )
    print()

    print('{white}[i] Dependency versions:{reset}'.format(**ANSI))
    for name, found in (('python', PYTHON_VERSION), ('numpy', NUMPY_VERSION), ('scipy', SCIPY_VERSION)):
        print('    {} {}'.format(name.ljust(12), found or '{red}not installed{reset}'.format(**ANSI)))

    print()
    print('{white}[i] Locations:{reset}'.format(**ANSI))
    for name, path in (('OUTPUT_DIR', out_dir), ('CONFIG_FILE', CONFIG_FILE), ('REPORT_SCHEMA', REPORT_SCHEMA_FILE)):
        status = 'present' if Path(path).exists() else 'missing'
        print('    {} {} ({})'.format(name.ljust(14), path, status))


@enforce_types
def config(config_options_str: Optional[str]=None,
           config_options: Optional[List[str]]=None,
           get: bool=False,
           set: bool=False,
           reset: bool=False,
           out_dir: Path=OUTPUT_DIR) -> None:
    """Get and set your Inertialab configuration values"""

    if config_options and config_options_str:
        stderr(
            '[X] You should either pass config values as an arguments '
            'or via stdin, but not both.\n',
            color='red',
        )
        raise SystemExit(2)
    elif config_options_str:
        config_options = config_options_str.split('\n')

    config_options = config_options or []

    no_args = not (get or set or reset or config_options)

    matching_config: ConfigDict = {}
    if get or no_args:
        if config_options:
            config_options = [get_real_name(key) for key in config_options]
            matching_config = {key: CONFIG[key] for key in config_options if key in CONFIG}
            failed_config = [key for key in config_options if key not in CONFIG]
            if failed_config:
                stderr()
                stderr('[X] These options failed to get', color='red')
                stderr('    {}'.format('\n    '.join(failed_config)))
                raise SystemExit(1)
        else:
            matching_config = CONFIG

        print(printable_config(matching_config))
        raise SystemExit(not matching_config)
    elif set:
        new_config = {}
        failed_options = []
        for line in config_options:
            if line.startswith('#') or not line.strip():
                continue
            if '=' not in line:
                stderr('[X] Config KEY=VALUE must have an = sign in it', color='red')
                stderr(f'    {line}')
                raise SystemExit(2)

            raw_key, val = line.split('=', 1)
            raw_key = raw_key.upper().strip()
            key = get_real_name(raw_key)
            if key != raw_key:
                stderr(f'[i] Note: {raw_key} is a short name for {key}, which is what gets written.', color='lightyellow')

            if key in USER_CONFIG:
                new_config[key] = val.strip()
            else:
                failed_options.append(line)

        if new_config:
            before = CONFIG
            matching_config = write_config_file(new_config, out_dir=str(out_dir))
            after = load_all_config(out_dir=str(out_dir))
            print(printable_config(matching_config))

            side_effect_changes: ConfigDict = {}
            for key, val in after.items():
                if key in USER_CONFIG and (before[key] != after[key]) and (key not in matching_config):
                    side_effect_changes[key] = after[key]

            if side_effect_changes:
                stderr()
                stderr('[i] Note: This change also affected these other options that depended on it:', color='lightyellow')
                print('    {}'.format(printable_config(side_effect_changes, prefix='    ')))
        if failed_options:
            stderr()
            stderr('[X] These options failed to set (check for typos):', color='red')
            stderr('    {}'.format('\n    '.join(failed_options)))
            hint([_suggest(get_real_name(line.split('=', 1)[0]), sorted(USER_CONFIG)) for line in failed_options])
            raise SystemExit(1)
    elif reset:
        keys = [get_real_name(key.split('=', 1)[0]) for key in config_options if key.strip()]
        unknown = [key for key in keys if key not in USER_CONFIG]
        if not keys or unknown:
            stderr('[X] --reset needs one or more known config KEYs', color='red')
            if unknown:
                stderr('    {}'.format('\n    '.join(unknown)))
            raise SystemExit(2)

        write_config_file({key: '' for key in keys}, out_dir=str(out_dir), remove=True)
        print(printable_config({key: val for key, val in load_all_config(out_dir=str(out_dir)).items() if key in keys}))
    else:
        stderr('[X] You must pass either --get, --set or --reset, or no arguments to get the whole config.', color='red')
        stderr('    inertialab config')
        stderr('    inertialab config --get SOME_KEY')
        stderr('    inertialab config --set SOME_KEY=SOME_VALUE')
        stderr('    inertialab config --reset SOME_KEY')
        raise SystemExit(2)


@enforce_types
def list_experiments(kind: Optional[str]=None) -> Dict[str, ExperimentConfig]:
    """List the experiment kinds with their descriptions and default options"""

    if kind is not None and kind not in EXPERIMENTS:
        stderr(f'[X] Unknown experiment kind: {kind}', color='red')
        hint(_suggest(kind, EXPERIMENTS))
        raise SystemExit(2)

    catalog = {
        name: validate_experiment(name)
        for name in EXPERIMENTS
        if kind is None or name == kind
    }
    for name, defaults in catalog.items():
        print('{green}{}{reset} {}'.format(name.ljust(20), EXPERIMENTS[name].description, **ANSI))
        print('    {black}{}{reset}'.format(printable_config(defaults.params, prefix='    '), **ANSI))
        print()
    return catalog


@enforce_types
def run(config_file: str, out: Optional[str]=None, force: bool=False) -> List[ExperimentReport]:
    """Run every experiment listed in an INI file and write one JSON report"""

    path = Path(config_file)
    if not path.exists():
        stderr(f'[X] Experiment file not found: {path}', color='red')
        raise SystemExit(2)

    parser = ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore
    try:
        parser.read(path, encoding='utf-8')
    except ConfigParserError as e:
        stderr(f'[X] Could not parse experiment file: {path}', color='red')
        stderr('    {}: {}'.format(e.__class__.__name__, e))
        raise SystemExit(2)

    experiments = []
    for section in parser.sections():
        options = dict(parser[section])
        kind = options.pop('kind', '').strip()
        if not kind:
            stderr(f'[X] Section [{section}] of {path} has no "kind = ..." line', color='red')
            hint(f'Available kinds: {", ".join(EXPERIMENTS)}')
            raise SystemExit(2)
        experiments.append((kind, options, section))

    out = out or str(OUTPUT_DIR / f'{path.stem}-report.json')
    return _finish(run_experiments(experiments, out=out, force=force))


def _experiment_subcommand(kind: str, params: Optional[Dict[str, Any]], out: Optional[str], force: bool) -> List[ExperimentReport]:
    return _finish(run_experiments([(kind, params or {}, None)], out=out, force=force))


@enforce_types
def gap_find(params: Optional[Dict[str, Any]]=None, out: Optional[str]=None, force: bool=False) -> List[ExperimentReport]:
    """Find cuts N of a spectrum that satisfy the spectral gap condition"""
    return _experiment_subcommand('gap-find', params, out, force)


@enforce_types
def shell_search(params: Optional[Dict[str, Any]]=None, out: Optional[str]=None, force: bool=False) -> List[ExperimentReport]:
    """Search 3D torus shells whose lattice points are pairwise far apart"""
    return _experiment_subcommand('shell-search', params, out, force)


@enforce_types
def manifold_build(params: Optional[Dict[str, Any]]=None, out: Optional[str]=None, force: bool=False) -> List[ExperimentReport]:
    """Build an inertial manifold graph on a grid and check its invariance"""
    return _experiment_subcommand('manifold-build', params, out, force)


@enforce_types
def track_verify(params: Optional[Dict[str, Any]]=None, out: Optional[str]=None, force: bool=False) -> List[ExperimentReport]:
    """Measure exponential tracking of trajectories by the manifold"""
    return _experiment_subcommand('track-verify', params, out, force)


@enforce_types
def cone_check(params: Optional[Dict[str, Any]]=None, out: Optional[str]=None, force: bool=False) -> List[ExperimentReport]:
    """Check the cone and squeezing properties on random trajectory pairs"""
    return _experiment_subcommand('cone-check', params, out, force)


@enforce_types
def dimension_estimate(params: Optional[Dict[str, Any]]=None, out: Optional[str]=None, force: bool=False) -> List[ExperimentReport]:
    """Estimate box-counting dimensions and doubling factors of point clouds"""
    return _experiment_subcommand('dimension-estimate', params, out, force)


@enforce_types
def mane_project(params: Optional[Dict[str, Any]]=None, out: Optional[str]=None, force: bool=False) -> List[ExperimentReport]:
    """Project a sampled attractor with random rank-N projectors"""
    return _experiment_subcommand('mane-project', params, out, force)


@enforce_types
def counterexample_run(params: Optional[Dict[str, Any]]=None, out: Optional[str]=None, force: bool=False) -> List[ExperimentReport]:
    """Run one of the counterexample constructions and verify it numerically"""
    return _experiment_subcommand('counterexample-run', params, out, force)
