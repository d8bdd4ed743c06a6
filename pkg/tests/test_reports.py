import math
import json

import pytest
import numpy as np

from inertialab.reports.schema import (
    CheckResult,
    ExperimentReport,
    ExperimentConfig,
    ValidationError,
    NumericalError,
)
from inertialab.logging_util import ExperimentTimer
from inertialab.reports.csv import rows_to_csv, columns_to_csv, checks_to_csv
from inertialab.reports.json import (
    REPORT_SCHEMA_TAG,
    generate_json_report,
    validate_report,
    write_json_report,
    parse_json_report,
    strip_volatile,
)

from .fixtures import *


def test_compare_records_slack():
    check = CheckResult.compare('rate', 1.0, '<=', 2.0)
    assert check.passed
    assert check.slack == 1.0

    check = CheckResult.compare('rate', 1.0, '>', 2.0, detail='too slow')
    assert not check.passed
    assert check.slack == -1.0
    assert check.detail == 'too slow'


def test_compare_with_nan_fails():
    check = CheckResult.compare('fit', math.nan, '>=', 0.9)
    assert not check.passed
    assert check.slack is None
    assert check.detail == 'nan'


def test_flag_and_invalid_checks():
    check = CheckResult.flag('converged', np.bool_(True), measured=12)
    assert check.passed is True
    assert check.op is None

    with pytest.raises(ValidationError):
        CheckResult(name='', passed=True)
    with pytest.raises(ValidationError):
        CheckResult(name='rate', passed=True, op='==')


def test_error_exit_codes():
    assert ValidationError('bad').exit_code == 2
    assert NumericalError('diverged', hints=('lower --dt',)).exit_code == 3


def test_report_status():
    assert ExperimentReport(kind='gap-find', config={}).status == 'empty'

    report = ExperimentReport(kind='gap-find', config={}, checks=[
        CheckResult.compare('a', 1, '<', 2),
        CheckResult.compare('b', 3, '<', 2),
    ])
    assert report.status == 'failed'
    assert report.num_failed == 1
    assert not report.passed
    assert report.runtime is None

    finished = report.finished()
    assert finished.runtime >= 0
    assert finished.checks == report.checks


def test_experiment_timer_feeds_the_report_runtime():
    with ExperimentTimer('gap-find') as timer:
        assert timer.ticker is None
        assert timer.end_ts is None
    seconds = timer.seconds
    assert timer.end() == seconds

    report = ExperimentReport(kind='gap-find', config={}, start_ts=timer.start_ts, end_ts=timer.end_ts)
    assert report.runtime == pytest.approx(seconds)


def test_report_rejects_bad_fields():
    with pytest.raises(ValidationError):
        ExperimentReport(kind='', config={})
    with pytest.raises(ValidationError):
        ExperimentReport(kind='gap-find', config={}, checks=['not a check'])


def test_experiment_config_label():
    exp = ExperimentConfig(kind='cone-check', params={'seed': 4})
    assert exp.label == 'cone-check'
    assert exp.seed == 4
    assert ExperimentConfig(kind='cone-check', params={}, name='rotation').label == 'rotation'


def test_checks_csv():
    text = checks_to_csv([CheckResult.compare('rate', 1.0, '<=', 2.0)])
    header, row = text.splitlines()
    assert header == 'name,passed,measured,op,bound,slack'
    assert row == '"rate",true,1.0,"<=",2.0,1.0'


def test_rows_and_columns_csv():
    assert rows_to_csv([[1, 'a'], [2.5, None]], cols=['n', 's']) == 'n,s\n1,"a"\n2.5,null\n'
    assert rows_to_csv([[1]], cols=['n'], header=False) == '1\n'
    assert columns_to_csv({'N': [1, 2], 'count': np.array([3, 4])}) == 'N,count\n1,3\n2,4\n'
    with pytest.raises(AssertionError):
        columns_to_csv({'N': [1, 2], 'count': [3]})


def sample_report():
    return ExperimentReport(
        kind='shell-search',
        config={'k': 2.0, 'rho': 3.0},
        checks=[CheckResult.compare('qualifying N', 4, '>=', 1)],
        data={'qualifying_N': np.array([1, 2, 5]), 'ratio': np.float64(0.5)},
        seed=7,
    ).finished()


def test_generated_report_matches_the_schema():
    report_json = generate_json_report([sample_report()], {'SEED': 7})
    assert validate_report(report_json) is report_json
    assert report_json['schema'] == REPORT_SCHEMA_TAG
    assert report_json['num_checks'] == 1
    assert report_json['num_failed'] == 0
    experiment = report_json['experiments'][0]
    assert experiment['status'] == 'passed'
    assert experiment['data'] == {'qualifying_N': [1, 2, 5], 'ratio': 0.5}

    del report_json['experiments'][0]['kind']
    with pytest.raises(ValidationError):
        validate_report(report_json)


def test_write_and_parse_report(tmp_path):
    out = tmp_path / 'reports' / 'run.json'
    assert write_json_report(out, [sample_report()], {'SEED': 7}) == out

    parsed, = parse_json_report(out)
    assert parsed.kind == 'shell-search'
    assert parsed.seed == 7
    assert parsed.checks == sample_report().checks
    assert parsed.data['qualifying_N'] == [1, 2, 5]
    assert parsed.runtime >= 0

    with pytest.raises(ValidationError):
        write_json_report(out, [sample_report()], {'SEED': 7})
    write_json_report(out, [sample_report()], {'SEED': 8}, force=True)
    assert json.loads(out.read_text())['config'] == {'SEED': 8}


def test_strip_volatile_makes_runs_comparable():
    first = generate_json_report([sample_report()], {'SEED': 7})
    second = generate_json_report([sample_report()], {'SEED': 7})
    stripped = strip_volatile(first)
    assert 'updated' not in stripped and 'last_run_cmd' not in stripped
    assert 'start_ts' not in stripped['experiments'][0]
    assert stripped == strip_volatile(second)
