__package__ = 'inertialab.reports'

import sys
import json as pyjson
from pathlib import Path

from datetime import datetime, timezone
from typing import List, Optional, Any, Union

import jsonschema

from .schema import ExperimentReport, ValidationError, ReportDict
from ..system import write_output
from ..util import enforce_types, ExtendedEncoder
from ..config import (
    VERSION,
    NUMPY_VERSION,
    SCIPY_VERSION,
    REPORT_SCHEMA_FILE,
)


REPORT_SCHEMA_TAG = 'inertialab.report.json'

REPORT_HEADER = {
    'info': 'This is a report of numerical checks produced by Inertialab.',
    'schema': REPORT_SCHEMA_TAG,
    'meta': {
        'project': 'Inertialab',
        'version': VERSION,
        'dependencies': {
            'numpy': NUMPY_VERSION,
            'scipy': SCIPY_VERSION,
        },
    },
}

# keys that legitimately differ between two runs of the same (config, seed)
VOLATILE_KEYS = ('updated', 'last_run_cmd', 'start_ts', 'end_ts', 'runtime')


def to_json(obj: Any, indent: Optional[int]=4, sort_keys: bool=True) -> str:
    return pyjson.dumps(obj, indent=indent, sort_keys=sort_keys, cls=ExtendedEncoder)


def load_report_schema(schema_path: Union[Path, str]=REPORT_SCHEMA_FILE) -> dict:
    return pyjson.loads(Path(schema_path).read_text(encoding='utf-8'))


@enforce_types
def generate_json_report(reports: List[ExperimentReport], config: dict) -> ReportDict:
    """wrap experiment reports with the versioned header, then round trip through json"""

    output = {
        **REPORT_HEADER,
        'num_checks': sum(len(report.checks) for report in reports),
        'num_failed': sum(report.num_failed for report in reports),
        'updated': datetime.now(timezone.utc),
        'last_run_cmd': sys.argv,
        'config': config,
        'experiments': reports,
    }
    return pyjson.loads(to_json(output))


def validate_report(report_json: ReportDict, schema: Optional[dict]=None) -> ReportDict:
    try:
        jsonschema.validate(instance=report_json, schema=schema or load_report_schema())
    except jsonschema.ValidationError as e:
        path = '/'.join(str(part) for part in e.absolute_path) or '<root>'
        raise ValidationError(
            f'Report does not match the shipped schema at {path}: {e.message}',
            hints=(f'Schema file: {REPORT_SCHEMA_FILE}',),
        )
    return report_json


@enforce_types
def write_json_report(out_path: Union[Path, str], reports: List[ExperimentReport], config: dict, force: bool=False) -> Path:
    """validate and atomically write the combined json report for a cli run"""

    report_json = validate_report(generate_json_report(reports, config))
    return write_output(out_path, report_json, force=force)


@enforce_types
def parse_json_report(report_path: Union[Path, str]) -> List[ExperimentReport]:
    """load a json report written by write_json_report back into records"""

    with open(report_path, 'r', encoding='utf-8') as f:
        report_json = validate_report(pyjson.load(f))

    return [ExperimentReport.from_json(info) for info in report_json['experiments']]


def strip_volatile(report_json: Any) -> Any:
    """drop timestamps and argv so two reports of the same run compare equal"""
    if isinstance(report_json, dict):
        return {
            key: strip_volatile(val)
            for key, val in report_json.items()
            if key not in VOLATILE_KEYS
        }
    if isinstance(report_json, list):
        return [strip_volatile(val) for val in report_json]
    return report_json
