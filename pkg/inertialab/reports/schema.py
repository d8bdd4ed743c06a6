__package__ = 'inertialab.reports'

import math

from datetime import datetime, timezone
from typing import List, Dict, Any, Optional, Union

from dataclasses import dataclass, asdict, field, fields


class LabError(Exception):
    def __init__(self, message, hints=None):
        super().__init__(message)
        self.hints = hints


class ValidationError(LabError):
    """bad input or violated precondition, the cli exits with status 2"""
    exit_code = 2


class NumericalError(LabError):
    """solver failure, non-finite state or a numerically violated certificate, exit status 3"""
    exit_code = 3


ReportDict = Dict[str, Any]

Measured = Union[float, int, str, bool, None]

COMPARISONS = {
    '<=': (lambda a, b: a <= b, lambda a, b: b - a),
    '<':  (lambda a, b: a < b,  lambda a, b: b - a),
    '>=': (lambda a, b: a >= b, lambda a, b: a - b),
    '>':  (lambda a, b: a > b,  lambda a, b: a - b),
}


def typechecked(record):
    """run record.typecheck(), turning failed asserts into a ValidationError"""
    try:
        record.typecheck()
    except AssertionError as e:
        raise ValidationError(
            f'Invalid {record.__class__.__name__} record: {e or "failed invariant check"}',
            hints=(f'Fields: {", ".join(record.field_names())}',),
        )
    return record


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: Measured = None
    bound: Measured = None
    op: Optional[str] = None
    slack: Optional[float] = None
    detail: str = ''
    schema: str = 'CheckResult'

    def __post_init__(self):
        typechecked(self)

    def _asdict(self):
        return asdict(self)

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert isinstance(self.name, str) and self.name, 'name must be a non-empty string'
        assert isinstance(self.passed, bool)
        assert self.op is None or self.op in COMPARISONS, f'unknown comparison {self.op}'
        assert self.slack is None or isinstance(self.slack, float)
        assert isinstance(self.detail, str)

    @classmethod
    def compare(cls, name: str, measured: float, op: str, bound: float, detail: str='') -> 'CheckResult':
        """build a check from a numeric comparison, slack > 0 means the inequality holds with room"""
        holds, margin = COMPARISONS[op]
        measured, bound = float(measured), float(bound)
        if math.isnan(measured) or math.isnan(bound):
            return cls(name=name, passed=False, measured=measured, bound=bound, op=op, slack=None, detail=detail or 'nan')
        return cls(
            name=name,
            passed=bool(holds(measured, bound)),
            measured=measured,
            bound=bound,
            op=op,
            slack=float(margin(measured, bound)),
            detail=detail,
        )

    @classmethod
    def flag(cls, name: str, passed: bool, detail: str='', measured: Measured=None) -> 'CheckResult':
        return cls(name=name, passed=bool(passed), measured=measured, detail=detail)

    @classmethod
    def from_json(cls, json_info: ReportDict) -> 'CheckResult':
        return cls(**{key: val for key, val in json_info.items() if key in cls.field_names()})

    def to_json(self, indent=4, sort_keys=True) -> str:
        from .json import to_json

        return to_json(self, indent=indent, sort_keys=sort_keys)

    def to_csv(self, cols: Optional[List[str]]=None, separator: str=',', ljust: int=0) -> str:
        from .csv import to_csv

        return to_csv(self, cols=cols or self.field_names(), separator=separator, ljust=ljust)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class ExperimentReport:
    kind: str
    config: Dict[str, Any]
    checks: List[CheckResult] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    start_ts: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    end_ts: Optional[datetime] = None
    schema: str = 'ExperimentReport'

    def __post_init__(self):
        typechecked(self)

    def _asdict(self):
        return {
            'schema': self.schema,
            'kind': self.kind,
            'config': self.config,
            'checks': [check._asdict() for check in self.checks],
            'data': self.data,
            'seed': self.seed,
            'start_ts': self.start_ts,
            'end_ts': self.end_ts,
            'status': self.status,
            'runtime': self.runtime,
        }

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert isinstance(self.kind, str) and self.kind, 'kind must be a non-empty string'
        assert isinstance(self.config, dict)
        assert isinstance(self.checks, list)
        assert all(isinstance(check, CheckResult) for check in self.checks)
        assert isinstance(self.data, dict)
        assert self.seed is None or isinstance(self.seed, int)
        assert isinstance(self.start_ts, datetime)
        assert self.end_ts is None or isinstance(self.end_ts, datetime)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def num_failed(self) -> int:
        return sum(not check.passed for check in self.checks)

    @property
    def status(self) -> str:
        if not self.checks:
            return 'empty'
        return 'passed' if self.passed else 'failed'

    @property
    def runtime(self) -> Optional[float]:
        if self.end_ts is None:
            return None
        return (self.end_ts - self.start_ts).total_seconds()

    def finished(self) -> 'ExperimentReport':
        """copy of this report stamped with an end time"""
        return ExperimentReport(**{**self.__dict__, 'end_ts': datetime.now(timezone.utc)})

    @classmethod
    def from_json(cls, json_info: ReportDict) -> 'ExperimentReport':
        info = {
            key: val
            for key, val in json_info.items()
            if key in cls.field_names()
        }
        info['checks'] = [CheckResult.from_json(check) for check in info.get('checks') or []]
        for key in ('start_ts', 'end_ts'):
            if isinstance(info.get(key), str):
                info[key] = datetime.fromisoformat(info[key])
        return cls(**info)

    def to_json(self, indent=4, sort_keys=True) -> str:
        from .json import to_json

        return to_json(self, indent=indent, sort_keys=sort_keys)

    def to_csv(self, cols: Optional[List[str]]=None, separator: str=',', ljust: int=0) -> str:
        from .csv import checks_to_csv

        return checks_to_csv(self.checks, cols=cols, separator=separator, ljust=ljust)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class ExperimentConfig:
    """one validated entry of an experiment list, ready for dispatch"""

    kind: str
    params: Dict[str, Any]
    name: Optional[str] = None
    schema: str = 'ExperimentConfig'

    def __post_init__(self):
        typechecked(self)

    def _asdict(self):
        return {'schema': self.schema, 'kind': self.kind, 'name': self.label, 'params': self.params}

    def typecheck(self) -> None:
        assert self.schema == self.__class__.__name__
        assert isinstance(self.kind, str) and self.kind, 'kind must be a non-empty string'
        assert isinstance(self.params, dict)
        assert all(isinstance(key, str) for key in self.params)
        assert self.name is None or (isinstance(self.name, str) and self.name)

    @property
    def label(self) -> str:
        return self.name or self.kind

    @property
    def seed(self) -> Optional[int]:
        return self.params.get('seed')

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]
