__package__ = 'inertialab.reports'

from .schema import (
    LabError,
    ValidationError,
    NumericalError,
    CheckResult,
    ExperimentReport,
    ExperimentConfig,
)
