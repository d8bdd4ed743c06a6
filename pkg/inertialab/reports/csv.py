__package__ = 'inertialab.reports'

from typing import List, Optional, Any, Dict, Sequence

from ..util import enforce_types
from .schema import CheckResult


@enforce_types
def checks_to_csv(checks: List[CheckResult],
                  cols: Optional[List[str]]=None,
                  header: bool=True,
                  separator: str=',',
                  ljust: int=0) -> str:

    cols = cols or ['name', 'passed', 'measured', 'op', 'bound', 'slack']

    header_str = ''
    if header:
        header_str = separator.join(col.ljust(ljust) for col in cols)

    row_strs = (
        check.to_csv(cols=cols, ljust=ljust, separator=separator)
        for check in checks
    )

    return '\n'.join((header_str, *row_strs))


@enforce_types
def to_csv(obj: Any, cols: List[str], separator: str=',', ljust: int=0) -> str:
    from .json import to_json

    return separator.join(
        to_json(getattr(obj, col), indent=None).ljust(ljust)
        for col in cols
    )


def rows_to_csv(rows: Sequence[Sequence[Any]],
                cols: List[str],
                header: bool=True,
                separator: str=',') -> str:
    """plain table export, one json-encoded cell per value"""
    from .json import to_json

    header_str = separator.join(cols) if header else None
    row_strs = (
        separator.join(to_json(cell, indent=None) for cell in row)
        for row in rows
    )
    return '\n'.join(s for s in (header_str, *row_strs) if s is not None) + '\n'


def columns_to_csv(columns: Dict[str, Sequence[Any]], separator: str=',') -> str:
    """table export from equal-length named columns (dict order is column order)"""
    cols = list(columns.keys())
    lengths = {len(values) for values in columns.values()}
    assert len(lengths) <= 1, f'columns must have equal lengths, got {sorted(lengths)}'
    rows = zip(*(columns[col] for col in cols))
    return rows_to_csv(list(rows), cols=cols, separator=separator)
