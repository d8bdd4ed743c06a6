__package__ = 'inertialab'


import os

from json import dump
from pathlib import Path
from typing import Callable, Iterable, List, Optional, TypeVar, Union
from multiprocessing.pool import ThreadPool

from atomicwrites import atomic_write as lib_atomic_write

from .util import enforce_types, ExtendedEncoder
from .config import OUTPUT_PERMISSIONS, FORCE


T = TypeVar('T')
R = TypeVar('R')


@enforce_types
def atomic_write(path: Union[Path, str], contents: Union[dict, str, bytes], overwrite: bool=True) -> None:
    """Safe atomic write to filesystem by writing to temp file + atomic rename"""

    mode = 'wb+' if isinstance(contents, bytes) else 'w'
    encoding = None if isinstance(contents, bytes) else 'utf-8'  # enforce utf-8 on all text writes

    try:
        with lib_atomic_write(path, mode=mode, overwrite=overwrite, encoding=encoding) as f:
            if isinstance(contents, dict):
                dump(contents, f, indent=4, sort_keys=True, cls=ExtendedEncoder)
            elif isinstance(contents, (bytes, str)):
                f.write(contents)
    except FileExistsError:
        raise
    except OSError as e:
        print(f"[X] OSError: Failed to write {path} ({e})")
        print("    Check that the output folder exists, is writable, and lives on a filesystem that supports fsync.")
        raise SystemExit(1)
    os.chmod(path, int(OUTPUT_PERMISSIONS, base=8))


@enforce_types
def write_output(path: Union[Path, str], contents: Union[dict, str, bytes], force: bool=False) -> Path:
    """write a report or table, refusing to replace an existing file unless forced"""

    from .reports.schema import ValidationError

    path = Path(path)
    if path.exists() and not (force or FORCE):
        raise ValidationError(
            f'Refusing to overwrite existing output: {path}',
            hints=('Pass --force to replace it, or choose another --out path.',),
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    atomic_write(path, contents, overwrite=True)
    return path


def parallel_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int]=None) -> List[R]:
    """map func over items, on a thread pool when workers > 1 (numpy releases the GIL in the hot loops)"""

    items = list(items)
    if not workers or workers <= 1 or len(items) < 2:
        return [func(item) for item in items]

    with ThreadPool(processes=min(workers, len(items))) as pool:
        return pool.map(func, items)
