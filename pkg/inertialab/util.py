__package__ = 'inertialab'

import json as pyjson

from inspect import signature
from functools import wraps
from datetime import datetime
from pathlib import Path
from typing import Optional

import numpy as np


def enforce_types(func):
    """
    Enforce function arg and kwarg types at runtime using its python3 type hints
    """
    # TODO: check return type as well

    @wraps(func)
    def typechecked_function(*args, **kwargs):
        sig = signature(func)

        def check_argument_type(arg_key, arg_val):
            try:
                annotation = sig.parameters[arg_key].annotation
            except KeyError:
                annotation = None

            if annotation is not None and annotation.__class__ is type:
                # ints are valid wherever a float is expected
                if annotation is float and isinstance(arg_val, (int, np.integer)) and not isinstance(arg_val, bool):
                    return
                if annotation is float and isinstance(arg_val, np.floating):
                    return
                if not isinstance(arg_val, annotation):
                    raise TypeError(
                        '{}(..., {}: {}) got unexpected {} argument {}={}'.format(
                            func.__name__,
                            arg_key,
                            annotation.__name__,
                            type(arg_val).__name__,
                            arg_key,
                            str(arg_val)[:64],
                        )
                    )

        # check args
        for arg_val, arg_key in zip(args, sig.parameters):
            check_argument_type(arg_key, arg_val)

        # check kwargs
        for arg_key, arg_val in kwargs.items():
            check_argument_type(arg_key, arg_val)

        return func(*args, **kwargs)

    return typechecked_function


def docstring(text: Optional[str]):
    """attach the given docstring to the decorated function"""
    def decorator(func):
        if text:
            func.__doc__ = text
        return func
    return decorator


### Numerics helpers

def default_rng(seed: Optional[int]=None) -> np.random.Generator:
    """seeded generator shared by every sampling routine, falls back to the configured SEED"""
    if seed is None:
        from .config import SEED
        seed = SEED
    return np.random.default_rng(seed)


def geometric_ints(start: int, stop: int, count: int) -> np.ndarray:
    """roughly log-spaced distinct integers in [start, stop]"""
    vals = np.unique(np.round(np.geomspace(start, stop, count)).astype(int))
    return vals[(vals >= start) & (vals <= stop)]


class ExtendedEncoder(pyjson.JSONEncoder):
    """
    Extended json serializer that supports serializing report records,
    numpy arrays and scalars, and a few stdlib objects
    """

    def default(self, obj):
        cls_name = obj.__class__.__name__

        if hasattr(obj, '_asdict'):
            return obj._asdict()

        elif isinstance(obj, np.ndarray):
            if np.iscomplexobj(obj):
                return {'real': obj.real.tolist(), 'imag': obj.imag.tolist()}
            return obj.tolist()

        elif isinstance(obj, np.bool_):
            return bool(obj)

        elif isinstance(obj, np.integer):
            return int(obj)

        elif isinstance(obj, np.floating):
            return float(obj)

        elif isinstance(obj, (complex, np.complexfloating)):
            return {'real': float(obj.real), 'imag': float(obj.imag)}

        elif isinstance(obj, bytes):
            return obj.decode()

        elif isinstance(obj, datetime):
            return obj.isoformat()

        elif isinstance(obj, Exception):
            return '{}: {}'.format(obj.__class__.__name__, obj)

        elif isinstance(obj, Path):
            return str(obj)

        elif cls_name in ('dict_items', 'dict_keys', 'dict_values', 'set', 'frozenset'):
            return tuple(obj)

        return pyjson.JSONEncoder.default(self, obj)
