"""Shared numeric and serialization helpers."""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import fields, is_dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np


def kahan_sum(terms: Iterable[float]) -> float:
    """Compensated (Kahan) summation in extended precision.

    Accumulates in numpy longdouble so that differences of large partial
    sums retain ~1e-12 absolute accuracy even for 1e5-term series.
    """
    s = np.longdouble(0.0)
    c = np.longdouble(0.0)
    for x in terms:
        y = np.longdouble(x) - c
        t = s + y
        c = (t - s) - y
        s = t
    return float(s)


def fsum(terms: Iterable[float]) -> float:
    """Exactly rounded double-precision sum (Shewchuk algorithm)."""
    return math.fsum(terms)


def to_jsonable(obj):
    """Recursively convert dataclasses, numpy types and Fractions to plain JSON types."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.complexfloating, complex)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def write_json_atomic(path: str, obj) -> None:
    """Serialize deterministically and rename into place.

    Key order and float repr are stable, so identical inputs yield
    byte-identical files.
    """
    text = json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv_atomic(path: str, header: str, rows: Iterable[str]) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(header + "\n")
            for r in rows:
                fh.write(r + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
