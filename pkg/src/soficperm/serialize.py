"""JSON helpers: exact rationals, permutations, tuples, atomic writes.

Rationals travel as ``"p/q"`` strings (integers as plain ``"p"``); decimal
strings are accepted on input and parsed exactly.
"""
from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from .perm import GenTuple, PartialPerm, Perm, Subset

SCHEMA = "soficperm/1"


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted; pass a 'p/q' or decimal string")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {text!r}") from exc


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def tuple_digest(t: GenTuple) -> str:
    blob = json.dumps(t.to_json(), separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def to_jsonable(obj):
    """Recursive conversion used for every emitted artifact."""
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Perm):
        return obj.to_list()
    if isinstance(obj, PartialPerm):
        return [None if v < 0 else v for v in obj.images.tolist()]
    if isinstance(obj, Subset):
        return {"n": obj.n, "members": obj.members}
    if isinstance(obj, GenTuple):
        return obj.to_json()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def subset_from_json(obj) -> Subset:
    return Subset(obj["n"], obj["members"])


def partial_from_json(obj) -> PartialPerm:
    return PartialPerm([-1 if v is None else v for v in obj])


def load_tuple(path) -> GenTuple:
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, list):
        return GenTuple([Perm(obj)])
    return GenTuple.from_json(obj)


def load_perm(path) -> Perm:
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, dict):
        obj = obj["images"] if "images" in obj else obj["perms"][0]
    return Perm(obj)


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
