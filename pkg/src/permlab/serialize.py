"""JSON encoding for every report dataclass in the package.

Rationals become ``"p/q"`` strings, exact matrices become nested lists of
such strings, float arrays become nested lists of floats.  Decoding is driven
by the dataclass type hints, so ``from_jsonable(T, to_jsonable(x)) == x`` for
every report type ``T``.
"""

from __future__ import annotations

import dataclasses
import json
import types
import typing
from fractions import Fraction

import numpy as np

from permlab.errors import PermlabError
from permlab.matrix import Matrix, make_matrix


class DecodeError(PermlabError, ValueError):
    pass


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _key(f: dataclasses.Field) -> str:
    return f.metadata.get("json", f.name)


def to_jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Matrix):
        return [[fraction_str(v) for v in row] for row in obj.entries]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if dataclasses.is_dataclass(obj):
        return {_key(f): to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (tuple, list)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def from_jsonable(tp, data):
    """Rebuild a value of type ``tp`` from its JSON form."""
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if tp is typing.Any:
        return data
    if origin in (typing.Union, types.UnionType):
        if data is None and type(None) in args:
            return None
        errors = []
        for arg in args:
            if arg is type(None):
                continue
            try:
                return from_jsonable(arg, data)
            except (DecodeError, TypeError, ValueError) as exc:
                errors.append(str(exc))
        raise DecodeError(f"no member of {tp} fits {data!r}: {errors}")
    if origin is typing.Literal:
        if data not in args:
            raise DecodeError(f"{data!r} is not one of {args}")
        return data
    if origin is tuple:
        if not isinstance(data, list):
            raise DecodeError(f"expected a list for {tp}, got {data!r}")
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(from_jsonable(args[0], v) for v in data)
        if len(args) != len(data):
            raise DecodeError(f"expected {len(args)} items for {tp}, got {len(data)}")
        return tuple(from_jsonable(a, v) for a, v in zip(args, data))
    if origin is list:
        return [from_jsonable(args[0], v) for v in data]
    if tp is Fraction:
        if not isinstance(data, str):
            raise DecodeError(f"rationals are encoded as strings, got {data!r}")
        try:
            return Fraction(data)
        except (ValueError, ZeroDivisionError) as exc:
            raise DecodeError(str(exc)) from None
    if tp is Matrix:
        return make_matrix(len(data), [[from_jsonable(Fraction, v) for v in row] for row in data])
    if tp is np.ndarray:
        return np.array(data, dtype=np.float64)
    if tp is float:
        if isinstance(data, bool) or not isinstance(data, (int, float)):
            raise DecodeError(f"expected a number, got {data!r}")
        return float(data)
    if tp in (int, bool, str):
        if not isinstance(data, tp) or (tp is int and isinstance(data, bool)):
            raise DecodeError(f"expected {tp.__name__}, got {data!r}")
        return data
    if dataclasses.is_dataclass(tp):
        if not isinstance(data, dict):
            raise DecodeError(f"expected an object for {tp.__name__}, got {data!r}")
        hints = typing.get_type_hints(tp)
        kwargs = {}
        for f in dataclasses.fields(tp):
            key = _key(f)
            if key in data:
                kwargs[f.name] = from_jsonable(hints[f.name], data[key])
            elif f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
                raise DecodeError(f"{tp.__name__}: missing field {key!r}")
        unknown = set(data) - {_key(f) for f in dataclasses.fields(tp)}
        if unknown:
            raise DecodeError(f"{tp.__name__}: unknown fields {sorted(unknown)}")
        return tp(**kwargs)
    raise TypeError(f"cannot decode into {tp!r}")


def _pretty(v, indent: int, level: int) -> str:
    # lists of scalars stay on one line so matrices read row by row
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(v, dict) and v:
        items = [f"{pad}{json.dumps(k)}: {_pretty(x, indent, level + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(v, list) and any(isinstance(x, (list, dict)) for x in v):
        return "[\n" + ",\n".join(pad + _pretty(x, indent, level + 1) for x in v) + "\n" + end + "]"
    return json.dumps(v, allow_nan=False)


def dumps(obj, indent: int | None = 2) -> str:
    data = to_jsonable(obj)
    if indent is None:
        return json.dumps(data, allow_nan=False)
    return _pretty(data, indent, 0)


def loads(tp, text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"invalid JSON: {exc}") from None
    return from_jsonable(tp, data)
