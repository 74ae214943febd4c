"""Trace values: integers, strings, booleans and finite sets of values.

Python's ``True == 1`` would conflate booleans with integers, so every
comparison goes through :func:`value_key`, which tags each value with its kind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Union

Value = Union[bool, int, str, "ValueSet"]


def value_key(v) -> tuple:
    """Total, kind-aware ordering key; two values are equal iff their keys are."""
    if isinstance(v, bool):
        return (0, v)
    if isinstance(v, int):
        return (1, v)
    if isinstance(v, str):
        return (2, v)
    if isinstance(v, ValueSet):
        return (3, tuple(value_key(x) for x in v.items))
    raise TypeError(f"not a trace value: {v!r}")


@dataclass(frozen=True)
class ValueSet:
    """Canonical finite set: members sorted by :func:`value_key`, no duplicates."""

    items: tuple = ()

    def __post_init__(self):
        seen = {}
        for x in self.items:
            x = canon(x)
            seen.setdefault(value_key(x), x)
        object.__setattr__(self, "items", tuple(seen[k] for k in sorted(seen)))

    @classmethod
    def of(cls, members: Iterable) -> "ValueSet":
        return cls(tuple(members))

    def __contains__(self, v) -> bool:
        k = value_key(canon(v))
        return any(value_key(x) == k for x in self.items)

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __eq__(self, other):
        if not isinstance(other, ValueSet):
            return NotImplemented
        return value_key(self) == value_key(other)

    def __hash__(self):
        return hash(value_key(self))

    def __repr__(self):
        return format_value(self)


def canon(v):
    """Coerce a Python object into a canonical trace value."""
    if isinstance(v, ValueSet):
        return v
    if isinstance(v, (set, frozenset)):
        return ValueSet.of(v)
    if isinstance(v, (bool, int, str)):
        return v
    raise TypeError(f"not a trace value: {v!r}")


def value_eq(a, b) -> bool:
    return value_key(a) == value_key(b)


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, ValueSet):
        return "{" + ", ".join(format_value(x) for x in v.items) + "}"
    raise TypeError(f"not a trace value: {v!r}")


def value_to_json(v):
    if isinstance(v, ValueSet):
        return {"set": [value_to_json(x) for x in v.items]}
    return v


def value_from_json(obj):
    if isinstance(obj, dict):
        if set(obj) != {"set"} or not isinstance(obj["set"], list):
            raise ValueError(f"malformed set value: {obj!r}")
        return ValueSet.of(value_from_json(x) for x in obj["set"])
    if isinstance(obj, (bool, int, str)):
        return obj
    raise ValueError(f"unsupported JSON value: {obj!r}")
