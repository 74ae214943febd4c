"""JSON trace documents.

Format (UTF-8)::

    {"events": [{"id": "e1", "op": "put", "args": [0]},
                {"id": "e4", "op": "get", "args": [], "ret": {"set": [2]}}],
     "vis": [["e1", "e4"]]}

``args`` defaults to ``[]``; ``ret`` and ``replica`` are optional. Set values are
wrapped as ``{"set": [...]}``. ``vis`` may list the reduction, the closure or
anything generating the intended order.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import SchemaError
from .graph import AbstractExecution, Event, OperationRecord, id_sort_key, validate
from .values import value_from_json, value_to_json

_EVENT_KEYS = {"id", "op", "args", "ret", "replica"}


def trace_from_dict(doc) -> AbstractExecution:
    if not isinstance(doc, dict) or not isinstance(doc.get("events"), list):
        raise SchemaError("trace must be an object with an 'events' list")
    events = []
    for k, raw in enumerate(doc["events"]):
        if not isinstance(raw, dict):
            raise SchemaError(f"events[{k}] is not an object")
        extra = set(raw) - _EVENT_KEYS
        if extra:
            raise SchemaError(f"events[{k}] has unknown keys {sorted(extra)}")
        if not isinstance(raw.get("id"), str) or not raw["id"]:
            raise SchemaError(f"events[{k}] needs a non-empty string 'id'")
        if not isinstance(raw.get("op"), str) or not raw["op"]:
            raise SchemaError(f"events[{k}] needs a non-empty string 'op'")
        args = raw.get("args", [])
        if not isinstance(args, list):
            raise SchemaError(f"events[{k}].args must be a list")
        try:
            args = tuple(value_from_json(a) for a in args)
            ret = value_from_json(raw["ret"]) if "ret" in raw and raw["ret"] is not None else None
        except ValueError as exc:
            raise SchemaError(f"events[{k}]: {exc}") from None
        replica = raw.get("replica")
        if replica is not None and not isinstance(replica, str):
            raise SchemaError(f"events[{k}].replica must be a string")
        events.append(Event(raw["id"], OperationRecord(raw["op"], args, ret), replica))
    vis = doc.get("vis", [])
    if not isinstance(vis, list) or not all(
        isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p) for p in vis
    ):
        raise SchemaError("'vis' must be a list of [from-id, to-id] pairs")
    return validate(events, [tuple(p) for p in vis])


def trace_to_dict(A: AbstractExecution) -> dict:
    events = []
    for e in A.events:
        item = {"id": e.id, "op": e.op.name, "args": [value_to_json(a) for a in e.op.args]}
        if e.op.ret is not None:
            item["ret"] = value_to_json(e.op.ret)
        if e.replica is not None:
            item["replica"] = e.replica
        events.append(item)
    vis = sorted(A.vis_reduction, key=lambda p: (id_sort_key(p[0]), id_sort_key(p[1])))
    return {"events": events, "vis": [list(p) for p in vis]}


def loads_trace(text: str) -> AbstractExecution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return trace_from_dict(doc)


def load_trace(path) -> AbstractExecution:
    return loads_trace(Path(path).read_text(encoding="utf-8"))


def dumps_trace(A: AbstractExecution) -> str:
    return json.dumps(trace_to_dict(A), indent=2, ensure_ascii=False) + "\n"


def dump_trace(A: AbstractExecution, path) -> None:
    Path(path).write_text(dumps_trace(A), encoding="utf-8")
