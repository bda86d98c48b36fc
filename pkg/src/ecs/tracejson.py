"""JSON documents for traces.

Floats are written with 17 significant digits so a trace read back gives the
same doubles.  The writer is a small recursive encoder because ``json.dumps``
always uses the shortest repr for floats.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .geometry import Circle, Line, Point
from .model import Disc, HSegment, PointPair, Trace, type_audit


def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x}")
    s = format(x, ".17g")
    if s == "-0":
        s = "0"
    return s


def item_to_dict(item) -> dict:
    if isinstance(item, Point):
        return {"kind": "point", "x": item.x, "y": item.y}
    if isinstance(item, Line):
        return {"kind": "line", "a": item.a, "b": item.b, "c": item.c}
    if isinstance(item, Circle):
        return {"kind": "circle", "cx": item.center.x, "cy": item.center.y, "r": item.radius}
    if isinstance(item, Disc):
        return {"kind": "disc", "cx": item.center.x, "cy": item.center.y, "r": item.radius}
    if isinstance(item, HSegment):
        return {"kind": "hseg", "a": item.a, "b": item.b, "c": item.c}
    if isinstance(item, PointPair):
        return {"kind": "pair", "x1": item.p.x, "y1": item.p.y, "x2": item.q.x, "y2": item.q.y}
    raise TypeError(f"cannot serialise {item!r}")


def item_from_dict(d: dict):
    k = d["kind"]
    if k == "point":
        return Point(d["x"], d["y"])
    if k == "line":
        return Line(d["a"], d["b"], d["c"])
    if k == "circle":
        return Circle(Point(d["cx"], d["cy"]), d["r"])
    if k == "disc":
        return Disc(Point(d["cx"], d["cy"]), d["r"])
    if k == "hseg":
        return HSegment(d["a"], d["b"], d["c"])
    if k == "pair":
        return PointPair(Point(d["x1"], d["y1"]), Point(d["x2"], d["y2"]))
    raise ValueError(f"unknown item kind {k!r}")


def trace_to_dict(trace: Trace) -> dict:
    steps = []
    for n in range(trace.root_length, len(trace.word)):
        rec = trace.provenance[n]
        entry: dict[str, Any] = {"index": n, "rule": rec.rule, "operands": list(rec.operands)}
        if rec.select is not None:
            entry["select"] = rec.select
        entry["letter"] = item_to_dict(trace.word[n])
        steps.append(entry)
    return {
        "root": [item_to_dict(x) for x in trace.word[: trace.root_length]],
        "steps": steps,
        "chooser_log": [{"location": item_to_dict(loc), "point": item_to_dict(p)} for loc, p in trace.chooser_log],
        "type": type_audit(trace).type,
        "declared_type": trace.declared_type,
    }


def encode(obj, indent: int | None = None, _level: int = 0) -> str:
    """``json.dumps`` with fixed 17-significant-digit floats."""
    nl = "" if indent is None else "\n"
    pad = "" if indent is None else " " * (indent * (_level + 1))
    end = "" if indent is None else " " * (indent * _level)
    sep = ", " if indent is None else ","
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f"{pad}{json.dumps(str(k))}: {encode(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{" + nl + (sep + nl).join(parts) + nl + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [f"{pad}{encode(v, indent, _level + 1)}" for v in obj]
        return "[" + nl + (sep + nl).join(parts) + nl + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return encode(obj.item(), indent, _level)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def trace_to_json(trace: Trace, indent: int | None = 2) -> str:
    return encode(trace_to_dict(trace), indent)


def chooser_points(doc: dict) -> list[Point]:
    """Chosen points of a serialised trace, for replay with ``Scripted``."""
    return [item_from_dict(e["point"]) for e in doc["chooser_log"]]
