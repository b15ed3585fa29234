"""JSON instance documents and exact-rational formatting.

Document layout::

    {
      "agents": [0, 1, ...], "constraints": [...], "objectives": [...],
      "edges": [{"u": 0, "v": 5, "port_u": 1, "port_v": 2}, ...],
      "a": [{"constraint": 5, "agent": 0, "value": "1/1"}, ...],
      "c": [{"objective": 7, "agent": 0, "value": "2/3"}, ...],
      "id_mode": "port_numbering",
      "delta_i": 3, "delta_k": 3
    }

``delta_i``/``delta_k`` are optional; every other field is required and
unknown fields are rejected.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Union

from .errors import ParseError
from .model import Edge, IdMode, MaxMinInstance

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")
_REQUIRED = {"agents", "constraints", "objectives", "edges", "a", "c", "id_mode"}
_OPTIONAL = {"delta_i", "delta_k"}


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def format_decimal(x: Fraction, places: int = 6) -> str:
    """Fixed-point rendering for humans; informative only."""
    scale = 10 ** places
    n = round(x * scale)
    sign = "-" if n < 0 else ""
    n = abs(n)
    return f"{sign}{n // scale}.{n % scale:0{places}d}"


def parse_rational(text, location: str = "$") -> Fraction:
    if isinstance(text, bool):
        raise ParseError("expected a rational, got a boolean", location)
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"expected a rational string 'p/q', got {type(text).__name__}", location)
    m = _RATIONAL.match(text)
    if not m:
        raise ParseError(f"not a rational: {text!r}", location)
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise ParseError("zero denominator", location)
    return Fraction(num, den)


def instance_to_dict(inst: MaxMinInstance) -> dict:
    doc = {
        "agents": sorted(inst.agents),
        "constraints": sorted(inst.constraints),
        "objectives": sorted(inst.objectives),
        "edges": [{"u": e.u, "v": e.v, "port_u": e.port_u, "port_v": e.port_v} for e in inst.edges],
        "a": [{"constraint": i, "agent": v, "value": format_rational(x)}
              for (i, v), x in sorted(inst.a.items())],
        "c": [{"objective": k, "agent": v, "value": format_rational(x)}
              for (k, v), x in sorted(inst.c.items())],
        "id_mode": inst.id_mode.value,
    }
    if inst.delta_i is not None:
        doc["delta_i"] = inst.delta_i
    if inst.delta_k is not None:
        doc["delta_k"] = inst.delta_k
    return doc


def encode_instance(inst: MaxMinInstance) -> bytes:
    return (json.dumps(instance_to_dict(inst), indent=1, sort_keys=True) + "\n").encode("utf-8")


def _int(value, location: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", location)
    if value < minimum:
        raise ParseError(f"expected an integer >= {minimum}, got {value}", location)
    return value


def _obj(value, location: str, fields: set) -> Mapping:
    if not isinstance(value, dict):
        raise ParseError("expected an object", location)
    extra = set(value) - fields
    if extra:
        raise ParseError(f"unknown fields {sorted(extra)}", location)
    missing = fields - set(value)
    if missing:
        raise ParseError(f"missing fields {sorted(missing)}", location)
    return value


def instance_from_dict(doc) -> MaxMinInstance:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    extra = set(doc) - _REQUIRED - _OPTIONAL
    if extra:
        raise ParseError(f"unknown fields {sorted(extra)}")
    missing = _REQUIRED - set(doc)
    if missing:
        raise ParseError(f"missing fields {sorted(missing)}")

    ids = {}
    for name in ("agents", "constraints", "objectives"):
        arr = doc[name]
        if not isinstance(arr, list):
            raise ParseError("expected an array", f"$.{name}")
        ids[name] = tuple(_int(x, f"$.{name}[{j}]") for j, x in enumerate(arr))

    if not isinstance(doc["edges"], list):
        raise ParseError("expected an array", "$.edges")
    edges = []
    used_ports: dict = {}
    for j, raw in enumerate(doc["edges"]):
        loc = f"$.edges[{j}]"
        e = _obj(raw, loc, {"u", "v", "port_u", "port_v"})
        edge = Edge(_int(e["u"], loc + ".u"), _int(e["v"], loc + ".v"),
                    _int(e["port_u"], loc + ".port_u", 1), _int(e["port_v"], loc + ".port_v", 1))
        for x, p in ((edge.u, edge.port_u), (edge.v, edge.port_v)):
            if (x, p) in used_ports:
                raise ParseError(f"duplicate port {p} at vertex {x} (first used by edges[{used_ports[(x, p)]}])", loc)
            used_ports[(x, p)] = j
        edges.append(edge)

    tables = {}
    for name, key in (("a", "constraint"), ("c", "objective")):
        arr = doc[name]
        if not isinstance(arr, list):
            raise ParseError("expected an array", f"$.{name}")
        table = {}
        for j, raw in enumerate(arr):
            loc = f"$.{name}[{j}]"
            ent = _obj(raw, loc, {key, "agent", "value"})
            pair = (_int(ent[key], f"{loc}.{key}"), _int(ent["agent"], f"{loc}.agent"))
            value = parse_rational(ent["value"], f"{loc}.value")
            if value < 0:
                raise ParseError(f"negative coefficient {value}", f"{loc}.value")
            if pair in table:
                raise ParseError(f"duplicate coefficient for {pair}", loc)
            table[pair] = value
        tables[name] = table

    try:
        mode = IdMode(doc["id_mode"])
    except ValueError:
        raise ParseError(f"unknown id_mode {doc['id_mode']!r}", "$.id_mode") from None
    deltas = {}
    for name in _OPTIONAL:
        if name in doc and doc[name] is not None:
            deltas[name] = _int(doc[name], f"$.{name}", 1)
    return MaxMinInstance(ids["agents"], ids["constraints"], ids["objectives"], tuple(edges),
                          tables["a"], tables["c"], mode, deltas.get("delta_i"), deltas.get("delta_k"))


def decode_instance(data: Union[bytes, str]) -> MaxMinInstance:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", f"line {exc.lineno} col {exc.colno}") from None
    return instance_from_dict(doc)


def load_instance(path: Union[str, Path]) -> MaxMinInstance:
    return decode_instance(Path(path).read_bytes())


def save_instance(inst: MaxMinInstance, path: Union[str, Path]) -> None:
    Path(path).write_bytes(encode_instance(inst))


def assignment_to_dict(x: Mapping[int, Fraction]) -> dict:
    return {str(v): format_rational(x[v]) for v in sorted(x)}
