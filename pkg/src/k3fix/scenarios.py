"""Scenario documents: JSON parsing, validation and the shipped reproductions.

Every validation failure raises ``ScenarioError`` carrying the dotted path of
the offending field, e.g. ``projections[0].bounds[2].type``.
"""

from __future__ import annotations

import json
from importlib import resources
from math import gcd
from pathlib import Path
from typing import Any, Mapping

from .enumeration import (
    DEFAULT_G_SUM_RANGE,
    DEFAULT_MAX_MULTIPLICITY,
    Capacity,
    CurvePolicy,
    ExpectedEquality,
    ProjectionBound,
    Scenario,
    enumerate_configs,
)
from .errors import ScenarioError, UsageError
from .lefschetz import PointType

SHIPPED = ("order7", "order21", "order42")

_TOP_KEYS = {
    "name", "comment", "order", "q", "trace_on_S", "rank_S", "capacities", "projections",
    "forced_zero", "curve_policy", "bounds", "expected_equalities",
}
_SENSES = {"<=": "<=", "≤": "<=", "=": "==", "==": "=="}


def _require(doc: Mapping, key: str, path: str) -> Any:
    if key not in doc:
        raise ScenarioError(f"{path}.{key}" if path else key, "missing required field")
    return doc[key]


def _int(value: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ScenarioError(path, f"must be >= {minimum}, got {value}")
    return value


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ScenarioError(path, f"expected a list, got {type(value).__name__}")
    return value


def _obj(value: Any, path: str, allowed: set[str]) -> Mapping:
    if not isinstance(value, dict):
        raise ScenarioError(path, f"expected an object, got {type(value).__name__}")
    extra = sorted(set(value) - allowed)
    if extra:
        raise ScenarioError(path, f"unknown field(s) {extra}")
    return value


def _point_type(value: Any, order: int, path: str) -> PointType:
    pair = _list(value, path)
    if len(pair) != 2:
        raise ScenarioError(path, f"a point type is a pair [i, j], got {value!r}")
    i, j = (_int(x, f"{path}[{n}]") for n, x in enumerate(pair))
    try:
        t = PointType(order, i, j)
    except UsageError as exc:
        raise ScenarioError(path, str(exc)) from None
    if not t.isolated:
        raise ScenarioError(path, f"({i},{j}) is a curve-point type, not an isolated one")
    return t


def _genus_list(value: Any, path: str) -> tuple[int, ...]:
    return tuple(_int(g, f"{path}[{n}]", 0) for n, g in enumerate(_list(value, path)))


def _curve_policy(doc: Any, path: str, resolving: tuple[str, ...]) -> CurvePolicy:
    if doc is None:
        return CurvePolicy()
    doc = _obj(doc, path, {"max_curves", "genus_max", "contained_in", "exact", "comment"})
    kwargs: dict[str, Any] = {"note": str(doc.get("comment", ""))}
    for key in ("max_curves", "genus_max"):
        if key in doc:
            kwargs[key] = None if doc[key] is None else _int(doc[key], f"{path}.{key}", 0)
    if doc.get("exact") is not None:
        kwargs["exact"] = _genus_list(doc["exact"], f"{path}.exact")
    contained = doc.get("contained_in")
    if isinstance(contained, str):
        kwargs["contained_in"] = _curves_of_scenario(contained, f"{path}.contained_in", resolving)
    elif contained is not None:
        kwargs["contained_in"] = tuple(
            _genus_list(c, f"{path}.contained_in[{n}]")
            for n, c in enumerate(_list(contained, f"{path}.contained_in"))
        )
    return CurvePolicy(**kwargs)


def _curves_of_scenario(name: str, path: str, resolving: tuple[str, ...]) -> tuple[tuple[int, ...], ...]:
    if name not in SHIPPED:
        raise ScenarioError(path, f"unknown scenario {name!r}; known: {list(SHIPPED)}")
    if name in resolving:
        raise ScenarioError(path, f"circular reference through {name!r}")
    parent = load_shipped(name, _resolving=resolving)
    solutions = enumerate_configs(parent)
    if not solutions:
        raise ScenarioError(path, f"scenario {name!r} has no solutions to inherit curves from")
    return tuple(sorted({c.curves.genera for c in solutions}))


def scenario_from_dict(doc: Any, _resolving: tuple[str, ...] = ()) -> Scenario:
    doc = _obj(doc, "", _TOP_KEYS)
    order = _int(_require(doc, "order", ""), "order", 2)
    name = str(doc.get("name", ""))
    resolving = _resolving + ((name,) if name else ())

    capacities = []
    for n, cap in enumerate(_list(doc.get("capacities", []), "capacities")):
        p = f"capacities[{n}]"
        cap = _obj(cap, p, {"types", "bound", "sense", "comment"})
        types = tuple(
            _point_type(t, order, f"{p}.types[{k}]")
            for k, t in enumerate(_list(_require(cap, "types", p), f"{p}.types"))
        )
        sense = cap.get("sense", "<=")
        if sense not in _SENSES:
            raise ScenarioError(f"{p}.sense", f"expected one of {sorted(_SENSES)}, got {sense!r}")
        capacities.append(Capacity(types, _int(_require(cap, "bound", p), f"{p}.bound", 0),
                                   _SENSES[sense], str(cap.get("comment", ""))))

    projections = []
    for n, proj in enumerate(_list(doc.get("projections", []), "projections")):
        p = f"projections[{n}]"
        proj = _obj(proj, p, {"power", "bounds", "absent_zero", "comment"})
        power = _int(_require(proj, "power", p), f"{p}.power", 1)
        target = order // gcd(order, power)
        if target == 1:
            raise ScenarioError(f"{p}.power", f"sigma^{power} is the identity for order {order}")
        bounds = {}
        for k, entry in enumerate(_list(_require(proj, "bounds", p), f"{p}.bounds")):
            q = f"{p}.bounds[{k}]"
            entry = _obj(entry, q, {"type", "bound", "comment"})
            t = _point_type(_require(entry, "type", q), target, f"{q}.type")
            bounds[t] = _int(_require(entry, "bound", q), f"{q}.bound", 0)
        absent = proj.get("absent_zero", False)
        if not isinstance(absent, bool):
            raise ScenarioError(f"{p}.absent_zero", "expected true or false")
        projections.append(ProjectionBound(power, bounds, absent, str(proj.get("comment", ""))))

    forced = tuple(
        _point_type(t, order, f"forced_zero[{n}]")
        for n, t in enumerate(_list(doc.get("forced_zero", []), "forced_zero"))
    )

    expected = []
    for n, eq in enumerate(_list(doc.get("expected_equalities", []), "expected_equalities")):
        p = f"expected_equalities[{n}]"
        eq = _obj(eq, p, {"types", "value", "comment"})
        types = tuple(
            _point_type(t, order, f"{p}.types[{k}]")
            for k, t in enumerate(_list(_require(eq, "types", p), f"{p}.types"))
        )
        expected.append(ExpectedEquality(types, _int(_require(eq, "value", p), f"{p}.value"),
                                         str(eq.get("comment", ""))))

    bounds_doc = _obj(doc.get("bounds", {}), "bounds", {"max_multiplicity", "g_sum", "comment"})
    max_mult = bounds_doc.get("max_multiplicity", DEFAULT_MAX_MULTIPLICITY)
    if max_mult is not None:
        max_mult = _int(max_mult, "bounds.max_multiplicity", 0)
    g_range = bounds_doc.get("g_sum", list(DEFAULT_G_SUM_RANGE))
    g_range = _list(g_range, "bounds.g_sum")
    if len(g_range) != 2:
        raise ScenarioError("bounds.g_sum", "expected [low, high]")
    g_lo, g_hi = (None if v is None else _int(v, f"bounds.g_sum[{k}]") for k, v in enumerate(g_range))

    rank_S = doc.get("rank_S")
    try:
        return Scenario(
            order=order,
            trace_on_S=_int(_require(doc, "trace_on_S", ""), "trace_on_S"),
            q=_int(doc.get("q", 1), "q", 1),
            capacities=tuple(capacities),
            projections=tuple(projections),
            forced_zero=forced,
            curve_policy=_curve_policy(doc.get("curve_policy"), "curve_policy", resolving),
            max_multiplicity=max_mult,
            g_sum_range=(g_lo, g_hi),
            rank_S=None if rank_S is None else _int(rank_S, "rank_S", 0),
            expected_equalities=tuple(expected),
            name=name,
        )
    except ScenarioError:
        raise
    except UsageError as exc:
        raise ScenarioError("<scenario>", str(exc)) from None


def load_scenario(path: str | Path) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    return parse_scenario(text)


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return scenario_from_dict(doc)


def _data(name: str) -> str:
    return resources.files("k3fix").joinpath("scenarios", name).read_text(encoding="utf-8")


def load_shipped(name: str, _resolving: tuple[str, ...] = ()) -> Scenario:
    if name not in SHIPPED:
        raise UsageError(f"unknown shipped scenario {name!r}; known: {list(SHIPPED)}")
    try:
        doc = json.loads(_data(f"{name}.json"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{name}.json line {exc.lineno}", exc.msg) from None
    return scenario_from_dict(doc, _resolving)


def golden(name: str) -> dict:
    if name not in SHIPPED:
        raise UsageError(f"unknown shipped scenario {name!r}")
    return json.loads(_data(f"{name}.expected.json"))
