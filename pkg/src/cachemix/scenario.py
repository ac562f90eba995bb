"""Scenario files and built-in scenarios.

A scenario is a YAML document::

    name: my-mix
    year_label: "2011"
    vod_alpha: 0.8            # optional, overrides the type named VoD
    content_types:
      - name: web
        share: 0.18
        population: 1e11
        size: 10 KB           # decimal units: B, KB, MB, GB, TB, PB
        law: {kind: zipf, alpha: 0.8}
      - ...
    caches: {c1: 1 TB, c2: 100 TB}
    grid: {min: 1 GB, max: 1 PB, points: 20}
    policy: shared            # or vod-only
    simulation: {seed: 1, requests: 11000000, warmup: null, layer1_caches: 16}

A scenario with a single content type and no ``size`` is homogeneous: it
describes a bare popularity law (``zipf``, ``geometric``, ``uniform`` or
``explicit``) and all cache sizes count objects.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from . import internet
from .traffic import (
    ContentType,
    Explicit,
    Geometric,
    PopularityLaw,
    TrafficMix,
    Zipf,
    normalize_mix,
    uniform,
)

__all__ = ["ScenarioError", "Scenario", "GridSpec", "SimSettings", "BUILTINS",
           "load_scenario", "parse_size", "parse_scenario"]


class ScenarioError(ValueError):
    """Invalid scenario; the message names the field and, for files, the line."""


_UNITS = {"": 1.0, "B": 1.0, "KB": 1e3, "MB": 1e6, "GB": 1e9, "TB": 1e12, "PB": 1e15}
_SIZE_RE = re.compile(r"^\s*([0-9.]+(?:[eE][-+]?[0-9]+)?)\s*([KMGTP]?B)?\s*$", re.IGNORECASE)


def parse_size(value: Any) -> float:
    """Bytes from a number or a string such as ``"10 KB"`` or ``"1e2TB"``."""
    if isinstance(value, bool):
        raise ValueError(f"not a size: {value!r}")
    if isinstance(value, (int, float)):
        out = float(value)
    else:
        m = _SIZE_RE.match(str(value))
        if not m:
            raise ValueError(f"not a size: {value!r}")
        out = float(m.group(1)) * _UNITS[(m.group(2) or "").upper()]
    if not math.isfinite(out) or out < 0:
        raise ValueError(f"size must be finite and non-negative: {value!r}")
    return out


def _number(value: Any) -> float:
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    return float(value)


def _count(value: Any) -> int:
    x = _number(value)
    if x != int(x) or x < 1:
        raise ValueError(f"not a positive integer: {value!r}")
    return int(x)


@dataclass(frozen=True)
class GridSpec:
    min: float
    max: float
    points: int = 20

    def values(self, integer: bool = False) -> list[float]:
        if self.points < 1 or not 0 < self.min <= self.max:
            raise ValueError("grid needs 0 < min <= max and at least one point")
        if self.points == 1:
            vals = [self.min]
        else:
            step = math.log(self.max / self.min) / (self.points - 1)
            vals = [self.min * math.exp(step * k) for k in range(self.points)]
            vals[-1] = self.max
        if integer:
            return [float(v) for v in sorted({int(round(v)) for v in vals})]
        return vals


@dataclass(frozen=True)
class SimSettings:
    seed: int = 0
    requests: int = 11_000_000
    warmup: int | None = None
    layer1_caches: int = 16


@dataclass(frozen=True)
class Scenario:
    name: str
    content_types: tuple[ContentType, ...]
    homogeneous: bool
    year_label: str = ""
    vod_alpha: float | None = None
    c1: float | None = None
    c2: float | None = None
    grid: GridSpec | None = None
    policy: str = "shared"
    simulation: SimSettings = field(default_factory=SimSettings)

    @property
    def size_unit(self) -> str:
        return "objects" if self.homogeneous else "bytes"

    @property
    def law(self) -> PopularityLaw:
        if not self.homogeneous:
            raise ScenarioError(f"{self.name}: not a homogeneous scenario")
        return self.content_types[0].law

    def mix(self) -> TrafficMix:
        if self.homogeneous:
            raise ScenarioError(f"{self.name}: homogeneous scenario has no traffic mix")
        return normalize_mix(self.content_types)

    def catalog(self):
        return self.law if self.homogeneous else self.mix()

    @property
    def volume(self) -> float:
        return math.fsum(t.volume for t in self.content_types)

    def default_grid(self) -> GridSpec:
        if self.grid is not None:
            return self.grid
        if self.homogeneous:
            return GridSpec(1.0, float(self.law.population), 20)
        return GridSpec(1e9, 1e15, 20)

    def with_vod_alpha(self, alpha: float) -> "Scenario":
        if self.homogeneous:
            raise ScenarioError(f"{self.name}: vod_alpha needs a content mix")
        if internet.VOD not in [t.name for t in self.content_types]:
            raise ScenarioError(f"{self.name}: vod_alpha given but no type named {internet.VOD}")
        types = tuple(
            replace(t, law=Zipf(float(alpha), t.population)) if t.name == internet.VOD else t
            for t in self.content_types
        )
        return replace(self, content_types=types, vod_alpha=float(alpha))


# -- parsing ---------------------------------------------------------------

_TOP_KEYS = {"name", "year_label", "vod_alpha", "content_types", "caches", "grid",
             "policy", "simulation"}
_TYPE_KEYS = {"name", "share", "population", "size", "law"}
_LAW_KEYS = {"kind", "alpha", "ratio", "weights"}
_POLICIES = {"shared", "vod-only"}


class _Ctx:
    """Tracks source lines of YAML nodes for diagnostics."""

    def __init__(self, source: str, lines: dict[tuple, int] | None = None):
        self.source = source
        self.lines = lines or {}

    def fail(self, path: tuple, message: str):
        where = ".".join(str(p) if not isinstance(p, int) else f"[{p}]" for p in path)
        where = where.replace(".[", "[")
        line = self.lines.get(path)
        loc = f"{self.source}:{line}" if line else self.source
        raise ScenarioError(f"{loc}: {where or 'scenario'}: {message}")


def _from_node(node, loader, path, lines):
    lines[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        out = {}
        for knode, vnode in node.value:
            key = loader.construct_object(knode, deep=True)
            if key in out:
                raise ScenarioError(
                    f"line {knode.start_mark.line + 1}: duplicate key {key!r}")
            out[key] = _from_node(vnode, loader, path + (key,), lines)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_from_node(v, loader, path + (i,), lines) for i, v in enumerate(node.value)]
    return loader.construct_object(node, deep=True)


def _read_yaml(text: str, source: str) -> tuple[Any, dict]:
    loader = yaml.SafeLoader(text)
    try:
        node = loader.get_single_node()
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ScenarioError(
            f"{source}:{mark.line + 1}:{mark.column + 1}: parse error: {exc.problem}"
        ) from None
    finally:
        loader.dispose()
    lines: dict[tuple, int] = {}
    if node is None:
        return {}, lines
    return _from_node(node, yaml.SafeLoader(""), (), lines), lines


def _check_keys(ctx, data, allowed, path):
    if not isinstance(data, dict):
        ctx.fail(path, "expected a mapping")
    extra = set(data) - allowed
    if extra:
        ctx.fail(path + (sorted(extra, key=str)[0],), f"unknown key (allowed: {sorted(allowed)})")


def _field(ctx, data, key, conv, path, default=None, required=False):
    if key not in data or data[key] is None:
        if required:
            ctx.fail(path + (key,) if key in data else path, f"missing required field {key!r}")
        return default
    try:
        return conv(data[key])
    except (TypeError, ValueError) as exc:
        ctx.fail(path + (key,), str(exc))


def _law(ctx, spec, population, path) -> PopularityLaw:
    _check_keys(ctx, spec, _LAW_KEYS, path)
    kind = _field(ctx, spec, "kind", str, path, required=True).lower()
    try:
        if kind == "zipf":
            return Zipf(_field(ctx, spec, "alpha", _number, path, required=True), population)
        if kind == "geometric":
            return Geometric(_field(ctx, spec, "ratio", _number, path, required=True), population)
        if kind == "uniform":
            return uniform(population)
        if kind == "explicit":
            w = _field(ctx, spec, "weights", lambda v: [_number(x) for x in v], path,
                       required=True)
            if len(w) != population:
                ctx.fail(path + ("weights",), f"{len(w)} weights for population {population}")
            return Explicit(tuple(w))
    except ValueError as exc:
        ctx.fail(path, str(exc))
    ctx.fail(path + ("kind",), f"unknown law {kind!r} (zipf, geometric, uniform, explicit)")


def parse_scenario(data: Any, source: str = "<scenario>",
                   lines: dict | None = None) -> Scenario:
    """Validate a decoded scenario mapping."""
    ctx = _Ctx(source, lines)
    _check_keys(ctx, data, _TOP_KEYS, ())
    name = _field(ctx, data, "name", str, (), default=Path(source).stem)
    raw_types = data.get("content_types")
    if not isinstance(raw_types, list) or not raw_types:
        ctx.fail(("content_types",), "expected a non-empty list of content types")

    types = []
    sized = []
    for i, spec in enumerate(raw_types):
        path = ("content_types", i)
        _check_keys(ctx, spec, _TYPE_KEYS, path)
        tname = _field(ctx, spec, "name", str, path, default=f"type{i}")
        share = _field(ctx, spec, "share", _number, path, default=1.0)
        population = _field(ctx, spec, "population", _count, path, required=True)
        size = _field(ctx, spec, "size", parse_size, path)
        sized.append(size is not None)
        if "law" not in spec:
            ctx.fail(path, "missing required field 'law'")
        law = _law(ctx, spec["law"], population, path + ("law",))
        try:
            types.append(ContentType(tname, share, population,
                                     size if size is not None else 1.0, law))
        except ValueError as exc:
            ctx.fail(path, str(exc))

    homogeneous = len(types) == 1 and not sized[0]
    if not homogeneous:
        missing = [i for i, s in enumerate(sized) if not s]
        if missing:
            ctx.fail(("content_types", missing[0]), "size is required in a content mix")
        total = math.fsum(t.traffic_share for t in types)
        if abs(total - 1.0) > 1e-9:
            ctx.fail(("content_types",), f"traffic shares sum to {total:.12g}, expected 1")
        for i, t in enumerate(types):
            if not isinstance(t.law, Zipf):
                ctx.fail(("content_types", i, "law"), "only Zipf laws are allowed in a mix")
        if len({t.name for t in types}) != len(types):
            ctx.fail(("content_types",), "content type names must be unique")

    caches = data.get("caches") or {}
    _check_keys(ctx, caches, {"c1", "c2"}, ("caches",))
    c1 = _field(ctx, caches, "c1", parse_size, ("caches",))
    c2 = _field(ctx, caches, "c2", parse_size, ("caches",))

    grid = None
    if data.get("grid") is not None:
        g = data["grid"]
        _check_keys(ctx, g, {"min", "max", "points"}, ("grid",))
        grid = GridSpec(_field(ctx, g, "min", parse_size, ("grid",), required=True),
                        _field(ctx, g, "max", parse_size, ("grid",), required=True),
                        _field(ctx, g, "points", _count, ("grid",), default=20))
        if not 0 < grid.min <= grid.max:
            ctx.fail(("grid",), "need 0 < min <= max")

    policy = _field(ctx, data, "policy", str, (), default="shared")
    if policy not in _POLICIES:
        ctx.fail(("policy",), f"unknown policy {policy!r} (shared, vod-only)")

    sim = data.get("simulation") or {}
    _check_keys(ctx, sim, {"seed", "requests", "warmup", "layer1_caches"}, ("simulation",))
    settings = SimSettings(
        seed=int(_field(ctx, sim, "seed", _number, ("simulation",), default=0)),
        requests=_field(ctx, sim, "requests", _count, ("simulation",), default=11_000_000),
        warmup=_field(ctx, sim, "warmup", lambda v: int(_number(v)), ("simulation",)),
        layer1_caches=_field(ctx, sim, "layer1_caches", _count, ("simulation",), default=16),
    )

    scenario = Scenario(
        name=name,
        content_types=tuple(types),
        homogeneous=homogeneous,
        year_label=str(data.get("year_label") or ""),
        c1=c1, c2=c2, grid=grid, policy=policy, simulation=settings,
    )
    vod_alpha = _field(ctx, data, "vod_alpha", _number, ())
    if vod_alpha is not None:
        try:
            scenario = scenario.with_vod_alpha(vod_alpha)
        except ValueError as exc:
            ctx.fail(("vod_alpha",), str(exc))
    return scenario


def _internet(year: int) -> Scenario:
    types = internet.content_types(year, internet.DEFAULT_ALPHA)
    return Scenario(f"mix{year}", tuple(types), False, year_label=str(year),
                    vod_alpha=internet.DEFAULT_ALPHA, c1=1e12, c2=1e14)


def _single(name, law, **kw) -> Scenario:
    return Scenario(name, (ContentType(name, 1.0, law.population, 1.0, law),), True, **kw)


BUILTINS = {
    "mix2011": lambda: _internet(2011),
    "mix2015": lambda: _internet(2015),
    "zipf08": lambda: _single("zipf08", Zipf(0.8, 10**4), c1=100, c2=1000),
    "zipf12": lambda: _single("zipf12", Zipf(1.2, 10**4), c1=100, c2=1000),
    "geo16": lambda: _single("geo16", Geometric(0.5, 16), c1=4),
    "uniform1000": lambda: _single("uniform1000", uniform(1000), c1=100),
    "zipf4": lambda: _single("zipf4", Zipf(1.0, 4), c1=2),
}


def load_scenario(ref: str | Path) -> Scenario:
    """Load a built-in scenario by name or a YAML scenario file."""
    key = str(ref)
    if key in BUILTINS:
        return BUILTINS[key]()
    path = Path(ref)
    if not path.exists():
        raise ScenarioError(f"{key}: no such file or built-in scenario "
                            f"(built-ins: {', '.join(BUILTINS)})")
    data, lines = _read_yaml(path.read_text(), str(path))
    return parse_scenario(data, str(path), lines)
