"""Two-layer LRU hierarchy built from single-cache Che solutions.

Layer 1 is one representative edge cache. Its misses, with rates
``q'(n) = q(n) (1 - h1(n))``, form the demand of the layer-2 cache, and the
two layers are treated as independent so an object is found somewhere with
probability ``h1 + h2 - h1 h2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import internet
from .che import (
    CatalogLike,
    CheSolution,
    as_catalog,
    overall_byte_hit,
    per_type_hit,
    solve_tc,
)
from .traffic import ContentType, Zipf, normalize_mix

__all__ = [
    "LayerPolicy",
    "SHARED",
    "HierarchyResult",
    "SavingsRow",
    "evaluate_two_layer",
    "contour_grid",
    "savings_table",
    "round_percent",
]


@dataclass(frozen=True)
class LayerPolicy:
    """What layer-1 caches admit: every type (``admitted=None``) or a subset."""

    admitted: frozenset[str] | None = None

    @classmethod
    def dedicated(cls, *names: str) -> "LayerPolicy":
        if not names:
            raise ValueError("a dedicated layer must admit at least one type")
        return cls(frozenset(names))

    @property
    def shared(self) -> bool:
        return self.admitted is None

    def admitted_indices(self, names: Sequence[str]) -> list[int]:
        if self.admitted is None:
            return list(range(len(names)))
        unknown = self.admitted - set(names)
        if unknown:
            raise ValueError(f"unknown content types in policy: {sorted(unknown)}")
        if len(self.admitted) >= len(names):
            # every type admitted: identical to shared
            return list(range(len(names)))
        return [i for i, n in enumerate(names) if n in self.admitted]

    def label(self) -> str:
        if self.admitted is None:
            return "shared"
        return "+".join(sorted(self.admitted))


SHARED = LayerPolicy()


@dataclass(frozen=True)
class HierarchyResult:
    """Outcome of one ``(c1, c2, policy)`` evaluation.

    ``per_type[i]`` is ``(h1, h2, combined)``: the request-weighted hit rate
    of type ``i`` at layer 1, at layer 2 over the traffic that reaches it, and
    over both layers.
    """

    c1: float
    c2: float
    policy: LayerPolicy
    layer1_reduction: float
    total_reduction: float
    names: tuple[str, ...]
    per_type: tuple[tuple[float, float, float], ...]
    layer1: CheSolution
    layer2: CheSolution

    @property
    def layer2_reduction(self) -> float:
        return self.total_reduction - self.layer1_reduction

    def layer2_demand(self) -> float:
        """Normalized demand reaching layer 2."""
        return math.fsum(b.theta * b.total(lambda q: q) for b in self.layer2.catalog.blocks)


def evaluate_two_layer(
    catalog: CatalogLike, c1: float, c2: float, policy: LayerPolicy = SHARED
) -> HierarchyResult:
    """Bandwidth reductions of a layer-1 cache of size ``c1`` backed by ``c2``.

    A size of 0 means the layer is absent. Types not admitted at layer 1
    pass straight to layer 2, which caches every type.
    """
    if c1 < 0 or c2 < 0:
        raise ValueError("cache sizes must be non-negative")
    cat = as_catalog(catalog)
    admitted = policy.admitted_indices(cat.names)
    edge = cat.subset(admitted)
    s1 = solve_tc(edge, c1) if c1 > 0 else CheSolution.empty(edge)

    upstream = [0.0] * len(cat.blocks)
    for i in admitted:
        upstream[i] = s1.t_c
    core = cat.behind(upstream)
    s2 = solve_tc(core, c2) if c2 > 0 else CheSolution.empty(core)

    l1 = overall_byte_hit(s1)
    total = l1 + overall_byte_hit(s2)
    # rounding can push a near-complete total a hair over 1
    total = min(total, 1.0)
    per_type = []
    for i in range(len(cat.blocks)):
        h1 = per_type_hit(s1, admitted.index(i)) if i in admitted else 0.0
        h2 = per_type_hit(s2, i)
        per_type.append((h1, h2, h1 + h2 - h1 * h2))
    return HierarchyResult(float(c1), float(c2), policy, l1, total,
                           tuple(cat.names), tuple(per_type), s1, s2)


def contour_grid(
    catalog: CatalogLike,
    c1_grid: Iterable[float],
    c2_grid: Iterable[float],
    policy: LayerPolicy = SHARED,
) -> np.ndarray:
    """Overall hit rate for every ``(c1, c2)`` pair; rows follow ``c1_grid``."""
    cat = as_catalog(catalog)
    c1s, c2s = list(c1_grid), list(c2_grid)
    for g in (c1s, c2s):
        if any(b < a for a, b in zip(g, g[1:])):
            raise ValueError("grids must be sorted ascending")
    out = np.empty((len(c1s), len(c2s)))
    for i, a in enumerate(c1s):
        for j, b in enumerate(c2s):
            out[i, j] = evaluate_two_layer(cat, a, b, policy).total_reduction
    return out


def round_percent(x: float) -> int:
    """Integer percent, halves rounded up."""
    return int(math.floor(100.0 * x + 0.5 + 1e-9))


@dataclass(frozen=True)
class SavingsRow:
    label: str
    vod_alpha: float
    policy: str
    layer1_reduction: float
    total_reduction: float

    @property
    def layer1_percent(self) -> int:
        return round_percent(self.layer1_reduction)

    @property
    def total_percent(self) -> int:
        return round_percent(self.total_reduction)


def _with_alpha(types: Sequence[ContentType], name: str, alpha: float) -> list[ContentType]:
    out = []
    for t in types:
        if t.name == name:
            t = ContentType(t.name, t.traffic_share, t.population, t.mean_object_size,
                            Zipf(alpha, t.population))
        out.append(t)
    return out


def savings_table(
    bases: Mapping[str, Sequence[ContentType]] | None = None,
    vod_alphas: Sequence[float] = (0.8, 1.2),
    c1: float = 1 * internet.TB,
    c2: float = 100 * internet.TB,
    vod_name: str = internet.VOD,
) -> list[SavingsRow]:
    """Layer-1 and total bandwidth reductions, shared vs VoD-dedicated layer 1.

    ``bases`` maps a label (e.g. a year) to the content types of a mix; the
    VoD exponent is replaced by each value of ``vod_alphas``. Defaults to the
    2011 and 2015 Internet mixes.
    """
    if bases is None:
        bases = {str(y): internet.content_types(y) for y in sorted(internet.SHARES)}
    rows = []
    for label, types in bases.items():
        if vod_name not in [t.name for t in types]:
            raise ValueError(f"{label}: no content type named {vod_name!r}")
        for alpha in vod_alphas:
            mix = normalize_mix(_with_alpha(types, vod_name, alpha))
            for policy in (SHARED, LayerPolicy.dedicated(vod_name)):
                r = evaluate_two_layer(mix, c1, c2, policy)
                rows.append(SavingsRow(label, alpha, policy.label(),
                                       r.layer1_reduction, r.total_reduction))
    return rows
