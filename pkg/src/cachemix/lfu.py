"""Hit rates of ideal LFU: the cache statically holds the most requested objects.

Under independent references this is the hit-rate optimal policy. With
mixed object sizes, ordering by per-object request rate is also what
maximizes the byte hit rate, since every byte of a cached object earns the
same ``q`` per unit time.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .summation import harmonic_sum
from .traffic import PopularityLaw, TrafficMix, Zipf

__all__ = [
    "HitCurve",
    "lfu_hit_homogeneous",
    "lfu_curve_mix",
    "lfu_hit_mix",
    "rank_threshold",
]


@dataclass(frozen=True)
class HitCurve:
    """Points ``(cache_size, hit_rate)``, size strictly increasing."""

    points: tuple[tuple[float, float], ...]
    size_unit: str = "bytes"

    def __post_init__(self):
        sizes = [s for s, _ in self.points]
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("curve sizes must be strictly increasing")

    @property
    def sizes(self) -> np.ndarray:
        return np.array([s for s, _ in self.points])

    @property
    def hits(self) -> np.ndarray:
        return np.array([h for _, h in self.points])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"cache_size_{self.size_unit}", "hit_rate"])
            for s, h in self.points:
                w.writerow([repr(float(s)), repr(float(h))])


def lfu_hit_homogeneous(law: PopularityLaw, cache_size: int) -> float:
    """Share of requests for the ``cache_size`` most popular objects."""
    c = int(cache_size)
    if c < 0:
        raise ValueError("cache size must be non-negative")
    if c == 0:
        return 0.0
    if c >= law.population:
        return 1.0
    if isinstance(law, Zipf):
        return harmonic_sum(law.alpha, c) / harmonic_sum(law.alpha, law.population)
    w = law.weights()
    return math.fsum(w[:c]) / math.fsum(w)


def rank_threshold(rate_constant: float, alpha: float, population: int, x: float) -> int:
    """Number of ranks ``n <= population`` with ``rate_constant * n**-alpha >= x``."""
    if x > rate_constant:
        return 0
    g = math.floor((rate_constant / x) ** (1.0 / alpha))
    g = min(population, max(0, g))
    # repair float rounding at exact ties, which are included
    while g < population and rate_constant * float(g + 1) ** -alpha >= x:
        g += 1
    while g > 0 and rate_constant * float(g) ** -alpha < x:
        g -= 1
    return g


def _size_and_hit(mix: TrafficMix, x: float) -> tuple[float, float]:
    size, hit = [], []
    for t, r in zip(mix.types, mix.rate_constants):
        g = rank_threshold(r, t.law.alpha, t.law.population, x)
        k = t.chunks_per_object
        size.append(t.mean_object_size * k * g)
        hit.append(r * t.mean_object_size * k * harmonic_sum(t.law.alpha, g) if g else 0.0)
    return math.fsum(size), math.fsum(hit)


def lfu_curve_mix(mix: TrafficMix, rate_thresholds: Iterable[float]) -> HitCurve:
    """Parametric LFU curve: cache everything requested at rate ``>= x``.

    Emits ``(size(x), hit(x))`` for each threshold, thresholds descending.
    Thresholds that add no object give repeated sizes and are dropped.
    """
    xs = list(rate_thresholds)
    if any(x <= 0 for x in xs):
        raise ValueError("rate thresholds must be positive")
    if any(b > a for a, b in zip(xs, xs[1:])):
        raise ValueError("rate thresholds must be sorted descending")
    points = []
    for x in xs:
        s, h = _size_and_hit(mix, x)
        if points and s <= points[-1][0]:
            continue
        points.append((s, min(h, 1.0)))
    return HitCurve(tuple(points), "bytes")


def lfu_hit_mix(mix: TrafficMix, cache_size: float) -> float:
    """LFU byte hit rate at ``cache_size`` bytes.

    The cache holds the largest rate-ordered prefix of the catalog that
    fits, i.e. the parametric curve read as a step function from below.
    """
    c = float(cache_size)
    if c < 0:
        raise ValueError("cache size must be non-negative")
    if c >= mix.total_volume:
        return 1.0
    top = max(mix.rate_constants)
    if _size_and_hit(mix, top)[0] > c:
        return 0.0
    lowest = min(r * t.law.population ** -t.law.alpha
                 for t, r in zip(mix.types, mix.rate_constants))
    # bisection in log-threshold for the smallest x whose prefix still fits
    lo, hi = math.log(lowest), math.log(top)  # size(exp(lo)) > c >= size(exp(hi))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _size_and_hit(mix, math.exp(mid))[0] > c:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return _size_and_hit(mix, math.exp(hi))[1]


def lfu_curve_homogeneous(law: PopularityLaw, sizes: Sequence[int]) -> HitCurve:
    pts = []
    for c in sorted(set(int(s) for s in sizes)):
        pts.append((float(c), lfu_hit_homogeneous(law, c)))
    return HitCurve(tuple(pts), "objects")
