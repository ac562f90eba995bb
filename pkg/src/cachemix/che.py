"""Che approximation for LRU caches, homogeneous and mixed.

Object ``n`` of type ``i`` is given hit rate ``h_i(n) = 1 - exp(-q_i(n) T)``,
and the characteristic time ``T`` is the root of

    C = sum_i sum_n (1 - exp(-q_i(n) T)) * theta_i

For a homogeneous catalog (a bare :class:`PopularityLaw`) sizes count
objects and rates are request probabilities. For a :class:`TrafficMix`
sizes are bytes and rates are normalized so that one byte is requested per
unit time.

A catalog may also describe the miss stream of an upstream LRU layer: a
block whose ``upstream_t`` is ``T1`` presents rate ``q * exp(-q * T1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence, Union

import numpy as np

from .summation import power_law_sum
from .traffic import PopularityLaw, TrafficMix, Zipf

__all__ = [
    "Catalog",
    "CheSolution",
    "as_catalog",
    "expected_occupancy",
    "solve_tc",
    "object_hit_rate",
    "overall_byte_hit",
    "overall_request_hit",
    "per_type_hit",
    "cache_shares",
]

MAX_ITERATIONS = 200


@dataclass(frozen=True, eq=False)
class _Block:
    """One content type: either Zipf ``scale * n**-alpha`` or explicit rates."""

    name: str
    theta: float
    count: int
    multiplicity: int = 1
    scale: float = 0.0
    alpha: float = 0.0
    rates: np.ndarray | None = None
    upstream_t: float = 0.0

    def arriving(self, q):
        """Rate seen by this layer given the base rate ``q``."""
        if self.upstream_t == 0.0:
            return q
        return q * np.exp(-q * self.upstream_t)

    def total(self, func: Callable[[np.ndarray], np.ndarray]) -> float:
        """``sum_n func(arriving(q(n)))`` over the block's items."""
        g = lambda q: func(self.arriving(q))
        if self.rates is not None:
            s = float(np.sum(g(self.rates)))
        else:
            s = power_law_sum(g, self.scale, self.alpha, self.count)
        return s * self.multiplicity

    def base_rate(self, rank: int) -> float:
        n = (rank - 1) // self.multiplicity + 1
        if self.rates is not None:
            return float(self.rates[n - 1])
        return self.scale * float(n) ** -self.alpha

    @property
    def population(self) -> int:
        return self.count * self.multiplicity

    @property
    def volume(self) -> float:
        """Largest number of bytes this block can occupy downstream."""
        if math.isinf(self.upstream_t):
            return 0.0
        return self.theta * self.population


@dataclass(frozen=True, eq=False)
class Catalog:
    """Flat description of what a cache sees, built by :func:`as_catalog`."""

    blocks: tuple[_Block, ...]
    byte_sized: bool

    @property
    def names(self) -> list[str]:
        return [b.name for b in self.blocks]

    @property
    def volume(self) -> float:
        return math.fsum(b.volume for b in self.blocks)

    def subset(self, indices: Sequence[int]) -> "Catalog":
        return Catalog(tuple(self.blocks[i] for i in indices), self.byte_sized)

    def behind(self, upstream_t: Sequence[float]) -> "Catalog":
        """Catalog of the miss stream of an upstream layer.

        ``upstream_t[i]`` is the characteristic time of the upstream cache
        for block ``i``; 0 means the block bypasses it.
        """
        if len(upstream_t) != len(self.blocks):
            raise ValueError("one upstream time per block is required")
        if any(b.upstream_t for b in self.blocks):
            raise ValueError("catalog is already behind an upstream layer")
        return Catalog(
            tuple(replace(b, upstream_t=float(t)) for b, t in zip(self.blocks, upstream_t)),
            self.byte_sized,
        )


CatalogLike = Union[PopularityLaw, TrafficMix, Catalog]


def as_catalog(source: CatalogLike) -> Catalog:
    if isinstance(source, Catalog):
        return source
    if isinstance(source, TrafficMix):
        blocks = tuple(
            _Block(t.name, t.mean_object_size, t.law.population, t.chunks_per_object,
                   scale=r, alpha=t.law.alpha)
            for t, r in zip(source.types, source.rate_constants)
        )
        return Catalog(blocks, byte_sized=True)
    if isinstance(source, Zipf):
        scale = 1.0 / source.total_weight()
        return Catalog((_Block("objects", 1.0, source.population, scale=scale,
                               alpha=source.alpha),), byte_sized=False)
    if isinstance(source, PopularityLaw):
        rates = source.probabilities()
        rates.setflags(write=False)
        return Catalog((_Block("objects", 1.0, source.population, rates=rates),),
                       byte_sized=False)
    raise TypeError(f"cannot build a catalog from {type(source).__name__}")


def _occupancy(cat: Catalog, t: float) -> float:
    if t == 0.0:
        return 0.0
    if math.isinf(t):
        return cat.volume
    return math.fsum(b.theta * b.total(lambda q: -np.expm1(-q * t)) for b in cat.blocks)


def _arrival_rate(cat: Catalog) -> float:
    return math.fsum(b.theta * b.total(lambda q: q) for b in cat.blocks)


def expected_occupancy(catalog: CatalogLike, t: float) -> float:
    """Expected bytes (or objects) held by an LRU cache of characteristic time ``t``.

    Strictly increasing in ``t``; tends to the catalog volume as ``t`` grows.
    """
    if t < 0:
        raise ValueError("characteristic time must be non-negative")
    return _occupancy(as_catalog(catalog), float(t))


@dataclass(frozen=True, eq=False)
class CheSolution:
    """Characteristic time of one cache plus the catalog it was solved for.

    ``t_c`` is ``inf`` when the whole catalog fits and 0 for an absent cache.
    """

    t_c: float
    cache_size: float
    catalog: Catalog
    solver_residual: float = 0.0
    iterations: int = 0

    @property
    def fully_cacheable(self) -> bool:
        return math.isinf(self.t_c)

    @classmethod
    def empty(cls, catalog: CatalogLike) -> "CheSolution":
        """Solution for a zero-size cache: nothing is ever hit."""
        return cls(0.0, 0.0, as_catalog(catalog))


def solve_tc(catalog: CatalogLike, cache_size: float, rtol: float = 1e-14) -> CheSolution:
    """Solve the Che fixed point for a cache of ``cache_size`` bytes or objects.

    The root is bracketed by doubling up from ``C / arrival_rate`` (a lower
    bound, since ``1 - exp(-x) <= x``) and then bisected.

    Parameters
    ----------
    catalog : PopularityLaw, TrafficMix or Catalog
    cache_size : float
        Positive size. When it reaches the catalog volume the solution is
        marked fully cacheable (``t_c = inf``) rather than rejected.
    rtol : float, optional
        Target relative occupancy residual.

    Returns
    -------
    CheSolution
    """
    cat = as_catalog(catalog)
    c = float(cache_size)
    if not c > 0:
        raise ValueError(f"cache size must be positive, got {cache_size!r}")
    if c >= cat.volume:
        return CheSolution(math.inf, c, cat)

    rate = _arrival_rate(cat)
    lo = c / rate
    f_lo = _occupancy(cat, lo) - c
    hi = 2.0 * lo
    f_hi = _occupancy(cat, hi) - c
    it = 0
    while f_hi < 0:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        f_hi = _occupancy(cat, hi) - c
        it += 1
        if it > MAX_ITERATIONS:
            raise RuntimeError("could not bracket the characteristic time")

    mid, f_mid = lo, f_lo
    for it in range(it, MAX_ITERATIONS):
        if abs(f_lo) <= abs(f_hi):
            mid, f_mid = lo, f_lo
        else:
            mid, f_mid = hi, f_hi
        if abs(f_mid) <= rtol * c or hi - lo <= 4e-16 * hi:
            break
        mid = 0.5 * (lo + hi)
        f_mid = _occupancy(cat, mid) - c
        if f_mid < 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return CheSolution(mid, c, cat, solver_residual=f_mid / c, iterations=it + 1)


def _hit_total(sol: CheSolution, block: _Block, weighted_by_rate: bool) -> float:
    t = sol.t_c
    if weighted_by_rate:
        if math.isinf(t):
            return block.total(lambda q: q)
        return block.total(lambda q: -q * np.expm1(-q * t))
    if math.isinf(t):
        return float(block.population) if not math.isinf(block.upstream_t) else 0.0
    return block.total(lambda q: -np.expm1(-q * t))


def object_hit_rate(sol: CheSolution, type_index: int, rank: int) -> float:
    """Hit rate ``1 - exp(-q T)`` of one object at this cache."""
    block = sol.catalog.blocks[type_index]
    if not 1 <= rank <= block.population:
        raise IndexError(f"rank {rank} outside 1..{block.population}")
    if sol.fully_cacheable:
        return 1.0
    q = float(block.arriving(block.base_rate(rank)))
    return -math.expm1(-q * sol.t_c)


def overall_byte_hit(sol: CheSolution) -> float:
    """Fraction of the catalog's normalized byte demand served by this cache.

    ``sum_i sum_n q_i(n) h_i(n) theta_i``. For a mix the demand is
    normalized to one byte per unit time, so this is directly the bandwidth
    reduction. For a cache behind an upstream layer it is measured against
    the original (pre-upstream) demand. For a homogeneous law it equals the
    request hit rate.
    """
    cat = sol.catalog
    hit = math.fsum(b.theta * _hit_total(sol, b, True) for b in cat.blocks)
    # a fully cached normalized catalog serves all demand; absorb rounding
    if abs(hit - 1.0) < 1e-12:
        return 1.0
    return min(1.0, hit)


def overall_request_hit(sol: CheSolution) -> float:
    """Unweighted ``sum q h / sum q``: the fraction of requests, not bytes, hit."""
    cat = sol.catalog
    num = math.fsum(_hit_total(sol, b, True) for b in cat.blocks)
    den = math.fsum(b.total(lambda q: q) for b in cat.blocks)
    return num / den if den > 0 else 0.0


def per_type_hit(sol: CheSolution, type_index: int) -> float:
    """Request-weighted hit rate of one type over the traffic reaching this cache.

    Returns 0 when no traffic of the type reaches the cache.
    """
    block = sol.catalog.blocks[type_index]
    den = block.total(lambda q: q)
    if den == 0.0:
        return 0.0
    return _hit_total(sol, block, True) / den


def cache_shares(sol: CheSolution) -> list[float]:
    """Fraction of the cache occupied by each type."""
    cat = sol.catalog
    used = [b.theta * _hit_total(sol, b, False) for b in cat.blocks]
    total = math.fsum(used)
    if total == 0.0:
        # vanishing cache: occupancy proportional to byte demand
        rates = [b.theta * b.total(lambda q: q) for b in cat.blocks]
        s = math.fsum(rates)
        return [r / s for r in rates]
    if sol.fully_cacheable:
        return [u / total for u in used]
    return [u / sol.cache_size for u in used]
