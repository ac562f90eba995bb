"""Popularity laws and multi-type content catalogs.

A catalog is never materialized object by object. Zipf types are described
by ``(r_i, alpha_i, N_i)`` and any per-object quantity is computed from the
rank on demand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .summation import harmonic_sum

__all__ = [
    "PopularityLaw",
    "Zipf",
    "Geometric",
    "Explicit",
    "uniform",
    "ContentType",
    "TrafficMix",
    "harmonic_sum",
    "normalize_mix",
    "request_rate",
    "chunk_view",
]

#: Largest population for which a law may be expanded into a weight array.
MATERIALIZE_LIMIT = 10**7


class PopularityLaw:
    """Ranked request-probability family. Weights are unnormalized."""

    population: int

    def weight(self, rank: int) -> float:
        raise NotImplementedError

    def weights(self) -> np.ndarray:
        """Weights for ranks ``1..population`` as an array."""
        raise NotImplementedError

    def total_weight(self) -> float:
        raise NotImplementedError

    def probabilities(self) -> np.ndarray:
        w = self.weights()
        return w / w.sum()

    def probability(self, rank: int) -> float:
        return self.weight(rank) / self.total_weight()

    def _check_rank(self, rank: int) -> None:
        if not 1 <= rank <= self.population:
            raise IndexError(f"rank {rank} outside 1..{self.population}")

    def _guard(self) -> None:
        if self.population > MATERIALIZE_LIMIT:
            raise ValueError(
                f"population {self.population} too large to materialize"
            )


@dataclass(frozen=True)
class Zipf(PopularityLaw):
    alpha: float
    population: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"Zipf exponent must be positive, got {self.alpha}")
        if int(self.population) != self.population or self.population < 1:
            raise ValueError(f"population must be a positive integer, got {self.population}")

    def weight(self, rank: int) -> float:
        self._check_rank(rank)
        return float(rank) ** -self.alpha

    def weights(self) -> np.ndarray:
        self._guard()
        return np.arange(1, self.population + 1, dtype=np.float64) ** -self.alpha

    def total_weight(self) -> float:
        return harmonic_sum(self.alpha, self.population)


@dataclass(frozen=True)
class Geometric(PopularityLaw):
    """``weight(n) = ratio**n``, e.g. ``Geometric(0.5, 16)`` gives ``q(n) = 2**-n``."""

    ratio: float
    population: int

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise ValueError(f"geometric ratio must lie in (0, 1), got {self.ratio}")
        if int(self.population) != self.population or self.population < 1:
            raise ValueError(f"population must be a positive integer, got {self.population}")

    def weight(self, rank: int) -> float:
        self._check_rank(rank)
        return self.ratio**rank

    def weights(self) -> np.ndarray:
        self._guard()
        return self.ratio ** np.arange(1, self.population + 1, dtype=np.float64)

    def total_weight(self) -> float:
        r = self.ratio
        return r * -math.expm1(self.population * math.log(r)) / (1.0 - r)


@dataclass(frozen=True)
class Explicit(PopularityLaw):
    """Arbitrary positive weights, stored sorted in non-increasing order."""

    values: tuple[float, ...]
    population: int = field(init=False)

    def __post_init__(self):
        vals = tuple(sorted((float(v) for v in self.values), reverse=True))
        if not vals:
            raise ValueError("explicit law needs at least one weight")
        if not all(v > 0 and math.isfinite(v) for v in vals):
            raise ValueError("explicit weights must be positive and finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "population", len(vals))

    def weight(self, rank: int) -> float:
        self._check_rank(rank)
        return self.values[rank - 1]

    def weights(self) -> np.ndarray:
        return np.array(self.values, dtype=np.float64)

    def total_weight(self) -> float:
        return math.fsum(self.values)


def uniform(n: int) -> Explicit:
    """Equal popularity over ``n`` objects."""
    return Explicit((1.0,) * int(n))


@dataclass(frozen=True)
class ContentType:
    """One traffic class.

    Parameters
    ----------
    name : str
    traffic_share : float
        Fraction ``p_i`` of traffic volume, in (0, 1].
    population : int
        Number of objects ``N_i``.
    mean_object_size : float
        Object size ``theta_i`` in bytes (all objects of a type share it).
    law : PopularityLaw
        Popularity over the type's ranks.
    chunks_per_object : int, optional
        Set by :func:`chunk_view`. Each rank of ``law`` then stands for this
        many equally popular chunks, and ``population`` counts chunks.
    """

    name: str
    traffic_share: float
    population: int
    mean_object_size: float
    law: PopularityLaw
    chunks_per_object: int = 1

    def __post_init__(self):
        if not 0 < self.traffic_share <= 1:
            raise ValueError(f"{self.name}: traffic share must lie in (0, 1]")
        if not self.mean_object_size > 0:
            raise ValueError(f"{self.name}: mean object size must be positive")
        if self.chunks_per_object < 1:
            raise ValueError(f"{self.name}: chunks per object must be >= 1")
        if self.law.population * self.chunks_per_object != self.population:
            raise ValueError(
                f"{self.name}: law population {self.law.population} "
                f"x {self.chunks_per_object} != type population {self.population}"
            )

    def base_rank(self, rank: int) -> int:
        """Popularity rank of the parent object of item ``rank``."""
        return (rank - 1) // self.chunks_per_object + 1

    @property
    def volume(self) -> float:
        """Total bytes of the type's catalog."""
        return self.population * self.mean_object_size

    @classmethod
    def zipf(cls, name, traffic_share, population, mean_object_size, alpha):
        return cls(name, traffic_share, int(population), float(mean_object_size),
                   Zipf(float(alpha), int(population)))


@dataclass(frozen=True)
class TrafficMix:
    """Normalized catalog: ``q_i(n) = r_i * n**-alpha_i`` with unit byte rate."""

    types: tuple[ContentType, ...]
    rate_constants: tuple[float, ...]

    @property
    def names(self) -> list[str]:
        return [t.name for t in self.types]

    @property
    def alphas(self) -> list[float]:
        return [t.law.alpha for t in self.types]

    @property
    def total_volume(self) -> float:
        return math.fsum(t.volume for t in self.types)

    def index(self, name: str) -> int:
        for i, t in enumerate(self.types):
            if t.name == name:
                return i
        raise KeyError(name)

    def byte_rate(self) -> float:
        """``sum_i sum_n q_i(n) theta_i``; 1 for a normalized mix."""
        return math.fsum(
            r * t.mean_object_size * t.chunks_per_object
            * harmonic_sum(t.law.alpha, t.law.population)
            for r, t in zip(self.rate_constants, self.types)
        )

    def __len__(self):
        return len(self.types)


def normalize_mix(types: Sequence[ContentType], tol: float = 1e-9) -> TrafficMix:
    """Turn traffic shares into per-object rate constants.

    ``r_i = p_i / (theta_i * sum_n n**-alpha_i)``, so the mix requests one
    byte per unit time in total.
    """
    types = tuple(types)
    if not types:
        raise ValueError("a traffic mix needs at least one content type")
    share_sum = math.fsum(t.traffic_share for t in types)
    if abs(share_sum - 1.0) > tol:
        raise ValueError(f"traffic shares sum to {share_sum!r}, expected 1")
    names = [t.name for t in types]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate content type names: {names}")
    rates = []
    for t in types:
        if t.chunks_per_object != 1:
            raise ValueError(f"{t.name}: build mixes from whole objects, then chunk_view")
        if not isinstance(t.law, Zipf):
            raise TypeError(
                f"{t.name}: only Zipf laws are supported inside a traffic mix"
            )
        rates.append(
            t.traffic_share / (t.mean_object_size * harmonic_sum(t.law.alpha, t.population))
        )
    return TrafficMix(types, tuple(rates))


def request_rate(mix: TrafficMix, type_index: int, rank: int) -> float:
    """Request rate ``q_i(rank)`` of one object (or chunk)."""
    t = mix.types[type_index]
    if not 1 <= rank <= t.population:
        raise IndexError(f"rank {rank} outside 1..{t.population} for {t.name}")
    return mix.rate_constants[type_index] * float(t.base_rank(rank)) ** -t.law.alpha


def chunk_view(mix: TrafficMix, chunk_size: float) -> TrafficMix:
    """Split every object into equal chunks that inherit the parent's rate.

    A type-``i`` object of size ``theta_i`` becomes ``k_i = theta_i / chunk_size``
    chunks. Per-chunk rates repeat ``k_i`` times in chunk rank, so the result
    keeps the parent law and rate constant and records ``k_i`` in
    :attr:`ContentType.chunks_per_object`. Total byte rate is unchanged.
    """
    if not chunk_size > 0:
        raise ValueError("chunk size must be positive")
    types = []
    for t in mix.types:
        k = t.mean_object_size / chunk_size
        if k < 1 or abs(k - round(k)) > 1e-9 * k:
            raise ValueError(
                f"{t.name}: chunk size {chunk_size} does not divide object size "
                f"{t.mean_object_size}"
            )
        k = int(round(k)) * t.chunks_per_object
        types.append(ContentType(t.name, t.traffic_share, t.law.population * k,
                                 float(chunk_size), t.law, k))
    return TrafficMix(tuple(types), mix.rate_constants)
