"""Independent-reference simulation of LRU caches, single and in tandem.

Only the order of requests matters for LRU hit rates under independent
references, so instead of scheduling Poisson arrivals the simulator draws
i.i.d. ranks from the popularity law (alias method) and replays them through
an array-backed doubly linked list compiled with numba.
"""
from __future__ import annotations

import csv
import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Hashable

import numba
import numpy as np

from .traffic import PopularityLaw

__all__ = [
    "SIMULATION_LIMIT",
    "LruCache",
    "AliasTable",
    "SimReport",
    "sample_rank",
    "run_single_cache",
    "run_tandem",
    "default_warmup",
    "tandem_overall_hit",
]

#: Largest population a simulation accepts.
SIMULATION_LIMIT = 10**7

_BATCH = 1 << 20


class LruCache:
    """Reference LRU cache on an :class:`~collections.OrderedDict`.

    Insertion order runs least- to most-recently used; :meth:`order` reports
    it most-recent first.
    """

    def __init__(self, capacity: int):
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        self.capacity = int(capacity)
        self._items: OrderedDict[Hashable, None] = OrderedDict()

    def __contains__(self, key) -> bool:
        return key in self._items

    def __len__(self) -> int:
        return len(self._items)

    def request(self, key) -> bool:
        """Serve one request; return True on a hit."""
        if key in self._items:
            self._items.move_to_end(key)
            return True
        if self.capacity == 0:
            return False
        if len(self._items) >= self.capacity:
            self._items.popitem(last=False)
        self._items[key] = None
        return False

    def order(self) -> list:
        return list(reversed(self._items))


# -- compiled kernels ------------------------------------------------------

@numba.njit(cache=True)
def _build_alias(p):
    n = p.size
    prob = np.empty(n)
    alias = np.zeros(n, dtype=np.int64)
    scaled = p * n / p.sum()
    small = np.empty(n, dtype=np.int64)
    large = np.empty(n, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(n):
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        nl -= 1
        g = large[nl]
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            small[ns] = g
            ns += 1
        else:
            large[nl] = g
            nl += 1
    for k in range(nl):
        prob[large[k]] = 1.0
    for k in range(ns):
        prob[small[k]] = 1.0
    return prob, alias


@numba.njit(cache=True)
def _access(x, capacity, prev, nxt, present, state):
    """Serve ``x``; returns 1 on hit, 0 on miss, 2 on a miss that evicted."""
    head = state[0]
    tail = state[1]
    size = state[2]
    if present[x]:
        if x != head:
            p = prev[x]
            n = nxt[x]
            nxt[p] = n
            if n != -1:
                prev[n] = p
            else:
                tail = p
            prev[x] = -1
            nxt[x] = head
            prev[head] = x
            head = x
        state[0] = head
        state[1] = tail
        return 1
    if capacity == 0:
        return 0
    code = 0
    if size == capacity:
        t = tail
        present[t] = False
        tail = prev[t]
        if tail != -1:
            nxt[tail] = -1
        else:
            head = -1
        size -= 1
        code = 2
    prev[x] = -1
    nxt[x] = head
    if head != -1:
        prev[head] = x
    else:
        tail = x
    head = x
    present[x] = True
    size += 1
    state[0] = head
    state[1] = tail
    state[2] = size
    return code


@numba.njit(cache=True)
def _run_single(reqs, capacity, prev, nxt, present, state, clock, warm, adaptive,
                req_count, hit_count):
    # clock = [requests served so far, first eviction index or -1]
    for k in range(reqs.size):
        x = reqs[k]
        code = _access(x, capacity, prev, nxt, present, state)
        t = clock[0]
        if code == 2 and clock[1] < 0:
            clock[1] = t
            if adaptive and t + 10 * capacity > warm[0]:
                warm[0] = t + 10 * capacity
        if t >= warm[0] and (clock[1] >= 0 or not adaptive):
            req_count[x] += 1
            if code == 1:
                hit_count[x] += 1
        clock[0] = t + 1


@numba.njit(cache=True)
def _run_tandem(reqs, route, c1, c2, prev1, nxt1, present1, state1,
                prev2, nxt2, present2, state2, clock, warm,
                req1, hit1, req2, hit2):
    for k in range(reqs.size):
        x = reqs[k]
        j = route[k]
        t = clock[0]
        measure = t >= warm[0]
        code = _access(x, c1, prev1[j], nxt1[j], present1[j], state1[j])
        if measure:
            req1[x] += 1
        if code == 1:
            if measure:
                hit1[x] += 1
        else:
            code2 = _access(x, c2, prev2, nxt2, present2, state2)
            if measure:
                req2[x] += 1
                if code2 == 1:
                    hit2[x] += 1
        clock[0] = t + 1


# -- sampling --------------------------------------------------------------

class AliasTable:
    """Walker/Vose alias table over ranks ``1..N``."""

    def __init__(self, probabilities):
        p = np.ascontiguousarray(probabilities, dtype=np.float64)
        if p.ndim != 1 or p.size == 0 or not np.all(p > 0):
            raise ValueError("alias table needs a non-empty vector of positive weights")
        self.size = p.size
        self.prob, self.alias = _build_alias(p)

    @classmethod
    def for_law(cls, law: PopularityLaw) -> "AliasTable":
        if law.population > SIMULATION_LIMIT:
            raise ValueError(
                f"population {law.population} exceeds the simulation limit {SIMULATION_LIMIT}"
            )
        return cls(law.weights())

    def sample_index(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Zero-based draws (rank - 1)."""
        cols = (rng.random(size) * self.size).astype(np.int64)
        np.minimum(cols, self.size - 1, out=cols)
        keep = rng.random(size) < self.prob[cols]
        return np.where(keep, cols, self.alias[cols])


_TABLES: dict[PopularityLaw, AliasTable] = {}


def _table(law: PopularityLaw) -> AliasTable:
    table = _TABLES.get(law)
    if table is None:
        table = _TABLES[law] = AliasTable.for_law(law)
    return table


def sample_rank(law: PopularityLaw, rng: np.random.Generator, size: int | None = None):
    """Draw rank(s) with probability proportional to the law's weights."""
    table = _table(law)
    if size is None:
        return int(table.sample_index(rng, 1)[0]) + 1
    return table.sample_index(rng, size) + 1


# -- reports ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SimReport:
    """Per-rank request and hit counts over the measured window.

    ``requests[k]`` and ``hits[k]`` refer to rank ``k + 1``.
    """

    total_requests: int
    warmup_requests: int
    requests: np.ndarray
    hits: np.ndarray
    seed: int
    capacity: int
    degenerate: bool = False
    label: str = ""

    @property
    def measured_requests(self) -> int:
        return int(self.requests.sum())

    @property
    def overall_hit(self) -> float:
        n = self.requests.sum()
        return float(self.hits.sum() / n) if n else 0.0

    @property
    def per_rank_hits(self) -> dict[int, tuple[int, int]]:
        return {int(k) + 1: (int(self.requests[k]), int(self.hits[k]))
                for k in np.flatnonzero(self.requests)}

    def hit_rate(self, rank: int) -> float:
        n = self.requests[rank - 1]
        return float(self.hits[rank - 1] / n) if n else math.nan

    def stderr(self, rank: int) -> float:
        """Binomial standard error of :meth:`hit_rate`."""
        n = self.requests[rank - 1]
        if not n:
            return math.nan
        h = self.hits[rank - 1] / n
        return math.sqrt(h * (1.0 - h) / n)

    def overall_stderr(self) -> float:
        n = self.requests.sum()
        h = self.overall_hit
        return math.sqrt(h * (1.0 - h) / n) if n else math.nan

    def to_csv(self, path, extra: dict[str, np.ndarray] | None = None) -> None:
        extra = extra or {}
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rank", "requests", "hits", "hit_rate", "stderr", *extra])
            for k in np.flatnonzero(self.requests):
                r = int(k) + 1
                w.writerow([r, int(self.requests[k]), int(self.hits[k]),
                            repr(self.hit_rate(r)), repr(self.stderr(r)),
                            *(repr(float(v[k])) for v in extra.values())])

    def summary(self) -> str:
        return (f"{self.label or 'cache'}: capacity={self.capacity} "
                f"measured={self.measured_requests} warmup={self.warmup_requests} "
                f"hit={self.overall_hit:.6f} +/- {self.overall_stderr():.6f} seed={self.seed}")


def default_warmup(capacity: int) -> int:
    """Warm-up length before the first-eviction extension is applied."""
    return max(10 * int(capacity), 10**6)


def _batches(total: int):
    done = 0
    while done < total:
        n = min(_BATCH, total - done)
        yield n
        done += n


def run_single_cache(
    law: PopularityLaw,
    capacity: int,
    n_requests: int,
    warmup: int | None = None,
    seed: int = 0,
) -> SimReport:
    """Simulate one LRU cache fed by i.i.d. requests.

    Parameters
    ----------
    law : PopularityLaw
    capacity : int
        Cache size in objects.
    n_requests : int
        Total requests, warm-up included.
    warmup : int, optional
        Requests discarded before measuring. By default
        ``max(10 C, 1e6)``, extended to ``first eviction + 10 C`` when that is
        later.
    seed : int
    """
    capacity = int(capacity)
    if capacity < 0:
        raise ValueError("capacity must be non-negative")
    table = _table(law)
    n = law.population
    adaptive = warmup is None
    warm_len = default_warmup(capacity) if adaptive else int(warmup)
    if not 0 <= warm_len < n_requests:
        raise ValueError(f"warmup {warm_len} must be below n_requests {n_requests}")
    rng = np.random.default_rng(seed)
    req = np.zeros(n, dtype=np.int64)
    hit = np.zeros(n, dtype=np.int64)

    if capacity >= n:
        # everything fits: after warm-up every request is a hit
        skipped = 0
        for size in _batches(n_requests):
            idx = table.sample_index(rng, size)
            keep = idx[max(0, warm_len - skipped):]
            skipped += size
            np.add.at(req, keep, 1)
        return SimReport(n_requests, warm_len, req, req.copy(), seed, capacity,
                         degenerate=True)

    prev = np.full(n, -1, dtype=np.int64)
    nxt = np.full(n, -1, dtype=np.int64)
    present = np.zeros(n, dtype=np.bool_)
    state = np.array([-1, -1, 0], dtype=np.int64)
    clock = np.array([0, -1], dtype=np.int64)
    warm = np.array([warm_len], dtype=np.int64)
    for size in _batches(n_requests):
        idx = table.sample_index(rng, size)
        _run_single(idx, capacity, prev, nxt, present, state, clock, warm, adaptive,
                    req, hit)
    if adaptive and clock[1] < 0:
        raise ValueError("no eviction happened; increase n_requests")
    if warm[0] >= n_requests:
        raise ValueError("warm-up consumed every request; increase n_requests")
    return SimReport(n_requests, int(warm[0]), req, hit, seed, capacity)


def run_tandem(
    law: PopularityLaw,
    m_layer1: int,
    c1_each: int,
    c2: int,
    n_requests: int,
    warmup: int | None = None,
    seed: int = 0,
) -> tuple[SimReport, SimReport]:
    """Simulate ``m_layer1`` edge LRU caches whose misses feed one core LRU.

    Each request goes to an edge cache chosen uniformly at random. Returns
    ``(layer1, layer2)`` reports: layer 1 aggregates all edge caches, and
    layer-2 counts cover only the requests that missed at layer 1.
    """
    m = int(m_layer1)
    if m < 1:
        raise ValueError("need at least one layer-1 cache")
    c1_each, c2 = int(c1_each), int(c2)
    if c1_each < 0 or c2 < 0:
        raise ValueError("capacities must be non-negative")
    table = _table(law)
    n = law.population
    warm_len = default_warmup(max(m * c1_each, c2)) if warmup is None else int(warmup)
    if not 0 <= warm_len < n_requests:
        raise ValueError(f"warmup {warm_len} must be below n_requests {n_requests}")
    c1_eff, c2_eff = min(c1_each, n), min(c2, n)
    rng = np.random.default_rng(seed)
    prev1 = np.full((m, n), -1, dtype=np.int64)
    nxt1 = np.full((m, n), -1, dtype=np.int64)
    present1 = np.zeros((m, n), dtype=np.bool_)
    state1 = np.tile(np.array([-1, -1, 0], dtype=np.int64), (m, 1))
    prev2 = np.full(n, -1, dtype=np.int64)
    nxt2 = np.full(n, -1, dtype=np.int64)
    present2 = np.zeros(n, dtype=np.bool_)
    state2 = np.array([-1, -1, 0], dtype=np.int64)
    clock = np.zeros(1, dtype=np.int64)
    warm = np.array([warm_len], dtype=np.int64)
    req1, hit1 = np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64)
    req2, hit2 = np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64)
    for size in _batches(n_requests):
        idx = table.sample_index(rng, size)
        route = rng.integers(0, m, size=size)
        _run_tandem(idx, route, c1_eff, c2_eff, prev1, nxt1, present1, state1,
                    prev2, nxt2, present2, state2, clock, warm, req1, hit1, req2, hit2)
    return (
        SimReport(n_requests, warm_len, req1, hit1, seed, c1_each, label="layer1"),
        SimReport(n_requests, warm_len, req2, hit2, seed, c2, label="layer2"),
    )


def tandem_overall_hit(layer1: SimReport, layer2: SimReport) -> float:
    """Fraction of all measured requests served by either layer."""
    n = layer1.requests.sum()
    return float((layer1.hits.sum() + layer2.hits.sum()) / n) if n else 0.0
