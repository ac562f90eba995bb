"""Exact LRU hit rates for tiny catalogs.

Under independent references the LRU stack (cache contents ordered from
most to least recent) is a Markov chain whose stationary law has the
product form

    P(a_1, ..., a_C) = prod_k q(a_k) / (1 - sum_{j<k} q(a_j))

:func:`exact_lru_hit` uses the product form and checks it against a power
iteration on the explicit chain before returning.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

import numpy as np

__all__ = [
    "MAX_OBJECTS",
    "StackDistribution",
    "product_form",
    "markov_stationary",
    "exact_lru_hit",
]

MAX_OBJECTS = 10

# verification is skipped above this many ordered states
VERIFY_LIMIT = 20_000


@dataclass(frozen=True)
class StackDistribution:
    n: int
    c: int
    probabilities: dict[tuple[int, ...], float]

    def hit_rates(self) -> np.ndarray:
        """Probability each object (0-based) is cached."""
        h = np.zeros(self.n)
        for state, p in self.probabilities.items():
            for a in state:
                h[a] += p
        return h


def _validate(q: Sequence[float], c: int) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 1 or q.size == 0:
        raise ValueError("need a non-empty probability vector")
    if q.size > MAX_OBJECTS:
        raise ValueError(f"exact analysis is limited to {MAX_OBJECTS} objects")
    if not np.all(q > 0):
        raise ValueError("probabilities must be strictly positive")
    if not 0 <= c <= q.size:
        raise ValueError(f"cache size {c} outside 0..{q.size}")
    return q / q.sum()


def product_form(q: Sequence[float], c: int) -> StackDistribution:
    q = _validate(q, c)
    probs = {}
    for state in permutations(range(q.size), c):
        p, used = 1.0, 0.0
        for a in state:
            p *= q[a] / (1.0 - used)
            used += q[a]
        probs[state] = p
    return StackDistribution(q.size, c, probs)


def markov_stationary(
    q: Sequence[float], c: int, tol: float = 1e-15, max_iter: int = 1_000_000
) -> StackDistribution:
    """Stationary law of the LRU stack by power iteration on its transition matrix."""
    q = _validate(q, c)
    states = list(permutations(range(q.size), c))
    index = {s: i for i, s in enumerate(states)}
    m = len(states)
    P = np.zeros((m, m))
    for i, s in enumerate(states):
        for x in range(q.size):
            if x in s:
                nxt = (x,) + tuple(a for a in s if a != x)
            else:
                nxt = ((x,) + s)[:c]
            P[i, index[nxt]] += q[x]
    pi = np.full(m, 1.0 / m)
    for _ in range(max_iter):
        new = pi @ P
        new /= new.sum()
        if np.abs(new - pi).sum() < tol:
            pi = new
            break
        pi = new
    else:
        raise RuntimeError("power iteration did not converge")
    return StackDistribution(q.size, c, dict(zip(states, pi.tolist())))


def exact_lru_hit(
    q: Sequence[float], c: int, verify: bool = True
) -> tuple[float, np.ndarray]:
    """Exact overall and per-object LRU hit rates.

    Parameters
    ----------
    q : sequence of float
        Request probabilities (normalized internally), at most 10 objects.
    c : int
        Cache size in objects.
    verify : bool, optional
        Cross-check the product form against the chain's stationary law
        (skipped when the state space exceeds ``VERIFY_LIMIT``).

    Returns
    -------
    overall : float
    per_object : ndarray
        ``per_object[k]`` is the hit rate of object ``k`` (0-based, in the
        order of ``q``).
    """
    qn = _validate(q, c)
    if c == 0:
        return 0.0, np.zeros(qn.size)
    if c == qn.size:
        return 1.0, np.ones(qn.size)
    dist = product_form(qn, c)
    h = dist.hit_rates()
    if verify and math.perm(qn.size, c) <= VERIFY_LIMIT:
        check = markov_stationary(qn, c).hit_rates()
        err = float(np.abs(check - h).max())
        if err > 1e-10:
            raise RuntimeError(f"product form disagrees with the Markov chain by {err:.3g}")
    return float(qn @ h), h
