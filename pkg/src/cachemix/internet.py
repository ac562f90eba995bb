"""Internet content mix: web, file sharing, UGC and VoD.

Shares per year, populations, object sizes and the Zipf exponent of every
type except VoD, whose exponent is left as a parameter (0.8 or 1.2 in the
reference evaluations).
"""
from __future__ import annotations

from .traffic import ContentType, TrafficMix, normalize_mix

KB, MB, GB, TB, PB = 1e3, 1e6, 1e9, 1e12, 1e15

VOD = "VoD"

#: name -> (population, object size in bytes, Zipf exponent or None for VoD)
CATALOG = {
    "web": (10**11, 10 * KB, 0.8),
    "file-sharing": (10**5, 10 * GB, 0.8),
    "UGC": (10**8, 10 * MB, 0.8),
    VOD: (10**4, 100 * MB, None),
}

SHARES = {
    2011: {"web": 0.18, "file-sharing": 0.36, "UGC": 0.23, VOD: 0.23},
    2015: {"web": 0.16, "file-sharing": 0.24, "UGC": 0.23, VOD: 0.37},
}

DEFAULT_ALPHA = 0.8


def content_types(year: int, vod_alpha: float = DEFAULT_ALPHA) -> list[ContentType]:
    try:
        shares = SHARES[year]
    except KeyError:
        raise ValueError(f"no traffic shares for year {year}; have {sorted(SHARES)}") from None
    types = []
    for name, (population, size, alpha) in CATALOG.items():
        a = vod_alpha if alpha is None else alpha
        types.append(ContentType.zipf(name, shares[name], population, size, a))
    return types


def internet_mix(year: int, vod_alpha: float = DEFAULT_ALPHA) -> TrafficMix:
    """Normalized four-type mix for ``year`` (2011 or 2015)."""
    return normalize_mix(content_types(year, vod_alpha))
