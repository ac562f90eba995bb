"""Hit rates and bandwidth savings of LRU/LFU caches and two-layer hierarchies
under a mixed Internet content workload."""

from .che import (
    CheSolution,
    cache_shares,
    expected_occupancy,
    object_hit_rate,
    overall_byte_hit,
    overall_request_hit,
    per_type_hit,
    solve_tc,
)
from .hierarchy import SHARED, HierarchyResult, LayerPolicy, contour_grid, evaluate_two_layer, savings_table
from .internet import internet_mix
from .lfu import HitCurve, lfu_curve_mix, lfu_hit_homogeneous, lfu_hit_mix
from .oracle import exact_lru_hit
from .simulator import LruCache, SimReport, run_single_cache, run_tandem, sample_rank
from .traffic import (
    ContentType,
    Explicit,
    Geometric,
    TrafficMix,
    Zipf,
    chunk_view,
    harmonic_sum,
    normalize_mix,
    request_rate,
    uniform,
)

__version__ = "0.1.0"
