import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cachemix import internet
from cachemix.che import object_hit_rate, overall_byte_hit, solve_tc
from cachemix.hierarchy import (
    SHARED,
    LayerPolicy,
    contour_grid,
    evaluate_two_layer,
    round_percent,
    savings_table,
)
from cachemix.traffic import Zipf

TB = internet.TB
ZIPF = Zipf(0.8, 10**4)


def brute_two_layer(q, c1, c2):
    """Explicit-array oracle for the homogeneous two-layer model."""
    from scipy.optimize import brentq

    def tc(rates, c):
        f = lambda t: float(np.sum(-np.expm1(-rates * t))) - c
        hi = 1.0
        while f(hi) < 0:
            hi *= 2
        return brentq(f, 0, hi, rtol=1e-15)

    t1 = tc(q, c1)
    h1 = -np.expm1(-q * t1)
    q2 = q * (1 - h1)
    t2 = tc(q2, c2)
    h2 = -np.expm1(-q2 * t2)
    return float(q @ h1), float(q @ (h1 + h2 - h1 * h2))


def test_matches_explicit_oracle():
    l1, total = brute_two_layer(ZIPF.probabilities(), 100, 1000)
    r = evaluate_two_layer(ZIPF, 100, 1000)
    assert r.layer1_reduction == pytest.approx(l1, rel=1e-10)
    assert r.total_reduction == pytest.approx(total, rel=1e-10)


def test_absent_layer2_is_single_cache():
    mix = internet.internet_mix(2011)
    r = evaluate_two_layer(mix, TB, 0)
    assert r.total_reduction == r.layer1_reduction == overall_byte_hit(solve_tc(mix, TB))


def test_absent_layer1():
    r = evaluate_two_layer(ZIPF, 0, 500)
    assert r.layer1_reduction == 0.0
    assert r.total_reduction == pytest.approx(overall_byte_hit(solve_tc(ZIPF, 500)), rel=1e-12)


def test_origin_is_zero():
    assert contour_grid(ZIPF, [0], [0])[0, 0] == 0.0


def test_layer1_holds_everything():
    mix = internet.internet_mix(2015)
    r = evaluate_two_layer(mix, 2 * mix.total_volume, 10 * TB)
    assert r.layer1_reduction == 1.0 and r.total_reduction == 1.0


def test_negative_sizes_rejected():
    with pytest.raises(ValueError):
        evaluate_two_layer(ZIPF, -1, 10)


@pytest.mark.parametrize("policy", [SHARED, LayerPolicy.dedicated(internet.VOD)])
@pytest.mark.parametrize("year", [2011, 2015])
def test_layer2_demand_conservation(policy, year):
    r = evaluate_two_layer(internet.internet_mix(year), TB, 100 * TB, policy)
    assert r.layer2_demand() == pytest.approx(1 - r.layer1_reduction, rel=1e-6)


def test_dedicated_all_types_is_shared():
    mix = internet.internet_mix(2011)
    a = evaluate_two_layer(mix, TB, 100 * TB)
    b = evaluate_two_layer(mix, TB, 100 * TB, LayerPolicy.dedicated(*mix.names))
    assert (a.layer1_reduction, a.total_reduction) == (b.layer1_reduction, b.total_reduction)


def test_dedicated_vod_whole_catalog_fits():
    for year, share in ((2011, 0.23), (2015, 0.37)):
        mix = internet.internet_mix(year)
        vod_volume = mix.types[mix.index(internet.VOD)].volume
        r = evaluate_two_layer(mix, vod_volume, 100 * TB, LayerPolicy.dedicated(internet.VOD))
        assert r.layer1_reduction == pytest.approx(share, rel=1e-12)


def test_dedicated_bypass_has_no_layer1_hits():
    mix = internet.internet_mix(2011)
    r = evaluate_two_layer(mix, TB, 100 * TB, LayerPolicy.dedicated(internet.VOD))
    for name, (h1, h2, comb) in zip(r.names, r.per_type):
        if name != internet.VOD:
            assert h1 == 0.0 and comb == h2


def test_policy_validation():
    with pytest.raises(ValueError):
        LayerPolicy.dedicated()
    with pytest.raises(ValueError):
        evaluate_two_layer(internet.internet_mix(2011), TB, TB, LayerPolicy.dedicated("IPTV"))
    assert SHARED.label() == "shared"
    assert LayerPolicy.dedicated("VoD").label() == "VoD"


@pytest.mark.parametrize("policy", [SHARED, LayerPolicy.dedicated(internet.VOD)])
def test_per_type_combination_bounds(policy):
    r = evaluate_two_layer(internet.internet_mix(2011, 1.2), TB, 100 * TB, policy)
    assert r.total_reduction >= r.layer1_reduction
    for h1, h2, comb in r.per_type:
        assert max(h1, h2) - 1e-15 <= comb <= min(1.0, h1 + h2) + 1e-15


def test_per_object_combination_bounds():
    r = evaluate_two_layer(ZIPF, 100, 1000)
    for k in (1, 10, 100, 1000, 10**4):
        h1, h2 = object_hit_rate(r.layer1, 0, k), object_hit_rate(r.layer2, 0, k)
        comb = h1 + h2 - h1 * h2
        assert max(h1, h2) <= comb <= min(1.0, h1 + h2)


def test_contour_monotone():
    grid = [0, 10, 100, 1000, 5000]
    h = contour_grid(ZIPF, grid, grid)
    assert np.all(np.diff(h, axis=0) >= -1e-12)
    assert np.all(np.diff(h, axis=1) >= -1e-12)
    assert h.shape == (5, 5)


def test_contour_rejects_unsorted():
    with pytest.raises(ValueError):
        contour_grid(ZIPF, [10, 1], [1])


@pytest.mark.parametrize("c", [100, 1000])
def test_splitting_costs_hits(c):
    whole = evaluate_two_layer(ZIPF, c, 0).total_reduction
    split = evaluate_two_layer(ZIPF, c // 2, c // 2).total_reduction
    assert whole >= split


def test_round_percent():
    assert round_percent(0.165) == 17
    assert round_percent(0.1649) == 16
    assert round_percent(0.5) == 50
    assert round_percent(0.0) == 0


def test_savings_table_shared_rows():
    rows = {(r.label, r.vod_alpha, r.policy): r for r in savings_table()}
    assert len(rows) == 8
    expected = {("2011", 0.8): (17, 50), ("2011", 1.2): (24, 50),
                ("2015", 0.8): (27, 59), ("2015", 1.2): (36, 59)}
    for (label, alpha), cells in expected.items():
        r = rows[(label, alpha, "shared")]
        assert abs(r.layer1_percent - cells[0]) <= 1
        assert abs(r.total_percent - cells[1]) <= 1


def test_savings_table_dedicated_layer1():
    rows = {(r.label, r.vod_alpha, r.policy): r for r in savings_table()}
    # 1 TB holds the whole VoD catalog, so layer 1 serves exactly the VoD share
    for label, share in (("2011", 0.23), ("2015", 0.37)):
        for alpha in (0.8, 1.2):
            assert rows[(label, alpha, "VoD")].layer1_reduction == pytest.approx(share)


def test_savings_table_needs_vod():
    with pytest.raises(ValueError):
        savings_table({"x": internet.content_types(2011)}, vod_name="IPTV")


@given(st.floats(0, 5000), st.floats(0, 5000), st.floats(1.1, 3.0))
def test_monotone_in_each_layer(c1, c2, grow):
    base = evaluate_two_layer(ZIPF, c1, c2).total_reduction
    assert evaluate_two_layer(ZIPF, c1 * grow, c2).total_reduction >= base - 1e-12
    assert evaluate_two_layer(ZIPF, c1, c2 * grow).total_reduction >= base - 1e-12


@given(st.floats(1e9, 1e14), st.floats(0, 1e15))
def test_mix_demand_conservation_property(c1, c2):
    r = evaluate_two_layer(internet.internet_mix(2011), c1, c2)
    assert r.layer2_demand() == pytest.approx(1 - r.layer1_reduction, rel=1e-6)
    assert 0 <= r.layer1_reduction <= r.total_reduction <= 1
