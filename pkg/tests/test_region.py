import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from closedlight.region import classify_region, contains, region_area, region_slabs, slab_areas

z = st.floats(-2, 2, allow_nan=False)


def grid_fraction(a, b, c, n=1024):
    """Exact count of grid-cell centres with w > 0, column by column."""
    u = (np.arange(n) + 0.5) / n
    v = (np.arange(n) + 0.5) / n
    w = a + np.outer(u, np.ones(n)) * (b - a) + np.outer(np.ones(n), v) * (c - a)
    return np.count_nonzero(w > 0) / n**2


def test_trivial_cases():
    assert region_area(classify_region(1, 1, 1)) == 1.0
    assert classify_region(-1, -1, -1).is_empty
    assert region_area(classify_region(0, 0, 0)) == 0.0


def test_corner_triangle():
    r = classify_region(1, -1, -1)
    assert len(r.subregions) == 1
    assert region_area(r) == pytest.approx(0.125, abs=1e-15)
    assert grid_fraction(1, -1, -1) == pytest.approx(0.125, abs=2e-3)


def test_one_negative_corner_splits():
    r = classify_region(-1, 1, 1)
    assert len(r.subregions) == 2
    assert region_area(r) == pytest.approx(0.875, abs=1e-15)


def test_subregion_count_follows_sign_pattern(rng):
    for a, b, c in rng.uniform(-2, 2, (3000, 3)):
        d = b + c - a
        neg = sum(x <= 0 for x in (a, b, c, d))
        expected = {0: 1, 1: 2, 2: 1, 3: 1, 4: 0}[neg]
        assert len(classify_region(a, b, c).subregions) == expected


def test_grid_oracle(rng):
    for a, b, c in rng.uniform(-2, 2, (200, 3)):
        assert region_area(classify_region(a, b, c)) == pytest.approx(grid_fraction(a, b, c, 256), abs=8e-3)


def test_batch_matches_scalar(rng):
    zs = rng.uniform(-2, 2, (500, 3))
    areas = slab_areas(region_slabs(zs[:, 0], zs[:, 1], zs[:, 2]))
    for k, (a, b, c) in enumerate(zs):
        assert areas[k] == pytest.approx(region_area(classify_region(a, b, c)), abs=1e-14)


@given(z, z, z)
@settings(max_examples=300, deadline=None)
def test_membership(a, b, c):
    r = classify_region(a, b, c)
    rng = np.random.default_rng(0)
    u, v = rng.random((2, 1000))
    w = a + u * (b - a) + v * (c - a)
    inside = contains(r, u, v)
    assert np.all(w[inside] > -1e-12)
    # outside points must not have clearly positive w
    assert np.all(w[~inside] <= 1e-9 * (1 + abs(a) + abs(b) + abs(c)))


@given(z, z, z)
@settings(max_examples=300, deadline=None)
def test_bounds_ordered(a, b, c):
    for sub in classify_region(a, b, c).subregions:
        assert 0 <= sub.v0 <= sub.v1 <= 1
        for s in np.linspace(sub.v0, sub.v1, 7):
            assert sub.u_lo(s) <= sub.u_hi(s) + 1e-12
            assert -1e-12 <= sub.u_lo(s) and sub.u_hi(s) <= 1 + 1e-12


def test_continuity_across_zero():
    base = region_area(classify_region(0.0, 1.0, 0.5))
    for eps in (1e-9, -1e-9):
        assert region_area(classify_region(eps, 1.0, 0.5)) == pytest.approx(base, abs=1e-8)
