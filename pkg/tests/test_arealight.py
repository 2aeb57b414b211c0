import time

import numpy as np
import pytest

from closedlight import geometry
from closedlight.arealight import (
    Material,
    RectAreaLight,
    compute_l_coeffs,
    lambert_factor,
    lambert_factor_batch,
    phong_factor,
    phong_factor_batch,
    shade_lambert_const,
    shade_lights_batch,
    shade_phong_const,
)
from closedlight.errors import InvalidInputError, UnsupportedParameterError
from closedlight.shading import shade_dispatch, shade_dispatch_batch

from .conftest import facing_light

ORIGIN = np.zeros(3)

# light fully above the horizon, normal towards the origin
UNCLIPPED = facing_light([-0.3, 0.2, 2.0], [0.9, 0.5, 2.4], [-0.6, 1.1, 1.7])
N_UNCLIPPED = geometry.normalize(np.array([0.3, -0.2, 1.0]))
VIEW = geometry.normalize(np.array([0.2, 0.1, -1.0]))
R_UNCLIPPED = geometry.reflect(VIEW, N_UNCLIPPED)

# light straddling the tangent plane
CLIPPED = facing_light([-1.0, 0.5, -0.5], [1.5, 0.3, 0.8], [-0.8, 1.4, 0.9])
N_CLIPPED = geometry.normalize(np.array([0.1, 0.3, 1.0]))
R_CLIPPED = geometry.normalize(np.array([0.4, -0.1, 1.0]))

# 30-digit quadrature of the exact-normalisation integrands
LAMBERT_UNCLIPPED = 0.19404091278721004403
PHONG_UNCLIPPED = {1: 0.14020980058452606549, 5: 0.031165905255026907684, 12: 0.0064958511567514262037}
LAMBERT_CLIPPED = 0.58480463073311398978
PHONG_CLIPPED_7 = 3.2047097455839818305


def test_frozen_lambert():
    assert lambert_factor(ORIGIN, N_UNCLIPPED, UNCLIPPED) == pytest.approx(LAMBERT_UNCLIPPED, rel=1e-12)
    assert lambert_factor(ORIGIN, N_CLIPPED, CLIPPED) == pytest.approx(LAMBERT_CLIPPED, rel=1e-12)


@pytest.mark.parametrize("sh", sorted(PHONG_UNCLIPPED))
def test_frozen_phong(sh):
    assert phong_factor(ORIGIN, R_UNCLIPPED, UNCLIPPED, sh) == pytest.approx(PHONG_UNCLIPPED[sh], rel=1e-12)


def test_frozen_phong_clipped():
    assert phong_factor(ORIGIN, R_CLIPPED, CLIPPED, 7) == pytest.approx(PHONG_CLIPPED_7, rel=1e-12)


def test_overhead_square(overhead_light, diffuse):
    rgb = shade_lambert_const(ORIGIN, [0, 0, 1], overhead_light, diffuse)
    assert rgb == pytest.approx([0.01] * 3, rel=1e-12)


def test_below_horizon_is_black(overhead_light, diffuse):
    assert np.all(shade_lambert_const(ORIGIN, [0, 0, -1], overhead_light, diffuse) == 0)
    spec = Material(0.0, 1.0, 4)
    assert np.all(shade_phong_const(ORIGIN, [0, 0, -1], [0, 0, 1], overhead_light, spec) == 0)


def test_zero_albedo(overhead_light):
    assert np.all(shade_lambert_const(ORIGIN, [0, 0, 1], overhead_light, Material(0.0, 0.0, 1)) == 0)


def test_back_facing_light_adds_nothing(diffuse):
    light = RectAreaLight([-0.5, -0.5, 3], [0.5, -0.5, 3], [-0.5, 0.5, 3], [0, 0, 1], 1.0)
    assert np.all(shade_lambert_const(ORIGIN, [0, 0, 1], light, diffuse) == 0)


def test_phong_sh1_is_lambert_about_mirror():
    for mirror in (R_UNCLIPPED, N_UNCLIPPED, geometry.normalize(np.array([0.5, 0.5, 1.0]))):
        assert phong_factor(ORIGIN, mirror, UNCLIPPED, 1) == pytest.approx(
            lambert_factor(ORIGIN, mirror, UNCLIPPED), rel=1e-12
        )


def test_rotation_and_translation_invariance(rng):
    for _ in range(10):
        rot = geometry.random_rotation(rng)
        t = rng.normal(size=3)
        light = CLIPPED.transformed(rot, t)
        assert lambert_factor(t, rot @ N_CLIPPED, light) == pytest.approx(LAMBERT_CLIPPED, rel=1e-10)
        assert phong_factor(t, rot @ R_CLIPPED, light, 7) == pytest.approx(PHONG_CLIPPED_7, rel=1e-10)


def test_linear_in_intensity_and_albedo():
    mat = Material([0.2, 0.5, 1.0], [0.3, 0.1, 0.0], 5)
    base = shade_phong_const(ORIGIN, N_UNCLIPPED, VIEW, UNCLIPPED, mat)
    scaled = shade_phong_const(ORIGIN, N_UNCLIPPED, VIEW, UNCLIPPED.scaled(3.5), mat)
    assert scaled == pytest.approx(3.5 * base, rel=1e-14)
    diff = shade_lambert_const(ORIGIN, N_UNCLIPPED, UNCLIPPED, mat)
    assert diff / mat.kd == pytest.approx([LAMBERT_UNCLIPPED] * 3, rel=1e-12)


def test_continuous_as_light_sinks_below_horizon():
    heights = np.linspace(0.3, -0.3, 121)
    vals = []
    for h in heights:
        light = RectAreaLight([-0.5, 2.0, h - 0.2], [0.5, 2.0, h - 0.2], [-0.5, 2.0, h + 0.2], [0, -1, 0], 1.0)
        vals.append(lambert_factor(ORIGIN, [0, 0, 1], light))
    vals = np.maximum(vals, 0.0)
    assert np.max(np.abs(np.diff(vals))) < 2e-3
    assert vals[-1] == 0.0 and vals[0] > 0.0


def test_errors(overhead_light):
    with pytest.raises(UnsupportedParameterError):
        phong_factor(ORIGIN, [0, 0, 1], overhead_light, 33)
    with pytest.raises(InvalidInputError):
        lambert_factor(overhead_light.centroid, [0, 0, 1], overhead_light)
    with pytest.raises(InvalidInputError):
        lambert_factor(ORIGIN, [0, 0, 2], overhead_light)
    with pytest.raises(InvalidInputError):
        RectAreaLight([0, 0, 0], [1, 0, 0], [2, 0, 0])
    with pytest.raises(InvalidInputError):
        RectAreaLight([0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 0, 0])
    with pytest.raises(InvalidInputError):
        Material(1.5, 0.0, 1)
    with pytest.raises(InvalidInputError):
        Material(0.5, 0.0, 0)


def test_batch_matches_scalar(rng):
    pts = rng.normal(scale=0.3, size=(40, 3))
    nrm = geometry.normalize(rng.normal(size=(40, 3)))
    mirrors = geometry.normalize(rng.normal(size=(40, 3)))
    for light in (UNCLIPPED, CLIPPED):
        lb = lambert_factor_batch(pts, nrm, light)
        pb = phong_factor_batch(pts, mirrors, light, 6, chunk=7)
        for k in range(40):
            assert lb[k] == pytest.approx(lambert_factor(pts[k], nrm[k], light), rel=1e-10, abs=1e-14)
            assert pb[k] == pytest.approx(phong_factor(pts[k], mirrors[k], light, 6), rel=1e-10, abs=1e-14)


def test_dispatch_sums_lights_and_lobes(rng):
    mat = Material(0.6, 0.3, 4)
    lights = [UNCLIPPED, CLIPPED]
    expected = sum(
        shade_lambert_const(ORIGIN, N_CLIPPED, l, mat) + shade_phong_const(ORIGIN, N_CLIPPED, VIEW, l, mat)
        for l in lights
    )
    assert shade_dispatch(ORIGIN, N_CLIPPED, VIEW, lights, None, mat) == pytest.approx(expected, rel=1e-14)
    pts = rng.normal(scale=0.2, size=(5, 3))
    nrm = np.tile(N_CLIPPED, (5, 1))
    views = np.tile(VIEW, (5, 1))
    batch = shade_dispatch_batch(pts, nrm, views, lights, None, mat)
    assert batch == pytest.approx(shade_lights_batch(pts, nrm, views, lights, mat), rel=1e-14)
    for k in range(5):
        assert batch[k] == pytest.approx(shade_dispatch(pts[k], nrm[k], VIEW, lights, None, mat), rel=1e-10)
    with pytest.raises(InvalidInputError):
        shade_dispatch(ORIGIN, N_CLIPPED, VIEW, [], None, mat)


def test_l_coeffs_match_products(rng):
    a, b, c = rng.normal(size=(3, 3))
    n_a = geometry.normalize(rng.normal(size=3))
    q = compute_l_coeffs(a, b, c, n_a)
    u, v = rng.random(2)
    x = a + u * (b - a) + v * (c - a)
    assert q(u, v) == pytest.approx(x[2] * (x @ n_a), rel=1e-12)


def test_phong_cost_grows_gently():
    def timed(sh):
        mat = Material(0.0, 1.0, sh)
        best = np.inf
        for _ in range(5):
            start = time.perf_counter()
            for _ in range(20):
                shade_phong_const(ORIGIN, N_UNCLIPPED, VIEW, UNCLIPPED, mat)
            best = min(best, time.perf_counter() - start)
        return best

    # the double sum is quadratic in sh: (32/8)^2 = 16 leaves room for overhead
    assert timed(32) / timed(8) <= 24
