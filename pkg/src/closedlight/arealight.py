"""Closed-form shading from constant rectangular area lights.

Both BRDFs reduce to integrating a polynomial in the light's (u, v)
parameters over the part of the rectangle above a plane through the shaded
point: the tangent plane (Lambertian) or the plane orthogonal to the mirror
direction (Phong-like).

Every shading routine works on coordinates divided by the centroid distance
``r = sqrt(d_p)``.  Under that scaling the distance divisors ``d_p**2`` and
``d_p**((sh + 3) / 2)`` both become one, and large powers of scene-sized
coordinates never appear.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from . import geometry
from .analytic import PolyCoeffs, integrate_poly_over_region, integrate_poly_slabs, monomial_moments
from .errors import InvalidInputError, UnsupportedParameterError
from .region import classify_region, region_slabs

MAX_SHININESS = 32
MIN_SQ_DIST = 1e-6


def _rgb(value, name):
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        arr = np.full(3, float(arr))
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be a finite RGB triple")
    return arr


@dataclass(frozen=True, eq=False)
class RectAreaLight:
    """Rectangle with corners ``a``, ``b``, ``c`` (fourth ``b + c - a``).

    ``normal`` is the emitting side.  When omitted it defaults to the unit
    vector along ``(b - a) x (c - a)``.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    normal: np.ndarray = None
    intensity: np.ndarray = 1.0

    def __post_init__(self):
        a, b, c = (geometry.vec3(x) for x in (self.a, self.b, self.c))
        e1, e2 = b - a, c - a
        if geometry.norm(e1) <= 1e-9 or geometry.norm(e2) <= 1e-9:
            raise InvalidInputError("area light edges must have non-zero length")
        cross = np.cross(e1, e2)
        if geometry.norm(cross) <= 1e-18:
            raise InvalidInputError("area light edges are parallel")
        normal = cross if self.normal is None else geometry.vec3(self.normal)
        normal = geometry.normalize(normal)
        if abs(np.dot(normal, e1)) > 1e-6 * geometry.norm(e1) or abs(np.dot(normal, e2)) > 1e-6 * geometry.norm(e2):
            raise InvalidInputError("light normal must be orthogonal to both edges")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "intensity", _rgb(self.intensity, "intensity"))

    @property
    def corners(self):
        return np.stack([self.a, self.b, self.c])

    @property
    def centroid(self):
        return 0.5 * (self.b + self.c)

    @property
    def area(self):
        return float(geometry.norm(np.cross(self.b - self.a, self.c - self.a)))

    def point(self, u, v):
        u = np.asarray(u, dtype=np.float64)[..., None]
        v = np.asarray(v, dtype=np.float64)[..., None]
        return self.a + u * (self.b - self.a) + v * (self.c - self.a)

    def scaled(self, factor):
        return RectAreaLight(self.a, self.b, self.c, self.normal, self.intensity * factor)

    def transformed(self, rotation, translation=np.zeros(3)):
        rot = np.asarray(rotation, dtype=np.float64)
        return RectAreaLight(
            rot @ self.a + translation, rot @ self.b + translation, rot @ self.c + translation,
            rot @ self.normal, self.intensity,
        )


@dataclass(frozen=True, eq=False)
class Material:
    kd: np.ndarray = 1.0
    ks: np.ndarray = 0.0
    sh: int = 1

    def __post_init__(self):
        kd, ks = _rgb(self.kd, "kd"), _rgb(self.ks, "ks")
        if np.any(kd < 0) or np.any(kd > 1) or np.any(ks < 0) or np.any(ks > 1):
            raise InvalidInputError("albedos must lie in [0, 1]")
        if int(self.sh) != self.sh or self.sh < 1:
            raise InvalidInputError("shininess must be an integer >= 1")
        object.__setattr__(self, "kd", kd)
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "sh", int(self.sh))

    @property
    def is_diffuse(self):
        return bool(np.any(self.kd > 0))

    @property
    def is_specular(self):
        return bool(np.any(self.ks > 0))


def mean_sq_dist(p, light):
    d = light.centroid - np.asarray(p, dtype=np.float64)
    return float(np.dot(d, d))


def compute_l_coeffs(a, b, c, n_a):
    """Coefficients of ``z_A(u, v) * (c_A(u, v) . N_A)``.

    Both factors are affine in (u, v); the six coefficients come from
    multiplying them out.
    """
    a, b, c, n_a = (np.asarray(x, dtype=np.float64) for x in (a, b, c, n_a))
    az, dbz, dcz = a[2], b[2] - a[2], c[2] - a[2]
    an, dbn, dcn = np.dot(a, n_a), np.dot(b - a, n_a), np.dot(c - a, n_a)
    return PolyCoeffs(
        l00=az * an,
        l01=az * dcn + dcz * an,
        l02=dcz * dcn,
        l10=az * dbn + dbz * an,
        l11=dbz * dcn + dcz * dbn,
        l20=dbz * dbn,
    )


def _check_unit(v, name):
    v = geometry.vec3(v)
    if abs(geometry.norm(v) - 1.0) > 1e-6:
        raise InvalidInputError(f"{name} must be a unit vector")
    return v


def _normalized_setup(p, light):
    d2 = mean_sq_dist(p, light)
    if d2 <= MIN_SQ_DIST:
        raise InvalidInputError("shading point coincides with the light")
    scale = 1.0 / np.sqrt(d2)
    return d2, scale


def lambert_factor(p, n, light):
    """Geometric factor ``G`` with radiance ``kd * I * G`` (before clamping)."""
    p = geometry.vec3(p)
    n = _check_unit(n, "normal")
    _, scale = _normalized_setup(p, light)
    frame = geometry.build_frame(n)
    a, b, c = (geometry.to_local(frame, p, x) * scale for x in light.corners)
    n_a = geometry.to_local_dir(frame, light.normal)
    coeffs = compute_l_coeffs(a, b, c, n_a)
    region = classify_region(a[2], b[2], c[2])
    area = light.area * scale * scale
    return -area * integrate_poly_over_region(coeffs, region)


def shade_lambert_const(p, n, light, mat):
    g = lambert_factor(p, n, light)
    return np.maximum(mat.kd * light.intensity * g, 0.0)


def _check_shininess(sh):
    if sh > MAX_SHININESS:
        raise UnsupportedParameterError(f"shininess {sh} exceeds the supported maximum {MAX_SHININESS}")


def phong_factor(p, mirror, light, sh):
    """Geometric factor of the Phong-like lobe about the unit mirror direction."""
    _check_shininess(sh)
    p = geometry.vec3(p)
    _, scale = _normalized_setup(p, light)
    frame = geometry.build_frame(mirror)
    a, b, c = (geometry.to_local(frame, p, x) * scale for x in light.corners)
    n_a = geometry.to_local_dir(frame, light.normal)
    region = classify_region(a[2], b[2], c[2])
    if region.is_empty:
        return 0.0
    az, dbz, dcz = a[2], b[2] - a[2], c[2] - a[2]
    a0, a1, a2 = np.dot(n_a, a), np.dot(n_a, b - a), np.dot(n_a, c - a)

    from .analytic import _region_to_slabs

    slabs = _region_to_slabs(region)
    moments = monomial_moments(slabs, sh + 1)[0]
    if region.transposed:
        moments = moments.T  # now indexed [u power, v power]
    total = 0.0
    for k in range(sh + 1):
        for l in range(sh - k + 1):
            weight = comb(sh, k) * comb(sh - k, l) * az ** (sh - l - k) * dbz**l * dcz**k
            if weight == 0.0:
                continue
            total += weight * (
                a0 * moments[l, k] + a1 * moments[l + 1, k] + a2 * moments[l, k + 1]
            )
    area = light.area * scale * scale
    return -area * total


def shade_phong_const(p, n, view, light, mat):
    n = _check_unit(n, "normal")
    view = _check_unit(view, "view")
    mirror = geometry.reflect(view, n)
    g = phong_factor(p, mirror, light, mat.sh)
    return np.maximum(mat.ks * light.intensity * g, 0.0)


# ---------------------------------------------------------------------------
# batched evaluation used by the renderer


def _batch_local(points, axes, light):
    """Scaled corner heights along ``axes`` and their dots with the light normal."""
    points = np.asarray(points, dtype=np.float64)
    d2 = np.sum(np.square(light.centroid - points), axis=-1)
    if np.any(d2 <= MIN_SQ_DIST):
        raise InvalidInputError("shading point coincides with the light")
    scale = 1.0 / np.sqrt(d2)
    rel = (light.corners[None, :, :] - points[:, None, :]) * scale[:, None, None]  # (P, 3, 3)
    z = np.einsum("pkj,pj->pk", rel, axes)
    dots = rel @ light.normal
    area = light.area * scale * scale
    return z, dots, area


def lambert_factor_batch(points, normals, light):
    z, dots, area = _batch_local(points, normals, light)
    az, dbz, dcz = z[:, 0], z[:, 1] - z[:, 0], z[:, 2] - z[:, 0]
    an, dbn, dcn = dots[:, 0], dots[:, 1] - dots[:, 0], dots[:, 2] - dots[:, 0]
    q = np.zeros((len(az), 3, 3))
    q[:, 0, 0] = az * an
    q[:, 0, 1] = az * dcn + dcz * an
    q[:, 0, 2] = dcz * dcn
    q[:, 1, 0] = az * dbn + dbz * an
    q[:, 1, 1] = dbz * dcn + dcz * dbn
    q[:, 2, 0] = dbz * dbn
    slabs = region_slabs(z[:, 0], z[:, 1], z[:, 2])
    return -area * integrate_poly_slabs(q, slabs)


def _trinomial_table(sh):
    t = np.zeros((sh + 1, sh + 1))
    for k in range(sh + 1):
        for l in range(sh - k + 1):
            t[l, k] = comb(sh, k) * comb(sh - k, l)
    return t


def phong_factor_batch(points, mirrors, light, sh, chunk=4096):
    _check_shininess(sh)
    points = np.asarray(points, dtype=np.float64)
    mirrors = np.asarray(mirrors, dtype=np.float64)
    table = _trinomial_table(sh)
    idx = np.arange(sh + 1)
    l_pow, k_pow = np.meshgrid(idx, idx, indexing="ij")
    a_pow = np.clip(sh - l_pow - k_pow, 0, None)
    mask = (l_pow + k_pow) <= sh
    out = np.empty(len(points))
    for start in range(0, len(points), chunk):
        sl = slice(start, start + chunk)
        z, dots, area = _batch_local(points[sl], mirrors[sl], light)
        az, dbz, dcz = z[:, 0], z[:, 1] - z[:, 0], z[:, 2] - z[:, 0]
        a0, a1, a2 = dots[:, 0], dots[:, 1] - dots[:, 0], dots[:, 2] - dots[:, 0]
        trin = np.where(
            mask,
            table
            * np.power(az[:, None, None], a_pow)
            * np.power(dbz[:, None, None], l_pow)
            * np.power(dcz[:, None, None], k_pow),
            0.0,
        )
        q = np.zeros((len(az), sh + 2, sh + 2))
        q[:, : sh + 1, : sh + 1] += a0[:, None, None] * trin
        q[:, 1:, : sh + 1] += a1[:, None, None] * trin
        q[:, : sh + 1, 1:] += a2[:, None, None] * trin
        slabs = region_slabs(z[:, 0], z[:, 1], z[:, 2])
        out[sl] = -area * integrate_poly_slabs(q, slabs)
    return out


def shade_lights_batch(points, normals, views, lights, mat):
    """Closed-form RGB radiance of every point from a list of area lights."""
    points = np.asarray(points, dtype=np.float64)
    rgb = np.zeros((len(points), 3))
    mirrors = geometry.reflect(views, normals) if mat.is_specular else None
    for light in lights:
        if mat.is_diffuse:
            g = lambert_factor_batch(points, normals, light)
            rgb += np.maximum(g[:, None] * (mat.kd * light.intensity), 0.0)
        if mat.is_specular:
            g = phong_factor_batch(points, mirrors, light, mat.sh)
            rgb += np.maximum(g[:, None] * (mat.ks * light.intensity), 0.0)
    return rgb
