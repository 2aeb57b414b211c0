"""Monte Carlo reference estimator for the direct-lighting integral.

Samples are uniform in the light's (u, v) parameter square, so the
estimator of a light is ``area * mean(f(x(u, v)))`` with ``x`` the vector
from the shaded point to the sample.  Two integrands are supported:

* ``exact``: ``max(0, x.n) * max(0, -x.N_A) / r**4`` for the diffuse lobe and
  ``max(0, x.R)**sh * max(0, -x.N_A) / r**(sh + 3)`` for the specular lobe;
* ``approximated``: the same numerators over the constant powers of the
  squared centroid distance ``d_p``, which is what the closed forms integrate.

Every (pixel, light, batch) triple gets its own Philox stream keyed by
``SeedSequence([seed, pixel, light, batch])``, so results do not depend on
evaluation order or chunking.
"""

from dataclasses import dataclass
from math import isqrt

import numpy as np

from . import geometry
from .arealight import Material, RectAreaLight
from .dct import reconstruct
from .envlight import EnvCubemap
from .errors import InvalidInputError

MODES = ("exact", "approximated")
_CHUNK = 1 << 18  # samples x points evaluated at once


@dataclass(frozen=True)
class McConfig:
    samples_per_light: int = 1000
    seed: int = 0
    integrand_mode: str = "exact"
    stratified: bool = True

    def __post_init__(self):
        if int(self.samples_per_light) < 1:
            raise InvalidInputError("samples_per_light must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInputError("seed must fit in an unsigned 64-bit integer")
        if self.integrand_mode not in MODES:
            raise InvalidInputError(f"integrand_mode must be one of {MODES}")


def make_rng(seed, pixel=0, light=0, batch=0):
    ss = np.random.SeedSequence([int(seed), int(pixel), int(light), int(batch)])
    return np.random.Generator(np.random.Philox(ss))


def sample_uv(rng, n, stratified=True):
    """``n`` points in the unit square; jittered on an ``nx x ny`` grid when stratified."""
    if not stratified:
        return rng.random((n, 2))
    nx = isqrt(n)
    ny = n // nx
    jitter = rng.random((nx * ny, 2))
    i, j = np.divmod(np.arange(nx * ny), ny)
    grid = np.column_stack([(i + jitter[:, 0]) / nx, (j + jitter[:, 1]) / ny])
    rest = n - nx * ny
    if rest:
        grid = np.vstack([grid, rng.random((rest, 2))])
    return grid


def _lobes(x, normals, mirrors, n_a, d2, mat, mode):
    """Diffuse and specular integrand values for sample vectors ``x`` (P, S, 3)."""
    emit = np.maximum(-(x @ n_a), 0.0)
    r2 = np.einsum("psk,psk->ps", x, x) if mode == "exact" else d2[:, None]
    diffuse = specular = None
    if mat.is_diffuse:
        cos_n = np.maximum(np.einsum("psk,pk->ps", x, normals), 0.0)
        diffuse = cos_n * emit / (r2 * r2)
    if mat.is_specular:
        cos_r = np.maximum(np.einsum("psk,pk->ps", x, mirrors), 0.0)
        specular = cos_r**mat.sh * emit / r2 ** ((mat.sh + 3) / 2.0)
    return diffuse, specular


def _light_estimate(points, normals, mirrors, light, uv, mat, mode, radiance=None):
    """Mean RGB estimate over the samples ``uv`` (P, S, 2) of one rectangle."""
    d2 = np.sum(np.square(light.centroid - points), axis=-1)
    total = np.zeros((len(points), 3))
    step = max(1, _CHUNK // max(1, len(points)))
    count = uv.shape[1]
    for start in range(0, count, step):
        u = uv[:, start : start + step, 0]
        v = uv[:, start : start + step, 1]
        x = (
            light.a
            + u[..., None] * (light.b - light.a)
            + v[..., None] * (light.c - light.a)
            - points[:, None, :]
        )
        diffuse, specular = _lobes(x, normals, mirrors, light.normal, d2, mat, mode)
        weight = np.zeros(u.shape + (3,))
        if diffuse is not None:
            weight += diffuse[..., None] * mat.kd
        if specular is not None:
            weight += specular[..., None] * mat.ks
        if radiance is None:
            total += weight.sum(axis=1) * light.intensity
        else:
            total += np.einsum("psc,psc->pc", weight, radiance(u, v))
    return total * (light.area / count)


def _sources(source):
    """Rectangles and optional per-sample radiance functions of a light or environment."""
    if isinstance(source, RectAreaLight):
        return [(source, None)]
    if isinstance(source, EnvCubemap):
        out = []
        for k, face in enumerate(source.faces):
            out.append((source.face_light(k), lambda u, v, f=face: reconstruct(f, u, v)))
        return out
    if isinstance(source, (list, tuple)):
        return [item for s in source for item in _sources(s)]
    raise InvalidInputError(f"unsupported light source {type(source).__name__}")


def mc_shade_batch(points, normals, views, source, mat, cfg, pixel_ids=None, batch=0):
    """Estimate RGB radiance for many points; ``pixel_ids`` key the RNG streams."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    normals = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
    views = np.asarray(views, dtype=np.float64).reshape(-1, 3)
    if pixel_ids is None:
        pixel_ids = np.arange(len(points))
    mirrors = geometry.reflect(views, normals) if mat.is_specular else None
    n = int(cfg.samples_per_light)
    out = np.zeros((len(points), 3))
    for index, (light, radiance) in enumerate(_sources(source)):
        # environment cubes are centred on each point, i.e. on the origin in relative terms
        if radiance is not None:
            rel_points = np.zeros_like(points)
        else:
            rel_points = points
        if np.any(np.sum(np.square(light.centroid - rel_points), axis=-1) <= 1e-12):
            raise InvalidInputError("shading point coincides with the light")
        uv = np.empty((len(points), n, 2))
        for k, pid in enumerate(pixel_ids):
            uv[k] = sample_uv(make_rng(cfg.seed, pid, index, batch), n, cfg.stratified)
        # environments light the diffuse lobe only, like the closed form
        lobe_mat = mat if radiance is None else Material(mat.kd, 0.0, 1)
        est = _light_estimate(rel_points, normals, mirrors, light, uv, lobe_mat, cfg.integrand_mode, radiance)
        out += np.maximum(est, 0.0)
    return out


def mc_shade(p, n, view, source, mat, cfg, pixel=0, batch=0):
    """Single-point estimate; for environments the cube is centred at ``p``."""
    p = geometry.vec3(p)
    n = geometry.vec3(n)
    view = geometry.vec3(view) if view is not None else -n
    return mc_shade_batch(p[None], n[None], view[None], source, mat, cfg, [pixel], batch)[0]


def mc_variance(p, n, view, source, mat, cfg, batches=8):
    """Per-channel sample variance of the estimate across independent batches."""
    if batches < 2:
        raise InvalidInputError("mc_variance needs at least two batches")
    runs = np.array([mc_shade(p, n, view, source, mat, cfg, batch=b) for b in range(batches)])
    return runs.var(axis=0, ddof=1)

