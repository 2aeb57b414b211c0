"""Per-point dispatch over lights, environment and material lobes.

Each light contributes its diffuse and specular terms separately, each
clamped at zero, so a light behind the surface adds nothing instead of
cancelling a light in front.
"""

import numpy as np

from . import geometry
from .arealight import shade_lambert_const, shade_lights_batch, shade_phong_const
from .envlight import shade_env_batch, shade_lambert_env, shade_lambert_env_dc
from .errors import InvalidInputError


def env_cutoff(env, mode):
    """Resolve an environment shading mode to ``(cutoff_i, cutoff_j)``.

    ``mode`` is ``"dc"``, ``"full"`` or an explicit pair.
    """
    if mode == "dc":
        return 1, 1
    if mode in (None, "full"):
        return env.N, env.M
    try:
        ci, cj = (int(x) for x in mode)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad environment mode {mode!r}") from exc
    return ci, cj


def shade_dispatch(p, n, view, lights, env, mat, mode="full"):
    """Closed-form RGB radiance at one point."""
    lights = list(lights or [])
    if not lights and env is None:
        raise InvalidInputError("no light source configured")
    rgb = np.zeros(3)
    for light in lights:
        if mat.is_diffuse:
            rgb += shade_lambert_const(p, n, light, mat)
        if mat.is_specular:
            rgb += shade_phong_const(p, n, view, light, mat)
    if env is not None and mat.is_diffuse:
        ci, cj = env_cutoff(env, mode)
        if (ci, cj) == (1, 1):
            rgb += shade_lambert_env_dc(p, n, env, mat)
        else:
            rgb += shade_lambert_env(p, n, env, mat, ci, cj)
    return rgb


def shade_dispatch_batch(points, normals, views, lights, env, mat, mode="full"):
    """Vectorised :func:`shade_dispatch` for ``(P, 3)`` arrays."""
    lights = list(lights or [])
    if not lights and env is None:
        raise InvalidInputError("no light source configured")
    points = np.asarray(points, dtype=np.float64)
    rgb = np.zeros((len(points), 3))
    if len(points) == 0:
        return rgb
    if lights:
        rgb += shade_lights_batch(points, normals, geometry.normalize(views), lights, mat)
    if env is not None and mat.is_diffuse:
        ci, cj = env_cutoff(env, mode)
        rgb += shade_env_batch(normals, env, mat, ci, cj)
    return rgb
