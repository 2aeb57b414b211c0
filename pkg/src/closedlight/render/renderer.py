"""Ray-cast rendering with closed-form or Monte Carlo shading."""

from dataclasses import dataclass, field

import numpy as np

from ..envlight import env_radiance
from ..errors import InvalidInputError
from ..montecarlo import McConfig, mc_shade_batch
from ..shading import shade_dispatch_batch
from .raycast import build_triangle_set, cast

RENDER_MODES = ("closed_form", "mc")


@dataclass(frozen=True, eq=False)
class GBuffer:
    """Per-pixel surface data of the primary hits (flattened row-major)."""

    width: int
    height: int
    hit: np.ndarray  # (W*H,) bool
    points: np.ndarray  # (W*H, 3)
    normals: np.ndarray  # (W*H, 3), facing the camera
    views: np.ndarray  # (W*H, 3), camera ray directions
    material: np.ndarray  # (W*H,) mesh index, -1 on miss


def build_gbuffer(scene):
    cam = scene.camera
    origins, dirs = cam.rays()
    tset = build_triangle_set([m.mesh for m in scene.meshes])
    hits = cast(tset, origins, dirs)
    n = len(dirs)
    points = np.zeros((n, 3))
    normals = np.zeros((n, 3))
    material = np.full(n, -1)
    h = hits.hit
    if np.any(h):
        tri = tset.tri[hits.tri[h]]
        nrm = tset.nrm[hits.tri[h]]
        b1, b2 = hits.b1[h], hits.b2[h]
        b0 = 1.0 - b1 - b2
        points[h] = b0[:, None] * tri[:, 0] + b1[:, None] * tri[:, 1] + b2[:, None] * tri[:, 2]
        sn = b0[:, None] * nrm[:, 0] + b1[:, None] * nrm[:, 1] + b2[:, None] * nrm[:, 2]
        sn /= np.linalg.norm(sn, axis=1)[:, None]
        flip = np.einsum("pk,pk->p", sn, dirs[h]) > 0
        sn[flip] *= -1.0
        normals[h] = sn
        material[h] = tset.material[hits.tri[h]]
    return GBuffer(cam.width, cam.height, h, points, normals, dirs, material)


@dataclass(eq=False)
class RenderJob:
    scene: object
    mode: str = "closed_form"
    mc: McConfig = field(default_factory=McConfig)
    output: str = None
    gbuffer: GBuffer = None  # reuse a cached G-buffer when given

    def __post_init__(self):
        if self.mode not in RENDER_MODES:
            raise InvalidInputError(f"render mode must be one of {RENDER_MODES}")


def shade_gbuffer(scene, gb, mode="closed_form", mc=None):
    """Linear RGB image ``(H, W, 3)`` for a prepared G-buffer."""
    out = np.zeros((gb.width * gb.height, 3))
    env = scene.environment
    if env is not None and np.any(~gb.hit):
        out[~gb.hit] = env_radiance(env, gb.views[~gb.hit])
    sources = list(scene.lights) + ([env] if env is not None else [])
    for k, inst in enumerate(scene.meshes):
        sel = np.nonzero(gb.material == k)[0]
        if len(sel) == 0:
            continue
        p, n, v = gb.points[sel], gb.normals[sel], gb.views[sel]
        if mode == "closed_form":
            out[sel] = shade_dispatch_batch(p, n, v, scene.lights, env, inst.material, scene.env_mode)
        else:
            out[sel] = mc_shade_batch(p, n, v, sources, inst.material, mc or McConfig(), pixel_ids=sel)
    return out.reshape(gb.height, gb.width, 3)


def render(job):
    scene = job.scene.validate()
    gb = job.gbuffer if job.gbuffer is not None else build_gbuffer(scene)
    img = shade_gbuffer(scene, gb, job.mode, job.mc)
    if job.output:
        from ..imageio import write_image

        write_image(job.output, img, scene.exposure)
    return img


def object_mask(gb):
    return gb.hit.reshape(gb.height, gb.width)
