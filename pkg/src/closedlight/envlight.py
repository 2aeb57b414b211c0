"""Environment lighting from a DCT-compressed cubemap.

Each cube face is a non-constant rectangular light whose radiance is the DCT
pixel model of :mod:`closedlight.dct`.  The cube is centred on the shaded
point with half-extent ``s`` so every point sees the same distant
environment; the squared centroid distance of every face is ``s**2``.

Face orientation: for the face on world axis ``k`` (outward direction
``±e_k``) the image rows run along ``U = e_{k+1}`` and the columns along
``V = e_{k+2}`` (indices mod 3), for both signs.  Corner ``a`` sits at
``p + s (d - U - V)``, ``b = a + 2 s U`` and ``c = a + 2 s V``; the emitting
normal points inward.
"""

from dataclasses import dataclass

import numpy as np

from .analytic import integrate_poly_cos2_over_region
from .arealight import RectAreaLight, compute_l_coeffs, lambert_factor, lambert_factor_batch
from .dct import DctFace, dct_forward, reconstruct
from .errors import InvalidInputError
from .geometry import build_frame, to_local, to_local_dir, vec3
from .region import classify_region

FACE_IDS = ("+X", "-X", "+Y", "-Y", "+Z", "-Z")
FACE_NAMES = ("posx", "negx", "posy", "negy", "posz", "negz")


@dataclass(frozen=True)
class FaceGeometry:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    n_a: np.ndarray


def face_axes(face_id):
    """Outward direction and the (U, V) image axes of a face."""
    if face_id not in FACE_IDS:
        raise InvalidInputError(f"unknown face {face_id!r}")
    k = "XYZ".index(face_id[1])
    eye = np.eye(3)
    d = eye[k] if face_id[0] == "+" else -eye[k]
    return d, eye[(k + 1) % 3], eye[(k + 2) % 3]


def face_geometry(face_id, center, s):
    if not s > 0:
        raise InvalidInputError("cube half-extent must be positive")
    d, U, V = face_axes(face_id)
    center = vec3(center)
    a = center + s * (d - U - V)
    return FaceGeometry(a, a + 2 * s * U, a + 2 * s * V, -d)


@dataclass(frozen=True, eq=False)
class EnvCubemap:
    faces: tuple
    half_extent: float = 1.0

    def __post_init__(self):
        faces = tuple(self.faces)
        if len(faces) != 6:
            raise InvalidInputError("a cubemap needs exactly six faces")
        faces = tuple(f if isinstance(f, DctFace) else dct_forward(f) for f in faces)
        shapes = {(f.N, f.M, f.channels) for f in faces}
        if len(shapes) != 1:
            raise InvalidInputError("all cubemap faces must share size and channel count")
        if not (np.isfinite(self.half_extent) and self.half_extent > 0):
            raise InvalidInputError("half_extent must be finite and positive")
        object.__setattr__(self, "faces", faces)

    @classmethod
    def from_images(cls, images, half_extent=1.0):
        return cls(tuple(dct_forward(img) for img in images), half_extent)

    @property
    def N(self):
        return self.faces[0].N

    @property
    def M(self):
        return self.faces[0].M

    def face_light(self, index, center=np.zeros(3), intensity=1.0):
        g = face_geometry(FACE_IDS[index], center, self.half_extent)
        return RectAreaLight(g.a, g.b, g.c, g.n_a, intensity)


def _resolve_cutoff(env, cutoff_i, cutoff_j):
    ci = env.N if cutoff_i is None else int(cutoff_i)
    cj = env.M if cutoff_j is None else int(cutoff_j)
    if not (1 <= ci <= env.N and 1 <= cj <= env.M):
        raise InvalidInputError(f"cutoff ({ci}, {cj}) outside [1, {env.N}] x [1, {env.M}]")
    return ci, cj


def face_kernel(p, n, env, index, cutoff_i, cutoff_j):
    """Closed-form ``Im_ij`` table of one face times ``-area / d**2``."""
    p = vec3(p)
    light = env.face_light(index, p)
    scale = 1.0 / env.half_extent
    frame = build_frame(n)
    a, b, c = (to_local(frame, p, x) * scale for x in light.corners)
    coeffs = compute_l_coeffs(a, b, c, to_local_dir(frame, light.normal))
    region = classify_region(a[2], b[2], c[2])
    face = env.faces[index]
    ki0, ki1 = face.k_i
    kj0, kj1 = face.k_j
    table = integrate_poly_cos2_over_region(
        coeffs,
        ki0[:cutoff_i, None], ki1[:cutoff_i, None],
        kj0[None, :cutoff_j], kj1[None, :cutoff_j],
        region,
    )
    return -light.area * scale * scale * table


def shade_lambert_env(p, n, env, mat, cutoff_i=None, cutoff_j=None):
    ci, cj = _resolve_cutoff(env, cutoff_i, cutoff_j)
    n = vec3(n)
    total = np.zeros(3)
    for index, face in enumerate(env.faces):
        kernel = face_kernel(p, n, env, index, ci, cj)
        weights = np.outer(face.alpha_i[:ci], face.alpha_j[:cj]) * kernel
        total += np.einsum("cij,ij->c", face.coeffs[:, :ci, :cj], weights)
    return np.maximum(mat.kd * total, 0.0)


def shade_lambert_env_dc(p, n, env, mat):
    """One coefficient per face: each face becomes a constant light of its mean."""
    p = vec3(p)
    total = np.zeros(3)
    for index, face in enumerate(env.faces):
        total += face.dc * lambert_factor(p, n, env.face_light(index, p))
    return np.maximum(mat.kd * total, 0.0)


def shade_env_batch(normals, env, mat, cutoff_i=None, cutoff_j=None):
    """Environment radiance for many normals (the result is position independent)."""
    normals = np.asarray(normals, dtype=np.float64)
    ci, cj = _resolve_cutoff(env, cutoff_i, cutoff_j)
    out = np.zeros((len(normals), 3))
    if (ci, cj) == (1, 1):
        origin = np.zeros((len(normals), 3))
        for index, face in enumerate(env.faces):
            g = lambert_factor_batch(origin, normals, env.face_light(index))
            out += g[:, None] * face.dc
        return np.maximum(out * mat.kd, 0.0)
    for k, n in enumerate(normals):
        out[k] = shade_lambert_env(np.zeros(3), n, env, mat, ci, cj)
    return out


def direction_to_face(directions):
    """Face index and (u, v) where each direction pierces the unit cube."""
    d = np.asarray(directions, dtype=np.float64)
    axis = np.argmax(np.abs(d), axis=-1)
    major = np.take_along_axis(d, axis[..., None], axis=-1)[..., 0]
    index = 2 * axis + (major < 0)
    point = d / np.abs(major)[..., None]
    u_axis = (axis + 1) % 3
    v_axis = (axis + 2) % 3
    u = 0.5 * (np.take_along_axis(point, u_axis[..., None], axis=-1)[..., 0] + 1.0)
    v = 0.5 * (np.take_along_axis(point, v_axis[..., None], axis=-1)[..., 0] + 1.0)
    return index, u, v


def env_radiance(env, directions, cutoff_i=None, cutoff_j=None):
    """Reconstructed environment colour seen along each direction."""
    ci, cj = _resolve_cutoff(env, cutoff_i, cutoff_j)
    directions = np.asarray(directions, dtype=np.float64)
    index, u, v = direction_to_face(directions)
    out = np.zeros(directions.shape[:-1] + (env.faces[0].channels,))
    for k, face in enumerate(env.faces):
        sel = index == k
        if np.any(sel):
            out[sel] = reconstruct(face, u[sel], v[sel], ci, cj)
    return out
