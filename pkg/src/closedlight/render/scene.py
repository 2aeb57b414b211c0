"""Scene description and its line-oriented text format.

One record per line, ``#`` starts a comment, values are ``key=value`` pairs
with comma-separated vectors::

    camera pos=0,0,6 look=0,0,0 up=0,1,0 fov=35 width=128 height=128
    light a=-1,3,-1 b=1,3,-1 c=-1,3,1 intensity=1,0.8,0.6   # normal= optional
    mesh path=bunny.obj kd=0.8,0.8,0.8 ks=0,0,0 sh=1 scale=1 translate=0,0,0
    mesh shape=icosphere subdivisions=3 radius=1 kd=0.7
    environment path=env.dctc half_extent=1 cutoff=dc        # or full, or I,J
    exposure 1.5

``environment path=`` accepts a DCTC coefficient file or a directory
holding ``posx negx posy negy posz negz`` images (PPM or PFM).  Relative
paths are resolved against the scene file's directory.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .. import geometry
from ..arealight import Material, RectAreaLight
from ..dct import dct_forward, load_coeffs
from ..envlight import FACE_NAMES, EnvCubemap
from ..errors import ClosedLightError, InvalidInputError, ParseError
from ..imageio import read_image
from .mesh import icosphere, load_obj, quad


@dataclass(frozen=True)
class Camera:
    pos: tuple = (0.0, 0.0, 5.0)
    look: tuple = (0.0, 0.0, 0.0)
    up: tuple = (0.0, 1.0, 0.0)
    fov: float = 40.0
    width: int = 128
    height: int = 128

    def __post_init__(self):
        if not 0 < self.fov < 180:
            raise InvalidInputError("camera fov must lie in (0, 180) degrees")
        if self.width < 1 or self.height < 1:
            raise InvalidInputError("image size must be at least 1x1")

    def rays(self):
        """Origins and unit directions of the pixel-centre rays, row-major from the top."""
        pos = np.asarray(self.pos, dtype=np.float64)
        forward = geometry.normalize(np.asarray(self.look, dtype=np.float64) - pos)
        right = np.cross(forward, np.asarray(self.up, dtype=np.float64))
        right = geometry.normalize(right)
        up = np.cross(right, forward)
        half = np.tan(np.radians(self.fov) / 2.0)
        aspect = self.width / self.height
        xs = ((np.arange(self.width) + 0.5) / self.width * 2.0 - 1.0) * half * aspect
        ys = (1.0 - (np.arange(self.height) + 0.5) / self.height * 2.0) * half
        gx, gy = np.meshgrid(xs, ys)
        dirs = forward + gx[..., None] * right + gy[..., None] * up
        dirs = dirs.reshape(-1, 3)
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        return np.broadcast_to(pos, dirs.shape).copy(), dirs


@dataclass(frozen=True, eq=False)
class MeshInstance:
    mesh: object
    material: Material


@dataclass(eq=False)
class Scene:
    camera: Camera = field(default_factory=Camera)
    meshes: list = field(default_factory=list)
    lights: list = field(default_factory=list)
    environment: EnvCubemap = None
    env_mode: object = "full"  # "dc", "full" or (cutoff_i, cutoff_j)
    exposure: float = 1.0

    def validate(self):
        if not self.lights and self.environment is None:
            raise InvalidInputError("scene needs at least one light or an environment")
        if not (np.isfinite(self.exposure) and self.exposure > 0):
            raise InvalidInputError("exposure must be positive")
        return self


def _vec(text, n=3):
    vals = [float(x) for x in text.split(",")]
    if len(vals) == 1 and n == 3:
        vals = vals * 3
    if len(vals) != n:
        raise ValueError(f"expected {n} comma-separated numbers")
    return tuple(vals)


def _pairs(tokens, path, line_no):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}", path, line_no)
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def _take(kv, allowed, path, line_no):
    extra = set(kv) - set(allowed)
    if extra:
        raise ParseError(f"unknown keys {sorted(extra)}", path, line_no)


def load_environment(path, half_extent=1.0):
    """Cubemap from a DCTC file or a directory of six face images."""
    if os.path.isdir(path):
        faces = []
        for name in FACE_NAMES:
            found = [f for f in (f"{name}.pfm", f"{name}.ppm") if os.path.exists(os.path.join(path, f))]
            if not found:
                raise InvalidInputError(f"{path}: missing face image {name}.ppm/.pfm")
            faces.append(dct_forward(read_image(os.path.join(path, found[0]))))
        return EnvCubemap(tuple(faces), half_extent)
    return EnvCubemap(tuple(load_coeffs(path)), half_extent)


def _env_mode(text):
    if text in ("dc", "full"):
        return text
    return tuple(int(x) for x in _vec(text, 2))


def parse_scene(lines, path="<scene>"):
    base = os.path.dirname(os.path.abspath(path)) if path != "<scene>" else os.getcwd()
    scene = Scene()
    for line_no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *rest = line.split()
        try:
            if tag == "exposure":
                if len(rest) != 1:
                    raise ValueError("exposure takes one number")
                scene.exposure = float(rest[0])
                continue
            kv = _pairs(rest, path, line_no)
            if tag == "camera":
                _take(kv, ("pos", "look", "up", "fov", "width", "height"), path, line_no)
                args = {k: _vec(kv[k]) for k in ("pos", "look", "up") if k in kv}
                if "fov" in kv:
                    args["fov"] = float(kv["fov"])
                for k in ("width", "height"):
                    if k in kv:
                        args[k] = int(kv[k])
                scene.camera = Camera(**args)
            elif tag == "light":
                _take(kv, ("a", "b", "c", "normal", "intensity"), path, line_no)
                scene.lights.append(
                    RectAreaLight(
                        _vec(kv["a"]), _vec(kv["b"]), _vec(kv["c"]),
                        _vec(kv["normal"]) if "normal" in kv else None,
                        _vec(kv.get("intensity", "1")),
                    )
                )
            elif tag == "mesh":
                keys = ("path", "shape", "subdivisions", "radius", "size", "kd", "ks", "sh", "scale", "translate")
                _take(kv, keys, path, line_no)
                if "path" in kv:
                    mesh = load_obj(os.path.join(base, kv["path"]))
                elif kv.get("shape") == "icosphere":
                    mesh = icosphere(int(kv.get("subdivisions", 3)), float(kv.get("radius", 1.0)))
                elif kv.get("shape") == "quad":
                    mesh = quad(float(kv.get("size", 1.0)))
                else:
                    raise ValueError("mesh needs path= or shape=icosphere|quad")
                mesh = mesh.transformed(float(kv.get("scale", 1.0)), _vec(kv.get("translate", "0")))
                mat = Material(_vec(kv.get("kd", "0.8")), _vec(kv.get("ks", "0")), int(kv.get("sh", 1)))
                scene.meshes.append(MeshInstance(mesh, mat))
            elif tag == "environment":
                _take(kv, ("path", "half_extent", "cutoff"), path, line_no)
                scene.environment = load_environment(
                    os.path.join(base, kv["path"]), float(kv.get("half_extent", 1.0))
                )
                scene.env_mode = _env_mode(kv.get("cutoff", "full"))
            else:
                raise ParseError(f"unknown record {tag!r}", path, line_no)
        except ParseError:
            raise
        except (KeyError, ValueError, ClosedLightError) as exc:
            msg = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
            raise ParseError(msg, path, line_no) from exc
    return scene.validate()


def load_scene(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scene(fh, str(path))
