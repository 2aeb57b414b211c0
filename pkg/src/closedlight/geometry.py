"""Vector helpers and the local shading frame.

Vectors are plain ``float64`` numpy arrays of shape ``(3,)`` (or ``(..., 3)``
for batched points).  A :class:`Frame` is a right-handed orthonormal basis
whose ``n`` axis becomes the local z axis.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


def vec3(x, y=None, z=None):
    if y is None:
        out = np.asarray(x, dtype=np.float64)
        if out.shape != (3,):
            raise InvalidInputError(f"expected a 3-vector, got shape {out.shape}")
        return out
    return np.array([x, y, z], dtype=np.float64)


def norm(v):
    return np.sqrt(np.sum(np.square(v), axis=-1))


def normalize(v):
    v = np.asarray(v, dtype=np.float64)
    length = norm(v)
    if np.any(length == 0.0):
        raise InvalidInputError("cannot normalize a zero-length vector")
    return v / length[..., None] if v.ndim > 1 else v / length


@dataclass(frozen=True)
class Frame:
    t: np.ndarray
    b: np.ndarray
    n: np.ndarray

    @property
    def matrix(self):
        """Rows are the basis vectors, so ``matrix @ d`` maps world to local."""
        return np.stack([self.t, self.b, self.n])


def build_frame(axis):
    """Deterministic frame with ``n = axis``.

    The tangent starts from the world axis least aligned with ``n`` and is
    Gram-Schmidt orthogonalised, so the construction never degenerates.
    """
    n = np.asarray(axis, dtype=np.float64)
    length = float(norm(n))
    if length == 0.0 or not np.isfinite(length):
        raise InvalidInputError("frame axis must be a finite non-zero vector")
    n = n / length
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(n)))] = 1.0
    t = seed - np.dot(seed, n) * n
    t /= norm(t)
    b = np.cross(n, t)
    return Frame(t, b, n)


def to_local(frame, origin, point):
    d = np.asarray(point, dtype=np.float64) - np.asarray(origin, dtype=np.float64)
    return d @ frame.matrix.T


def to_local_dir(frame, direction):
    return np.asarray(direction, dtype=np.float64) @ frame.matrix.T


def to_world_dir(frame, local):
    return np.asarray(local, dtype=np.float64) @ frame.matrix


def reflect(view, normal):
    """Mirror ``view`` (pointing from the eye toward the surface) about ``normal``."""
    view = np.asarray(view, dtype=np.float64)
    normal = np.asarray(normal, dtype=np.float64)
    return view - 2.0 * np.sum(view * normal, axis=-1, keepdims=True) * normal


def random_rotation(rng):
    """Uniformly distributed proper rotation matrix."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
