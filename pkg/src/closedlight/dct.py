"""DCT representation of cubemap face images.

A face of ``N`` rows and ``M`` columns is stored as orthonormal type-II DCT
coefficients ``C[i, j]`` per channel.  The continuous pixel model is

    I(u, v) = sum_ij alpha_i alpha_j C_ij cos(k_i0 u + k_i1) cos(k_j0 v + k_j1)

with ``k_i0 = pi i (N - 1) / N`` and ``k_i1 = pi i / (2 N)`` (likewise for j
with M).  Row ``m`` sits at ``u = m / (N - 1)`` and column ``n`` at
``v = n / (M - 1)``; there the phase equals the DCT-II sample phase
``pi i (2 m + 1) / (2 N)``, so full-cutoff reconstruction returns the pixels.

Coefficient file layout (all little-endian)::

    b"DCTC"  u32 version  u32 face_count
    per face:  u32 M, N, channels, cutoff_i, cutoff_j
    per face, per channel: cutoff_i x cutoff_j float64, row-major

Only the kept low-frequency block is written.
"""

import struct
from dataclasses import dataclass

import numpy as np
from scipy import fft

from .errors import FormatError, InvalidInputError

MAGIC = b"DCTC"
VERSION = 1
_HEADER = struct.Struct("<4sII")
_FACE = struct.Struct("<IIIII")


@dataclass(frozen=True, eq=False)
class FaceImage:
    pixels: np.ndarray  # (N, M, 3), linear and non-negative

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim == 2:
            px = np.repeat(px[..., None], 3, axis=2)
        if px.ndim != 3 or px.shape[0] < 2 or px.shape[1] < 2:
            raise InvalidInputError("face images need at least 2x2 pixels")
        if not np.all(np.isfinite(px)) or np.any(px < 0):
            raise InvalidInputError("face pixels must be finite and non-negative")
        object.__setattr__(self, "pixels", px)

    @property
    def N(self):
        return self.pixels.shape[0]

    @property
    def M(self):
        return self.pixels.shape[1]


def dct_alpha(count):
    alpha = np.full(count, np.sqrt(2.0 / count))
    alpha[0] = 1.0 / np.sqrt(count)
    return alpha


def dct_phase(count):
    """Frequencies ``k_0`` and phases ``k_1`` for an axis of ``count`` samples."""
    idx = np.arange(count)
    return np.pi * idx * (count - 1) / count, np.pi * idx / (2.0 * count)


@dataclass(frozen=True, eq=False)
class DctFace:
    coeffs: np.ndarray  # (channels, N, M)
    cutoff: tuple = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.ndim != 3:
            raise InvalidInputError("coefficients must be shaped (channels, N, M)")
        object.__setattr__(self, "coeffs", c)
        cut = (c.shape[1], c.shape[2]) if self.cutoff is None else tuple(int(x) for x in self.cutoff)
        _check_cutoff(c.shape[1], c.shape[2], *cut)
        object.__setattr__(self, "cutoff", cut)

    @property
    def N(self):
        return self.coeffs.shape[1]

    @property
    def M(self):
        return self.coeffs.shape[2]

    @property
    def channels(self):
        return self.coeffs.shape[0]

    @property
    def alpha_i(self):
        return dct_alpha(self.N)

    @property
    def alpha_j(self):
        return dct_alpha(self.M)

    @property
    def k_i(self):
        return dct_phase(self.N)

    @property
    def k_j(self):
        return dct_phase(self.M)

    @property
    def dc(self):
        """Face mean per channel, ``C_00 / sqrt(M N)``."""
        return self.coeffs[:, 0, 0] / np.sqrt(self.M * self.N)


def _check_cutoff(n, m, cutoff_i, cutoff_j):
    if not (1 <= cutoff_i <= n and 1 <= cutoff_j <= m):
        raise InvalidInputError(f"cutoff ({cutoff_i}, {cutoff_j}) outside [1, {n}] x [1, {m}]")


def dct_forward(img):
    if not isinstance(img, FaceImage):
        img = FaceImage(img)
    coeffs = fft.dctn(img.pixels, type=2, norm="ortho", axes=(0, 1))
    return DctFace(np.moveaxis(coeffs, 2, 0))


def reconstruct(face, u, v, cutoff_i=None, cutoff_j=None):
    """Evaluate ``I(u, v)`` at arrays of parameters; returns ``(..., channels)``."""
    ci = face.N if cutoff_i is None else cutoff_i
    cj = face.M if cutoff_j is None else cutoff_j
    _check_cutoff(face.N, face.M, ci, cj)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    ki0, ki1 = dct_phase(face.N)
    kj0, kj1 = dct_phase(face.M)
    basis_u = face.alpha_i[:ci] * np.cos(u[..., None] * ki0[:ci] + ki1[:ci])
    basis_v = face.alpha_j[:cj] * np.cos(v[..., None] * kj0[:cj] + kj1[:cj])
    block = face.coeffs[:, :ci, :cj]
    # contract the u axis with one matrix product, then the v axis per sample
    partial = basis_u @ block.transpose(1, 0, 2).reshape(ci, -1)
    partial = partial.reshape(basis_u.shape[:-1] + (face.channels, cj))
    return np.einsum("...cj,...j->...c", partial, basis_v)


def reconstruct_pixel(face, u, v, cutoff_i=None, cutoff_j=None):
    return reconstruct(face, float(u), float(v), cutoff_i, cutoff_j)


def pixel_params(n_rows, n_cols):
    """Parameters ``(u, v)`` of every pixel centre, each shaped ``(N, M)``."""
    u = np.arange(n_rows) / (n_rows - 1)
    v = np.arange(n_cols) / (n_cols - 1)
    return np.meshgrid(u, v, indexing="ij")


def reconstruct_image(face, cutoff_i=None, cutoff_j=None):
    u, v = pixel_params(face.N, face.M)
    return reconstruct(face, u, v, cutoff_i, cutoff_j)


def truncate(face, cutoff_i, cutoff_j):
    _check_cutoff(face.N, face.M, cutoff_i, cutoff_j)
    ci, cj = min(cutoff_i, face.cutoff[0]), min(cutoff_j, face.cutoff[1])
    kept = np.zeros_like(face.coeffs)
    kept[:, :ci, :cj] = face.coeffs[:, :ci, :cj]
    return DctFace(kept, (ci, cj))


def save_coeffs(faces, path):
    faces = list(faces)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(faces)))
        for face in faces:
            fh.write(_FACE.pack(face.M, face.N, face.channels, *face.cutoff))
        for face in faces:
            ci, cj = face.cutoff
            for ch in range(face.channels):
                fh.write(np.ascontiguousarray(face.coeffs[ch, :ci, :cj], dtype="<f8").tobytes())


def load_coeffs(path, expected_faces=6):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: file too short for a coefficient header")
    magic, version, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if expected_faces is not None and count != expected_faces:
        raise FormatError(f"{path}: expected {expected_faces} faces, found {count}")
    offset = _HEADER.size
    if len(data) < offset + count * _FACE.size:
        raise FormatError(f"{path}: truncated face table")
    headers = []
    for _ in range(count):
        m, n, channels, ci, cj = _FACE.unpack_from(data, offset)
        offset += _FACE.size
        if m < 2 or n < 2 or channels < 1 or not (1 <= ci <= n and 1 <= cj <= m):
            raise FormatError(f"{path}: inconsistent face header {(m, n, channels, ci, cj)}")
        headers.append((m, n, channels, ci, cj))
    expected = offset + sum(8 * ch * ci * cj for _, _, ch, ci, cj in headers)
    if len(data) != expected:
        raise FormatError(f"{path}: size mismatch, {len(data)} bytes but header implies {expected}")
    faces = []
    for m, n, channels, ci, cj in headers:
        coeffs = np.zeros((channels, n, m))
        for ch in range(channels):
            block = np.frombuffer(data, dtype="<f8", count=ci * cj, offset=offset)
            coeffs[ch, :ci, :cj] = block.reshape(ci, cj)
            offset += 8 * ci * cj
        faces.append(DctFace(coeffs, (ci, cj)))
    return faces
