"""Binary PPM (P6) and PFM image files.

Images in memory are ``float64`` arrays of shape ``(height, width, 3)`` in
linear radiance.  PPM output maps linear values to 8 bits by multiplying by
an exposure scalar, clamping to [0, 1] and rounding half up after scaling by
255.  PFM stores the float values losslessly (as float32).
"""

import numpy as np

from .errors import FormatError


def _tokens(data, count, start):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    out = []
    i = start
    n = len(data)
    while len(out) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not data[j : j + 1].isspace():
            j += 1
        if j == i:
            raise FormatError("truncated image header")
        out.append(data[i:j])
        i = j
    return out, i + 1  # single whitespace byte ends the header


def to_8bit(rgb, exposure=1.0):
    scaled = np.clip(np.asarray(rgb, dtype=np.float64) * exposure, 0.0, 1.0)
    return np.floor(scaled * 255.0 + 0.5).astype(np.uint8)


def write_ppm(path, rgb, exposure=1.0):
    img = to_8bit(rgb, exposure)
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_ppm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] != b"P6":
        raise FormatError(f"{path}: not a binary PPM (P6) file")
    (w, h, maxval), offset = _tokens(data, 3, 2)
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise FormatError(f"{path}: bad PPM header") from exc
    if maxval <= 0 or maxval > 255:
        raise FormatError(f"{path}: only 8-bit PPM files are supported")
    body = data[offset : offset + w * h * 3]
    if len(body) != w * h * 3:
        raise FormatError(f"{path}: truncated pixel data")
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3).astype(np.float64) / maxval


def write_pfm(path, rgb):
    img = np.asarray(rgb, dtype="<f4")
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"PF\n{w} {h}\n-1.0\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img[::-1]).tobytes())


def read_pfm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] not in (b"PF", b"Pf"):
        raise FormatError(f"{path}: not a PFM file")
    channels = 3 if data[:2] == b"PF" else 1
    (w, h, scale), offset = _tokens(data, 3, 2)
    try:
        w, h, scale = int(w), int(h), float(scale)
    except ValueError as exc:
        raise FormatError(f"{path}: bad PFM header") from exc
    dtype = "<f4" if scale < 0 else ">f4"
    count = w * h * channels
    body = data[offset : offset + 4 * count]
    if len(body) != 4 * count:
        raise FormatError(f"{path}: truncated pixel data")
    img = np.frombuffer(body, dtype=dtype).reshape(h, w, channels)[::-1].astype(np.float64)
    if channels == 1:
        img = np.repeat(img, 3, axis=2)
    return img


def read_image(path):
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P6":
        return read_ppm(path)
    if magic in (b"PF", b"Pf"):
        return read_pfm(path)
    raise FormatError(f"{path}: unsupported image format (expected P6 PPM or PFM)")


def write_image(path, rgb, exposure=1.0):
    if str(path).lower().endswith(".pfm"):
        write_pfm(path, np.asarray(rgb) * exposure)
    else:
        write_ppm(path, rgb, exposure)
