"""HSI conversion, PSNR and percentage relative error.

Definitions used everywhere in this package:

* ``I = (R + G + B) / 3``, ``S = 1 - min(R, G, B) / I`` (0 when I = 0) and
  ``H = acos(((R-G) + (R-B)) / (2 sqrt((R-G)^2 + (R-B)(G-B))))`` in degrees,
  replaced by ``360 - H`` when ``B > G`` and set to 0 for grey pixels.
* ``psnr = 10 log10(peak^2 / MSE)``, the peak defaulting to the channel
  maximum of the ground truth image.
* ``rel_error_pct = 100 * sum|a - b| / sum|b|`` with ``b`` the ground truth.

Hue differences are taken on the circle, so 359 and 1 degrees are 2 apart.
"""

import csv

import numpy as np

from .errors import InvalidInputError, UndefinedMetricError

CHANNELS = ("R", "G", "B", "H", "S", "I")
CSV_COLUMNS = ("scene", "ratio_or_cutoff", "channel", "metric", "value")


def rgb_to_hsi(rgb):
    """Convert ``(..., 3)`` linear RGB to ``(..., 3)`` HSI (degrees, [0,1], >= 0)."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.shape[-1] != 3:
        raise InvalidInputError("rgb arrays need a trailing axis of length 3")
    if np.any(rgb < 0) or not np.all(np.isfinite(rgb)):
        raise InvalidInputError("rgb values must be finite and non-negative")
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    i = (r + g + b) / 3.0
    lo = np.minimum(np.minimum(r, g), b)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(i > 0, 1.0 - lo / np.where(i > 0, i, 1.0), 0.0)
        num = 0.5 * ((r - g) + (r - b))
        den = np.sqrt((r - g) ** 2 + (r - b) * (g - b))
        cos_h = np.where(den > 0, num / np.where(den > 0, den, 1.0), 1.0)
    h = np.degrees(np.arccos(np.clip(cos_h, -1.0, 1.0)))
    h = np.where(b > g, 360.0 - h, h)
    h = np.where(den > 0, h, 0.0)
    h = np.where(h >= 360.0, h - 360.0, h)
    return np.stack([h, np.clip(s, 0.0, 1.0), i], axis=-1)


def channel(img, name):
    """One channel of an RGB image, converting to HSI when needed."""
    if name not in CHANNELS:
        raise InvalidInputError(f"channel must be one of {CHANNELS}")
    img = np.asarray(img, dtype=np.float64)
    k = CHANNELS.index(name)
    if k < 3:
        return img[..., k]
    return rgb_to_hsi(img)[..., k - 3]


def _pair(a, b, name, mask):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"image shapes differ: {a.shape} vs {b.shape}")
    ca, cb = channel(a, name), channel(b, name)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        ca, cb = ca[mask], cb[mask]
    diff = ca - cb
    if name == "H":
        diff = (diff + 180.0) % 360.0 - 180.0
    return ca, cb, diff


def mse(a, b, name="R", mask=None):
    return float(np.mean(np.square(_pair(a, b, name, mask)[2])))


def psnr(a, b, name="S", peak=None, mask=None):
    """PSNR of ``a`` against ground truth ``b`` in dB (``inf`` for identical images)."""
    _, cb, diff = _pair(a, b, name, mask)
    if peak is None:
        peak = float(np.max(cb)) if cb.size else 0.0
    err = float(np.mean(np.square(diff)))
    if err == 0.0:
        return float("inf")
    if peak <= 0:
        raise UndefinedMetricError("PSNR peak must be positive")
    return 10.0 * np.log10(peak * peak / err)


def rel_error_pct(a, b, name="S", mask=None):
    """``100 * sum|a - b| / sum|b|`` with ``b`` the ground truth."""
    _, cb, diff = _pair(a, b, name, mask)
    denom = float(np.sum(np.abs(cb)))
    if denom == 0.0:
        raise UndefinedMetricError("relative error is undefined for an all-zero ground truth")
    return 100.0 * float(np.sum(np.abs(diff))) / denom


def mean_rel_error_pct(pairs, name="S", masks=None):
    """Average relative error over several (estimate, ground truth) pairs."""
    pairs = list(pairs)
    masks = [None] * len(pairs) if masks is None else list(masks)
    return float(np.mean([rel_error_pct(a, b, name, m) for (a, b), m in zip(pairs, masks)]))


def exposure_normalize(img, reference, mask=None):
    """Scale ``img`` so its mean intensity matches ``reference``."""
    ii = channel(img, "I")
    ir = channel(reference, "I")
    if mask is not None:
        ii, ir = ii[mask], ir[mask]
    total = float(np.sum(ii))
    if total == 0.0:
        return np.asarray(img, dtype=np.float64)
    return np.asarray(img, dtype=np.float64) * (float(np.sum(ir)) / total)


def metric_rows(scene, key, a, b, channels=CHANNELS, mask=None):
    """CSV rows of PSNR and relative error for each channel."""
    rows = []
    for name in channels:
        rows.append((scene, key, name, "psnr", psnr(a, b, name, mask=mask)))
        try:
            rel = rel_error_pct(a, b, name, mask=mask)
        except UndefinedMetricError:
            rel = float("nan")
        rows.append((scene, key, name, "rel_error_pct", rel))
    return rows


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow([f"{x:.10g}" if isinstance(x, float) else x for x in row])
