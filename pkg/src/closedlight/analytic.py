"""Closed-form integrals of polynomials (optionally times cosines) over regions.

Polynomials in (u, v) are stored as coefficient arrays ``q[p, r]`` multiplying
``u**p * v**r``.  Regions come from :mod:`closedlight.region`; integration runs
in the region's sweep coordinates (outer ``s``, inner ``t``), transposing the
polynomial when the sweep is transposed.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .region import IntegrationRegion, SlabBatch

MAX_POWER = 64
_HALF_PI = 0.5 * np.pi
_SERIES_TOL = 1e-18


@dataclass(frozen=True)
class PolyCoeffs:
    """``l00 + l01 v + l02 v^2 + l10 u + l11 u v + l20 u^2``."""

    l00: float = 0.0
    l01: float = 0.0
    l02: float = 0.0
    l10: float = 0.0
    l11: float = 0.0
    l20: float = 0.0

    def to_array(self):
        q = np.zeros((3, 3))
        q[0, 0], q[0, 1], q[0, 2] = self.l00, self.l01, self.l02
        q[1, 0], q[1, 1], q[2, 0] = self.l10, self.l11, self.l20
        return q

    def __call__(self, u, v):
        return (
            self.l00 + self.l01 * v + self.l02 * v * v
            + self.l10 * u + self.l11 * u * v + self.l20 * u * u
        )


def poly_array(coeffs):
    if isinstance(coeffs, PolyCoeffs):
        return coeffs.to_array()
    q = np.asarray(coeffs, dtype=np.float64)
    if q.ndim != 2:
        raise ValueError("polynomial coefficients must be a 2-D array q[p, r]")
    return q


def int_poly(n, t0, t1):
    """Integral of ``t**n`` over ``[t0, t1]``."""
    if not 0 <= n <= MAX_POWER:
        raise ValueError(f"power {n} outside [0, {MAX_POWER}]")
    return (np.power(t1, n + 1) - np.power(t0, n + 1)) / (n + 1)


def _series_length(x_max):
    """Number of Taylor terms so that ``x**K / K!`` drops below tolerance."""
    k, term = 0, 1.0
    while term > _SERIES_TOL or k <= x_max:
        k += 1
        term *= x_max / k
        if k > 400:
            break
    return k + 1


def _closed_form_loss(n, x):
    """Worst relative term size of the integration-by-parts sum."""
    x = np.maximum(x, 1e-300)
    loss = 1.0 / x
    ratio = 1.0 / x
    for m in range(1, n + 1):
        ratio = ratio * (n - m + 1) / x
        loss = np.maximum(loss, ratio)
    return loss


def use_series(n, x):
    """Choose the Taylor branch where its cancellation (~e^x) is the smaller."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore"):
        return np.exp(np.minimum(x, 700.0)) <= _closed_form_loss(n, x)


def int_poly_cos(n, a, b, t0, t1):
    """Integral of ``t**n * cos(a t + b)`` over ``[t0, t1]``.

    ``a`` and ``b`` broadcast.  Large ``|a| t`` uses the integration-by-parts
    closed form; small ``|a| t`` (including ``a == 0``) uses the Taylor series of
    the cosine about ``a = 0``, which has no division by ``a``.
    """
    if not 0 <= n <= MAX_POWER:
        raise ValueError(f"power {n} outside [0, {MAX_POWER}]")
    a, b = np.broadcast_arrays(np.asarray(a, np.float64), np.asarray(b, np.float64))
    t_max = max(abs(float(t0)), abs(float(t1)))
    x = np.abs(a) * t_max
    series = use_series(n, x)
    out = np.zeros(a.shape)

    if np.any(series):
        x_max = float(np.max(np.where(series, x, 0.0)))
        k_max = _series_length(x_max)
        a_s = np.where(series, a, 0.0)
        cos_b, sin_b = np.cos(b), np.sin(b)
        cycle = (cos_b, -sin_b, -cos_b, sin_b)
        scale = np.ones(a.shape)
        acc = np.zeros(a.shape)
        t0p = float(t0) ** (n + 1)
        t1p = float(t1) ** (n + 1)
        for m in range(k_max):
            if m:
                scale = scale * a_s / m
                t0p *= float(t0)
                t1p *= float(t1)
            acc += scale * cycle[m % 4] * ((t1p - t0p) / (n + m + 1))
        out = np.where(series, acc, out)

    closed = ~series
    if np.any(closed):
        a_c = np.where(closed, a, 1.0)
        acc = np.zeros(a.shape)
        factor = 1.0 / a_c
        for m in range(n + 1):
            if m:
                factor = -factor * (n - m + 1) / a_c
            shift = b - (m + 1) * _HALF_PI
            k = n - m
            acc += factor * (
                float(t1) ** k * np.cos(a_c * t1 + shift) - float(t0) ** k * np.cos(a_c * t0 + shift)
            )
        out = np.where(closed, acc, out)
    return out


def int_poly_sin(n, a, b, t0, t1):
    """Integral of ``t**n * sin(a t + b)`` over ``[t0, t1]``."""
    return int_poly_cos(n, a, np.asarray(b, np.float64) - _HALF_PI, t0, t1)


def affine_power(alpha, beta, k):
    """Coefficients of ``(alpha s + beta)**k`` in ascending powers of s."""
    return np.array([comb(k, r) * alpha**r * beta ** (k - r) for r in range(k + 1)])


# ---------------------------------------------------------------------------
# polynomial moments


def _region_to_slabs(region):
    subs = region.subregions
    n = max(len(subs), 1)
    arr = np.zeros((7, 1, n))
    valid = np.zeros((1, n), dtype=bool)
    for k, sub in enumerate(subs):
        arr[:, 0, k] = (sub.v0, sub.v1, sub.u_lo.alpha, sub.u_lo.beta, sub.u_hi.alpha, sub.u_hi.beta, 0)
        valid[0, k] = True
    return SlabBatch(np.array([region.transposed]), *arr[:6], valid)


def monomial_moments(slabs, degree):
    """``M[P, p, r]``: integral of ``t**p s**r`` over each region, sweep coordinates."""
    d = degree + 1
    width_ok = slabs.valid[..., None]

    def powers(x, count):
        return np.power(x[..., None], np.arange(count))

    binom = np.array([[comb(k, m) if m <= k else 0 for m in range(d + 1)] for k in range(d + 1)], float)
    k_idx = np.arange(d + 1)[:, None]
    m_idx = np.arange(d + 1)[None, :]
    expo = np.clip(k_idx - m_idx, 0, None)

    def bound_table(alpha, beta):
        ap = powers(alpha, d + 1)  # (P, S, d+1)
        bp = powers(beta, d + 1)
        return binom * ap[..., None, :] * np.take(bp, expo, axis=-1)  # (P, S, k, m)

    diff = bound_table(slabs.hi_alpha, slabs.hi_beta) - bound_table(slabs.lo_alpha, slabs.lo_beta)
    n_idx = np.arange(2 * d + 1)
    ints = (np.power(slabs.s1[..., None], n_idx + 1) - np.power(slabs.s0[..., None], n_idx + 1)) / (n_idx + 1)
    ints = np.where(width_ok, ints, 0.0)
    hankel = np.arange(d)[:, None] + np.arange(d + 1)[None, :]  # r + m
    gathered = ints[..., hankel]  # (P, S, r, m)
    moments = np.einsum("PSpm,PSrm->Ppr", diff[:, :, 1:, :], gathered)
    return moments / np.arange(1, d + 1)[None, :, None]


def integrate_poly_slabs(q, slabs):
    """Integrate per-point polynomials ``q[P, p, r]`` (u^p v^r) over a slab batch."""
    q = np.asarray(q, dtype=np.float64)
    if q.ndim == 2:
        q = np.broadcast_to(q, (len(slabs),) + q.shape)
    d = max(q.shape[1], q.shape[2])
    if q.shape[1:] != (d, d):
        padded = np.zeros((q.shape[0], d, d))
        padded[:, : q.shape[1], : q.shape[2]] = q
        q = padded
    q_ts = np.where(slabs.transposed[:, None, None], np.swapaxes(q, 1, 2), q)
    moments = monomial_moments(slabs, d - 1)
    return np.einsum("Ppr,Ppr->P", q_ts, moments)


def integrate_poly_over_region(coeffs, region: IntegrationRegion):
    """Exact integral of a polynomial over an :class:`IntegrationRegion`."""
    if region.is_empty:
        return 0.0
    return float(integrate_poly_slabs(poly_array(coeffs), _region_to_slabs(region))[0])


# ---------------------------------------------------------------------------
# polynomial times a separable cosine


def _inner_channels(p, freq, phase, alpha, beta):
    """Antiderivative of ``t**p cos(freq t + phase)`` evaluated at ``t = alpha s + beta``.

    Returns ``(poly, omega, phi)`` triples meaning ``poly(s) * cos(omega s + phi)``,
    with ``poly`` shaped ``freq.shape + (degree + 1,)``.
    """
    series = use_series(p, np.abs(freq))
    channels = []
    if np.any(~series):
        f_safe = np.where(series, 1.0, freq)
        factor = np.where(series, 0.0, 1.0 / f_safe)
        for m in range(p + 1):
            if m:
                factor = -factor * (p - m + 1) / f_safe
            poly = factor[..., None] * affine_power(alpha, beta, p - m)
            shift = phase - (m + 1) * _HALF_PI
            channels.append((poly, f_safe * alpha, f_safe * beta + shift))
    if np.any(series):
        x_max = float(np.max(np.where(series, np.abs(freq), 0.0)))
        k_max = _series_length(x_max)
        f_s = np.where(series, freq, 0.0)
        cos_b, sin_b = np.cos(phase), np.sin(phase)
        cycle = (cos_b, -sin_b, -cos_b, sin_b)
        degree = p + k_max
        poly = np.zeros(freq.shape + (degree + 1,))
        scale = np.where(series, 1.0, 0.0)
        for m in range(k_max):
            if m:
                scale = scale * f_s / m
            c = scale * cycle[m % 4] / (p + m + 1)
            poly[..., : p + m + 2] += c[..., None] * affine_power(alpha, beta, p + m + 1)
        zero = np.zeros(freq.shape)
        channels.append((poly, zero, zero))
    return channels


def _poly_mul(poly, coeffs):
    out = np.zeros(poly.shape[:-1] + (poly.shape[-1] + len(coeffs) - 1,))
    for r, c in enumerate(coeffs):
        if c != 0.0:
            out[..., r : r + poly.shape[-1]] += c * poly
    return out


def _trim(coeffs):
    nz = np.nonzero(coeffs)[0]
    return coeffs[: nz[-1] + 1] if nz.size else coeffs[:0]


def integrate_poly_cos2_over_region(coeffs, ki0, ki1, kj0, kj1, region: IntegrationRegion):
    """Integral of ``cos(ki0 u + ki1) cos(kj0 v + kj1) P(u, v)`` over the region.

    Frequencies and phases broadcast; the result has their broadcast shape.
    """
    q = poly_array(coeffs)
    ki0, ki1, kj0, kj1 = np.broadcast_arrays(*(np.asarray(x, np.float64) for x in (ki0, ki1, kj0, kj1)))
    shape = ki0.shape
    total = np.zeros(shape)
    if region.is_empty:
        return total
    if region.transposed:
        q = q.T
        inner_f, inner_p, outer_f, outer_p = kj0, kj1, ki0, ki1
    else:
        inner_f, inner_p, outer_f, outer_p = ki0, ki1, kj0, kj1
    for sub in region.subregions:
        for p in range(q.shape[0]):
            s_poly = _trim(q[p])
            if s_poly.size == 0:
                continue
            for sign, bound in ((1.0, sub.u_hi), (-1.0, sub.u_lo)):
                for poly, omega, phi in _inner_channels(p, inner_f, inner_p, bound.alpha, bound.beta):
                    poly = _poly_mul(sign * poly, s_poly)
                    for w, d in ((omega + outer_f, phi + outer_p), (omega - outer_f, phi - outer_p)):
                        for n in range(poly.shape[-1]):
                            c = poly[..., n]
                            if not np.any(c):
                                continue
                            total += 0.5 * c * int_poly_cos(n, w, d, sub.v0, sub.v1)
    return total
