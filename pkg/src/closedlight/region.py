"""Positive part of the light plane over the unit (u, v) square.

The light rectangle is parametrised as ``a + u (b - a) + v (c - a)``.  Its
height above the shading plane is the affine function

    w(u, v) = a_z + u (b_z - a_z) + v (c_z - a_z)

and the ``max(0, w)`` factor of the integrand is removed by integrating only
over ``{w > 0}``.  That set is the unit square clipped by one half-plane.  It is
swept along an *outer* variable ``s`` with the *inner* variable ``t`` bounded
by affine functions of ``s``.  The inner variable is whichever of (u, v) has
the larger plane slope, so the cut line always has slope at most one in
magnitude and every bound satisfies ``|alpha| <= 1``, ``|beta| <= 2``.  This
keeps the binomial expansions used by the integrators well conditioned.

Along the sweep the cut line ``t = L(s)`` is clamped to ``[0, 1]``; the
clamp has breakpoints where ``L`` crosses 0 or 1, so there are at most three
slabs, of which at most two are non-empty.
"""

from dataclasses import dataclass, field

import numpy as np

N_SLABS = 3


@dataclass(frozen=True)
class AffineBound:
    alpha: float
    beta: float

    def __call__(self, s):
        return self.alpha * s + self.beta


@dataclass(frozen=True)
class SubRegion:
    """``v0 <= s <= v1``, ``u_lo(s) <= t <= u_hi(s)`` in sweep coordinates.

    The field names follow the untransposed case (outer v, inner u).
    """

    v0: float
    v1: float
    u_lo: AffineBound
    u_hi: AffineBound

    def area(self):
        width = self.v1 - self.v0
        mid = 0.5 * (self.v0 + self.v1)
        return width * (self.u_hi(mid) - self.u_lo(mid))


@dataclass(frozen=True)
class IntegrationRegion:
    """Union of sub-regions with disjoint interiors.

    When ``transposed`` is true the outer variable is u and the inner one is
    v, i.e. each sub-region's ``(v0, v1)`` bound u and its ``u_lo``/``u_hi``
    bound v.
    """

    subregions: tuple = field(default_factory=tuple)
    transposed: bool = False

    def __len__(self):
        return len(self.subregions)

    @property
    def is_empty(self):
        return not self.subregions

    def to_uv(self, s, t):
        return (s, t) if self.transposed else (t, s)


@dataclass
class SlabBatch:
    """Vectorised region description for a batch of planes.

    All arrays have shape ``(P, N_SLABS)`` except ``transposed`` ``(P,)``.
    Empty slabs carry ``valid == False`` and zero width.
    """

    transposed: np.ndarray
    s0: np.ndarray
    s1: np.ndarray
    lo_alpha: np.ndarray
    lo_beta: np.ndarray
    hi_alpha: np.ndarray
    hi_beta: np.ndarray
    valid: np.ndarray

    def __len__(self):
        return self.transposed.shape[0]


def region_slabs(a_z, b_z, c_z):
    """Classify a batch of planes given their corner heights."""
    a_z = np.atleast_1d(np.asarray(a_z, dtype=np.float64))
    b_z, c_z = np.broadcast_arrays(a_z, np.asarray(b_z, np.float64), np.asarray(c_z, np.float64))[1:]
    db = b_z - a_z
    dc = c_z - a_z
    transposed = np.abs(dc) > np.abs(db)
    dt = np.where(transposed, dc, db)
    ds = np.where(transposed, db, dc)

    flat = dt == 0.0  # then ds == 0 too and w is constant
    safe_dt = np.where(flat, 1.0, dt)
    cut_alpha = -ds / safe_dt
    cut_beta = -a_z / safe_dt

    # s where the cut line crosses t = 0 and t = 1
    has_ds = ds != 0.0
    safe_ds = np.where(has_ds, ds, 1.0)
    k0 = np.where(has_ds, -a_z / safe_ds, 0.0)
    k1 = np.where(has_ds, -(a_z + dt) / safe_ds, 0.0)
    k0 = np.clip(k0, 0.0, 1.0)
    k1 = np.clip(k1, 0.0, 1.0)
    edges = np.stack(
        [np.zeros_like(a_z), np.minimum(k0, k1), np.maximum(k0, k1), np.ones_like(a_z)], axis=-1
    )
    s0 = edges[:, :-1]
    s1 = edges[:, 1:]
    mid = 0.5 * (s0 + s1)

    line_mid = cut_alpha[:, None] * mid + cut_beta[:, None]
    below = line_mid <= 0.0
    above = line_mid >= 1.0
    # clamped cut bound: constant 0, constant 1, or the line itself
    cut_a = np.where(below | above, 0.0, cut_alpha[:, None])
    cut_b = np.where(below, 0.0, np.where(above, 1.0, cut_beta[:, None]))

    rising = (dt > 0.0)[:, None]  # region is t > L(s)
    lo_alpha = np.where(rising, cut_a, 0.0)
    lo_beta = np.where(rising, cut_b, 0.0)
    hi_alpha = np.where(rising, 0.0, cut_a)
    hi_beta = np.where(rising, 1.0, cut_b)

    # constant plane: full square when positive, else nothing
    full = (flat & (a_z > 0.0))[:, None]
    lo_alpha = np.where(flat[:, None], 0.0, lo_alpha)
    lo_beta = np.where(flat[:, None], 0.0, lo_beta)
    hi_alpha = np.where(flat[:, None], 0.0, hi_alpha)
    hi_beta = np.where(flat[:, None], np.where(full, 1.0, 0.0), hi_beta)
    single = np.array([True, False, False])
    s0 = np.where(flat[:, None], np.where(single, 0.0, 1.0), s0)
    s1 = np.where(flat[:, None], 1.0, s1)

    mid = 0.5 * (s0 + s1)
    thickness = (hi_alpha - lo_alpha) * mid + (hi_beta - lo_beta)
    valid = (s1 > s0) & (thickness > 0.0)
    s1 = np.where(valid, s1, s0)
    return SlabBatch(transposed, s0, s1, lo_alpha, lo_beta, hi_alpha, hi_beta, valid)


def region_from_slabs(slabs, index=0):
    subs = []
    for k in range(N_SLABS):
        if not slabs.valid[index, k]:
            continue
        subs.append(
            SubRegion(
                float(slabs.s0[index, k]),
                float(slabs.s1[index, k]),
                AffineBound(float(slabs.lo_alpha[index, k]), float(slabs.lo_beta[index, k])),
                AffineBound(float(slabs.hi_alpha[index, k]), float(slabs.hi_beta[index, k])),
            )
        )
    return IntegrationRegion(tuple(subs), bool(slabs.transposed[index]))


def classify_region(a_z, b_z, c_z):
    """Region of the unit square where ``w(u, v) > 0``.

    ``a_z``, ``b_z``, ``c_z`` are the heights of the corners at (0, 0),
    (1, 0) and (0, 1); the fourth corner is ``b_z + c_z - a_z``.
    """
    return region_from_slabs(region_slabs(a_z, b_z, c_z))


def region_area(region):
    return float(sum(sub.area() for sub in region.subregions))


def slab_areas(slabs):
    """Per-plane area of a :class:`SlabBatch`."""
    width = slabs.s1 - slabs.s0
    mid = 0.5 * (slabs.s0 + slabs.s1)
    thick = (slabs.hi_alpha - slabs.lo_alpha) * mid + (slabs.hi_beta - slabs.lo_beta)
    return np.sum(np.where(slabs.valid, width * thick, 0.0), axis=-1)


def contains(region, u, v):
    """True where (u, v) lies strictly inside one of the sub-regions."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    s, t = (u, v) if region.transposed else (v, u)
    inside = np.zeros(np.broadcast(u, v).shape, dtype=bool)
    for sub in region.subregions:
        inside |= (s > sub.v0) & (s < sub.v1) & (t > sub.u_lo(s)) & (t < sub.u_hi(s))
    return inside
