"""Primary-ray casting against triangle meshes.

Triangles are grouped into small spatially coherent leaves with bounding
spheres; a ray only tests the triangles of leaves whose sphere it hits.
The triangle test is the watertight algorithm of Woop, Benthin and Wald
(2013), vectorised over (ray, triangle) pairs.
"""

from dataclasses import dataclass

import numpy as np

T_MIN = 1e-6
LEAF_SIZE = 32
_RAY_CHUNK = 4096


def _leaf_order(centroids, leaf_size):
    """Triangle order whose consecutive runs of ``leaf_size`` are spatially tight."""
    order = []
    stack = [np.arange(len(centroids))]
    while stack:
        idx = stack.pop()
        if len(idx) <= leaf_size:
            order.append(idx)
            continue
        pts = centroids[idx]
        axis = int(np.argmax(pts.max(axis=0) - pts.min(axis=0)))
        # split on a multiple of the leaf size so leaves stay full
        half = ((len(idx) + 1) // 2 + leaf_size - 1) // leaf_size * leaf_size
        half = min(half, len(idx) - 1)
        part = idx[np.argsort(pts[:, axis], kind="stable")]
        stack.append(part[half:])
        stack.append(part[:half])
    return order


@dataclass(frozen=True, eq=False)
class TriangleSet:
    tri: np.ndarray  # (F + 1, 3, 3); the last entry is a degenerate pad
    nrm: np.ndarray  # (F + 1, 3, 3) corner normals
    material: np.ndarray  # (F + 1,) material index
    leaf_tris: np.ndarray  # (G, LEAF_SIZE) triangle ids, padded with F
    leaf_center: np.ndarray  # (G, 3)
    leaf_radius: np.ndarray  # (G,)

    @property
    def count(self):
        return len(self.tri) - 1


def build_triangle_set(meshes, materials=None, leaf_size=LEAF_SIZE):
    """Merge meshes into one set; ``materials[k]`` indexes mesh ``k``'s material."""
    tris, nrms, mats = [], [], []
    for k, mesh in enumerate(meshes):
        tris.append(mesh.triangles)
        nrms.append(mesh.corner_normals)
        mats.append(np.full(len(mesh.faces), k if materials is None else materials[k]))
    if tris:
        tri = np.concatenate(tris)
        nrm = np.concatenate(nrms)
        mat = np.concatenate(mats)
    else:
        tri = np.zeros((0, 3, 3))
        nrm = np.zeros((0, 3, 3))
        mat = np.zeros(0, dtype=np.int64)
    count = len(tri)
    leaves = _leaf_order(tri.mean(axis=1), leaf_size) if count else []
    leaf_tris = np.full((len(leaves), leaf_size), count, dtype=np.int64)
    center = np.zeros((len(leaves), 3))
    radius = np.zeros(len(leaves))
    for g, idx in enumerate(leaves):
        leaf_tris[g, : len(idx)] = idx
        pts = tri[idx].reshape(-1, 3)
        center[g] = 0.5 * (pts.min(axis=0) + pts.max(axis=0))
        radius[g] = np.sqrt(np.max(np.sum((pts - center[g]) ** 2, axis=1))) * (1 + 1e-9) + 1e-12
    pad = np.zeros((1, 3, 3))
    return TriangleSet(
        np.concatenate([tri, pad]),
        np.concatenate([nrm, pad + np.array([0.0, 0.0, 1.0])]),
        np.concatenate([mat, [0]]).astype(np.int64),
        leaf_tris,
        center,
        radius,
    )


def intersect_pairs(o, d, v0, v1, v2):
    """Watertight ray/triangle test for matching rows; returns (t, b1, b2, hit)."""
    kz = np.argmax(np.abs(d), axis=1)
    kx = (kz + 1) % 3
    ky = (kx + 1) % 3
    dz = np.take_along_axis(d, kz[:, None], 1)[:, 0]
    swap = dz < 0
    kx, ky = np.where(swap, ky, kx), np.where(swap, kx, ky)
    dx = np.take_along_axis(d, kx[:, None], 1)[:, 0]
    dy = np.take_along_axis(d, ky[:, None], 1)[:, 0]
    sx, sy, sz = dx / dz, dy / dz, 1.0 / dz

    def project(v):
        rel = v - o
        x = np.take_along_axis(rel, kx[:, None], 1)[:, 0]
        y = np.take_along_axis(rel, ky[:, None], 1)[:, 0]
        z = np.take_along_axis(rel, kz[:, None], 1)[:, 0]
        return x - sx * z, y - sy * z, sz * z

    ax, ay, az = project(v0)
    bx, by, bz = project(v1)
    cx, cy, cz = project(v2)
    u = cx * by - cy * bx
    v = ax * cy - ay * cx
    w = bx * ay - by * ax
    inside = ~(((u < 0) | (v < 0) | (w < 0)) & ((u > 0) | (v > 0) | (w > 0)))
    det = u + v + w
    ok = inside & (det != 0)
    safe = np.where(ok, det, 1.0)
    t = (u * az + v * bz + w * cz) / safe
    hit = ok & (t > T_MIN)
    return t, v / safe, w / safe, hit


@dataclass
class Hits:
    hit: np.ndarray  # (R,) bool
    t: np.ndarray
    tri: np.ndarray  # triangle id, -1 on miss
    b1: np.ndarray
    b2: np.ndarray


def cast(tset, origins, dirs):
    """Nearest hit of each ray."""
    origins = np.asarray(origins, dtype=np.float64)
    dirs = np.asarray(dirs, dtype=np.float64)
    n = len(dirs)
    out = Hits(np.zeros(n, bool), np.full(n, np.inf), np.full(n, -1), np.zeros(n), np.zeros(n))
    if tset.count == 0 or n == 0:
        return out
    inv_len = 1.0 / np.linalg.norm(dirs, axis=1)
    unit = dirs * inv_len[:, None]
    for start in range(0, n, _RAY_CHUNK):
        sl = slice(start, min(n, start + _RAY_CHUNK))
        o, du = origins[sl], unit[sl]
        oc = tset.leaf_center[None, :, :] - o[:, None, :]
        tca = np.einsum("rgk,rk->rg", oc, du)
        d2 = np.einsum("rgk,rgk->rg", oc, oc) - tca * tca
        r2 = tset.leaf_radius[None, :] ** 2
        near = (d2 <= r2) & (tca + tset.leaf_radius[None, :] > 0)
        ray_idx, leaf_idx = np.nonzero(near)
        if len(ray_idx) == 0:
            continue
        tri_ids = tset.leaf_tris[leaf_idx].ravel()
        rays = np.repeat(ray_idx, tset.leaf_tris.shape[1])
        corners = tset.tri[tri_ids]
        t, b1, b2, hit = intersect_pairs(o[rays], dirs[sl][rays], corners[:, 0], corners[:, 1], corners[:, 2])
        t = np.where(hit, t, np.inf)
        order = np.lexsort((tri_ids, t, rays))
        rays_sorted = rays[order]
        first = np.ones(len(order), bool)
        first[1:] = rays_sorted[1:] != rays_sorted[:-1]
        pick = order[first]
        r = rays[pick] + start
        got = np.isfinite(t[pick])
        r, pick = r[got], pick[got]
        out.hit[r] = True
        out.t[r] = t[pick]
        out.tri[r] = tri_ids[pick]
        out.b1[r] = b1[pick]
        out.b2[r] = b2[pick]
    return out
