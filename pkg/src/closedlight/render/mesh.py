"""Triangle meshes: a small OBJ reader and procedural shapes."""

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError, ParseError


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Indexed triangles with separate position and normal indices.

    ``faces`` index ``positions``; ``normal_faces`` index ``normals``.
    """

    positions: np.ndarray  # (V, 3)
    faces: np.ndarray  # (F, 3) int
    normals: np.ndarray  # (K, 3) unit
    normal_faces: np.ndarray  # (F, 3) int

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64).reshape(-1, 3)
        faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        nrm = np.asarray(self.normals, dtype=np.float64).reshape(-1, 3)
        nfaces = np.asarray(self.normal_faces, dtype=np.int64).reshape(-1, 3)
        if faces.size and (faces.min() < 0 or faces.max() >= len(pos)):
            raise InvalidInputError("face index out of range")
        if nfaces.shape != faces.shape or (nfaces.size and (nfaces.min() < 0 or nfaces.max() >= len(nrm))):
            raise InvalidInputError("normal index out of range")
        for name, value in (("positions", pos), ("faces", faces), ("normals", nrm), ("normal_faces", nfaces)):
            object.__setattr__(self, name, value)

    @property
    def triangles(self):
        """Corner positions, shape ``(F, 3, 3)``."""
        return self.positions[self.faces]

    @property
    def corner_normals(self):
        return self.normals[self.normal_faces]

    def transformed(self, scale=1.0, translate=(0.0, 0.0, 0.0)):
        """Uniform scale followed by translation."""
        if not scale > 0:
            raise InvalidInputError("mesh scale must be positive")
        pos = self.positions * scale + np.asarray(translate, dtype=np.float64)
        return TriangleMesh(pos, self.faces, self.normals, self.normal_faces)


def vertex_normals(positions, faces):
    """Area-weighted vertex normals (the unnormalised face cross product is the weight)."""
    tri = positions[faces]
    face_n = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    acc = np.zeros_like(positions)
    for k in range(3):
        np.add.at(acc, faces[:, k], face_n)
    length = np.linalg.norm(acc, axis=1)
    acc[length > 0] /= length[length > 0, None]
    acc[length == 0] = (0.0, 0.0, 1.0)
    return acc


def _index(token, count, path, line_no):
    try:
        k = int(token)
    except ValueError:
        raise ParseError(f"bad index {token!r}", path, line_no) from None
    k = k - 1 if k > 0 else count + k
    if not 0 <= k < count:
        raise ParseError(f"index {token} out of range", path, line_no)
    return k


def _floats(parts, n, path, line_no):
    if len(parts) < n:
        raise ParseError(f"expected {n} numbers", path, line_no)
    try:
        return [float(x) for x in parts[:n]]
    except ValueError:
        raise ParseError("bad number", path, line_no) from None


def parse_obj(lines, path="<obj>"):
    positions, normals = [], []
    faces, nfaces = [], []
    any_missing = False
    for line_no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag, args = parts[0], parts[1:]
        if tag == "v":
            positions.append(_floats(args, 3, path, line_no))
        elif tag == "vn":
            normals.append(_floats(args, 3, path, line_no))
        elif tag == "f":
            if len(args) < 3:
                raise ParseError("a face needs at least three vertices", path, line_no)
            vi, ni = [], []
            for corner in args:
                fields = corner.split("/")
                vi.append(_index(fields[0], len(positions), path, line_no))
                if len(fields) >= 3 and fields[2]:
                    ni.append(_index(fields[2], len(normals), path, line_no))
                else:
                    ni.append(None)
            for k in range(1, len(vi) - 1):  # fan triangulation
                faces.append((vi[0], vi[k], vi[k + 1]))
                nfaces.append((ni[0], ni[k], ni[k + 1]))
                any_missing |= None in nfaces[-1]
        elif tag in ("vt", "o", "g", "s", "usemtl", "mtllib", "l", "p"):
            continue
        else:
            raise ParseError(f"unsupported record {tag!r}", path, line_no)
    if not faces:
        raise ParseError("no faces", path, 0)
    pos = np.array(positions, dtype=np.float64)
    faces = np.array(faces, dtype=np.int64)
    if any_missing or not normals:
        nrm = vertex_normals(pos, faces)
        return TriangleMesh(pos, faces, nrm, faces)
    nrm = np.array(normals, dtype=np.float64)
    length = np.linalg.norm(nrm, axis=1)
    if np.any(length == 0):
        raise ParseError("zero-length vertex normal", path, 0)
    return TriangleMesh(pos, faces, nrm / length[:, None], np.array(nfaces, dtype=np.int64))


def load_obj(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_obj(fh, str(path))


def write_obj(path, mesh):
    with open(path, "w", encoding="utf-8") as fh:
        for p in mesh.positions:
            fh.write(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
        for n in mesh.normals:
            fh.write(f"vn {n[0]:.17g} {n[1]:.17g} {n[2]:.17g}\n")
        for f, g in zip(mesh.faces + 1, mesh.normal_faces + 1):
            fh.write(f"f {f[0]}//{g[0]} {f[1]}//{g[1]} {f[2]}//{g[2]}\n")


def icosphere(subdivisions=3, radius=1.0, center=(0.0, 0.0, 0.0)):
    """Subdivided icosahedron with exact sphere normals."""
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.array(v, dtype=np.float64) / np.linalg.norm(v) for v in verts]
    for _ in range(subdivisions):
        cache = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    unit = np.array(verts)
    faces = np.array(faces, dtype=np.int64)
    return TriangleMesh(unit * radius + np.asarray(center, dtype=np.float64), faces, unit, faces)


def quad(size=1.0, z=0.0):
    """Square in the plane ``z`` facing +z, two triangles."""
    h = 0.5 * size
    pos = np.array([(-h, -h, z), (h, -h, z), (h, h, z), (-h, h, z)])
    faces = np.array([(0, 1, 2), (0, 2, 3)])
    nrm = np.tile([0.0, 0.0, 1.0], (4, 1))
    return TriangleMesh(pos, faces, nrm, faces)
