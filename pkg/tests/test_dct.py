import struct

import numpy as np
import pytest

from closedlight.dct import (
    DctFace,
    FaceImage,
    dct_forward,
    load_coeffs,
    reconstruct,
    reconstruct_image,
    reconstruct_pixel,
    save_coeffs,
    truncate,
)
from closedlight.errors import FormatError, InvalidInputError


def test_constant_face_has_only_dc():
    face = dct_forward(np.full((8, 6, 3), 0.25))
    assert face.coeffs[:, 0, 0] == pytest.approx([0.25 * np.sqrt(48)] * 3)
    assert np.max(np.abs(face.coeffs[:, 1:, :])) < 1e-14
    assert np.max(np.abs(face.coeffs[:, :, 1:])) < 1e-14
    assert face.dc == pytest.approx([0.25] * 3)


def test_round_trip_and_parseval(rng):
    img = rng.random((12, 9, 3))
    face = dct_forward(img)
    assert np.max(np.abs(reconstruct_image(face) - img)) < 1e-12
    assert np.sum(face.coeffs**2) == pytest.approx(np.sum(img**2), rel=1e-12)


def test_pixel_model_is_continuous_between_pixels(rng):
    face = dct_forward(rng.random((6, 6, 3)))
    u = np.linspace(0, 1, 200)
    vals = reconstruct(face, u, np.full_like(u, 0.37))
    assert np.max(np.abs(np.diff(vals, axis=0))) < 0.2
    assert reconstruct_pixel(face, 0.2, 0.4) == pytest.approx(reconstruct(face, [0.2], [0.4])[0])


def test_gray_input_is_broadcast():
    face = dct_forward(np.ones((4, 4)))
    assert face.channels == 3


def test_truncate_keeps_low_block(rng):
    face = dct_forward(rng.random((8, 8, 3)))
    low = truncate(face, 3, 2)
    assert low.cutoff == (3, 2)
    assert np.all(low.coeffs[:, 3:, :] == 0) and np.all(low.coeffs[:, :, 2:] == 0)
    u, v = rng.random((2, 10))
    assert reconstruct(low, u, v) == pytest.approx(reconstruct(face, u, v, 3, 2), rel=1e-13)
    with pytest.raises(InvalidInputError):
        truncate(face, 0, 2)
    with pytest.raises(InvalidInputError):
        reconstruct(face, 0.5, 0.5, 9, 1)


def test_save_load(tmp_path, rng):
    faces = [truncate(dct_forward(rng.random((6, 5, 3))), 4, 3) for _ in range(6)]
    path = tmp_path / "env.dctc"
    save_coeffs(faces, path)
    assert path.stat().st_size == 12 + 6 * 20 + 6 * 3 * 4 * 3 * 8
    back = load_coeffs(path)
    for a, b in zip(faces, back):
        assert b.cutoff == (4, 3) and b.N == 6 and b.M == 5
        assert np.array_equal(a.coeffs, b.coeffs)


def _write(path, data):
    path.write_bytes(data)
    return path


def test_load_rejects_bad_files(tmp_path, rng):
    good = tmp_path / "good.dctc"
    save_coeffs([dct_forward(rng.random((4, 4, 3)))] * 6, good)
    data = good.read_bytes()
    cases = {
        "short": data[:5],
        "magic": b"XXXX" + data[4:],
        "version": data[:4] + struct.pack("<I", 9) + data[8:],
        "count": data[:8] + struct.pack("<I", 5) + data[12:],
        "truncated": data[:-8],
        "trailing": data + b"\0" * 8,
        "cutoff": data[:12] + struct.pack("<IIIII", 4, 4, 3, 5, 4) + data[32:],
    }
    for name, blob in cases.items():
        with pytest.raises(FormatError):
            load_coeffs(_write(tmp_path / f"{name}.dctc", blob))


def test_invalid_faces():
    with pytest.raises(InvalidInputError):
        FaceImage(np.ones((1, 4, 3)))
    with pytest.raises(InvalidInputError):
        FaceImage(-np.ones((4, 4, 3)))
    with pytest.raises(InvalidInputError):
        DctFace(np.ones((4, 4)))
