import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from closedlight.errors import InvalidInputError
from closedlight.geometry import build_frame, reflect, to_local, to_local_dir, to_world_dir

unit = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-3)


def check_frame(f):
    m = f.matrix
    assert np.allclose(m @ m.T, np.eye(3), atol=1e-9)
    assert abs(np.linalg.det(m) - 1.0) < 1e-9


def test_identity_frame():
    f = build_frame([0, 0, 1])
    assert np.allclose(f.t, [1, 0, 0]) and np.allclose(f.b, [0, 1, 0]) and np.allclose(f.n, [0, 0, 1])


def test_flipped_and_diagonal_frames():
    for axis in ([0, 0, -1], np.ones(3) / np.sqrt(3)):
        f = build_frame(axis)
        check_frame(f)
        assert np.allclose(f.n, axis)


def test_zero_axis_rejected():
    with pytest.raises(InvalidInputError):
        build_frame([0, 0, 0])


def test_many_random_frames(rng):
    axes = rng.normal(size=(100000, 3))
    axes /= np.linalg.norm(axes, axis=1)[:, None]
    worst = 0.0
    for a in axes[::50]:
        m = build_frame(a).matrix
        worst = max(worst, np.abs(m @ m.T - np.eye(3)).max(), abs(np.linalg.det(m) - 1))
    assert worst < 1e-9


def test_to_local_examples():
    f = build_frame([0, 0, 1])
    assert np.allclose(to_local(f, [1, 2, 3], [1, 2, 3]), 0)
    assert np.allclose(to_local(f, [0, 0, 0], [4, 5, 6]), [4, 5, 6])
    assert to_local(build_frame([0, 1, 0]), [0, 0, 0], [0, 2, 0])[2] == pytest.approx(2)
    assert np.allclose(to_local_dir(build_frame([1, 0, 0]), [1, 0, 0]), [0, 0, 1])


@given(unit, unit)
@settings(max_examples=200, deadline=None)
def test_local_roundtrip_and_norm(axis, d):
    f = build_frame(axis)
    check_frame(f)
    loc = to_local_dir(f, d)
    assert np.linalg.norm(loc) == pytest.approx(np.linalg.norm(d), abs=1e-9)
    assert np.allclose(to_world_dir(f, loc), d, atol=1e-9)


def test_reflect_examples():
    assert np.allclose(reflect([0, 0, -1], [0, 0, 1]), [0, 0, 1])
    v = np.array([1, 0, -1]) / np.sqrt(2)
    assert np.allclose(reflect(v, [0, 0, 1]), np.array([1, 0, 1]) / np.sqrt(2))


@given(unit, unit)
@settings(max_examples=200, deadline=None)
def test_reflect_angles(v, n):
    v = np.array(v) / np.linalg.norm(v)
    n = np.array(n) / np.linalg.norm(n)
    r = reflect(v, n)
    assert np.linalg.norm(r) == pytest.approx(1.0, abs=1e-9)
    assert np.dot(r, n) == pytest.approx(-np.dot(v, n), abs=1e-9)
    assert np.allclose(reflect(r, n), v, atol=1e-9)
