import numpy as np
import pytest

from closedlight.arealight import Material, RectAreaLight


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def facing_light(a, b, c, intensity=1.0, towards=(0.0, 0.0, 0.0)):
    """Rectangle whose emitting side faces the point ``towards``."""
    light = RectAreaLight(a, b, c, None, intensity)
    if np.dot(light.normal, light.a - np.asarray(towards, dtype=float)) > 0:
        light = RectAreaLight(a, b, c, -light.normal, intensity)
    return light


@pytest.fixture
def overhead_light():
    # unit square at height 10 facing down
    return RectAreaLight([-0.5, -0.5, 10], [0.5, -0.5, 10], [-0.5, 0.5, 10], [0, 0, -1], 1.0)


@pytest.fixture
def diffuse():
    return Material(1.0, 0.0, 1)


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one acceptance line; the lines are printed in the terminal summary."""

    def record(number, title, passed, detail):
        line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        _VERDICTS.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
