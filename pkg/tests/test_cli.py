import csv
import os

import numpy as np
import pytest

from closedlight.cli import main
from closedlight.dct import load_coeffs
from closedlight.imageio import read_image, write_image

SCENE = """\
camera pos=0,0,4 look=0,0,0 fov=40 width=12 height=12
light a=-0.5,-0.5,3 b=0.5,-0.5,3 c=-0.5,0.5,3 normal=0,0,-1 intensity=5
mesh shape=icosphere subdivisions=2 kd=0.7
"""


@pytest.fixture
def scene_file(tmp_path):
    path = tmp_path / "s.scene"
    path.write_text(SCENE)
    return path


def test_render_closed_and_mc_then_compare(tmp_path, scene_file, capsys):
    closed, mc = tmp_path / "c.pfm", tmp_path / "m.pfm"
    assert main(["render", str(scene_file), "-o", str(closed)]) == 0
    assert main(["render", str(scene_file), "--mode", "mc", "--samples", "256", "--integrand", "approximated",
                 "-o", str(mc)]) == 0
    assert read_image(closed).shape == (12, 12, 3)
    capsys.readouterr()
    assert main(["compare", str(closed), str(mc), "--channel", "I", "--metric", "rel"]) == 0
    assert float(capsys.readouterr().out) < 1.0
    assert main(["compare", str(closed), str(closed), "--metric", "psnr", "--channel", "R"]) == 0
    assert capsys.readouterr().out.strip() == "inf"


def test_precompute_dct(tmp_path, rng):
    faces = []
    for k in range(6):
        path = tmp_path / f"f{k}.pfm"
        write_image(path, rng.random((8, 8, 3)))
        faces.append(str(path))
    out = tmp_path / "env.dctc"
    assert main(["precompute-dct", *faces, "--cutoff", "3", "2", "-o", str(out)]) == 0
    loaded = load_coeffs(out)
    assert len(loaded) == 6 and loaded[0].cutoff == (3, 2)


def test_errors_return_nonzero(tmp_path, capsys):
    assert main(["compare", str(tmp_path / "missing.ppm"), str(tmp_path / "x.ppm")]) == 1
    bad = tmp_path / "bad.scene"
    bad.write_text("light a=0,0,0\n")
    assert main(["render", str(bad), "-o", str(tmp_path / "o.ppm")]) == 1
    assert "bad.scene:1" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["render"])


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_sweep_ratio_writes_csv_and_plot(tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep-ratio", "--ratios", "1,4", "--samples", "64", "--size", "16", "-o", str(out)]) == 0
    rows = _rows(out / "ratio_sweep.csv")
    assert {r["ratio_or_cutoff"] for r in rows} == {"1", "4"}
    assert os.path.getsize(out / "ratio_sweep.png") > 0


def test_env_error_writes_csv_and_plot(tmp_path):
    out = tmp_path / "env"
    assert main(["env-error", "--cutoffs", "dc", "2,2", "--samples", "64", "--size", "12", "-o", str(out)]) == 0
    rows = _rows(out / "env_error.csv")
    assert {r["ratio_or_cutoff"] for r in rows} == {"dc", "2x2"}
    assert any(r["scene"] == "mean" for r in rows)
    assert os.path.getsize(out / "env_error.png") > 0


def test_bench_writes_csv_and_plot(tmp_path, scene_file):
    out = tmp_path / "bench"
    assert main(["bench", "--scene", str(scene_file), "--samples", "16", "--repeats", "2", "-o", str(out)]) == 0
    rows = _rows(out / "bench.csv")
    speed = [float(r["value"]) for r in rows if r["metric"] == "speedup"]
    assert len(speed) == 1 and np.isfinite(speed[0])
    assert os.path.getsize(out / "bench.png") > 0
