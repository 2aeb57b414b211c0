"""Experiment harness: light-size sweep, environment error table and timing."""

import os
import statistics
import time

import numpy as np

from .. import geometry
from ..arealight import Material, RectAreaLight
from ..dct import DctFace
from ..envlight import FACE_IDS, EnvCubemap, face_axes
from ..imageio import write_image
from ..metrics import CHANNELS, channel, exposure_normalize, psnr, rel_error_pct, write_csv
from ..montecarlo import McConfig
from .mesh import icosphere
from .renderer import build_gbuffer, shade_gbuffer
from .scene import Camera, MeshInstance, Scene

WARM = (1.0, 0.35, 0.1)
COOL = (0.1, 0.4, 1.0)


def sphere_scene(size=128, subdivisions=4, material=None):
    """Unit icosphere at the origin seen from +z."""
    mat = material or Material(0.8, 0.0, 1)
    cam = Camera((0.0, 0.0, 5.0), (0.0, 0.0, 0.0), (0.0, 1.0, 0.0), 30.0, size, size)
    return Scene(cam, [MeshInstance(icosphere(subdivisions), mat)])


def square_light(direction, distance, side, intensity, target=(0.0, 0.0, 0.0)):
    """Square light centred ``distance`` along ``direction`` from ``target``, facing it."""
    w = geometry.normalize(np.asarray(direction, dtype=np.float64))
    helper = np.array([0.0, 1.0, 0.0]) if abs(w[1]) < 0.9 else np.array([1.0, 0.0, 0.0])
    t = geometry.normalize(np.cross(w, helper))
    b = np.cross(w, t)
    center = np.asarray(target, dtype=np.float64) + distance * w
    a = center - 0.5 * side * (t + b)
    return RectAreaLight(a, a + side * t, a + side * b, -w, intensity)


def default_sweep_lights(distance=10.0):
    """Warm and cool lights from two directions, so saturation varies over the sphere."""
    return [
        square_light((1.0, 1.0, 1.0), distance, 1.0, WARM),
        square_light((-1.0, 0.6, 0.8), distance, 1.0, COOL),
    ]


def lights_at_ratio(template, ratio, target=(0.0, 0.0, 0.0)):
    """Resize square copies of the template lights so that ``d**2 / area == ratio``.

    ``d`` is each light's centroid distance to ``target``; direction and
    colour are kept.
    """
    if not ratio > 0:
        raise ValueError("ratio must be positive")
    out = []
    for light in template:
        offset = light.centroid - np.asarray(target, dtype=np.float64)
        d = float(np.linalg.norm(offset))
        out.append(square_light(offset, d, np.sqrt(d * d / ratio), light.intensity, target))
    return out


def lit_mask(gb, reference, fraction=1.0 / 255.0):
    """Object pixels whose reference intensity is at least ``fraction`` of its peak.

    Hue and saturation are meaningless on pixels that would display as black.
    """
    obj = gb.hit.reshape(gb.height, gb.width)
    inten = channel(reference, "I")
    if not np.any(obj):
        return obj
    return obj & (inten >= fraction * inten[obj].max())


def _save(out_dir, name, img, exposure=None):
    if out_dir is None:
        return
    if exposure is None:
        peak = float(np.max(img))
        exposure = 1.0 / peak if peak > 0 else 1.0
    write_image(os.path.join(out_dir, name + ".ppm"), img, exposure)
    write_image(os.path.join(out_dir, name + ".pfm"), img)


def experiment_ratio_sweep(scene, ratios, samples=2000, seed=0, stratified=False, out_dir=None):
    """Closed form vs exact-mode Monte Carlo across light sizes.

    Returns CSV rows ``(scene, ratio, channel, metric, value)`` for every
    channel; the saturation rows are the headline numbers.
    """
    template = list(scene.lights)
    if not template:
        raise ValueError("the ratio sweep needs at least one template light")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    gb = build_gbuffer(scene)
    cfg = McConfig(samples, seed, "exact", stratified)
    rows = []
    try:
        for ratio in ratios:
            scene.lights = lights_at_ratio(template, ratio, scene.camera.look)
            closed = shade_gbuffer(scene, gb)
            truth = shade_gbuffer(scene, gb, "mc", cfg)
            mask = lit_mask(gb, truth)
            for name in CHANNELS:
                rows.append(("sphere", ratio, name, "psnr", psnr(closed, truth, name, mask=mask)))
                rows.append(("sphere", ratio, name, "rel_error_pct", rel_error_pct(closed, truth, name, mask=mask)))
            exposure = 1.0 / max(float(np.max(truth)), 1e-300)
            _save(out_dir, f"ratio_{ratio:g}_closed", closed, exposure)
            _save(out_dir, f"ratio_{ratio:g}_mc", truth, exposure)
    finally:
        scene.lights = template
    if out_dir:
        write_csv(os.path.join(out_dir, "ratio_sweep.csv"), rows)
        from .plots import plot_ratio_sweep

        plot_ratio_sweep(rows, os.path.join(out_dir, "ratio_sweep.png"))
    return rows


def lowfreq_environment(size=16, ac=0.05, seed=0):
    """Sky-over-ground cubemap built directly from low DCT coefficients.

    Each face keeps the sky/ground blend of its outward direction as DC and
    gets random (0,1), (1,0) and (1,1) terms of relative amplitude ``ac``.
    """
    rng = np.random.default_rng(seed)
    ground = np.array([0.45, 0.38, 0.30])
    sky = np.array([0.50, 0.65, 0.90])
    faces = []
    for fid in FACE_IDS:
        d, _, _ = face_axes(fid)
        t = 0.5 * (1.0 + d[1])
        col = ground * (1.0 - t) + sky * t
        coeffs = np.zeros((3, size, size))
        coeffs[:, 0, 0] = col * size  # C00 = mean * sqrt(N M)
        for i, j in ((0, 1), (1, 0), (1, 1)):
            coeffs[:, i, j] = col * size * ac * rng.uniform(-1.0, 1.0, 3)
        faces.append(DctFace(coeffs))
    return EnvCubemap(tuple(faces))


def function_environment(fn, size=16, half_extent=1.0):
    """Cubemap sampling ``fn(directions) -> rgb`` at every face pixel."""
    from ..dct import dct_forward

    u = np.arange(size) / (size - 1)
    uu, vv = np.meshgrid(u, u, indexing="ij")
    images = []
    for fid in FACE_IDS:
        d, U, V = face_axes(fid)
        pts = d + (2 * uu[..., None] - 1) * U + (2 * vv[..., None] - 1) * V
        pts /= np.linalg.norm(pts, axis=-1)[..., None]
        images.append(dct_forward(np.maximum(fn(pts), 0.0)))
    return EnvCubemap(tuple(images), half_extent)


def cutoff_label(mode):
    return mode if isinstance(mode, str) else f"{mode[0]}x{mode[1]}"


def experiment_env_error(scene, envs, cutoffs=("dc", "full"), samples=1000, seed=0,
                         integrand_mode="exact", out_dir=None):
    """Per-environment error of closed-form shading at several cutoffs.

    ``envs`` maps a name to an :class:`EnvCubemap`.  Closed-form images are
    exposure-normalised to the ground truth before comparison, which leaves
    hue and saturation untouched.  Rows with scene ``mean`` average the
    environments.
    """
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    gb = build_gbuffer(scene)
    saved_env, saved_mode, saved_lights = scene.environment, scene.env_mode, scene.lights
    rows = []
    per_cut = {}
    try:
        scene.lights = []
        for name, env in envs.items():
            scene.environment = env
            truth = shade_gbuffer(scene, gb, "mc", McConfig(samples, seed, integrand_mode, True))
            mask = lit_mask(gb, truth)
            _save(out_dir, f"env_{name}_mc", truth)
            for mode in cutoffs:
                scene.env_mode = mode
                closed = shade_gbuffer(scene, gb)
                label = cutoff_label(mode)
                _save(out_dir, f"env_{name}_{label}", closed)
                norm = exposure_normalize(closed, truth, mask)
                for ch in CHANNELS:
                    rel = rel_error_pct(norm, truth, ch, mask=mask)
                    snr = psnr(norm, truth, ch, mask=mask)
                    rows.append((name, label, ch, "rel_error_pct", rel))
                    rows.append((name, label, ch, "psnr", snr))
                    per_cut.setdefault((label, ch), []).append((rel, snr))
    finally:
        scene.environment, scene.env_mode, scene.lights = saved_env, saved_mode, saved_lights
    for (label, ch), vals in per_cut.items():
        rows.append(("mean", label, ch, "rel_error_pct", float(np.mean([v[0] for v in vals]))))
        rows.append(("mean", label, ch, "psnr", float(np.mean([v[1] for v in vals]))))
    if out_dir:
        write_csv(os.path.join(out_dir, "env_error.csv"), rows)
        from .plots import plot_env_errors

        plot_env_errors(rows, os.path.join(out_dir, "env_error.png"))
    return rows


def bench(scene, samples=1000, repeats=5, seed=0, out_dir=None):
    """Median wall-clock time of the shading pass, closed form vs Monte Carlo.

    Both modes reuse one G-buffer (warm cache); the ray-casting time is
    reported separately so end-to-end numbers can be reconstructed.
    """
    t0 = time.perf_counter()
    gb = build_gbuffer(scene)
    cast_time = time.perf_counter() - t0
    cfg = McConfig(samples, seed, "exact", True)
    shade_gbuffer(scene, gb)  # warm-up
    times = {"closed_form": [], "mc": []}
    for _ in range(repeats):
        for mode in times:
            start = time.perf_counter()
            shade_gbuffer(scene, gb, mode, cfg)
            times[mode].append(time.perf_counter() - start)
    report = {"cast_seconds": cast_time, "samples": samples, "repeats": repeats}
    for mode, ts in times.items():
        report[mode] = {
            "times": ts,
            "median": statistics.median(ts),
            "stdev": statistics.stdev(ts) if len(ts) > 1 else 0.0,
        }
    report["speedup"] = report["mc"]["median"] / report["closed_form"]["median"]
    report["speedup_end_to_end"] = (report["mc"]["median"] + cast_time) / (
        report["closed_form"]["median"] + cast_time
    )
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        rows = []
        for mode in ("closed_form", "mc"):
            rows.append(("bench", mode, "-", "median_seconds", report[mode]["median"]))
            rows.append(("bench", mode, "-", "stdev_seconds", report[mode]["stdev"]))
        rows.append(("bench", "mc/closed_form", "-", "speedup", report["speedup"]))
        rows.append(("bench", "mc/closed_form", "-", "speedup_end_to_end", report["speedup_end_to_end"]))
        write_csv(os.path.join(out_dir, "bench.csv"), rows)
        from .plots import plot_bench

        plot_bench(report, os.path.join(out_dir, "bench.png"))
    return report
