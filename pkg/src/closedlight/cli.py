"""Command line interface: ``closedlight <subcommand> ...``."""

import argparse
import os
import sys

from .dct import dct_forward, save_coeffs, truncate
from .envlight import FACE_NAMES
from .errors import ClosedLightError
from .imageio import read_image
from .metrics import CHANNELS, psnr, rel_error_pct
from .montecarlo import McConfig


def _ratios(text):
    return [float(x) for x in text.split(",")]


def _cutoff(text):
    if text in ("dc", "full"):
        return text
    i, j = text.split(",")
    return int(i), int(j)


def build_parser():
    parser = argparse.ArgumentParser(prog="closedlight", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render a scene file")
    p.add_argument("scene")
    p.add_argument("--mode", choices=["closed", "mc"], default="closed")
    p.add_argument("--samples", type=int, default=1000, help="MC samples per light")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--integrand", choices=["exact", "approximated"], default="exact")
    p.add_argument("--no-stratify", action="store_true")
    p.add_argument("-o", "--output", required=True, help=".ppm or .pfm")

    p = sub.add_parser("precompute-dct", help="DCT-compress six cubemap face images")
    p.add_argument("faces", nargs=6, help="face images in the order " + " ".join(FACE_NAMES))
    p.add_argument("--cutoff", type=int, nargs=2, metavar=("I", "J"))
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("compare", help="PSNR or relative error of image a against ground truth b")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--channel", choices=CHANNELS, default="S")
    p.add_argument("--metric", choices=["psnr", "rel"], default="psnr")
    p.add_argument("--peak", type=float, default=None)

    p = sub.add_parser("sweep-ratio", help="PSNR of the closed form against MC across d^2/area")
    p.add_argument("--scene", help="scene file providing camera, mesh and template lights")
    p.add_argument("--ratios", type=_ratios, default=[0.4, 0.7, 1, 2, 4, 16])
    p.add_argument("--distance", type=float, default=10.0, help="light distance for the built-in scene")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stratify", action="store_true", help="stratify the ground truth samples")
    p.add_argument("--size", type=int, default=128)
    p.add_argument("-o", "--output", required=True, help="output directory")

    p = sub.add_parser("env-error", help="closed-form environment shading against MC")
    p.add_argument("--env", action="append", default=[], help="DCTC file or face directory (repeatable)")
    p.add_argument("--cutoffs", type=_cutoff, nargs="+", default=["dc", "full"])
    p.add_argument("--integrand", choices=["exact", "approximated"], default="exact")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("-o", "--output", required=True, help="output directory")

    p = sub.add_parser("bench", help="time closed-form vs MC shading")
    p.add_argument("--scene")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("-o", "--output", required=True, help="output directory")
    return parser


def cmd_render(args):
    from .render import RenderJob, load_scene, render

    scene = load_scene(args.scene)
    mode = "closed_form" if args.mode == "closed" else "mc"
    cfg = McConfig(args.samples, args.seed, args.integrand, not args.no_stratify)
    render(RenderJob(scene, mode, cfg, args.output))
    print(f"wrote {args.output}")


def cmd_precompute(args):
    faces = [dct_forward(read_image(path)) for path in args.faces]
    if args.cutoff:
        faces = [truncate(f, *args.cutoff) for f in faces]
    save_coeffs(faces, args.output)
    print(f"wrote {args.output} ({faces[0].N}x{faces[0].M} per face, cutoff {faces[0].cutoff})")


def cmd_compare(args):
    a, b = read_image(args.a), read_image(args.b)
    if args.metric == "psnr":
        value = psnr(a, b, args.channel, peak=args.peak)
    else:
        value = rel_error_pct(a, b, args.channel)
    print(f"{value:.6g}")


def _scene_or_default(path, size):
    from .render import load_scene
    from .render.experiments import sphere_scene

    if path:
        return load_scene(path)
    return sphere_scene(size)


def cmd_sweep(args):
    from .render.experiments import default_sweep_lights, experiment_ratio_sweep

    scene = _scene_or_default(args.scene, args.size)
    if not args.scene:
        scene.lights = default_sweep_lights(args.distance)
    rows = experiment_ratio_sweep(scene, args.ratios, args.samples, args.seed, args.stratify, args.output)
    for r in rows:
        if r[2] == "S":
            print(f"ratio {r[1]:g}  S {r[3]:<14} {r[4]:.4f}")


def cmd_env_error(args):
    from .render.experiments import experiment_env_error, lowfreq_environment, sphere_scene
    from .render.scene import load_environment

    envs = {}
    for path in args.env:
        envs[os.path.splitext(os.path.basename(os.path.normpath(path)))[0]] = load_environment(path)
    if not envs:
        envs["lowfreq"] = lowfreq_environment()
    rows = experiment_env_error(
        sphere_scene(args.size), envs, args.cutoffs, args.samples, args.seed, args.integrand, args.output
    )
    for r in rows:
        if r[0] == "mean" and r[3] == "rel_error_pct":
            print(f"cutoff {r[1]:<6} {r[2]}  rel_error {r[4]:.4f}%")


def cmd_bench(args):
    from .render.experiments import bench, default_sweep_lights

    scene = _scene_or_default(args.scene, args.size)
    if not args.scene:
        scene.lights = default_sweep_lights()
    report = bench(scene, args.samples, args.repeats, out_dir=args.output)
    for mode in ("closed_form", "mc"):
        print(f"{mode:<12} median {report[mode]['median']:.4f}s  stdev {report[mode]['stdev']:.4f}s")
    print(f"speedup {report['speedup']:.1f}x (end to end {report['speedup_end_to_end']:.1f}x)")


COMMANDS = {
    "render": cmd_render,
    "precompute-dct": cmd_precompute,
    "compare": cmd_compare,
    "sweep-ratio": cmd_sweep,
    "env-error": cmd_env_error,
    "bench": cmd_bench,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ClosedLightError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
