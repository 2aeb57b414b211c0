"""Figures for the experiment reports (written to files, never shown)."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _select(rows, channel, metric):
    return [(r[1], r[4]) for r in rows if r[2] == channel and r[3] == metric]


def plot_ratio_sweep(rows, path):
    psnr_pts = _select(rows, "S", "psnr")
    rel_pts = _select(rows, "S", "rel_error_pct")
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    x = [float(p[0]) for p in psnr_pts]
    ax1.plot(x, [p[1] for p in psnr_pts], "o-")
    ax1.set_xscale("log")
    ax1.set_xlabel("d^2 / area")
    ax1.set_ylabel("saturation PSNR (dB)")
    ax1.grid(True, alpha=0.3)
    ax2.plot([float(p[0]) for p in rel_pts], [p[1] for p in rel_pts], "s-", color="C1")
    ax2.set_xscale("log")
    ax2.set_xlabel("d^2 / area")
    ax2.set_ylabel("saturation relative error (%)")
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def plot_env_errors(rows, path):
    mean_rows = [r for r in rows if r[0] == "mean" and r[3] == "rel_error_pct"]
    cutoffs = list(dict.fromkeys(r[1] for r in mean_rows))
    channels = list(dict.fromkeys(r[2] for r in mean_rows))
    width = 0.8 / max(len(cutoffs), 1)
    fig, ax = plt.subplots(figsize=(7, 3.5))
    xs = np.arange(len(channels))
    for k, cut in enumerate(cutoffs):
        vals = [next(r[4] for r in mean_rows if r[1] == cut and r[2] == ch) for ch in channels]
        ax.bar(xs + k * width, vals, width, label=f"cutoff {cut}")
    ax.set_xticks(xs + 0.4 - width / 2)
    ax.set_xticklabels(channels)
    ax.set_ylabel("relative error (%)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def plot_bench(report, path):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    modes = ["closed_form", "mc"]
    med = [report[m]["median"] for m in modes]
    err = [report[m]["stdev"] for m in modes]
    ax.bar(modes, med, yerr=err, color=["C0", "C3"])
    ax.set_yscale("log")
    ax.set_ylabel("shading time per frame (s)")
    ax.set_title(f"speedup {report['speedup']:.1f}x")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
