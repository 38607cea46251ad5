"""Command-line interface: ``waveshift {gamma,decompose,experiment,kernels}``.

Exit status is 0 on success, 1 on runtime or data errors and 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import analysis, theory
from .dtcwpt import dt_decompose, energy_in_window, max_energy_in_window
from .filter_bank import QmfError, analytic_companion, default_dual_tree_bank
from .image_io import ImageError
from .signal_core import dtft_grid, dtft_lattice

_fmt = analysis.fmt_float

THREADS_ENV = "WAVESHIFT_THREADS"


def _ranged(kind, lo=None, hi=None, lo_open=False):
    """argparse type accepting ``kind`` values inside a documented range."""

    def parse(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {kind.__name__}, got {text!r}") from None
        too_low = lo is not None and (value <= lo if lo_open else value < lo)
        if too_low or (hi is not None and value > hi) or (kind is float and not math.isfinite(value)):
            left = "(" if lo_open else "["
            raise argparse.ArgumentTypeError(f"{value} outside {left}{lo}, {hi}]")
        return value

    return parse


def _shift(text):
    try:
        dx, dy = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected dx,dy integers, got {text!r}") from None
    if max(abs(dx), abs(dy)) > 64:
        raise argparse.ArgumentTypeError("shift components must lie in [-64, 64]")
    return dx, dy


def _threads(args) -> Optional[int]:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV}={env!r} is not an integer") from None
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1")
        return n
    return None


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gamma(args) -> int:
    out = _outdir(args.out)
    grid = theory.gamma_heatmap(args.m, args.q, args.res)
    f = theory.heatmap_frequencies(args.res)
    stem = out / f"gamma_m{args.m}_q{args.q}"
    analysis.emit_heatmap(grid, stem.with_suffix(".pgm"))
    with open(stem.with_suffix(".csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "xi1", "xi2", "gamma_sq"])
        for i in range(args.res):
            for j in range(args.res):
                w.writerow([i, j, _fmt(f[i]), _fmt(f[j]), _fmt(grid.data[i, j])])
    if args.mc:
        rng = np.random.default_rng(args.seed)
        picks = rng.integers(0, args.res, size=(8, 2))
        with open(out / f"gamma_m{args.m}_q{args.q}_mc.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["xi1", "xi2", "gamma_sq", "mc_mean", "mc_stderr"])
            for i, j in picks:
                zeta = (args.m * f[i], args.m * f[j])
                est = theory.gamma_mc_oracle(
                    zeta, args.q, args.mc, seed=args.seed, threads=_threads(args)
                )
                w.writerow([_fmt(f[i]), _fmt(f[j]), _fmt(grid.data[i, j]),
                            _fmt(est.mean), _fmt(est.stderr)])
    print(f"wrote {stem}.pgm and {stem}.csv")
    return 0


def cmd_decompose(args) -> int:
    out = _outdir(args.out)
    X = analysis.ingest(args.image, crop=args.crop)
    bank = default_dual_tree_bank()
    ch = dt_decompose(X, bank, args.J, undecimated_last=args.undecimated_last)
    with open(out / "manifest.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["channel", "xi1", "xi2", "snap_distance", "edge", "rows", "cols", "l2_norm", "file"])
        for l, Z in enumerate(ch.maps):
            name = f"channel_{l:03d}.txt"
            analysis.export_kernels([Z], out / name)
            w.writerow([l, _fmt(ch.xi[l][0]), _fmt(ch.xi[l][1]), _fmt(ch.snap_distance[l]),
                        int(ch.edge[l]), Z.shape[0], Z.shape[1], _fmt(Z.l2_norm), name])
    print(f"wrote {len(ch.maps)} channels to {out}")
    return 0


def cmd_experiment(args) -> int:
    out = _outdir(args.out)
    bank = default_dual_tree_bank()
    metrics = analysis.run_experiment(
        args.corpus, bank, args.J, args.shift, crop=args.crop, q=args.q, threads=_threads(args)
    )
    n_images = len(analysis.list_corpus(args.corpus))
    rho = analysis.spearman_pool_gamma(metrics)
    footer = [
        f"images={n_images}",
        f"J={args.J} shift={args.shift[0]},{args.shift[1]}",
        f"spearman_rho_pool_vs_gamma_sq={_fmt(rho)}",
    ]
    analysis.emit_csv(metrics, out / "metrics.csv", footer)
    for field in ("rho_sq", "rho_pool", "rho_mod"):
        analysis.emit_heatmap(metrics, out / f"{field}.pgm", field=field, J=args.J)
    print(f"wrote metrics for {len(metrics)} channels over {n_images} images; spearman={rho:.4f}")
    return 0


def cmd_kernels(args) -> int:
    kernels = analysis.import_kernels(args.kernels)
    rows: List[list] = []
    for g, group in enumerate(kernels.groups()):
        mu, delta = analysis.monochromaticity_delta(group)
        for k, K in enumerate(group):
            N = max(args.N, *K.shape)
            # a real kernel is analysed through its one-sided companion
            W = K if np.iscomplexobj(K.data) else analytic_companion(K, N)
            peaks, _ = _peak(W, N)
            ratio = energy_in_window(W, peaks, args.kappa, N)
            best, _ = max_energy_in_window(W, args.kappa, N)
            rows.append([g * kernels.groupsize + k, g, _fmt(ratio), _fmt(best),
                         _fmt(peaks[0]), _fmt(peaks[1]), _fmt(mu[k]), _fmt(delta[k])])
    header = ["kernel", "group", "energy_ratio", "max_energy_ratio", "peak_xi1", "peak_xi2", "mu", "delta"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return 0


def _peak(W, N):
    power = np.abs(dtft_grid(W, N).data)
    a, b = np.unravel_index(np.argmax(power), power.shape)
    lat = dtft_lattice(N)
    return (float(lat[a]), float(lat[b])), float(power[a, b])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="waveshift", description="Shift-invariance analysis of Gabor-like feature extractors."
    )
    p.add_argument("--threads", type=_ranged(int, 1, 1024), default=None,
                   help=f"worker threads [1, 1024] (default: ${THREADS_ENV} or all cores)")
    p.add_argument("--seed", type=_ranged(int, 0, 2**63 - 1), default=0,
                   help="seed for every stochastic step [0, 2^63-1] (default 0)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gamma", help="gamma_q(m xi)^2 heatmap and grid CSV")
    g.add_argument("--m", type=_ranged(int, 1, 64), default=4, help="subsampling factor [1, 64]")
    g.add_argument("--q", type=_ranged(int, 1, 8), default=1, help="pooling half-width [1, 8]")
    g.add_argument("--res", type=_ranged(int, 16, 4096), default=256, help="grid size [16, 4096]")
    g.add_argument("--mc", type=_ranged(int, 1, 10**8), default=0,
                   help="Monte-Carlo samples for a cross-check at 8 random grid points [1, 1e8]")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_gamma)

    d = sub.add_parser("decompose", help="dual-tree channels of one image")
    d.add_argument("--image", required=True, help="PGM/PNG/JPEG input")
    d.add_argument("--J", type=_ranged(int, 1, 6), required=True, help="levels [1, 6]")
    d.add_argument("--undecimated-last", action="store_true", help="skip decimation at stage J")
    d.add_argument("--crop", type=_ranged(int, 8, 8192), default=224, help="center crop [8, 8192]")
    d.add_argument("--out", required=True, help="output directory")
    d.set_defaults(func=cmd_decompose)

    e = sub.add_parser("experiment", help="corpus shift-stability experiment")
    e.add_argument("--corpus", required=True, help="directory of images")
    e.add_argument("--J", type=_ranged(int, 1, 5), default=2, help="levels [1, 5]")
    e.add_argument("--shift", type=_shift, default=(1, 0), help="dx,dy integer shift (default 1,0)")
    e.add_argument("--crop", type=_ranged(int, 8, 8192), default=224, help="center crop [8, 8192]")
    e.add_argument("--q", type=_ranged(int, 1, 8), default=1, help="pooling half-width [1, 8]")
    e.add_argument("--out", required=True, help="output directory")
    e.set_defaults(func=cmd_experiment)

    k = sub.add_parser("kernels", help="energy-window and monochromaticity analytics")
    k.add_argument("--kernels", required=True, help="kernel file")
    k.add_argument("--kappa", type=_ranged(float, 0.0, 2 * math.pi, lo_open=True), required=True,
                   help="Fourier window size (0, 2pi]")
    k.add_argument("--N", type=_ranged(int, 16, 4096), default=128, help="DTFT grid size [16, 4096]")
    k.add_argument("--out", default=None, help="CSV path (default: stdout)")
    k.set_defaults(func=cmd_kernels)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ImageError, QmfError, ValueError, ZeroDivisionError, OSError, ArithmeticError) as exc:
        print(f"waveshift {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
