"""Corpus experiments, kernel analytics and result emission."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .dtcwpt import channel_frequencies, dt_kernels, levels_from_count
from .filter_bank import DualTreeBank
from .image_io import center_crop, load_luma, scale_to_u8, write_pgm
from .operators import dt_outputs
from .signal_core import (
    FreqPoint,
    Grid2D,
    RealGrid2D,
    as_grid,
    circular_convolve,
    flip,
)
from .theory import gamma_sq

__all__ = [
    "ChannelMetrics",
    "ImageMetrics",
    "KernelFormatError",
    "KernelSet",
    "PhaseTest",
    "CSV_COLUMNS",
    "IMAGE_SUFFIXES",
    "ingest",
    "list_corpus",
    "discrepancy_rho",
    "shift_rho",
    "image_metrics",
    "aggregate",
    "run_experiment",
    "spearman_pool_gamma",
    "horizontal_channels",
    "import_kernels",
    "export_kernels",
    "monochromaticity_delta",
    "phase_uniformity",
    "emit_csv",
    "fmt_float",
    "read_csv",
    "emit_heatmap",
    "metrics_plane",
]

CSV_COLUMNS = ["channel", "xi1", "xi2", "rho_sq", "rho_pool", "rho_mod", "gamma_sq", "n"]
IMAGE_SUFFIXES = {".pgm", ".pnm", ".png", ".jpg", ".jpeg", ".tif", ".tiff", ".bmp"}

# channels whose CGMod output is this small relative to the image are skipped
_ZERO_NORM = 1e-12


def ingest(path, crop: int = 224, shift=(0, 0)) -> RealGrid2D:
    """Luma image in ``[0, 1]``, center-cropped to ``crop x crop``.

    A nonzero ``shift`` moves the crop window by ``-shift``, producing the
    translated image ``T_shift X`` of the centered crop.
    """
    return RealGrid2D(center_crop(load_luma(path), crop, shift, path))


def list_corpus(corpus_dir) -> List[Path]:
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise FileNotFoundError(f"corpus directory {corpus_dir} does not exist")
    files = sorted(
        p for p in corpus_dir.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )
    if not files:
        raise ValueError(f"corpus directory {corpus_dir} holds no images")
    return files


def _check_same(a: Grid2D, b: Grid2D):
    if a.shape != b.shape:
        raise ValueError(f"extent mismatch {a.shape} vs {b.shape}")


def discrepancy_rho(y_mod: Grid2D, y_pool: Grid2D) -> float:
    """``|Y_mod - Y_pool| / |Y_mod|``."""
    _check_same(y_mod, y_pool)
    ref = y_mod.l2_norm
    if ref == 0:
        raise ZeroDivisionError("CGMod output has zero norm")
    return float(np.linalg.norm(y_mod.data - y_pool.data)) / ref


def shift_rho(y_a: Grid2D, y_b: Grid2D, y_mod_ref: Grid2D) -> float:
    """``|Y_b - Y_a| / |Y_mod_ref|``."""
    _check_same(y_a, y_b)
    ref = y_mod_ref.l2_norm
    if ref == 0:
        raise ZeroDivisionError("reference CGMod output has zero norm")
    return float(np.linalg.norm(y_b.data - y_a.data)) / ref


@dataclass(frozen=True)
class ChannelMetrics:
    """Corpus averages for one channel; ``n_images`` counts non-degenerate images."""

    channel: int
    xi: FreqPoint
    rho_sq: float
    rho_pool: float
    rho_mod: float
    gamma_pred: float
    n_images: int


@dataclass(frozen=True)
class ImageMetrics:
    """Per-channel values for one image; ``None`` where the channel is degenerate."""

    rho_sq: List[Optional[float]]
    rho_pool: List[Optional[float]]
    rho_mod: List[Optional[float]]


def image_metrics(
    X: Grid2D, X_shifted: Grid2D, bank: DualTreeBank, J: int, q: int = 1
) -> ImageMetrics:
    y_pool, y_mod = dt_outputs(X, bank, J, q)
    y_pool_s, y_mod_s = dt_outputs(X_shifted, bank, J, q)
    floor = _ZERO_NORM * X.l2_norm
    rs, rp, rm = [], [], []
    for yp, ym, yps, yms in zip(y_pool, y_mod, y_pool_s, y_mod_s):
        if ym.l2_norm <= floor:
            rs.append(None), rp.append(None), rm.append(None)
            continue
        rs.append(discrepancy_rho(ym, yp) ** 2)
        rp.append(shift_rho(yp, yps, ym))
        rm.append(shift_rho(ym, yms, ym))
    return ImageMetrics(rs, rp, rm)


def _mean(values: Iterable[Optional[float]]) -> Tuple[float, int]:
    kept = [v for v in values if v is not None]
    if not kept:
        return math.nan, 0
    return math.fsum(kept) / len(kept), len(kept)


def aggregate(per_image: Sequence[ImageMetrics], xi: Sequence[FreqPoint], J: int) -> List[ChannelMetrics]:
    """Average per-image metrics channel by channel (compensated sums).

    A channel degenerate on every image gets NaN metrics and ``n_images = 0``.
    """
    m = 2 ** (J - 1)
    out = []
    for l, x in enumerate(xi):
        rs, n = _mean(im.rho_sq[l] for im in per_image)
        rp, _ = _mean(im.rho_pool[l] for im in per_image)
        rm, _ = _mean(im.rho_mod[l] for im in per_image)
        g = gamma_sq((m * x[0], m * x[1]))
        out.append(ChannelMetrics(l, x, rs, rp, rm, g, n))
    return out


def run_experiment(
    corpus_dir,
    bank: DualTreeBank,
    J: int,
    shift=(1, 0),
    crop: int = 224,
    q: int = 1,
    threads: Optional[int] = None,
) -> List[ChannelMetrics]:
    """Shift-stability experiment over every image of ``corpus_dir``.

    Images are processed in filename order; each yields a centered crop and
    a crop translated by ``shift``. Results do not depend on ``threads``.
    """
    files = list_corpus(corpus_dir)
    xi, _ = channel_frequencies(dt_kernels(bank, J))

    def one(path):
        luma = load_luma(path)
        X = RealGrid2D(center_crop(luma, crop, (0, 0), path))
        Xs = RealGrid2D(center_crop(luma, crop, shift, path))
        return image_metrics(X, Xs, bank, J, q)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        per_image = list(pool.map(one, files))
    return aggregate(per_image, xi, J)


def spearman_pool_gamma(metrics: Sequence[ChannelMetrics]) -> float:
    """Rank correlation between ``rho_pool`` and the predicted ``gamma^2``."""
    rows = [c for c in metrics if c.n_images > 0]
    if len(rows) < 3 or len({c.rho_pool for c in rows}) < 2:
        return math.nan
    res = stats.spearmanr([c.rho_pool for c in rows], [c.gamma_pred for c in rows])
    return float(res.statistic if hasattr(res, "statistic") else res[0])


def horizontal_channels(metrics: Sequence[ChannelMetrics], axis: int = 0) -> List[int]:
    """Channels whose frequency along ``axis`` has the smallest magnitude."""
    low = min(abs(c.xi[axis]) for c in metrics)
    return [c.channel for c in metrics if abs(c.xi[axis]) <= low + 1e-9]


# kernel files ---------------------------------------------------------------


class KernelFormatError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.line = line


class KernelSet(list):
    """Kernels read from a file, with the file's group size."""

    def __init__(self, kernels=(), groupsize: int = 1):
        super().__init__(kernels)
        self.groupsize = groupsize

    def groups(self) -> List[List[Grid2D]]:
        g = self.groupsize
        return [list(self[i : i + g]) for i in range(0, len(self), g)]


def export_kernels(kernels: Sequence[Grid2D], path, groupsize: int = 1) -> None:
    """Write kernels of a common shape in the textual grid format."""
    kernels = list(kernels)
    if not kernels:
        raise ValueError("no kernels to export")
    shapes = {K.shape for K in kernels}
    if len(shapes) != 1:
        raise ValueError(f"kernels must share one shape, got {sorted(shapes)}")
    if len(kernels) % groupsize:
        raise ValueError(f"{len(kernels)} kernels do not split into groups of {groupsize}")
    rows, cols = kernels[0].shape
    is_complex = any(np.iscomplexobj(K.data) for K in kernels)
    lines = [f"kernels {len(kernels)} {rows} {cols} {'complex' if is_complex else 'real'} {groupsize}"]
    for K in kernels:
        for row in K.data:
            if is_complex:
                row = np.column_stack([row.real, np.imag(row)]).ravel()
            lines.append(" ".join(fmt_float(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def import_kernels(path) -> KernelSet:
    """Parse a kernel file; each kernel gets a centered origin."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise KernelFormatError(path, 0, f"cannot read ({exc.strerror})") from None
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, t) for i, t in lines if t and not t[0].startswith("#")]
    if not lines:
        raise KernelFormatError(path, 1, "empty kernel file")
    lineno, head = lines[0]
    if len(head) != 6 or head[0] != "kernels" or head[4] not in ("real", "complex"):
        raise KernelFormatError(
            path, lineno, "expected 'kernels <count> <rows> <cols> <real|complex> <groupsize>'"
        )
    try:
        count, rows, cols, groupsize = (int(head[i]) for i in (1, 2, 3, 5))
    except ValueError:
        raise KernelFormatError(path, lineno, "non-integer size in header") from None
    if min(count, rows, cols, groupsize) < 1 or count % groupsize:
        raise KernelFormatError(path, lineno, "invalid sizes in header")
    is_complex = head[4] == "complex"
    width = 2 * cols if is_complex else cols
    body = lines[1:]
    values = np.empty((max(len(body), count * rows), width))
    for r, (i, toks) in enumerate(body):
        if len(toks) != width:
            raise KernelFormatError(path, i, f"expected {width} values, found {len(toks)}")
        try:
            values[r] = [float(t) for t in toks]
        except ValueError as exc:
            raise KernelFormatError(path, i, str(exc)) from None
    if len(body) != count * rows:
        last = body[-1][0] if body else lineno
        raise KernelFormatError(path, last, f"expected {count * rows} rows, found {len(body)}")
    if is_complex:
        values = values[:, 0::2] + 1j * values[:, 1::2]
    origin = (rows // 2, cols // 2)
    kernels = [as_grid(values[k * rows : (k + 1) * rows], origin) for k in range(count)]
    return KernelSet(kernels, groupsize)


# kernel analytics -----------------------------------------------------------


def monochromaticity_delta(group: Sequence[Grid2D]) -> Tuple[np.ndarray, np.ndarray]:
    """Projection weights ``mu_k`` onto the mean kernel and residuals ``delta_k``.

    ``mu_k = <V, V_k> / |V|^2`` and ``delta_k = 1 - <V, V_k>^2 / (|V|^2 |V_k|^2)``
    with ``V`` the mean kernel.
    """
    group = list(group)
    if not group:
        raise ValueError("empty kernel group")
    stack = np.stack([np.real(K.data) for K in group])
    mean = stack.mean(axis=0)
    mean_sq = float(np.sum(mean * mean))
    if mean_sq == 0:
        raise ZeroDivisionError("mean kernel is zero")
    inner = np.einsum("kij,ij->k", stack, mean)
    norms_sq = np.einsum("kij,kij->k", stack, stack)
    if np.any(norms_sq == 0):
        raise ZeroDivisionError("a kernel in the group is zero")
    mu = inner / mean_sq
    delta = 1.0 - inner**2 / (mean_sq * norms_sq)
    return mu, np.maximum(delta, 0.0)


@dataclass(frozen=True)
class PhaseTest:
    statistic: float
    pvalue: float
    nbins: int
    degenerate: bool


def phase_uniformity(X: Grid2D, W: Grid2D, nbins: int = 16, rel_floor: float = 1e-6) -> PhaseTest:
    """Chi-square uniformity test of the phases of ``X * flip(W)``.

    Inputs whose response is below ``rel_floor * |X| |W|`` are reported as
    degenerate with NaN statistics.
    """
    if nbins < 8:
        raise ValueError(f"nbins must be >= 8, got {nbins}")
    Z = circular_convolve(X, flip(W)).data
    scale = X.l2_norm * W.l2_norm
    if scale == 0 or np.linalg.norm(Z) <= rel_floor * scale:
        return PhaseTest(math.nan, math.nan, nbins, True)
    counts, _ = np.histogram(np.angle(Z).ravel(), bins=nbins, range=(-np.pi, np.pi))
    res = stats.chisquare(counts)
    return PhaseTest(float(res.statistic), float(res.pvalue), nbins, False)


# emission -------------------------------------------------------------------


def fmt_float(value) -> str:
    """Shortest round-tripping text for a float (numpy scalars included)."""
    return repr(float(value))


def emit_csv(metrics: Sequence[ChannelMetrics], path, footer: Sequence[str] = ()) -> None:
    """Write metric rows; ``footer`` lines are appended prefixed with ``#``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for c in metrics:
            w.writerow(
                [c.channel, fmt_float(c.xi[0]), fmt_float(c.xi[1]), fmt_float(c.rho_sq),
                 fmt_float(c.rho_pool), fmt_float(c.rho_mod), fmt_float(c.gamma_pred), c.n_images]
            )
        for line in footer:
            fh.write(f"# {line}\n")


def read_csv(path) -> List[ChannelMetrics]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows or rows[0] != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected CSV header")
    return [
        ChannelMetrics(int(r[0]), FreqPoint((float(r[1]), float(r[2]))), float(r[3]),
                       float(r[4]), float(r[5]), float(r[6]), int(r[7]))
        for r in rows[1:]
    ]


def metrics_plane(
    metrics: Sequence[ChannelMetrics], field: str, J: int, cell: int = 16
) -> np.ndarray:
    """Frequency-plane image with one ``cell x cell`` block per lattice point.

    Row blocks follow the first frequency component from ``-pi``; each
    channel also paints the mirrored point ``-xi``. Unpainted cells are NaN.
    """
    n = 2 ** (J + 1)
    step = np.pi / 2**J
    plane = np.full((n * cell, n * cell), np.nan)
    for c in metrics:
        value = getattr(c, field)
        for sign in (1, -1):
            i, j = (int(np.floor((sign * v + np.pi) / step)) % n for v in c.xi)
            plane[i * cell : (i + 1) * cell, j * cell : (j + 1) * cell] = value
    return plane


def emit_heatmap(
    source: Union[Grid2D, np.ndarray, Sequence[ChannelMetrics]],
    path,
    field: str = "rho_pool",
    J: Optional[int] = None,
    cell: int = 16,
    dark_high: bool = True,
) -> np.ndarray:
    """Write an 8-bit P5 heatmap and return its pixels.

    Values are min-max scaled, high values dark by default; a constant input
    gives uniform gray 128 and NaN pixels render white.
    """
    if isinstance(source, Grid2D):
        values = np.real(source.data)
    elif isinstance(source, np.ndarray):
        values = source
    else:
        metrics = list(source)
        if J is None:
            J = levels_from_count(len(metrics))
        values = metrics_plane(metrics, field, J, cell)
    pixels = scale_to_u8(values, dark_high=dark_high)
    finite = np.isfinite(values)
    if finite.any() and not finite.all():
        pixels = np.where(finite, pixels, 255).astype(np.uint8)
    write_pgm(path, pixels)
    return pixels

