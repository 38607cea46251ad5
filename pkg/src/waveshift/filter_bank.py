"""Orthogonal 1D QMF pairs, separable 2D filter banks and the dual-tree bank."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .signal_core import ComplexGrid2D, RealGrid2D, periodize

__all__ = [
    "QMF_TOLERANCE",
    "QSHIFT_A_H0",
    "QmfPair",
    "QmfReport",
    "QmfError",
    "FilterBank2D",
    "DualTreeBank",
    "mirror_filter",
    "qmf_pair",
    "haar_pair",
    "qshift_pair",
    "validate_qmf",
    "half_sample_delay_error",
    "make_filter_bank",
    "make_dual_tree_bank",
    "default_dual_tree_bank",
    "analytic_companion",
    "read_qmf_file",
    "write_qmf_file",
]

QMF_TOLERANCE = 1e-8

# Kingsbury's 10-tap Q-shift low-pass ("qshift_a", tree a, h0a), as
# distributed with the reference DT-CWT toolbox. Tree b uses the time reverse.
QSHIFT_A_H0 = np.array(
    [
        0.05113040528383166,
        -0.01397537024688884,
        -0.10983605166597087,
        0.26383956105893763,
        0.7666284677930372,
        0.5636557101270515,
        0.0008736226952171,
        -0.1002312195074762,
        -0.00168968127252815,
        -0.00618188189211644,
    ]
)


class QmfError(ValueError):
    """Raised when a filter pair violates the orthogonal QMF conditions."""


def mirror_filter(h: np.ndarray) -> np.ndarray:
    """High-pass mirror ``g[n] = (-1)^n h[L-1-n]`` of a low-pass ``h``."""
    h = np.asarray(h, dtype=float)
    return (-1.0) ** np.arange(len(h)) * h[::-1]


@dataclass(frozen=True, eq=False)
class QmfPair:
    """Low/high-pass orthogonal pair.

    ``origin`` is the tap position of sequence index 0, shared by ``h`` and
    ``g``; lowering it by one delays both filters by one sample.
    """

    h: np.ndarray
    g: np.ndarray
    label: str = "qmf"
    origin: int = 0

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        g = np.array(self.g, dtype=float)
        if h.ndim != 1 or h.shape != g.shape:
            raise QmfError(f"h and g must be 1D of equal length, got {h.shape}, {g.shape}")
        h.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)

    @property
    def length(self) -> int:
        return len(self.h)

    def delayed(self, d: int = 1, label: Optional[str] = None) -> "QmfPair":
        return QmfPair(self.h, self.g, label or f"{self.label}+{d}", self.origin - d)


def qmf_pair(h, label: str = "qmf", origin: Optional[int] = None) -> QmfPair:
    """Build a pair from its low-pass taps, origin centered by default."""
    h = np.asarray(h, dtype=float)
    if origin is None:
        origin = len(h) // 2
    return QmfPair(h, mirror_filter(h), label, origin)


def haar_pair() -> QmfPair:
    return qmf_pair(np.array([1.0, 1.0]) / np.sqrt(2), "haar", origin=0)


def qshift_pair(stage: str = "later") -> Tuple[QmfPair, QmfPair]:
    """Tree-H and tree-G Q-shift pairs for a given decomposition stage.

    For ``stage="later"`` tree G is the time reverse of tree H, giving the
    quarter-sample delay in each direction. For ``stage="first"`` both trees
    share the tree-H prototype and tree G is delayed by one sample.
    """
    h = QSHIFT_A_H0
    origin = len(h) // 2
    tree_h = qmf_pair(h, "qshift_a/H", origin)
    if stage == "later":
        return tree_h, qmf_pair(h[::-1], "qshift_a/G", origin)
    if stage == "first":
        return tree_h, tree_h.delayed(1, "qshift_a/G1")
    raise ValueError(f"stage must be 'first' or 'later', got {stage!r}")


@dataclass(frozen=True)
class QmfReport:
    norm: float
    orthogonality: float
    mirror: float

    @property
    def worst(self) -> float:
        return max(self.norm, self.orthogonality, self.mirror)

    def ok(self, tol: float = QMF_TOLERANCE) -> bool:
        return self.worst <= tol


def validate_qmf(pair: QmfPair) -> QmfReport:
    """Max violations of unit norm, even-shift orthogonality and mirroring."""
    h = pair.h
    L = len(h)
    norm = abs(np.sqrt(np.sum(h**2)) - 1.0)
    ac = np.correlate(h, h, mode="full")  # lag -(L-1)..(L-1)
    lags = np.arange(-(L - 1), L)
    even = lags % 2 == 0
    target = (lags == 0).astype(float)
    orth = float(np.max(np.abs(ac[even] - target[even])))
    mirror = float(np.max(np.abs(pair.g - mirror_filter(h))))
    return QmfReport(float(norm), orth, mirror)


def half_sample_delay_error(hH, hG, band: float = 0.8 * np.pi, n_grid: int = 1024) -> float:
    """Sup over ``|omega| <= band`` of ``|hG^(w) - exp(-i w/2) hH^(w)|``.

    Both filters are indexed from tap 0 and evaluated on an ``n_grid``-point
    FFT lattice with frequencies in ``[-pi, pi)``.
    """
    hH = np.asarray(hH)
    hG = np.asarray(hG)
    if hH.shape != hG.shape:
        raise ValueError(f"filters must have equal lengths, got {hH.shape}, {hG.shape}")
    if len(hH) > n_grid:
        raise ValueError("frequency grid is shorter than the filters")
    w = 2 * np.pi * np.fft.fftfreq(n_grid)
    FH = np.fft.fft(hH, n_grid)
    FG = np.fft.fft(hG, n_grid)
    resid = np.abs(FG - np.exp(-0.5j * w) * FH)
    return float(np.max(resid[np.abs(w) <= band + 1e-12]))


def _tensor(a: np.ndarray, oa: int, b: np.ndarray, ob: int) -> RealGrid2D:
    return RealGrid2D(np.outer(a, b), (oa, ob))


@dataclass(frozen=True, eq=False)
class FilterBank2D:
    """Separable bank ``G_0..G_3 = h(x)h, h(x)g, g(x)h, g(x)g``.

    ``rows`` supplies the first tensor factor (axis 0), ``cols`` the second.
    """

    rows: QmfPair
    cols: QmfPair

    @property
    def kernels(self) -> List[RealGrid2D]:
        r, c = self.rows, self.cols
        return [
            _tensor(r.h, r.origin, c.h, c.origin),
            _tensor(r.h, r.origin, c.g, c.origin),
            _tensor(r.g, r.origin, c.h, c.origin),
            _tensor(r.g, r.origin, c.g, c.origin),
        ]

    def factors(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        r, c = self.rows, self.cols
        return (r.h if k < 2 else r.g), (c.h if k % 2 == 0 else c.g)

    def tensor_residual(self) -> float:
        """Largest deviation of any kernel from its outer-product factors."""
        worst = 0.0
        for k, K in enumerate(self.kernels):
            a, b = self.factors(k)
            worst = max(worst, float(np.max(np.abs(K.data - np.outer(a, b)))))
        return worst


def make_filter_bank(rows: QmfPair, cols: Optional[QmfPair] = None) -> FilterBank2D:
    return FilterBank2D(rows, rows if cols is None else cols)


@dataclass(eq=False)
class DualTreeBank:
    """Four separable banks, bank ``k = 2 i + j`` built from pairs ``(i, j)``.

    Pair 0 is tree H, pair 1 tree G. ``first_stage_banks`` are used at stage 1
    and ``banks`` at every later stage.
    """

    banks: List[FilterBank2D]
    first_stage_banks: List[FilterBank2D]
    label: str = "dual-tree"
    # memoized per-J resulting kernels, filled by the dtcwpt module
    _cache: Dict = field(default_factory=dict, repr=False)

    def bank(self, stage: int, k: int) -> FilterBank2D:
        """Bank of tree ``k`` used at decomposition stage ``stage`` (1-based)."""
        return (self.first_stage_banks if stage == 1 else self.banks)[k]


def _pairs_to_banks(pairs: Sequence[QmfPair]) -> List[FilterBank2D]:
    return [FilterBank2D(pairs[k // 2], pairs[k % 2]) for k in range(4)]


def make_dual_tree_bank(
    pairH: QmfPair,
    pairG: QmfPair,
    first_stage_pairs: Optional[Tuple[QmfPair, QmfPair]] = None,
    label: str = "dual-tree",
) -> DualTreeBank:
    """Assemble the four dual-tree banks from validated QMF pairs."""
    if first_stage_pairs is None:
        first_stage_pairs = (pairH, pairG)
    for p in (pairH, pairG, *first_stage_pairs):
        report = validate_qmf(p)
        if not report.ok():
            raise QmfError(f"pair {p.label!r} is not an orthogonal QMF: {report}")
    return DualTreeBank(
        _pairs_to_banks((pairH, pairG)), _pairs_to_banks(first_stage_pairs), label
    )


def default_dual_tree_bank() -> DualTreeBank:
    """Q-shift dual-tree bank with the one-sample-delay first stage."""
    return make_dual_tree_bank(
        *qshift_pair("later"), first_stage_pairs=qshift_pair("first"), label="qshift_a"
    )


def analytic_companion(V: RealGrid2D, N: int) -> ComplexGrid2D:
    """Complex companion ``W`` with ``W^(xi) = (1 + sign xi_0) V^(xi)``.

    Computed on the ``N x N`` DFT lattice. The lines ``xi_0 = 0`` and
    ``xi_0 = -pi`` are their own mirror images and keep weight 1, so that
    ``Re W == V`` holds exactly on the torus. The result is an ``N x N`` grid
    covering the indices ``[-N/2, N - N/2)`` on each axis.
    """
    N = int(N)
    if V.shape[0] > N or V.shape[1] > N:
        raise ValueError(f"support {V.shape} exceeds N={N}")
    spec = np.fft.fft2(periodize(V, (N, N)))
    k = np.arange(N)
    weight = np.where(k == 0, 1.0, np.where(k < (N + 1) // 2, 2.0, 0.0))
    if N % 2 == 0:
        weight[N // 2] = 1.0
    w = np.fft.ifft2(spec * weight[:, None])
    c = N // 2
    return ComplexGrid2D(np.roll(w, (c, c), axis=(0, 1)), (c, c))


def read_qmf_file(path) -> QmfPair:
    """Parse ``qmf <label> <L>`` followed by ``L`` low-pass taps."""
    path = Path(path)
    tokens = path.read_text().split()
    if len(tokens) < 3 or tokens[0] != "qmf":
        raise ValueError(f"{path}: expected header 'qmf <label> <L>'")
    label = tokens[1]
    try:
        L = int(tokens[2])
        taps = np.array([float(t) for t in tokens[3:]])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if L < 2 or len(taps) != L:
        raise ValueError(f"{path}: header announces {L} taps, found {len(taps)}")
    return qmf_pair(taps, label)


def write_qmf_file(pair: QmfPair, path) -> None:
    taps = " ".join(repr(float(v)) for v in pair.h)
    Path(path).write_text(f"qmf {pair.label} {pair.length}\n{taps}\n")
