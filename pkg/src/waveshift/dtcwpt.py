"""Dual-tree complex wavelet packet transform.

Four real packet trees, tree ``k = 2 i + j`` filtering rows with pair ``i``
and columns with pair ``j``, are combined into ``2 * 4^J`` complex channels::

    Z_l         = (X0 - X3) + i (X2 + X1)
    Z_{4^J + l} = (X0 + X3) + i (X2 - X1)

Each channel is nearly analytic with spectrum concentrated around a
frequency ``xi_l`` on the lattice ``(sigma + 1/2) pi / 2^J``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .filter_bank import DualTreeBank
from .signal_core import (
    ComplexGrid2D,
    FreqPoint,
    Grid2D,
    combine,
    dtft_grid,
    dtft_lattice,
)
from .wpt import resulting_kernels, wpt_decompose

__all__ = [
    "DtChannels",
    "dt_decompose",
    "dt_tree_outputs",
    "dt_kernels",
    "combine_trees",
    "channel_count",
    "levels_from_count",
    "default_kappa",
    "channel_frequencies",
    "energy_in_window",
    "max_energy_in_window",
    "spectral_grid_size",
    "is_edge_frequency",
]


def channel_count(J: int) -> int:
    return 2 * 4**J


def levels_from_count(count: int) -> int:
    J = 1
    while channel_count(J) < count:
        J += 1
    if channel_count(J) != count:
        raise ValueError(f"{count} is not a dual-tree channel count 2*4^J")
    return J


def default_kappa(J: int) -> float:
    """Relaxed Fourier window ``pi / 2^(J-1)`` used with the Q-shift filters."""
    return np.pi / 2 ** (J - 1)


def is_edge_frequency(xi, J: int) -> bool:
    """True for lattice frequencies in the outermost ring next to +-pi."""
    edge = (1 - 2.0 ** -(J + 1)) * np.pi
    return bool(max(abs(float(v)) for v in xi) >= edge - 1e-9)


@dataclass(frozen=True, eq=False)
class DtChannels:
    """Complex channels of one decomposition with their frequency labels."""

    maps: List[ComplexGrid2D]
    J: int
    xi: List[FreqPoint]
    kappa: float
    snap_distance: List[float] = field(default_factory=list)
    edge: List[bool] = field(default_factory=list)
    undecimated_last: bool = False

    def __post_init__(self):
        n = channel_count(self.J)
        if len(self.maps) != n or len(self.xi) != n:
            raise ValueError(f"expected {n} maps and labels for J={self.J}")

    def __len__(self):
        return len(self.maps)


def combine_trees(trees: Sequence[Sequence[Grid2D]]) -> List[ComplexGrid2D]:
    """Merge the four real trees' channels into complex channels."""
    if len(trees) != 4:
        raise ValueError("need exactly four trees")
    x0, x1, x2, x3 = trees
    first, second = [], []
    for a, b, c, d in zip(x0, x1, x2, x3):
        first.append(combine([a, d, c, b], [1, -1, 1j, 1j]))
        second.append(combine([a, d, c, b], [1, 1, 1j, -1j]))
    return [ComplexGrid2D(z.data, z.origin) for z in first + second]


def _tree_banks(bank: DualTreeBank, k: int, J: int):
    return [bank.bank(s + 1, k) for s in range(J)]


def dt_tree_outputs(
    X: Grid2D, bank: DualTreeBank, J: int, undecimated_last: bool = False
) -> List[List[Grid2D]]:
    """The four real packet trees before complex combination."""
    return [
        wpt_decompose(X, _tree_banks(bank, k, J), J, undecimated_last) for k in range(4)
    ]


def dt_kernels(bank: DualTreeBank, J: int) -> List[ComplexGrid2D]:
    """Complex resulting kernels ``W_l`` with ``Z_l = (X * flip(W_l)) down 2^J``."""
    key = ("kernels", J)
    if key not in bank._cache:
        trees = [resulting_kernels(_tree_banks(bank, k, J), J) for k in range(4)]
        bank._cache[key] = combine_trees(trees)
    return bank._cache[key]


def spectral_grid_size(kernels: Sequence[Grid2D], minimum: int = 128) -> int:
    """Smallest power of two >= ``minimum`` covering every kernel support."""
    need = max(max(K.shape) for K in kernels)
    N = minimum
    while N < need:
        N *= 2
    return N


def _snap(x: np.ndarray, J: int) -> np.ndarray:
    step = np.pi / 2**J
    cell = np.clip(np.floor(x / step), -(2**J), 2**J - 1)
    return (cell + 0.5) * step


def channel_frequencies(
    kernels: Sequence[Grid2D], N: Optional[int] = None
) -> Tuple[List[FreqPoint], List[float]]:
    """Peak frequency of each ``|W_l^|`` snapped to the ``(sigma+1/2) pi/2^J`` lattice.

    Returns the snapped labels and, per channel, the sup-norm distance between
    the raw spectral peak and its label.
    """
    J = levels_from_count(len(kernels))
    if N is None:
        N = spectral_grid_size(kernels)
    if N < 4 * 2**J:
        raise ValueError(f"N={N} is too coarse for J={J}")
    lattice = dtft_lattice(N)
    labels, dists = [], []
    for W in kernels:
        power = np.abs(dtft_grid(W, N).data)
        a, b = np.unravel_index(np.argmax(power), power.shape)
        peak = np.array([lattice[a], lattice[b]])
        snapped = _snap(peak, J)
        labels.append(FreqPoint(tuple(snapped)))
        dists.append(float(np.max(np.abs(peak - snapped))))
    return labels, dists


def _wrapped(x: np.ndarray) -> np.ndarray:
    return np.mod(x + np.pi, 2 * np.pi) - np.pi


def _window_mask(lattice: np.ndarray, center: float, kappa: float) -> np.ndarray:
    # half-open so that adjacent windows tile the circle without overlap
    d = _wrapped(lattice - center)
    eps = 1e-12
    return (d >= -kappa / 2 - eps) & (d < kappa / 2 - eps)


def _power(W: Grid2D, N: int) -> np.ndarray:
    power = np.abs(dtft_grid(W, N).data) ** 2
    total = power.sum()
    if not total > 0:
        raise ZeroDivisionError("kernel has zero energy; window ratio undefined")
    return power / total


def energy_in_window(W: Grid2D, xi, kappa: float, N: int = 128) -> float:
    """Fraction of spectral energy in the box ``|omega - xi|_inf <= kappa/2``.

    Evaluated on the ``N x N`` DTFT lattice with distances wrapped modulo
    ``2 pi``; the box is half-open so white noise yields ``(kappa/2pi)^2``.
    """
    if not 0 < kappa <= 2 * np.pi:
        raise ValueError(f"kappa must lie in (0, 2pi], got {kappa}")
    p = _power(W, N)
    lattice = dtft_lattice(N)
    m0 = _window_mask(lattice, float(xi[0]), kappa)
    m1 = _window_mask(lattice, float(xi[1]), kappa)
    return float(p[np.ix_(m0, m1)].sum())


def max_energy_in_window(W: Grid2D, kappa: float, N: int = 128) -> Tuple[float, FreqPoint]:
    """Best window ratio over all lattice centers, with the maximizing center."""
    if not 0 < kappa <= 2 * np.pi:
        raise ValueError(f"kappa must lie in (0, 2pi], got {kappa}")
    p = _power(W, N)
    lattice = dtft_lattice(N)
    # window around lattice[0] = -pi, moved to every center by cyclic correlation
    box = _window_mask(lattice, lattice[0], kappa).astype(float)
    kernel = np.outer(box, box)
    sums = np.real(np.fft.ifft2(np.fft.fft2(p) * np.conj(np.fft.fft2(kernel))))
    a, b = np.unravel_index(np.argmax(sums), sums.shape)
    return float(min(sums[a, b], 1.0)), FreqPoint((lattice[a], lattice[b]))


def dt_decompose(
    X: Grid2D,
    bank: DualTreeBank,
    J: int,
    undecimated_last: bool = False,
    kappa: Optional[float] = None,
) -> DtChannels:
    """Complex channels of ``X``, decimated by ``2^J`` or, with
    ``undecimated_last``, by ``2^(J-1)``."""
    trees = dt_tree_outputs(X, bank, J, undecimated_last)
    maps = combine_trees(trees)
    key = ("labels", J)
    if key not in bank._cache:
        bank._cache[key] = channel_frequencies(dt_kernels(bank, J))
    xi, dist = bank._cache[key]
    return DtChannels(
        maps=maps,
        J=J,
        xi=list(xi),
        kappa=default_kappa(J) if kappa is None else float(kappa),
        snap_distance=list(dist),
        edge=[is_edge_frequency(x, J) for x in xi],
        undecimated_last=undecimated_last,
    )
