"""Real 2D wavelet packet transform on the torus and its resulting kernels.

Channel ``4 l + k`` at stage ``j + 1`` is obtained from channel ``l`` at stage
``j`` by correlating with bank kernel ``G_k`` and keeping even samples.
"""

from __future__ import annotations

from typing import List, Sequence, Union

from .filter_bank import FilterBank2D
from .signal_core import (
    Grid2D,
    RealGrid2D,
    as_grid,
    circular_convolve,
    delta,
    downsample,
    flip,
    linear_convolve,
    periodize,
    upsample,
)

__all__ = ["wpt_decompose", "wpt_reconstruct", "resulting_kernels", "stage_banks"]

BankSpec = Union[FilterBank2D, Sequence[FilterBank2D]]


def stage_banks(bank: BankSpec, J: int) -> List[FilterBank2D]:
    """Expand a bank spec to one bank per stage.

    A sequence lists the banks of the first stages; its last entry is reused
    for every remaining stage.
    """
    if J < 1:
        raise ValueError(f"J must be >= 1, got {J}")
    if isinstance(bank, FilterBank2D):
        return [bank] * J
    banks = list(bank)
    if not banks:
        raise ValueError("empty bank sequence")
    return [banks[min(s, len(banks) - 1)] for s in range(J)]


def _check_period(shape, J: int):
    f = 2**J
    if shape[0] % f or shape[1] % f:
        raise ValueError(f"image extent {shape} is not divisible by 2^J = {f}")


def _torus(X: Grid2D) -> Grid2D:
    return X if X.origin == (0, 0) else as_grid(periodize(X, X.shape))


def wpt_decompose(
    X: RealGrid2D, bank: BankSpec, J: int, undecimated_last: bool = False
) -> List[Grid2D]:
    """Decompose ``X`` (a torus image) into ``4^J`` packet channels.

    With ``undecimated_last`` the final stage skips the factor-2 decimation,
    so the outputs have extent ``period / 2^(J-1)``.
    """
    banks = stage_banks(bank, J)
    _check_period(X.shape, J - 1 if undecimated_last else J)
    maps = [_torus(X)]
    for s, b in enumerate(banks):
        flipped = [flip(G) for G in b.kernels]
        last = s == J - 1
        step = 1 if (last and undecimated_last) else 2
        maps = [
            downsample(circular_convolve(Y, F), step) for Y in maps for F in flipped
        ]
    return maps


def wpt_reconstruct(maps: Sequence[Grid2D], bank: BankSpec, J: int) -> Grid2D:
    """Inverse of the decimated :func:`wpt_decompose` (adjoint synthesis)."""
    banks = stage_banks(bank, J)
    maps = list(maps)
    if len(maps) != 4**J:
        raise ValueError(f"expected {4**J} channel maps for J={J}, got {len(maps)}")
    shapes = {m.shape for m in maps}
    if len(shapes) != 1:
        raise ValueError(f"channel maps have inconsistent extents {sorted(shapes)}")
    for s in reversed(range(J)):
        kernels = banks[s].kernels
        p0, p1 = maps[0].shape
        period = (2 * p0, 2 * p1)
        merged = []
        for l in range(len(maps) // 4):
            acc = None
            for k in range(4):
                up = as_grid(periodize(upsample(_torus(maps[4 * l + k]), 2), period))
                term = circular_convolve(up, kernels[k], period).data
                acc = term if acc is None else acc + term
            merged.append(as_grid(acc))
        maps = merged
    return maps[0]


def resulting_kernels(bank: BankSpec, J: int) -> List[RealGrid2D]:
    """Equivalent kernels ``V_l`` with ``X_l = (X * flip(V_l)) down 2^J``.

    Built by ``V^(j+1)_{4l+k} = V^(j)_l * (G_k up 2^j)`` from a unit impulse.
    """
    banks = stage_banks(bank, J)
    V = [delta()]
    for s, b in enumerate(banks):
        up = [upsample(G, 2**s) for G in b.kernels]
        V = [linear_convolve(v, g) for v in V for g in up]
    return V
