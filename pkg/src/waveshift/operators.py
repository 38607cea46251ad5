"""Gabor-like feature extractors: modulus (CGMod) and max-pooling (RGPool)."""

from __future__ import annotations

from typing import List, Tuple

import numpy as np
from scipy.ndimage import maximum_filter

from .dtcwpt import combine_trees, dt_tree_outputs
from .filter_bank import DualTreeBank
from .signal_core import (
    Grid2D,
    RealGrid2D,
    as_grid,
    circular_convolve,
    downsample,
    flip,
    periodize,
)

__all__ = ["maxpool", "relu", "cgmod", "rgpool", "dt_outputs"]


def maxpool(Y: Grid2D, q: int = 1, period=None) -> RealGrid2D:
    """Stride-2 max over the ``(2q+1) x (2q+1)`` cyclic neighbourhood of ``2n``."""
    if q < 0 or int(q) != q:
        raise ValueError(f"q must be a non-negative integer, got {q}")
    if np.iscomplexobj(Y.data):
        raise TypeError("max pooling needs a real input")
    period = Y.shape if period is None else tuple(period)
    if period[0] % 2 or period[1] % 2:
        raise ValueError(f"max pooling needs an even period, got {period}")
    data = periodize(Y, period)
    pooled = maximum_filter(data, size=2 * int(q) + 1, mode="wrap")
    return RealGrid2D(pooled[::2, ::2])


def relu(Y: Grid2D) -> RealGrid2D:
    return RealGrid2D(np.maximum(Y.data, 0.0), Y.origin)


def _check_divisible(X: Grid2D, m: int):
    if X.shape[0] % m or X.shape[1] % m:
        raise ValueError(f"image extent {X.shape} is not divisible by {m}")


def cgmod(X: Grid2D, W: Grid2D, m: int) -> RealGrid2D:
    """``|(X * flip(W)) down m|`` on the torus of ``X``."""
    _check_divisible(X, m)
    Z = downsample(circular_convolve(X, flip(W)), m)
    return RealGrid2D(np.abs(Z.data), Z.origin)


def rgpool(X: Grid2D, W: Grid2D, m: int, q: int = 1) -> RealGrid2D:
    """``maxpool_q((X * flip(Re W)) down m)``; overall decimation ``2 m``."""
    _check_divisible(X, 2 * m)
    realW = as_grid(np.real(W.data), W.origin)
    return maxpool(downsample(circular_convolve(X, flip(realW)), m), q)


def dt_outputs(
    X: Grid2D, bank: DualTreeBank, J: int, q: int = 1
) -> Tuple[List[RealGrid2D], List[RealGrid2D]]:
    """Per-channel RGPool and CGMod outputs of the dual-tree transform.

    ``Y_pool`` pools the real part of the undecimated-last-stage channels
    (subsampling ``2^(J-1)``), ``Y_mod`` is the modulus of the fully
    decimated channels (subsampling ``2^J``). Both have extent
    ``period / 2^J``.
    """
    undecimated = combine_trees(dt_tree_outputs(X, bank, J, undecimated_last=True))
    y_pool = [maxpool(U.real_part(), q) for U in undecimated]
    # the decimated channels are the even-phase samples of the undecimated ones
    y_mod = [downsample(U, 2).modulus() for U in undecimated]
    return y_pool, y_mod
