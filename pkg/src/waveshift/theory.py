"""Closed-form shift-invariance bounds and their Monte-Carlo oracle.

For a frequency pair ``zeta`` and pooling half-width ``q`` the phases
``<zeta, k>`` over ``|k|_inf <= q`` split the unit circle into arcs. The
expected squared gap between the max-pooled real part and the modulus is

    gamma_q(zeta)^2 = 3/2 + 1/(4 pi) * sum_i (sin D_i - 8 sin(D_i / 2))

where ``D_i`` are the arc lengths.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .signal_core import RealGrid2D

__all__ = [
    "ArcPartition",
    "McEstimate",
    "arc_partition",
    "alpha",
    "gamma",
    "gamma_sq",
    "gamma_sq_array",
    "gamma_mc_oracle",
    "gamma_heatmap",
    "heatmap_frequencies",
    "invariance_bound",
    "BOUND_IGNORES_BETA",
]

TWO_PI = 2 * np.pi

# Reported bounds drop the unknown beta_q correction term.
BOUND_IGNORES_BETA = True


def _offsets(q: int) -> np.ndarray:
    if q < 1 or int(q) != q:
        raise ValueError(f"q must be a positive integer, got {q}")
    r = np.arange(-q, q + 1)
    k0, k1 = np.meshgrid(r, r, indexing="ij")
    return np.stack([k0.ravel(), k1.ravel()], axis=1).astype(float)


@dataclass(frozen=True, eq=False)
class ArcPartition:
    """Sorted phase angles in ``[0, 2pi)`` with ``2pi`` appended, and the gaps."""

    angles: np.ndarray
    gaps: np.ndarray

    @property
    def count(self) -> int:
        return len(self.angles) - 1


def _angles(zeta: np.ndarray, q: int) -> np.ndarray:
    """Sorted phases for an array of frequency pairs, shape ``(..., N_q)``."""
    phases = np.mod(zeta @ _offsets(q).T, TWO_PI)
    return np.sort(phases, axis=-1)


def _gaps(angles: np.ndarray) -> np.ndarray:
    closed = np.concatenate([angles, np.full(angles.shape[:-1] + (1,), TWO_PI)], axis=-1)
    # the k = 0 phase is exactly 0, so the first sorted angle is the origin
    return np.diff(closed, axis=-1)


def arc_partition(zeta, q: int = 1) -> ArcPartition:
    z = np.asarray(zeta, dtype=float)
    angles = _angles(z, q)
    return ArcPartition(np.append(angles, TWO_PI), _gaps(angles))


def alpha(tau) -> float:
    """Deterministic CGMod bound ``|tau|_1 / 2``."""
    return float(np.sum(np.abs(np.asarray(tau, dtype=float)))) / 2


def gamma_sq_array(zeta: np.ndarray, q: int = 1) -> np.ndarray:
    """Vectorized ``gamma_q^2`` for frequency pairs stacked on the last axis."""
    zeta = np.asarray(zeta, dtype=float)
    gaps = _gaps(_angles(zeta, q))
    val = 1.5 + np.sum(np.sin(gaps) - 8 * np.sin(gaps / 2), axis=-1) / (4 * np.pi)
    if np.any(val < -1e-12):
        raise ArithmeticError(f"negative gamma radicand {np.min(val)}")
    return np.maximum(val, 0.0)


def gamma_sq(zeta, q: int = 1) -> float:
    return float(gamma_sq_array(np.asarray(zeta, dtype=float), q))


def gamma(zeta, q: int = 1) -> float:
    return math.sqrt(gamma_sq(zeta, q))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    nsamples: int


def _mc_shard(phases: np.ndarray, seed: int, shard: int, n: int, chunk: int):
    rng = np.random.Generator(np.random.Philox(seed).jumped(shard))
    total = total_sq = 0.0
    done = 0
    while done < n:
        size = min(chunk, n - done)
        theta = rng.uniform(0.0, TWO_PI, size)
        # max_k cos(a_k - theta) is the cosine of the distance to the nearest phase
        hi = np.searchsorted(phases, theta, side="right")
        nearest = np.minimum(theta - phases[hi - 1], phases[hi] - theta)
        v = (1.0 - np.cos(nearest)) ** 2
        total += math.fsum(v)
        total_sq += math.fsum(v * v)
        done += size
    return total, total_sq


def gamma_mc_oracle(
    zeta,
    q: int = 1,
    nsamples: int = 1_000_000,
    seed: int = 0,
    shard_size: int = 250_000,
    threads: Optional[int] = None,
) -> McEstimate:
    """Monte-Carlo estimate of ``E[(1 - max_k cos(<zeta,k> - theta))^2]``.

    ``theta`` is uniform on the circle. Shard ``i`` draws from
    ``Philox(seed).jumped(i)``, so the result depends only on ``seed``,
    ``nsamples`` and ``shard_size``, never on the thread count.
    """
    if nsamples < 1:
        raise ValueError("nsamples must be >= 1")
    wrapped = np.sort(np.mod(np.asarray(zeta, dtype=float) @ _offsets(q).T, TWO_PI))
    # pad one period on each side so every theta in [0, 2pi) has two neighbours
    phases = np.concatenate([wrapped[-1:] - TWO_PI, wrapped, wrapped[:1] + TWO_PI])
    sizes = [min(shard_size, nsamples - s) for s in range(0, nsamples, shard_size)]
    jobs = [(phases, seed, i, n, 50_000) for i, n in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda a: _mc_shard(*a), jobs))
    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    mean = total / nsamples
    var = max(total_sq / nsamples - mean**2, 0.0) * nsamples / max(nsamples - 1, 1)
    return McEstimate(mean, math.sqrt(var / nsamples), nsamples)


def heatmap_frequencies(resolution: int) -> np.ndarray:
    """Axis samples ``-pi + 2 pi i / resolution`` used by :func:`gamma_heatmap`."""
    return -np.pi + TWO_PI * np.arange(resolution) / resolution


def gamma_heatmap(m: int, q: int = 1, resolution: int = 256) -> RealGrid2D:
    """``gamma_q(m xi)^2`` with ``data[i, j]`` at ``xi = (f[i], f[j])``.

    ``f = heatmap_frequencies(resolution)``; the grid contains 0 and the
    multiples of ``pi / 2`` whenever ``resolution`` is a multiple of 4.
    """
    if resolution < 16:
        raise ValueError(f"resolution must be >= 16, got {resolution}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    f = heatmap_frequencies(resolution)
    a, b = np.meshgrid(f, f, indexing="ij")
    zeta = m * np.stack([a, b], axis=-1)
    return RealGrid2D(gamma_sq_array(zeta, q))


def invariance_bound(zeta, q: int, kappa: float, u) -> float:
    """Approximate RGPool bound ``2 gamma_q(zeta) + alpha(kappa u)``.

    The ``beta_q`` term has no known closed form and is taken as 0 (see
    ``BOUND_IGNORES_BETA``). Requires ``|u|_1 <= pi / kappa``.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    u = np.asarray(u, dtype=float)
    if np.sum(np.abs(u)) > np.pi / kappa * (1 + 1e-12):
        raise ValueError(f"shift {tuple(u)} violates |u|_1 <= pi/kappa = {np.pi / kappa}")
    return 2 * gamma(zeta, q) + alpha(kappa * u)
