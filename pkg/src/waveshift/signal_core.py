"""Finitely supported 2D sequences and the periodic operations built on them.

A grid stores the nonzero support of a sequence in ``l2(Z^2)`` together with
the array position of the sequence index ``(0, 0)``. Images and feature maps
live on a torus: origin ``(0, 0)`` and ``shape == period``.

All coordinate pairs (indices, shifts, frequencies) are ordered as
``(axis 0, axis 1)`` of the underlying array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.signal import convolve2d

__all__ = [
    "Grid2D",
    "RealGrid2D",
    "ComplexGrid2D",
    "FreqPoint",
    "as_grid",
    "delta",
    "periodize",
    "circular_convolve",
    "linear_convolve",
    "combine",
    "flip",
    "downsample",
    "upsample",
    "dtft_grid",
    "dtft_lattice",
    "fractional_shift",
    "cyclic_shift",
]

Pair = Tuple[int, int]


def _pair(value, name: str) -> Pair:
    try:
        a, b = value
    except (TypeError, ValueError):
        a = b = value
    if int(a) != a or int(b) != b:
        raise ValueError(f"{name} must be an integer pair, got {value!r}")
    return int(a), int(b)


@dataclass(frozen=True, eq=False)
class Grid2D:
    """A finitely supported 2D sequence.

    ``data[i, j]`` holds the sequence value at index
    ``(i - origin[0], j - origin[1])``; every index outside the array is 0.
    """

    data: np.ndarray
    origin: Pair = (0, 0)

    def __post_init__(self):
        arr = np.array(self.data, dtype=self._dtype, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"grid data must be 2D, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "origin", _pair(self.origin, "origin"))

    _dtype = None

    @property
    def shape(self) -> Pair:
        return self.data.shape

    @property
    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.data) ** 2)))

    @property
    def index_range(self) -> Tuple[np.ndarray, np.ndarray]:
        """Sequence indices covered by the array along each axis."""
        return (
            np.arange(self.shape[0]) - self.origin[0],
            np.arange(self.shape[1]) - self.origin[1],
        )

    def __getitem__(self, n) -> complex:
        i, j = n[0] + self.origin[0], n[1] + self.origin[1]
        if 0 <= i < self.shape[0] and 0 <= j < self.shape[1]:
            return self.data[i, j]
        return self.data.dtype.type(0)

    def with_data(self, data) -> "Grid2D":
        return as_grid(data, self.origin)

    def __neg__(self):
        return self.with_data(-self.data)

    def scaled(self, c) -> "Grid2D":
        return as_grid(self.data * c, self.origin)


class RealGrid2D(Grid2D):
    _dtype = np.float64


class ComplexGrid2D(Grid2D):
    _dtype = np.complex128

    def real_part(self) -> RealGrid2D:
        return RealGrid2D(self.data.real, self.origin)

    def imag_part(self) -> RealGrid2D:
        return RealGrid2D(self.data.imag, self.origin)

    def modulus(self) -> RealGrid2D:
        return RealGrid2D(np.abs(self.data), self.origin)


def as_grid(data, origin=(0, 0)) -> Grid2D:
    """Wrap an array as a real or complex grid depending on its dtype."""
    arr = np.asarray(data)
    if np.iscomplexobj(arr):
        return ComplexGrid2D(arr, origin)
    return RealGrid2D(arr, origin)


def delta(at=(0, 0), value=1.0) -> Grid2D:
    """Unit impulse at sequence index ``at``."""
    a0, a1 = _pair(at, "at")
    return as_grid(np.array([[value]]), (-a0, -a1))


@dataclass(frozen=True)
class FreqPoint:
    """A frequency pair in radians per sample, each component in [-pi, pi]."""

    xi: Tuple[float, float]

    def __post_init__(self):
        a, b = (float(v) for v in self.xi)
        tol = 1e-12
        if not (-np.pi - tol <= a <= np.pi + tol and -np.pi - tol <= b <= np.pi + tol):
            raise ValueError(f"frequency {self.xi} outside [-pi, pi]^2")
        object.__setattr__(self, "xi", (a, b))

    def __iter__(self):
        return iter(self.xi)

    def __getitem__(self, i):
        return self.xi[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.xi)


def periodize(X: Grid2D, period) -> np.ndarray:
    """Fold a grid onto the torus ``Z^2 / period``.

    Returns an array ``P`` of shape ``period`` with ``P[n mod period]`` equal
    to the sum of ``X[n + k * period]`` over all integer ``k``.
    """
    p0, p1 = _pair(period, "period")
    if p0 < 1 or p1 < 1:
        raise ValueError(f"period must be positive, got {(p0, p1)}")
    if X.origin == (0, 0) and X.shape == (p0, p1):
        return np.array(X.data)
    out = np.zeros((p0, p1), dtype=X.data.dtype)
    r0, r1 = X.index_range
    np.add.at(out, (np.mod(r0, p0)[:, None], np.mod(r1, p1)[None, :]), X.data)
    return out


def _check_support(X: Grid2D, period: Pair, what: str):
    if X.shape[0] > period[0] or X.shape[1] > period[1]:
        raise ValueError(
            f"{what} support {X.shape} exceeds period {period}"
        )


def circular_convolve(X: Grid2D, K: Grid2D, period=None) -> Grid2D:
    """Cyclic convolution ``(X * K)[n] = sum_k X[k] K[n - k]`` over a period.

    The result is a torus grid (origin ``(0, 0)``, shape ``period``), so
    integer shifts of ``X`` commute with the convolution. A kernel wider than
    the period is wrapped onto it, which is exactly the cyclic operation.
    """
    period = X.shape if period is None else _pair(period, "period")
    _check_support(X, period, "signal")
    fx = np.fft.fft2(periodize(X, period))
    fk = np.fft.fft2(periodize(K, period))
    out = np.fft.ifft2(fx * fk)
    if not (np.iscomplexobj(X.data) or np.iscomplexobj(K.data)):
        out = out.real
    return as_grid(out, (0, 0))


def linear_convolve(X: Grid2D, K: Grid2D) -> Grid2D:
    """Full (non-cyclic) convolution on ``Z^2``; origins add."""
    out = convolve2d(X.data, K.data)
    if not (np.iscomplexobj(X.data) or np.iscomplexobj(K.data)):
        out = np.real(out)
    return as_grid(out, (X.origin[0] + K.origin[0], X.origin[1] + K.origin[1]))


def combine(grids, coeffs) -> Grid2D:
    """Linear combination ``sum_i c_i X_i`` over the union of the supports."""
    grids = list(grids)
    if not grids or len(grids) != len(coeffs):
        raise ValueError("need one coefficient per grid and at least one grid")
    lo0 = min(-g.origin[0] for g in grids)
    lo1 = min(-g.origin[1] for g in grids)
    hi0 = max(g.shape[0] - g.origin[0] for g in grids)
    hi1 = max(g.shape[1] - g.origin[1] for g in grids)
    dtype = np.result_type(*(g.data.dtype for g in grids), *(np.asarray(c) for c in coeffs))
    out = np.zeros((hi0 - lo0, hi1 - lo1), dtype=dtype)
    for g, c in zip(grids, coeffs):
        a0, a1 = -g.origin[0] - lo0, -g.origin[1] - lo1
        out[a0 : a0 + g.shape[0], a1 : a1 + g.shape[1]] += c * g.data
    return as_grid(out, (-lo0, -lo1))


def flip(X: Grid2D) -> Grid2D:
    """``flip(X)[n] = X[-n]``."""
    s0, s1 = X.shape
    o0, o1 = X.origin
    return as_grid(X.data[::-1, ::-1], (s0 - 1 - o0, s1 - 1 - o1))


def _first_multiple(start: int, m: int) -> int:
    return -((-start) // m) * m


def downsample(X: Grid2D, m: int) -> Grid2D:
    """``(X down m)[n] = X[m n]``."""
    if int(m) != m or m < 1:
        raise ValueError(f"subsampling factor must be a positive integer, got {m}")
    m = int(m)
    if m == 1:
        return X
    r0, r1 = X.index_range
    idx = []
    new_origin = []
    for r in (r0, r1):
        first = _first_multiple(int(r[0]), m)
        keep = np.arange(first, int(r[-1]) + 1, m)
        idx.append(keep - int(r[0]))
        new_origin.append(-(first // m))
    if len(idx[0]) == 0 or len(idx[1]) == 0:
        return as_grid(np.zeros((1, 1), dtype=X.data.dtype))
    return as_grid(X.data[np.ix_(idx[0], idx[1])], tuple(new_origin))


def upsample(X: Grid2D, m: int) -> Grid2D:
    """``(X up m)[m n] = X[n]``, zero elsewhere."""
    if int(m) != m or m < 1:
        raise ValueError(f"upsampling factor must be a positive integer, got {m}")
    m = int(m)
    if m == 1:
        return X
    s0, s1 = X.shape
    out = np.zeros(((s0 - 1) * m + 1, (s1 - 1) * m + 1), dtype=X.data.dtype)
    out[::m, ::m] = X.data
    return as_grid(out, (X.origin[0] * m, X.origin[1] * m))


def dtft_lattice(N: int) -> np.ndarray:
    """The frequencies ``2 pi k / N - pi`` for ``k = 0..N-1``."""
    return 2 * np.pi * np.arange(N) / N - np.pi


def dtft_grid(X: Grid2D, N: int) -> ComplexGrid2D:
    """Sample the DTFT of ``X`` on the ``N x N`` lattice ``2 pi k / N - pi``.

    Entry ``[k0, k1]`` of the result holds ``X^(xi)`` at
    ``xi = (dtft_lattice(N)[k0], dtft_lattice(N)[k1])``.
    """
    N = int(N)
    _check_support(X, (N, N), "signal")
    r0, r1 = X.index_range
    # modulation by (-1)^n moves the lattice origin from 0 to -pi
    sign = np.outer((-1.0) ** np.mod(r0, 2), (-1.0) ** np.mod(r1, 2))
    modulated = as_grid(X.data * sign, X.origin)
    return ComplexGrid2D(np.fft.fft2(periodize(modulated, (N, N))))


def cyclic_shift(X: Grid2D, k, period=None) -> Grid2D:
    """Integer translation on the torus: ``(T_k X)[n] = X[n - k]``."""
    period = X.shape if period is None else _pair(period, "period")
    k0, k1 = _pair(k, "shift")
    return as_grid(np.roll(periodize(X, period), (k0, k1), axis=(0, 1)))


def fractional_shift(X: Grid2D, u, period=None) -> Grid2D:
    """Band-limited translation ``T_u X`` on the torus for real ``u``.

    Realized as a DFT phase ramp ``exp(-i <omega, u>)`` with frequencies in
    ``[-pi, pi)``. Integer ``u`` reduces to an exact cyclic shift. For
    non-integer ``u`` the Nyquist bins have no conjugate partner, so the
    result is returned as a complex grid.
    """
    period = X.shape if period is None else _pair(period, "period")
    _check_support(X, period, "signal")
    u0, u1 = (float(v) for v in u)
    if u0.is_integer() and u1.is_integer():
        return cyclic_shift(X, (int(u0), int(u1)), period)
    w0 = 2 * np.pi * np.fft.fftfreq(period[0])
    w1 = 2 * np.pi * np.fft.fftfreq(period[1])
    ramp = np.exp(-1j * (w0[:, None] * u0 + w1[None, :] * u1))
    spec = np.fft.fft2(periodize(X, period))
    return ComplexGrid2D(np.fft.ifft2(spec * ramp))
