"""Independent brute-force references shared by the test modules."""

import numpy as np

from waveshift.signal_core import ComplexGrid2D


def brute_maxpool(y, q):
    n0, n1 = y.shape
    out = np.empty((n0 // 2, n1 // 2))
    for a in range(n0 // 2):
        for b in range(n1 // 2):
            out[a, b] = max(
                y[(2 * a + i) % n0, (2 * b + j) % n1]
                for i in range(-q, q + 1)
                for j in range(-q, q + 1)
            )
    return out


def brute_cyclic(x, kernel, origin):
    """``sum_k x[n - k] K[k]`` on the torus of ``x``; ``origin`` indexes k=0."""
    n0, n1 = x.shape
    out = np.zeros((n0, n1), dtype=np.result_type(x, kernel))
    for r in range(kernel.shape[0]):
        for c in range(kernel.shape[1]):
            k0, k1 = r - origin[0], c - origin[1]
            out += kernel[r, c] * np.roll(x, (k0, k1), axis=(0, 1))
    return out


def brute_correlate(x, w):
    """``(x * flip(w))[n] = sum_k x[k] w[k - n]`` for ``w`` on the torus of ``x``."""
    n0, n1 = x.shape
    out = np.zeros((n0, n1), dtype=np.result_type(x, w))
    for a in range(n0):
        for b in range(n1):
            out[a, b] = np.sum(x * np.roll(np.roll(w, a, axis=0), b, axis=1))
    return out


def ideal_kernel(rng, N, center_idx, width):
    """Kernel whose DFT is a random-phase indicator of a ``width`` square box.

    Lattice index ``i`` carries frequency ``2 pi i / N - pi``.
    """
    spec = np.zeros((N, N), dtype=complex)
    a, b = center_idx
    rows = (np.arange(width) - width // 2 + a) % N
    cols = (np.arange(width) - width // 2 + b) % N
    spec[np.ix_(rows, cols)] = np.exp(2j * np.pi * rng.random((width, width)))
    n = np.arange(N)
    sign = np.outer((-1.0) ** n, (-1.0) ** n)
    return ComplexGrid2D(np.fft.ifft2(spec) * sign)


def gabor_kernel(xi, sigma=3.0, size=17):
    r = np.arange(size) - size // 2
    n0, n1 = np.meshgrid(r, r, indexing="ij")
    env = np.exp(-(n0**2 + n1**2) / (2 * sigma**2))
    return env * np.exp(1j * (xi[0] * n0 + xi[1] * n1)), (size // 2, size // 2)
