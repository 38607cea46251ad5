import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.ndimage import maximum_filter

from waveshift.theory import (
    BOUND_IGNORES_BETA,
    alpha,
    arc_partition,
    gamma,
    gamma_heatmap,
    gamma_mc_oracle,
    gamma_sq,
    heatmap_frequencies,
    invariance_bound,
)

EVEN = (2 * np.pi / 3, 2 * np.pi / 9)
finite = st.floats(-20, 20, allow_nan=False)


def gamma_sq_reference(zeta, q=1):
    """Direct loop over the sorted phases; independent of the vectorized path."""
    phases = sorted(
        math.fmod(zeta[0] * a + zeta[1] * b, 2 * math.pi) % (2 * math.pi)
        for a in range(-q, q + 1)
        for b in range(-q, q + 1)
    )
    phases.append(phases[0] + 2 * math.pi)
    s = sum(math.sin(d) - 8 * math.sin(d / 2) for d in np.diff(phases))
    return 1.5 + s / (4 * math.pi)


def test_alpha():
    assert alpha((0, 0)) == 0
    assert alpha((np.pi, 0)) == pytest.approx(np.pi / 2)
    assert alpha((1, -2)) == 1.5


def test_arc_partitions():
    p = arc_partition((0, 0))
    assert p.count == 9
    np.testing.assert_array_equal(p.angles[:9], 0.0)
    assert sorted(p.gaps) == [0.0] * 8 + [2 * np.pi]
    p = arc_partition((np.pi, np.pi))
    assert np.count_nonzero(np.isclose(p.angles[:9], 0)) == 5
    assert np.count_nonzero(np.isclose(p.angles[:9], np.pi)) == 4
    np.testing.assert_allclose(sorted(p.gaps)[-2:], [np.pi, np.pi])
    np.testing.assert_allclose(arc_partition(EVEN).gaps, 2 * np.pi / 9, atol=1e-12)


@given(finite, finite, st.integers(1, 3))
def test_partition_invariants(a, b, q):
    p = arc_partition((a, b), q)
    assert p.count == (2 * q + 1) ** 2
    assert abs(p.gaps.sum() - 2 * np.pi) <= 1e-12
    assert np.all(p.gaps >= 0)


def test_gamma_anchors():
    assert gamma_sq((0, 0)) == 1.5
    assert gamma((0, 0)) == pytest.approx(math.sqrt(1.5), abs=1e-15)
    assert abs(gamma_sq((np.pi, np.pi)) - (1.5 - 4 / np.pi)) <= 1e-12
    d = 2 * np.pi / 9
    even = 1.5 + 9 * (math.sin(d) - 8 * math.sin(d / 2)) / (4 * np.pi)
    assert abs(gamma_sq(EVEN) - even) <= 1e-12
    assert gamma_sq(EVEN) == pytest.approx(7e-4, abs=5e-5)
    assert gamma(EVEN) <= 0.03


@settings(max_examples=50)
@given(finite, finite, st.integers(1, 2))
def test_gamma_matches_loop(a, b, q):
    assert gamma_sq((a, b), q) == pytest.approx(gamma_sq_reference((a, b), q), abs=1e-12)
    assert 0 <= gamma((a, b), q) <= math.sqrt(1.5) + 1e-12


@given(finite, finite, st.integers(-3, 3), st.integers(-3, 3))
def test_gamma_symmetries(a, b, i, j):
    g = gamma_sq((a, b))
    assert gamma_sq((a + 2 * np.pi * i, b + 2 * np.pi * j)) == pytest.approx(g, abs=1e-9)
    assert gamma_sq((b, a)) == pytest.approx(g, abs=1e-12)
    assert gamma_sq((-a, -b)) == pytest.approx(g, abs=1e-12)


def test_mc_oracle_anchor_and_determinism():
    est = gamma_mc_oracle((0, 0), 1, 1_000_000, seed=3)
    assert abs(est.mean - 1.5) <= 0.003
    again = gamma_mc_oracle((0, 0), 1, 1_000_000, seed=3, threads=1)
    assert (est.mean, est.stderr) == (again.mean, again.stderr)
    assert gamma_mc_oracle((0, 0), 1, 1000, seed=4).mean != gamma_mc_oracle((0, 0), 1, 1000, seed=5).mean


def test_mc_oracle_agrees_on_random_frequencies():
    rng = np.random.default_rng(11)
    for zeta in rng.uniform(-np.pi, np.pi, (20, 2)):
        est = gamma_mc_oracle(zeta, 1, 200_000, seed=int(rng.integers(1 << 30)))
        assert abs(est.mean - gamma_sq(zeta)) <= 3 * est.stderr + 1e-12


def test_mc_oracle_q2():
    zeta = (0.9, -2.1)
    est = gamma_mc_oracle(zeta, 2, 400_000, seed=1)
    assert abs(est.mean - gamma_sq(zeta, 2)) <= 3 * est.stderr


def _periodic_peaks(grid, threshold):
    filtered = maximum_filter(grid, size=3, mode="wrap")
    return np.argwhere((grid == filtered) & (grid > threshold))


def test_heatmap_lattice_m4():
    H = gamma_heatmap(4, 1, 256).data
    f = heatmap_frequencies(256)
    peaks = _periodic_peaks(H, 1.0)
    assert len(peaks) == 16
    coords = f[peaks]
    np.testing.assert_allclose(np.mod(coords, np.pi / 2), 0.0, atol=1e-12)
    np.testing.assert_allclose(H[tuple(peaks.T)], 1.5)


def test_heatmap_properties():
    assert gamma_heatmap(1, 1, 64).data[32, 32] == 1.5
    H = gamma_heatmap(4, 1, 128).data
    # index i <-> -f[i] is i <-> (res - i) mod res
    flipped = np.roll(H[::-1, ::-1], 1, axis=(0, 1))
    np.testing.assert_allclose(flipped, H, atol=1e-12)
    for m in (1, 2, 3, 4):
        bright = np.mean(gamma_heatmap(m, 1, 128).data <= 0.1)
        assert bright >= 0.7


def test_heatmap_rejects_small_grid():
    with pytest.raises(ValueError):
        gamma_heatmap(4, 1, 8)


def test_invariance_bound():
    assert BOUND_IGNORES_BETA
    assert invariance_bound((0, 0), 1, np.pi, (0, 0)) == pytest.approx(2 * math.sqrt(1.5))
    value = invariance_bound(EVEN, 1, np.pi / 4, (1, 0))
    assert value == pytest.approx(2 * gamma(EVEN) + np.pi / 8, abs=1e-12)
    assert value == pytest.approx(0.446, abs=2e-3)
    with pytest.raises(ValueError):
        invariance_bound((0, 0), 1, np.pi, (3, 2))


def test_bad_q():
    with pytest.raises(ValueError):
        gamma_sq((0, 0), 0)
