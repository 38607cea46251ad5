import numpy as np
import pytest

from waveshift.filter_bank import (
    QSHIFT_A_H0,
    FilterBank2D,
    QmfError,
    analytic_companion,
    haar_pair,
    half_sample_delay_error,
    make_dual_tree_bank,
    make_filter_bank,
    mirror_filter,
    qmf_pair,
    qshift_pair,
    read_qmf_file,
    validate_qmf,
    write_qmf_file,
)
from waveshift.signal_core import (
    ComplexGrid2D,
    RealGrid2D,
    circular_convolve,
    downsample,
    dtft_grid,
    dtft_lattice,
    flip,
)


def dtft_1d(h, w):
    return np.sum(h[None, :] * np.exp(-1j * np.outer(w, np.arange(len(h)))), axis=1)


class TestQshift:
    def test_unit_norm(self):
        tree_h, tree_g = qshift_pair("later")
        assert abs(np.linalg.norm(tree_h.h) - 1) <= 1e-10
        assert abs(np.linalg.norm(tree_g.h) - 1) <= 1e-10

    def test_dc_gain(self):
        assert abs(qshift_pair("later")[0].h.sum() - np.sqrt(2)) <= 1e-6

    def test_tree_g_is_time_reverse(self):
        tree_h, tree_g = qshift_pair("later")
        np.testing.assert_array_equal(tree_g.h, tree_h.h[::-1])

    @pytest.mark.xfail(strict=True, reason="10-tap pair reaches 0.168; see decisions ledger")
    def test_half_sample_delay_spec_bound(self):
        tree_h, tree_g = qshift_pair("later")
        assert half_sample_delay_error(tree_h.h, tree_g.h) <= 0.05

    def test_half_sample_delay_measured(self):
        tree_h, tree_g = qshift_pair("later")
        w = 2 * np.pi * np.fft.fftfreq(1024)
        w = w[np.abs(w) <= 0.8 * np.pi]
        oracle = np.max(np.abs(dtft_1d(tree_g.h, w) - np.exp(-0.5j * w) * dtft_1d(tree_h.h, w)))
        err = half_sample_delay_error(tree_h.h, tree_g.h)
        assert abs(err - oracle) < 1e-12
        assert abs(err - 0.16791429016002526) < 1e-9

    def test_passband_phase_delay_near_half(self):
        # phase delay between the trees over the mid passband
        tree_h, tree_g = qshift_pair("later")
        w = np.linspace(0.3 * np.pi, 0.7 * np.pi, 41)
        gap = -np.angle(dtft_1d(tree_g.h, w) / dtft_1d(tree_h.h, w)) / w
        assert np.all(np.abs(gap - 0.5) < 0.11)

    def test_first_stage_is_one_sample_delay(self):
        a, b = qshift_pair("first")
        np.testing.assert_array_equal(a.h, b.h)
        assert b.origin == a.origin - 1

    def test_bad_stage(self):
        with pytest.raises(ValueError):
            qshift_pair("middle")

    def test_mirror_relation(self):
        g = mirror_filter(QSHIFT_A_H0)
        L = len(QSHIFT_A_H0)
        for n in range(L):
            assert g[n] == (-1) ** n * QSHIFT_A_H0[L - 1 - n]


class TestValidate:
    def test_qshift_pairs_valid(self):
        for stage in ("first", "later"):
            for pair in qshift_pair(stage):
                assert validate_qmf(pair).worst <= 1e-8

    def test_haar_exact(self):
        assert validate_qmf(haar_pair()).worst <= 1e-12

    def test_corrupted_tap(self):
        h = QSHIFT_A_H0.copy()
        h[3] += 0.1
        report = validate_qmf(qmf_pair(h))
        # lag-2 inner product shifts by 0.1*(h[1] + h[5]) ~ 0.055
        assert report.orthogonality > 1e-3

    def test_bad_mirror_detected(self):
        from waveshift.filter_bank import QmfPair

        p = QmfPair(QSHIFT_A_H0, -mirror_filter(QSHIFT_A_H0))
        assert validate_qmf(p).mirror > 0.1


class TestHalfSampleDelay:
    def test_ideal_shift(self):
        # band-limited prototype, delayed by half a sample in the Fourier domain
        n = 64
        w = 2 * np.pi * np.fft.fftfreq(n)
        H = np.where(np.abs(w) < 0.6 * np.pi, 1.0, 0.0) * np.exp(-1j * w * 10)
        hH = np.real(np.fft.ifft(H))
        hG = np.fft.ifft(H * np.exp(-0.5j * w))
        assert half_sample_delay_error(hH, hG, n_grid=n) <= 1e-10

    def test_identical_filters(self):
        h = QSHIFT_A_H0
        err = half_sample_delay_error(h, h)
        w = 2 * np.pi * np.fft.fftfreq(1024)
        w = w[np.abs(w) <= 0.8 * np.pi]
        expected = np.max(np.abs(1 - np.exp(-0.5j * w)) * np.abs(dtft_1d(h, w)))
        assert abs(err - expected) < 1e-12
        assert err > 0.5

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            half_sample_delay_error(np.ones(3), np.ones(4))


class TestBanks:
    def test_tensor_structure(self):
        b = make_filter_bank(*qshift_pair("later"))
        assert b.tensor_residual() <= 1e-14
        K = b.kernels
        np.testing.assert_array_equal(K[3].data, np.outer(b.rows.g, b.cols.g))
        np.testing.assert_array_equal(K[1].data, np.outer(b.rows.h, b.cols.g))

    def test_dual_tree_layout(self):
        tree_h, tree_g = qshift_pair("later")
        dt = make_dual_tree_bank(tree_h, tree_g)
        for k in range(4):
            i, j = divmod(k, 2)
            bank = dt.banks[k]
            assert bank.rows is (tree_h, tree_g)[i] and bank.cols is (tree_h, tree_g)[j]
        # bank 0, kernel 3 is g_0 (x) g_0
        np.testing.assert_array_equal(dt.banks[0].kernels[3].data, np.outer(tree_h.g, tree_h.g))

    def test_all_kernels_unit_norm(self, qbank):
        norms = [K.l2_norm for b in qbank.banks for K in b.kernels]
        assert len(norms) == 16
        np.testing.assert_allclose(norms, 1.0, atol=1e-10)

    def test_invalid_pair_rejected(self):
        h = QSHIFT_A_H0.copy()
        h[0] += 0.2
        with pytest.raises(QmfError):
            make_dual_tree_bank(qmf_pair(h), qshift_pair("later")[1])

    @pytest.mark.parametrize("pair", [haar_pair(), qshift_pair("later")[0], qshift_pair("first")[1]])
    def test_one_stage_energy(self, rng, pair):
        X = RealGrid2D(rng.standard_normal((16, 20)))
        bank = FilterBank2D(pair, pair)
        total = sum(downsample(circular_convolve(X, flip(G)), 2).l2_norm ** 2 for G in bank.kernels)
        assert abs(total - X.l2_norm**2) <= 1e-10 * X.l2_norm**2


class TestAnalyticCompanion:
    def test_real_part_recovers_input(self, rng):
        V = RealGrid2D(rng.standard_normal((7, 7)), (3, 3))
        N = 16
        W = analytic_companion(V, N)
        assert isinstance(W, ComplexGrid2D)
        for n0 in range(-8, 8):
            for n1 in range(-8, 8):
                assert abs(W[n0, n1].real - V[n0, n1]) <= 1e-10

    def test_right_half_plane_mass(self):
        n = np.arange(-12, 13)
        win = np.exp(-(n[:, None] ** 2 + n[None, :] ** 2) / (2 * 4.0**2))
        V = RealGrid2D(np.cos(1.2 * n[:, None] + 0.4 * n[None, :]) * win, (12, 12))
        N = 64
        W = analytic_companion(V, N)
        P = np.abs(dtft_grid(W, N).data) ** 2
        right = dtft_lattice(N) > 0
        assert P[right].sum() / P.sum() >= 0.99
        assert abs(W.l2_norm**2 / V.l2_norm**2 - 2) < 0.01

    def test_idempotent_on_analytic_input(self):
        n = np.arange(-12, 13)
        win = np.exp(-(n[:, None] ** 2 + n[None, :] ** 2) / (2 * 4.0**2))
        V = RealGrid2D(np.cos(1.2 * n[:, None] + 0.4 * n[None, :]) * win, (12, 12))
        N = 32
        W = analytic_companion(V, N)
        # apply the one-sided projection again to the (already analytic) spectrum
        F = np.fft.fft2(np.roll(W.data, (-16, -16), axis=(0, 1)))
        k = np.arange(N)
        weight = np.where(k == 0, 1.0, np.where(k < N // 2, 2.0, 0.0))
        weight[N // 2] = 1.0
        half = np.where(weight == 2.0, 1.0, np.where(weight == 1.0, 1.0, 0.0))
        again = np.fft.ifft2(F * half[:, None])
        np.testing.assert_allclose(again, np.roll(W.data, (-16, -16), axis=(0, 1)), atol=1e-10)

    def test_support_too_large(self):
        with pytest.raises(ValueError):
            analytic_companion(RealGrid2D(np.ones((9, 9))), 8)


def test_qmf_file_roundtrip(tmp_path):
    pair = qshift_pair("later")[0]
    path = tmp_path / "q.qmf"
    write_qmf_file(pair, path)
    back = read_qmf_file(path)
    np.testing.assert_array_equal(back.h, pair.h)
    np.testing.assert_array_equal(back.g, pair.g)
    assert back.label == pair.label


def test_qmf_file_errors(tmp_path):
    p = tmp_path / "bad.qmf"
    p.write_text("qmf x 3\n0.1 0.2\n")
    with pytest.raises(ValueError, match="3 taps"):
        read_qmf_file(p)
    p.write_text("nope")
    with pytest.raises(ValueError):
        read_qmf_file(p)
