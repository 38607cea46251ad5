"""Compare measured max-pooling discrepancy with the gamma prediction.

A plane wave at a channel's characteristic frequency, with a random phase,
is the setting in which the prediction is exact in expectation.

Run: python3 demos/plane_waves.py
"""

import numpy as np

from waveshift.analysis import discrepancy_rho
from waveshift.dtcwpt import dt_decompose
from waveshift.filter_bank import default_dual_tree_bank
from waveshift.operators import dt_outputs
from waveshift.signal_core import RealGrid2D
from waveshift.theory import gamma_sq

J, N = 2, 256
bank = default_dual_tree_bank()
labels = dt_decompose(RealGrid2D(np.zeros((N, N))), bank, J)
n = np.arange(N)
rng = np.random.default_rng(0)

print("channel  xi/pi              measured rho^2   gamma^2(2 xi)   edge")
for l in range(0, 2 * 4**J, 3):
    xi = np.asarray(labels.xi[l].xi)
    rhos = []
    for phase in rng.uniform(0, 2 * np.pi, 8):
        X = RealGrid2D(np.cos(xi[0] * n[:, None] + xi[1] * n[None, :] + phase))
        y_pool, y_mod = dt_outputs(X, bank, J)
        rhos.append(discrepancy_rho(y_mod[l], y_pool[l]) ** 2)
    print(f"{l:7d}  ({xi[0] / np.pi:+.3f}, {xi[1] / np.pi:+.3f})   {np.mean(rhos):.5f}          "
          f"{gamma_sq(2 ** (J - 1) * xi):.5f}         {labels.edge[l]}")
