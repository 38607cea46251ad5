"""Shift-invariance analysis of Gabor-like feature extractors built on a
dual-tree complex wavelet packet transform."""

from .analysis import (
    ChannelMetrics,
    discrepancy_rho,
    emit_csv,
    emit_heatmap,
    export_kernels,
    import_kernels,
    ingest,
    monochromaticity_delta,
    phase_uniformity,
    run_experiment,
    shift_rho,
)
from .dtcwpt import (
    DtChannels,
    channel_frequencies,
    dt_decompose,
    dt_kernels,
    energy_in_window,
    max_energy_in_window,
)
from .filter_bank import (
    DualTreeBank,
    FilterBank2D,
    QmfPair,
    analytic_companion,
    default_dual_tree_bank,
    half_sample_delay_error,
    make_dual_tree_bank,
    qshift_pair,
    validate_qmf,
)
from .operators import cgmod, dt_outputs, maxpool, relu, rgpool
from .signal_core import (
    ComplexGrid2D,
    FreqPoint,
    RealGrid2D,
    circular_convolve,
    downsample,
    dtft_grid,
    flip,
    fractional_shift,
    upsample,
)
from .theory import (
    ArcPartition,
    alpha,
    arc_partition,
    gamma,
    gamma_heatmap,
    gamma_mc_oracle,
    invariance_bound,
)
from .wpt import resulting_kernels, wpt_decompose, wpt_reconstruct

__version__ = "0.1.0"

__all__ = [
    "ChannelMetrics",
    "discrepancy_rho",
    "emit_csv",
    "emit_heatmap",
    "export_kernels",
    "import_kernels",
    "ingest",
    "monochromaticity_delta",
    "phase_uniformity",
    "run_experiment",
    "shift_rho",
    "DtChannels",
    "channel_frequencies",
    "dt_decompose",
    "dt_kernels",
    "energy_in_window",
    "max_energy_in_window",
    "DualTreeBank",
    "FilterBank2D",
    "QmfPair",
    "analytic_companion",
    "default_dual_tree_bank",
    "half_sample_delay_error",
    "make_dual_tree_bank",
    "qshift_pair",
    "validate_qmf",
    "ComplexGrid2D",
    "FreqPoint",
    "RealGrid2D",
    "circular_convolve",
    "downsample",
    "dtft_grid",
    "flip",
    "fractional_shift",
    "upsample",
    "cgmod",
    "dt_outputs",
    "maxpool",
    "relu",
    "rgpool",
    "resulting_kernels",
    "wpt_decompose",
    "wpt_reconstruct",
    "ArcPartition",
    "alpha",
    "arc_partition",
    "gamma",
    "gamma_heatmap",
    "gamma_mc_oracle",
    "invariance_bound",
]
