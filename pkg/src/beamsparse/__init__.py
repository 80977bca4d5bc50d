"""Sparse beamspace equalization for mmWave massive MU-MIMO uplink."""

__version__ = "0.1.0"

from .channel import (  # noqa: E402
    LOS,
    NLOS,
    ChannelMatrix,
    ChannelProfile,
    generate_channel,
    load_channel,
    ls_channel_estimate,
    save_channel,
    to_antenna,
    to_beamspace,
)
from .complexity import (  # noqa: E402
    ComplexityReport,
    asymptotic_threshold,
    cholesky_solve_count,
    crossover_T,
    mult_count,
)
from .equalizers import (  # noqa: E402
    SparseEqualizer,
    apply_equalizer,
    build_equalizer,
    comp,
    eomp,
    lc,
    le,
    lmmse_full,
)
from .estimators import BeamspaceEqualizer, BeamspaceTransform, QAM16Slicer  # noqa: E402
from .simulator import (  # noqa: E402
    BerCurve,
    OperatingPoint,
    SimConfig,
    ber_curve,
    ber_curves,
    delta_min_search,
    snr_operating_point,
)
