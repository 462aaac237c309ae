"""mimosec: MU-MIMO broadcast precoding and physical-layer security
simulation toolkit."""

__version__ = "0.1.0"

from .channel import (
    ChannelSet,
    CsiView,
    SystemDims,
    apply_channel,
    generate_channels,
    perturb_csi,
    substream,
)
from .complexity import flops_algorithm, flops_primitive
from .numerics import (
    SvdResult,
    null_space,
    qr_decompose,
    regularized_mmse_inverse,
    svd,
)
from .precoding import (
    LinearPrecoder,
    bd_precoder,
    gmi_precoder,
    mmse_precoder,
    normalize_power,
    sgmi_precoder,
    zf_precoder,
)
from .secrecy import (
    ArtificialNoise,
    SecrecyReport,
    design_artificial_noise,
    precoder_covariance,
    secrecy_rate,
    uniform_covariance,
)
from .simulator import (
    ExperimentConfig,
    SimResult,
    build_precoder,
    qpsk_demodulate,
    qpsk_modulate,
    run_experiment,
    run_frame,
)
from .thp import (
    NonlinearPrecoder,
    QPSK_TAU,
    build_feedback,
    modulo,
    so_thp_classic,
    so_thp_order,
    so_thp_sgmi,
    thp_decode,
    thp_encode,
)

__all__ = [
    "ChannelSet",
    "CsiView",
    "SystemDims",
    "apply_channel",
    "generate_channels",
    "perturb_csi",
    "substream",
    "flops_algorithm",
    "flops_primitive",
    "SvdResult",
    "null_space",
    "qr_decompose",
    "regularized_mmse_inverse",
    "svd",
    "LinearPrecoder",
    "bd_precoder",
    "gmi_precoder",
    "mmse_precoder",
    "normalize_power",
    "sgmi_precoder",
    "zf_precoder",
    "ArtificialNoise",
    "SecrecyReport",
    "design_artificial_noise",
    "precoder_covariance",
    "secrecy_rate",
    "uniform_covariance",
    "ExperimentConfig",
    "SimResult",
    "build_precoder",
    "qpsk_demodulate",
    "qpsk_modulate",
    "run_experiment",
    "run_frame",
    "NonlinearPrecoder",
    "QPSK_TAU",
    "build_feedback",
    "modulo",
    "so_thp_classic",
    "so_thp_order",
    "so_thp_sgmi",
    "thp_decode",
    "thp_encode",
]
