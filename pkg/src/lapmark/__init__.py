"""Additive watermarking in block-DCT coefficients of Laplacian hosts.

Embedding shifts selected high-frequency 4x4 DCT coefficients by +-a to
carry one payload bit over spread_n coefficients.  Decoding treats host
and attack noise as independent Laplacians; the package provides the
exact maximum-likelihood decoder, the clamp (sub-optimum) decoder, and
three routes to their error probability: a closed form for one sample,
exact numerical convolution of the mixed decision-statistic law, and
Monte Carlo simulation.
"""

from .analysis import (
    ErrorReport,
    MixedPdf,
    convolve_n,
    error_report,
    perr_approx,
    perr_exact,
    prob_P,
    z_pdf_h0,
)
from .codec import (
    DecoderParams,
    EmbedConfig,
    clamp_stat,
    correction_term,
    decode_optimum,
    decode_suboptimum,
    embed_bit,
    llr_sample,
    select_indices,
)
from .errors import (
    CapacityError,
    ConfigError,
    FormatError,
    ResourceLimitError,
    Y4MParseError,
)
from .model import (
    ChannelSpec,
    GgdParams,
    LaplaceParams,
    estimate_laplace,
    g_from_snr_db,
    ggd_pdf,
    laplace_pdf,
    laplace_sample,
    snr_db,
    sum_cdf,
    sum_pdf,
    sum_tail,
)
from .montecarlo import (
    BerRecord,
    SweepConfig,
    TheoryRecord,
    ber_records_to_csv,
    run_ber_sweep,
    run_theory,
    simulate_cell,
    theory_records_to_csv,
)
from .video import (
    DEFAULT_POOL,
    ZIGZAG_4x4,
    CoeffPool,
    FramePlane,
    PayloadMap,
    embed_frame,
    embed_in_coeffs,
    extract_frame,
    fdct4,
    frame_capacity,
    frame_to_coeffs,
    idct4,
    payload_maps_from_json,
    payload_maps_to_json,
    pool_coefficients,
    predicted_psnr,
    psnr,
)
from .y4m import (
    Y4MFrame,
    Y4MStream,
    parse_y4m,
    read_raw_yuv,
    read_video,
    read_y4m,
    serialize_y4m,
    write_y4m,
)

__version__ = "0.1.0"

__all__ = [
    "BerRecord",
    "CapacityError",
    "ChannelSpec",
    "CoeffPool",
    "ConfigError",
    "DEFAULT_POOL",
    "DecoderParams",
    "EmbedConfig",
    "ErrorReport",
    "FormatError",
    "FramePlane",
    "GgdParams",
    "LaplaceParams",
    "MixedPdf",
    "PayloadMap",
    "ResourceLimitError",
    "SweepConfig",
    "TheoryRecord",
    "Y4MFrame",
    "Y4MParseError",
    "Y4MStream",
    "ZIGZAG_4x4",
    "ber_records_to_csv",
    "clamp_stat",
    "convolve_n",
    "correction_term",
    "decode_optimum",
    "decode_suboptimum",
    "embed_bit",
    "embed_frame",
    "embed_in_coeffs",
    "error_report",
    "estimate_laplace",
    "extract_frame",
    "fdct4",
    "frame_capacity",
    "frame_to_coeffs",
    "g_from_snr_db",
    "ggd_pdf",
    "idct4",
    "laplace_pdf",
    "laplace_sample",
    "llr_sample",
    "parse_y4m",
    "payload_maps_from_json",
    "payload_maps_to_json",
    "perr_approx",
    "perr_exact",
    "pool_coefficients",
    "predicted_psnr",
    "prob_P",
    "psnr",
    "read_raw_yuv",
    "read_video",
    "read_y4m",
    "run_ber_sweep",
    "run_theory",
    "select_indices",
    "serialize_y4m",
    "simulate_cell",
    "snr_db",
    "sum_cdf",
    "sum_pdf",
    "sum_tail",
    "write_y4m",
    "z_pdf_h0",
]
