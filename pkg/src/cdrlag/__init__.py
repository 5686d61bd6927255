"""Timestamp-error analysis of post-mediation charging data records.

Pipeline: ingest network/CDR event streams, associate each CDR with the
closest past same-subscriber same-cell network event, bin the resulting
errors by time of day, fit an exponentially modified Gaussian to each
group, and build a KS/Fisher cell-to-cell similarity matrix.
"""

from .errors import FitError, PipelineError, SchemaError
from .ingest import (
    CdrEvent,
    Charging,
    EventDataset,
    NetworkEvent,
    Reject,
    Tech,
    build_dataset,
    parse_cdr_events,
    parse_network_events,
)
from .matching import ErrorRecord, MatchReport, match_backward
from .stats import (
    TIME_BINS,
    BinStats,
    ExGaussianParams,
    GroupKey,
    TimeBin,
    assign_bin,
    compute_bin_stats,
    exgaussian_pdf,
    fit_exgaussian,
)
from .hypotests import FisherResult, KsResult, chi_square_sf, fisher_combine, ks_two_sample
from .similarity import (
    CellProfile,
    SimilarityMatrix,
    build_matrix,
    build_profiles,
    order_by_row_sum,
    pair_index,
)
from .synth import CellGroupSpec, SynthConfig, default_scenario, generate_trace, sample_exgaussian

__version__ = "0.1.0"

__all__ = [
    "BinStats",
    "CdrEvent",
    "CellGroupSpec",
    "CellProfile",
    "Charging",
    "ErrorRecord",
    "EventDataset",
    "ExGaussianParams",
    "FisherResult",
    "FitError",
    "GroupKey",
    "KsResult",
    "MatchReport",
    "NetworkEvent",
    "PipelineError",
    "Reject",
    "SchemaError",
    "SimilarityMatrix",
    "SynthConfig",
    "TIME_BINS",
    "Tech",
    "TimeBin",
    "assign_bin",
    "build_dataset",
    "build_matrix",
    "build_profiles",
    "chi_square_sf",
    "compute_bin_stats",
    "default_scenario",
    "exgaussian_pdf",
    "fisher_combine",
    "fit_exgaussian",
    "generate_trace",
    "ks_two_sample",
    "match_backward",
    "order_by_row_sum",
    "pair_index",
    "parse_cdr_events",
    "parse_network_events",
    "sample_exgaussian",
]
