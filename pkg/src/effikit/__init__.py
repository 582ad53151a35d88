"""effikit: scoring, filtering and pair construction for code-efficiency benchmarks."""

from .codebleu import ScoreBreakdown, codebleu, symmetric_codebleu
from .corpus import (
    CodePair,
    CodeSample,
    Corpus,
    EfficiencyProfile,
    IoTest,
    Problem,
    load_dataset,
    save_dataset,
    validate,
)
from .efficiency import BreakpointTable, bucket_proportions, npi, profile_from_times, time_breakpoints
from .evalstats import PredictionRecord, ScoredSample, grouped_report, rmse, spearman
from .ioccb import IoccbResult, ioccb
from .pairing import PairingConfig, build_pairs, lccs_similarity, match_pairs
from .pynorm import (
    CompileError,
    NormalizedCode,
    TokenStream,
    ast_roundtrip,
    standardize_identifiers,
    strip_noise,
    tokenize,
)
from .runner import (
    CannedShim,
    CommandShim,
    ExternalEstimator,
    FilterResult,
    Limits,
    MeasuredEstimator,
    RunResult,
    ShimReport,
    npi_filter,
    run_candidate,
    scale_time,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
