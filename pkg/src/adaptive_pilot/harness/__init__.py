"""Link simulation loop, the comparative studies, result I/O and the CLI."""

from .link import Adaptive, FixedPattern, RunMetrics, TraceRow, run_link, write_trace
from .results import emit_results, read_csv, write_csv
from .studies import (
    ResultRow,
    StudyConfig,
    StudyKind,
    StudyResult,
    run_study,
    study_adaptive_vs_fixed,
    study_boundaries,
    study_models,
    trial_seed,
)
