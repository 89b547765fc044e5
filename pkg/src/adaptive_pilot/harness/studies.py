"""The three comparative studies: adaptive vs fixed, boundary sets, channel models.

Every (SNR, trial) job draws its channel, noise and data from a stream keyed
only by ``(seed, trial)``.  Compared modes, boundary sets and models therefore
see identical realizations, and differences come from the scheduling alone.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..channel import ChannelProfile, model_profile
from ..controller import NUM_PATTERNS, BoundarySet, boundary_set
from ..errors import ConfigError
from ..grid import LinkConfig
from .link import Adaptive, FixedPattern, RunMetrics, run_link


class StudyKind(str, enum.Enum):
    ADAPTIVE_VS_FIXED = "adaptive_vs_fixed"
    BOUNDARY_SWEEP = "boundaries"
    MODEL_SWEEP = "models"


@dataclass(frozen=True)
class StudyConfig:
    kind: StudyKind = StudyKind.ADAPTIVE_VS_FIXED
    snr_grid: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    symbols_per_point: int = 20_000
    trials: int = 20
    boundary_set: int | BoundarySet = 4
    channel_model: int | ChannelProfile = 2
    fixed_pattern: int = 1
    boundary_sets: tuple[int, ...] = (1, 2, 3, 4, 5)
    models: tuple[int, ...] = (1, 2, 3, 4, 5)
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", StudyKind(self.kind))
        object.__setattr__(self, "snr_grid", tuple(float(s) for s in self.snr_grid))
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def validate_for(self, link: LinkConfig) -> None:
        if not self.snr_grid:
            raise ConfigError("snr_grid is empty")
        floor = 10 * 8 * link.base_pilot_period
        if self.symbols_per_point < floor:
            raise ConfigError(
                f"symbols_per_point={self.symbols_per_point} is below {floor}; pattern 4 would be unreachable"
            )


@dataclass(frozen=True)
class ResultRow:
    study: str
    mode: str
    snr_db: float
    model: int
    boundary_set: int
    trial: int  # -1 marks a row pooled over all trials
    ber: float
    data_rate: float
    resets: int
    occ_p1: float
    occ_p2: float
    occ_p3: float
    occ_p4: float
    seed: int


@dataclass
class StudyResult:
    study: str
    trial_rows: list[ResultRow]
    metrics: list[RunMetrics] = field(repr=False)
    seed: int = 0

    @property
    def summary(self) -> list[ResultRow]:
        """One row per (mode, SNR, model, boundary set) pooled over trials."""
        groups: dict[tuple, list[int]] = {}
        for i, row in enumerate(self.trial_rows):
            groups.setdefault((row.mode, row.snr_db, row.model, row.boundary_set), []).append(i)
        out = []
        for (mode, snr, model, bset), idx in groups.items():
            ms = [self.metrics[i] for i in idx]
            bits = sum(m.total_bits for m in ms)
            cells = sum(m.data_cells + m.pilot_cells for m in ms)
            counts = np.sum([m.sounding_counts for m in ms], axis=0)
            occ = counts / counts.sum() if counts.sum() else np.zeros(NUM_PATTERNS)
            out.append(
                ResultRow(
                    self.study, mode, snr, model, bset, -1,
                    sum(m.bit_errors for m in ms) / bits if bits else 0.0,
                    sum(m.data_cells for m in ms) / cells if cells else 0.0,
                    sum(m.resets for m in ms),
                    *(float(o) for o in occ),
                    self.seed,
                )
            )
        return out

    def pooled(self, **match) -> ResultRow:
        """The single summary row whose fields equal ``match``."""
        hits = [r for r in self.summary if all(getattr(r, k) == v for k, v in match.items())]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} summary rows match {match}")
        return hits[0]


def trial_seed(master_seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([master_seed, trial]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class _Job:
    link: LinkConfig
    profile: ChannelProfile
    mode: FixedPattern | Adaptive
    symbols: int
    seed: int
    row: ResultRow  # label fields; metric fields filled after the run


def _run_job(job: _Job) -> RunMetrics:
    return run_link(job.link, job.profile, job.mode, job.symbols, job.seed)


def _execute(study: str, jobs: list[_Job], cfg: StudyConfig) -> StudyResult:
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            metrics = list(pool.map(_run_job, jobs, chunksize=1))
    else:
        metrics = [_run_job(j) for j in jobs]
    rows = [
        replace(
            j.row,
            ber=m.ber,
            data_rate=m.data_rate_fraction,
            resets=m.resets,
            occ_p1=m.pattern_occupancy[0],
            occ_p2=m.pattern_occupancy[1],
            occ_p3=m.pattern_occupancy[2],
            occ_p4=m.pattern_occupancy[3],
        )
        for j, m in zip(jobs, metrics)
    ]
    return StudyResult(study, rows, metrics, cfg.seed)


def _label(study, mode, snr, model, bset, trial, seed) -> ResultRow:
    return ResultRow(study, mode, snr, model, bset, trial, 0.0, 0.0, 0, 0.0, 0.0, 0.0, 0.0, seed)


def _resolve_profile(cfg: StudyConfig, base: ChannelProfile | None, model: int | None = None):
    """Profile plus the model id written to the results (0 for explicit profiles)."""
    chosen = cfg.channel_model if model is None else model
    if isinstance(chosen, ChannelProfile):
        return chosen, 0
    return model_profile(chosen, base), int(chosen)


def _resolve_boundaries(spec) -> tuple[BoundarySet, int]:
    if isinstance(spec, BoundarySet):
        return spec, 0
    return boundary_set(spec), int(spec)


def study_adaptive_vs_fixed(cfg: StudyConfig, link: LinkConfig | None = None, base: ChannelProfile | None = None) -> StudyResult:
    link = link or LinkConfig()
    cfg.validate_for(link)
    profile, model_id = _resolve_profile(cfg, base)
    bounds, bset_id = _resolve_boundaries(cfg.boundary_set)
    modes = [FixedPattern(cfg.fixed_pattern), Adaptive(bounds)]
    jobs = []
    for snr in cfg.snr_grid:
        point = replace(link, snr_db=snr)
        for trial in range(cfg.trials):
            seed = trial_seed(cfg.seed, trial)
            for mode in modes:
                row = _label(StudyKind.ADAPTIVE_VS_FIXED.value, mode.name, snr, model_id, bset_id, trial, seed)
                jobs.append(_Job(point, profile, mode, cfg.symbols_per_point, seed, row))
    return _execute(StudyKind.ADAPTIVE_VS_FIXED.value, jobs, cfg)


def study_boundaries(cfg: StudyConfig, link: LinkConfig | None = None, base: ChannelProfile | None = None) -> StudyResult:
    link = link or LinkConfig()
    cfg.validate_for(link)
    profile, model_id = _resolve_profile(cfg, base)
    jobs = []
    for snr in cfg.snr_grid:
        point = replace(link, snr_db=snr)
        for trial in range(cfg.trials):
            seed = trial_seed(cfg.seed, trial)
            for set_id in cfg.boundary_sets:
                row = _label(StudyKind.BOUNDARY_SWEEP.value, "adaptive", snr, model_id, set_id, trial, seed)
                jobs.append(_Job(point, profile, Adaptive(boundary_set(set_id)), cfg.symbols_per_point, seed, row))
    return _execute(StudyKind.BOUNDARY_SWEEP.value, jobs, cfg)


def study_models(cfg: StudyConfig, link: LinkConfig | None = None, base: ChannelProfile | None = None) -> StudyResult:
    link = link or LinkConfig()
    cfg.validate_for(link)
    bounds, bset_id = _resolve_boundaries(cfg.boundary_set)
    jobs = []
    for snr in cfg.snr_grid:
        point = replace(link, snr_db=snr)
        for trial in range(cfg.trials):
            seed = trial_seed(cfg.seed, trial)
            for model in cfg.models:
                profile, model_id = _resolve_profile(cfg, base, model)
                row = _label(StudyKind.MODEL_SWEEP.value, "adaptive", snr, model_id, bset_id, trial, seed)
                jobs.append(_Job(point, profile, Adaptive(bounds), cfg.symbols_per_point, seed, row))
    return _execute(StudyKind.MODEL_SWEEP.value, jobs, cfg)


STUDIES = {
    StudyKind.ADAPTIVE_VS_FIXED: study_adaptive_vs_fixed,
    StudyKind.BOUNDARY_SWEEP: study_boundaries,
    StudyKind.MODEL_SWEEP: study_models,
}


def run_study(cfg: StudyConfig, link: LinkConfig | None = None, base: ChannelProfile | None = None) -> StudyResult:
    return STUDIES[cfg.kind](cfg, link, base)
