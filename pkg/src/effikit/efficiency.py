"""Execution-time scoring: the 0-100 efficiency score, profiles, and the
per-difficulty breakpoint statistics.

The score maps a program's execution time onto [0, 100] against its
problem's profile: 100 at the fastest known time, 50 at the median, 0 at
the slowest, linear in between:

    score = (t_med - t) / (t_med - t_min) * 50 + 50   if t < t_med
    score = 50                                        if t == t_med
    score = (t_max - t) / (t_max - t_med) * 50        if t > t_med

Times outside [t_min, t_max] clamp to 100 / 0.  Degenerate profiles follow
the limits of the formula: a collapsed upper range sends any faster time to
100, a collapsed lower range sends any slower time to 0, and a fully
collapsed profile scores 50 everywhere.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Sequence

from .corpus import Corpus, EfficiencyProfile

DEFAULT_TRIM_FRACTION = 0.005  # symmetric trim per tail before min/median/max

BREAKPOINT_PERCENTS = (0, 20, 40, 60, 80, 100)


@dataclass(frozen=True)
class BreakpointTable:
    """Per-difficulty breakpoint statistics.

    ``breakpoints`` are the six time breakpoints (mean across the problems at
    this difficulty when there are several), ``bucket_weights`` the mean raw
    sample count per 20% interval, and ``bucket_shares`` a normalized variant
    (mean of per-problem count/total) provided as an extension.
    """

    difficulty: int
    breakpoints: tuple[float, float, float, float, float, float]
    bucket_weights: tuple[float, float, float, float, float]
    bucket_shares: tuple[float, float, float, float, float]
    n_problems: int = 1

    def as_dict(self) -> dict:
        return {
            "difficulty": self.difficulty,
            "breakpoints": list(self.breakpoints),
            "bucket_weights": list(self.bucket_weights),
            "bucket_shares": list(self.bucket_shares),
            "n_problems": self.n_problems,
        }


def npi(t_c: float, profile: EfficiencyProfile) -> float:
    """Efficiency score of a time against a profile; see module docstring."""
    if not isinstance(t_c, (int, float)) or math.isnan(t_c) or t_c <= 0:
        raise ValueError(f"execution time must be strictly positive, got {t_c!r}")
    t_min, t_med, t_max = profile.t_min_ms, profile.t_med_ms, profile.t_max_ms
    if t_min == t_med == t_max:
        return 50.0
    if t_c == t_med:
        return 50.0
    if t_c < t_med:
        if t_med == t_min:
            return 100.0
        value = (t_med - t_c) / (t_med - t_min) * 50.0 + 50.0
        return min(100.0, value)
    if t_max == t_med:
        return 0.0
    value = (t_max - t_c) / (t_max - t_med) * 50.0
    return max(0.0, value)


def _trimmed(times: Sequence[float], trim_fraction: float) -> list[float]:
    values = sorted(float(t) for t in times)
    k = int(len(values) * trim_fraction)
    if k > 0:
        values = values[k : len(values) - k]
    return values


def profile_from_times(
    times: Sequence[float], trim_fraction: float = DEFAULT_TRIM_FRACTION
) -> EfficiencyProfile:
    """Profile anchors from measured times after symmetric tail trimming."""
    if len(times) < 3:
        raise ValueError(f"need at least 3 timed samples, got {len(times)}")
    if any(t <= 0 for t in times):
        raise ValueError("times must be strictly positive")
    kept = _trimmed(times, trim_fraction)
    return EfficiencyProfile(
        t_min_ms=kept[0],
        t_med_ms=float(statistics.median(kept)),
        t_max_ms=kept[-1],
    )


def time_breakpoints(
    times: Sequence[float], percent: float, trim_fraction: float = DEFAULT_TRIM_FRACTION
) -> float:
    """Time breakpoint at ``percent`` of the trimmed range: T_min + p*(T_max-T_min)."""
    if not 0 <= percent <= 100:
        raise ValueError(f"percent must lie in [0, 100], got {percent}")
    kept = _trimmed(times, trim_fraction)
    if len(kept) < 2:
        raise ValueError(f"need at least 2 samples after trimming, got {len(kept)}")
    t_min, t_max = kept[0], kept[-1]
    return t_min + percent / 100.0 * (t_max - t_min)


def _bucket_counts(kept: Sequence[float]) -> list[int]:
    """Counts per 20% interval; left-closed, the last interval closed on both ends."""
    t_min, t_max = kept[0], kept[-1]
    counts = [0, 0, 0, 0, 0]
    span = t_max - t_min
    for t in kept:
        if span == 0:
            index = 0
        elif t >= t_max:
            index = 4
        else:
            index = min(4, int((t - t_min) / span * 5))
        counts[index] += 1
    return counts


def _sample_time(sample) -> float | None:
    if sample.scaled_time_ms is not None:
        return sample.scaled_time_ms
    return sample.measured_time_ms


def bucket_proportions(
    corpus: Corpus, difficulty: int, trim_fraction: float = DEFAULT_TRIM_FRACTION
) -> BreakpointTable:
    """Mean per-interval sample counts across all problems at a difficulty.

    Each problem's six breakpoints come from its own trimmed time range; the
    reported breakpoints are the coordinate-wise mean across problems.
    """
    times_by_problem: dict[str, list[float]] = {}
    for sample in corpus.samples:
        problem = corpus.problems.get(sample.problem_id)
        if problem is None or problem.difficulty != difficulty:
            continue
        t = _sample_time(sample)
        if t is not None:
            times_by_problem.setdefault(sample.problem_id, []).append(t)

    usable = {pid: ts for pid, ts in times_by_problem.items() if len(_trimmed(ts, trim_fraction)) >= 2}
    if not usable:
        raise ValueError(f"no problems at difficulty {difficulty} with at least 2 timed samples")

    all_breakpoints: list[list[float]] = []
    all_counts: list[list[int]] = []
    all_shares: list[list[float]] = []
    for pid in sorted(usable):
        kept = _trimmed(usable[pid], trim_fraction)
        t_min, t_max = kept[0], kept[-1]
        all_breakpoints.append([t_min + p / 100.0 * (t_max - t_min) for p in BREAKPOINT_PERCENTS])
        counts = _bucket_counts(kept)
        all_counts.append(counts)
        total = len(kept)
        all_shares.append([c / total for c in counts])

    n = len(all_counts)
    mean = lambda rows, j: sum(row[j] for row in rows) / n  # noqa: E731
    return BreakpointTable(
        difficulty=difficulty,
        breakpoints=tuple(mean(all_breakpoints, j) for j in range(6)),
        bucket_weights=tuple(mean(all_counts, j) for j in range(5)),
        bucket_shares=tuple(mean(all_shares, j) for j in range(5)),
        n_problems=n,
    )
