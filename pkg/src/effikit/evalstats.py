"""Evaluation statistics: rank correlation, RMSE, grouped score reports."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .corpus import Corpus

QUANTITIES = ("time_ms", "npi")

# difficulty buckets: (label, low, high) inclusive
DEFAULT_BUCKETS = (("Introductory", 0, 0), ("Interview", 1, 3), ("Competition", 4, 18))

SMALLEST_P = 5e-324  # p-value floor: smallest representable positive float


@dataclass(frozen=True)
class PredictionRecord:
    sample_id: str
    predicted: float
    actual: float
    quantity: str = "time_ms"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"quantity must be one of {QUANTITIES}, got {self.quantity!r}")
        if self.quantity == "time_ms" and self.actual < 0:
            raise ValueError("actual time must be non-negative")
        if self.quantity == "npi" and not 0 <= self.actual <= 100:
            raise ValueError("actual score must lie in [0, 100]")


@dataclass(frozen=True)
class ScoredSample:
    sample_id: str
    problem_id: str
    io_pass: bool
    npi: float
    ioccb: float


@dataclass(frozen=True)
class EvalReport:
    group_type: str  # "difficulty" | "tag"
    group: str
    n: int
    io_pass_pct: float
    mean_npi: float
    mean_ioccb: float


def _ranks(values: Sequence[float]) -> list[float]:
    """Ranks starting at 1; ties receive the average of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg_rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg_rank
        i = j + 1
    return ranks


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the regularized incomplete beta (Lentz)."""
    TINY = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < TINY:
        d = TINY
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < TINY:
            d = TINY
        c = 1.0 + aa / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < TINY:
            d = TINY
        c = 1.0 + aa / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-14:
            break
    return h


def _betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _student_t_sf(t: float, df: float) -> float:
    """P(T > t) for Student's t with df degrees of freedom (t >= 0)."""
    x = df / (df + t * t)
    return 0.5 * _betainc(df / 2.0, 0.5, x)


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Rank correlation with averaged ties, plus a two-sided p-value.

    The p-value uses the t statistic rho*sqrt((n-2)/(1-rho^2)) against a t
    distribution with n-2 degrees of freedom; |rho| = 1 maps to p = 0, and
    underflowing p-values are floor-clamped to the smallest positive float.
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise ValueError(f"need at least 3 observations, got {n}")
    if len(set(x)) == 1 or len(set(y)) == 1:
        raise ValueError("rank correlation is undefined for a constant vector")
    rx = _ranks(x)
    ry = _ranks(y)
    if rx == ry:
        return 1.0, 0.0
    if all(b == n + 1 - a for a, b in zip(rx, ry)):
        return -1.0, 0.0
    mean_rx = sum(rx) / n
    mean_ry = sum(ry) / n
    dx = [r - mean_rx for r in rx]
    dy = [r - mean_ry for r in ry]
    num = sum(a * b for a, b in zip(dx, dy))
    den = math.sqrt(sum(a * a for a in dx)) * math.sqrt(sum(b * b for b in dy))
    rho = num / den
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = abs(rho) * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * _student_t_sf(t, n - 2)
    p = min(1.0, p)
    if p == 0.0:
        p = SMALLEST_P
    return rho, p


def rmse(records: Sequence[PredictionRecord]) -> float:
    """Root mean square error of predictions, in the quantity's units."""
    if not records:
        raise ValueError("records must be non-empty")
    quantities = {r.quantity for r in records}
    if len(quantities) > 1:
        raise ValueError(f"records mix quantities: {sorted(quantities)}")
    return math.sqrt(sum((r.actual - r.predicted) ** 2 for r in records) / len(records))


def grouped_report(
    scored: Sequence[ScoredSample],
    corpus: Corpus,
    buckets: Sequence[tuple[str, int, int]] = DEFAULT_BUCKETS,
) -> list[EvalReport]:
    """One row per difficulty bucket and per tag (multi-tag samples count in
    every one of their tag rows); empty groups are suppressed."""
    difficulty_rows: dict[str, list[ScoredSample]] = {label: [] for label, _, _ in buckets}
    tag_rows: dict[str, list[ScoredSample]] = {}
    for entry in scored:
        problem = corpus.problems.get(entry.problem_id)
        if problem is None:
            continue
        for label, lo, hi in buckets:
            if lo <= problem.difficulty <= hi:
                difficulty_rows[label].append(entry)
                break
        for tag in problem.tags:
            tag_rows.setdefault(tag, []).append(entry)

    def row(group_type: str, group: str, entries: list[ScoredSample]) -> EvalReport:
        n = len(entries)
        return EvalReport(
            group_type=group_type,
            group=group,
            n=n,
            io_pass_pct=100.0 * sum(1 for e in entries if e.io_pass) / n,
            mean_npi=sum(e.npi for e in entries) / n,
            mean_ioccb=sum(e.ioccb for e in entries) / n,
        )

    out = [row("difficulty", label, difficulty_rows[label]) for label, _, _ in buckets if difficulty_rows[label]]
    out.extend(row("tag", tag, tag_rows[tag]) for tag in sorted(tag_rows))
    return out


CSV_HEADER = "group_type,group,n,io_pass_pct,mean_npi,mean_ioccb"


def report_to_csv(reports: Sequence[EvalReport]) -> str:
    """Byte-stable CSV: fixed column order, fixed float formatting."""
    lines = [CSV_HEADER]
    for r in reports:
        lines.append(
            f"{r.group_type},{r.group},{r.n},{r.io_pass_pct:.4f},{r.mean_npi:.4f},{r.mean_ioccb:.4f}"
        )
    return "\n".join(lines) + "\n"
