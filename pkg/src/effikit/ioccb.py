"""Reference-set similarity score with identifier standardization.

The generated code is compared against the ground-truth efficient code plus
any alternate efficient solutions.  Two score sets are formed: O (raw
CodeBLEU against each reference) and S (the same after standardizing
identifiers on both sides).  The final score is

    min(100, max(S) + sqrt(max(0, mean(S) - mean(O))))

The square-root term compensates for the systematic shift that identifier
standardization applies to the score distribution.  When the generated code
does not compile, standardization is impossible and the score falls back to
max(O) (normalization skipped); the same value the formula yields when S
degenerates to O.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .codebleu import DEFAULT_WEIGHTS, codebleu
from .pynorm import CompileError, standardize_identifiers


@dataclass(frozen=True)
class IoccbResult:
    o_scores: tuple[float, ...]
    s_scores: tuple[float, ...]
    o_avg: float
    s_avg: float
    s_max: float
    score: float
    normalization_applied: bool
    warnings: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "o_scores": list(self.o_scores),
            "s_scores": list(self.s_scores),
            "o_avg": self.o_avg,
            "s_avg": self.s_avg,
            "s_max": self.s_max,
            "score": self.score,
            "normalization_applied": self.normalization_applied,
            "warnings": list(self.warnings),
        }


def ioccb(
    generated: str,
    ground_truth: str,
    alternates: Sequence[str] = (),
    weights=DEFAULT_WEIGHTS,
) -> IoccbResult:
    """Score generated code against the ground truth and its alternates.

    The ground truth must parse; unparseable alternates are dropped with a
    warning.  References that standardize to identical text are deduplicated
    so copies of the ground truth cannot bias the averages.
    """
    warnings: list[str] = []

    try:
        gt_norm = standardize_identifiers(ground_truth)
    except CompileError as exc:
        raise ValueError(f"ground truth does not parse: {exc}") from exc

    references: list[tuple[str, str]] = [(ground_truth, gt_norm.source)]
    seen_normalized = {gt_norm.source}
    for index, alt in enumerate(alternates):
        try:
            alt_norm = standardize_identifiers(alt)
        except CompileError:
            warnings.append(f"alternate[{index}] does not parse; dropped")
            continue
        if alt_norm.source in seen_normalized:
            continue
        seen_normalized.add(alt_norm.source)
        references.append((alt, alt_norm.source))

    n = len(references)
    if generated.strip() == "":
        zeros = (0.0,) * n
        return IoccbResult(
            o_scores=zeros, s_scores=zeros, o_avg=0.0, s_avg=0.0, s_max=0.0,
            score=0.0, normalization_applied=False,
            warnings=tuple(warnings) + ("generated code is empty",),
        )

    o_scores = tuple(codebleu(generated, raw, weights).combined for raw, _ in references)

    try:
        gen_norm = standardize_identifiers(generated)
    except CompileError:
        # normalization skipped: the S set degenerates to the O set
        s_scores = o_scores
        normalization_applied = False
        warnings.append("generated code does not parse; normalization skipped")
    else:
        s_scores = tuple(codebleu(gen_norm.source, norm, weights).combined for _, norm in references)
        normalization_applied = True

    o_avg = sum(o_scores) / n
    s_avg = sum(s_scores) / n
    s_max = max(s_scores)
    score = min(100.0, s_max + math.sqrt(max(0.0, s_avg - o_avg)))
    return IoccbResult(
        o_scores=o_scores,
        s_scores=s_scores,
        o_avg=o_avg,
        s_avg=s_avg,
        s_max=s_max,
        score=score,
        normalization_applied=normalization_applied,
        warnings=tuple(warnings),
    )
