"""Benchmark pair construction.

Per problem the pipeline is: near-duplicate removal (longest common
contiguous substring similarity) -> length filtering -> efficiency split at
the score-50 line -> independent clustering of each side (bisecting 2-medoid
under 100 - symmetric CodeBLEU) -> cluster representatives -> optimal
matching of inefficient to efficient representatives (assignment problem on
standardized-code similarity), with the unmatched efficient representatives
attached to every pair as alternates.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from difflib import SequenceMatcher
from typing import Sequence

import numpy as np

from .codebleu import codebleu
from .corpus import CodePair, CodeSample, Corpus, EfficiencyProfile
from .efficiency import npi
from .pynorm import CompileError, standardize_identifiers

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairingConfig:
    dedup_threshold: float = 0.99
    abs_token_limit: int = 512
    rel_length_factor: float = 3.0
    cluster_scale: float = 1.0  # k = max(1, round(scale * sqrt(N)))
    efficiency_split_npi: float = 50.0

    def __post_init__(self):
        if not 0 < self.dedup_threshold <= 1:
            raise ValueError("dedup_threshold must lie in (0, 1]")
        if self.abs_token_limit <= 0 or self.rel_length_factor <= 0 or self.cluster_scale <= 0:
            raise ValueError("limits and scale must be positive")


@dataclass(frozen=True)
class ClusterAssignment:
    assignment: dict[str, int]  # sample id -> cluster index
    representatives: dict[int, str]  # cluster index -> sample id

    def members(self, index: int) -> list[str]:
        return [sid for sid, c in self.assignment.items() if c == index]


def lccs_similarity(a: str, b: str) -> float:
    """Longest common contiguous substring length over the longer text's length."""
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    match = SequenceMatcher(None, a, b, autojunk=False).find_longest_match(0, len(a), 0, len(b))
    return match.size / max(len(a), len(b))


def dedup(samples: Sequence[CodeSample], threshold: float = 0.99) -> list[CodeSample]:
    """Greedy scan in input order; drops samples more similar than the
    threshold (strictly greater) to an already-retained sample of the same
    problem.  The first occurrence of any near-duplicate group survives."""
    retained: list[CodeSample] = []
    by_problem: dict[str, list[CodeSample]] = {}
    for sample in samples:
        peers = by_problem.setdefault(sample.problem_id, [])
        if any(lccs_similarity(sample.source, kept.source) > threshold for kept in peers):
            logger.info("dedup: dropping %s (near-duplicate)", sample.id)
            continue
        peers.append(sample)
        retained.append(sample)
    return retained


def length_filter(samples: Sequence[CodeSample], config: PairingConfig) -> list[CodeSample]:
    """Drop samples over the absolute token limit, then over the per-problem
    relative limit (factor times the problem's mean token count)."""
    survivors = [s for s in samples if s.token_count <= config.abs_token_limit]
    for dropped in set(s.id for s in samples) - set(s.id for s in survivors):
        logger.info("length_filter: dropping %s (absolute limit)", dropped)
    by_problem: dict[str, list[CodeSample]] = {}
    for sample in survivors:
        by_problem.setdefault(sample.problem_id, []).append(sample)
    means = {
        pid: sum(s.token_count for s in group) / len(group) for pid, group in by_problem.items()
    }
    out = []
    for sample in survivors:
        if sample.token_count > config.rel_length_factor * means[sample.problem_id]:
            logger.info("length_filter: dropping %s (relative limit)", sample.id)
            continue
        out.append(sample)
    return out


def split_by_efficiency(
    samples: Sequence[CodeSample],
    profile: EfficiencyProfile,
    split_npi: float = 50.0,
) -> tuple[list[CodeSample], list[CodeSample]]:
    """(efficient, inefficient) split: efficient iff score >= split_npi."""
    efficient: list[CodeSample] = []
    inefficient: list[CodeSample] = []
    for sample in samples:
        if sample.scaled_time_ms is None:
            raise ValueError(f"sample {sample.id!r} has no scaled time; run timing first")
        if npi(sample.scaled_time_ms, profile) >= split_npi:
            efficient.append(sample)
        else:
            inefficient.append(sample)
    return efficient, inefficient


# ---------------------------------------------------------------------------
# clustering


def _distance_matrix(texts: Sequence[str]) -> np.ndarray:
    n = len(texts)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            sim = 0.5 * (codebleu(texts[i], texts[j]).combined + codebleu(texts[j], texts[i]).combined)
            d[i, j] = d[j, i] = max(0.0, 100.0 - sim)
    return d


def _best_two_medoids(d: np.ndarray, members: list[int]) -> tuple[int, int]:
    """Exhaustive 2-medoid choice minimizing total distance to nearest medoid."""
    sub = d[np.ix_(members, members)]
    m = len(members)
    best = (math.inf, 0, 1)
    for i in range(m):
        costs = np.minimum(sub[i], sub).sum(axis=1)  # cost of pairing i with every j
        for j in range(i + 1, m):
            cost = costs[j]
            if cost < best[0]:
                best = (cost, i, j)
    return members[best[1]], members[best[2]]


def _split_cluster(d: np.ndarray, members: list[int]) -> tuple[list[int], list[int]]:
    a, b = _best_two_medoids(d, members)
    left, right = [], []
    for idx in members:
        if idx == a:
            left.append(idx)
        elif idx == b:
            right.append(idx)
        elif d[idx, a] <= d[idx, b]:
            left.append(idx)
        else:
            right.append(idx)
    return left, right


def _cluster_cost(d: np.ndarray, members: list[int]) -> float:
    """Within-cluster dissimilarity: total distance to the cluster medoid."""
    if len(members) < 2:
        return 0.0
    sub = d[np.ix_(members, members)]
    return float(sub.sum(axis=1).min())


def cluster(
    samples: Sequence[CodeSample],
    k: int,
    texts: Sequence[str] | None = None,
    seed: int = 0,
) -> ClusterAssignment:
    """Bisecting clustering: repeatedly split the cluster with the largest
    within-cluster dissimilarity via a 2-medoid partition until k clusters.

    ``texts`` optionally supplies the strings the distance is computed on
    (the pipeline passes standardized sources); defaults to sample sources.
    The procedure is deterministic; ``seed`` is accepted for interface
    stability and unused by the exhaustive medoid search.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not samples:
        raise ValueError("samples must be non-empty")
    if k > len(samples):
        logger.warning("cluster: k=%d exceeds sample count %d; lowering", k, len(samples))
        k = len(samples)
    texts = list(texts) if texts is not None else [s.source for s in samples]
    if len(texts) != len(samples):
        raise ValueError("texts must parallel samples")

    d = _distance_matrix(texts)
    clusters: list[list[int]] = [list(range(len(samples)))]
    while len(clusters) < k:
        costs = [_cluster_cost(d, c) if len(c) > 1 else -1.0 for c in clusters]
        target = int(np.argmax(costs))
        if costs[target] < 0:
            break  # only singletons remain
        left, right = _split_cluster(d, clusters[target])
        clusters[target : target + 1] = [left, right]

    assignment: dict[str, int] = {}
    representatives: dict[int, str] = {}
    for index, members in enumerate(clusters):
        member_samples = [samples[i] for i in members]
        member_texts = [texts[i] for i in members]
        for i in members:
            assignment[samples[i].id] = index
        representatives[index] = representative(member_samples, member_texts).id
    return ClusterAssignment(assignment=assignment, representatives=representatives)


def representative(
    cluster_samples: Sequence[CodeSample], texts: Sequence[str] | None = None
) -> CodeSample:
    """The member with the highest sum of symmetric CodeBLEU to the others;
    ties break on the smaller sample id."""
    if not cluster_samples:
        raise ValueError("cluster must be non-empty")
    if len(cluster_samples) == 1:
        return cluster_samples[0]
    texts = list(texts) if texts is not None else [s.source for s in cluster_samples]
    n = len(cluster_samples)
    sims = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            sim = 0.5 * (codebleu(texts[i], texts[j]).combined + codebleu(texts[j], texts[i]).combined)
            sims[i, j] = sims[j, i] = sim
    totals = sims.sum(axis=1)
    best = max(range(n), key=lambda i: (totals[i], ), default=0)
    # resolve float ties deterministically by smaller sample id
    candidates = [i for i in range(n) if abs(totals[i] - totals[best]) <= 1e-9]
    winner = min(candidates, key=lambda i: cluster_samples[i].id)
    return cluster_samples[winner]


# ---------------------------------------------------------------------------
# assignment


def _min_cost_assignment(cost: np.ndarray) -> list[int]:
    """Exact square assignment via the potentials (augmenting path) method.

    Returns column index assigned to each row.  O(n^3), deterministic: ties
    resolve toward lower column indices.
    """
    n = cost.shape[0]
    INF = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)  # p[j] = row matched to column j (1-based, 0 = free)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = -1
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    cols = [0] * n
    for j in range(1, n + 1):
        if p[j] > 0:
            cols[p[j] - 1] = j - 1
    return cols


def max_score_assignment(scores: Sequence[Sequence[float]]) -> list[tuple[int, int]]:
    """Maximum-total assignment on a rectangular score matrix.

    The matrix is padded with zero-score dummies to square; pairs matched to
    dummies are omitted from the result.
    """
    rows = len(scores)
    cols = len(scores[0]) if rows else 0
    if rows == 0 or cols == 0:
        return []
    n = max(rows, cols)
    padded = np.zeros((n, n))
    padded[:rows, :cols] = np.asarray(scores, dtype=float)
    assignment = _min_cost_assignment(-padded)
    return [(i, j) for i, j in enumerate(assignment[:rows]) if j < cols]


def _standardized(sample: CodeSample) -> str:
    try:
        return standardize_identifiers(sample.source).source
    except CompileError:
        logger.warning("match_pairs: %s does not parse; matching on raw source", sample.id)
        return sample.source


def match_pairs(
    inefficients: Sequence[CodeSample], efficients: Sequence[CodeSample]
) -> list[CodePair]:
    """Assignment of inefficient to efficient representatives maximizing
    total symmetric CodeBLEU on standardized code.  Each pair carries every
    other efficient representative of the problem as an alternate."""
    if not inefficients or not efficients:
        raise ValueError("both sides must be non-empty")
    problem_ids = {s.problem_id for s in (*inefficients, *efficients)}
    if len(problem_ids) != 1:
        raise ValueError(f"all samples must share one problem, got {sorted(problem_ids)}")
    problem_id = problem_ids.pop()

    std_ineff = [_standardized(s) for s in inefficients]
    std_eff = [_standardized(s) for s in efficients]
    scores = [
        [
            0.5 * (codebleu(a, b).combined + codebleu(b, a).combined)
            for b in std_eff
        ]
        for a in std_ineff
    ]
    pairs = []
    for i, j in max_score_assignment(scores):
        alternates = tuple(e for idx, e in enumerate(efficients) if idx != j)
        pairs.append(
            CodePair(
                problem_id=problem_id,
                inefficient=inefficients[i],
                efficient=efficients[j],
                alternates=alternates,
            )
        )
    return pairs


# ---------------------------------------------------------------------------
# full pipeline


def _cluster_count(n: int, scale: float) -> int:
    return max(1, round(scale * math.sqrt(n)))


def _pairs_for_problem(
    problem, samples: list[CodeSample], config: PairingConfig, seed: int
) -> list[CodePair]:
    samples = dedup(samples, config.dedup_threshold)
    samples = length_filter(samples, config)
    efficient, inefficient = split_by_efficiency(samples, problem.profile, config.efficiency_split_npi)
    if not efficient or not inefficient:
        logger.info(
            "build_pairs: problem %s yields no pairs (%d efficient / %d inefficient)",
            problem.id, len(efficient), len(inefficient),
        )
        return []

    def side_representatives(side: list[CodeSample]) -> list[CodeSample]:
        texts = [_standardized(s) for s in side]
        k = _cluster_count(len(side), config.cluster_scale)
        assignment = cluster(side, k, texts=texts, seed=seed)
        by_id = {s.id: s for s in side}
        return [by_id[assignment.representatives[c]] for c in sorted(assignment.representatives)]

    eff_reps = side_representatives(efficient)
    ineff_reps = side_representatives(inefficient)
    return match_pairs(ineff_reps, eff_reps)


def build_pairs(
    corpus: Corpus, config: PairingConfig | None = None, seed: int = 0, jobs: int = 1
) -> Corpus:
    """Run the full pipeline over a timed corpus, producing a pair corpus."""
    config = config or PairingConfig()
    by_problem: dict[str, list[CodeSample]] = {}
    for sample in corpus.samples:
        by_problem.setdefault(sample.problem_id, []).append(sample)

    ordered = [pid for pid in sorted(by_problem) if pid in corpus.problems]
    for pid in sorted(set(by_problem) - set(ordered)):
        logger.warning("build_pairs: samples reference unknown problem %s; skipped", pid)

    def work(pid: str) -> list[CodePair]:
        return _pairs_for_problem(corpus.problems[pid], by_problem[pid], config, seed)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, ordered))
    else:
        results = [work(pid) for pid in ordered]

    out = Corpus(schema="aceob")
    for pid, pairs in zip(ordered, results):
        if pairs:
            out.problems[pid] = corpus.problems[pid]
            out.pairs.extend(pairs)
    return out
