"""Executes subject programs against I/O tests and filters candidates.

Programs are never run in-process: every (test, run) lands in a fresh
scratch directory and goes through a shim that enforces the time and memory
limits and reports timing as one JSON line (see the wire protocol below).
``CommandShim`` drives an external shim executable; ``CannedShim`` is a test
double fed with prepared reports.

Timing protocol: each test is executed ``runs_per_test`` times (default 30)
and the median wall time is taken; a failing first run short-circuits the
remaining runs.  Per-candidate times are scaled to a reference suite of 47
tests: scaled = sum(test_medians) * 47 / n_tests.
"""

from __future__ import annotations

import hashlib
import json
import shlex
import statistics
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol, Sequence

from .corpus import CodeSample, EfficiencyProfile, IoTest
from .efficiency import npi

REFERENCE_TEST_COUNT = 47  # timings are normalized to a 47-test suite

STDOUT_DIGEST_PREFIX = "sha256:"


class InfrastructureError(Exception):
    """The shim itself failed; distinct from any subject-program failure."""


class EstimatorError(Exception):
    """A time estimator could not produce a prediction for a candidate."""


@dataclass(frozen=True)
class Limits:
    time_limit_ms: int
    memory_limit_kb: int
    runs_per_test: int = 30

    def __post_init__(self):
        for name in ("time_limit_ms", "memory_limit_kb", "runs_per_test"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class ShimReport:
    status: str  # ok | timeout | runtime_error | oom
    wall_ms: float
    cpu_ms: float
    max_rss_kb: int
    stdout: str
    stderr_tail: str = ""


class Shim(Protocol):
    def run(
        self,
        program: str,
        test_input: str,
        time_limit_ms: int,
        memory_limit_kb: int,
        run_index: int,
    ) -> ShimReport:
        ...


class CommandShim:
    """Spawns an external shim per run: ``<argv> program input time_ms mem_kb``.

    Every run gets a fresh scratch directory (the shim's working directory),
    so a candidate writing to the filesystem cannot affect a sibling run.
    """

    def __init__(self, argv: Sequence[str] | str):
        self.argv = shlex.split(argv) if isinstance(argv, str) else list(argv)

    def run(self, program, test_input, time_limit_ms, memory_limit_kb, run_index):
        with tempfile.TemporaryDirectory(prefix="effikit-run-") as scratch:
            scratch_path = Path(scratch)
            program_path = scratch_path / "program.py"
            input_path = scratch_path / "input.txt"
            program_path.write_text(program, encoding="utf-8")
            input_path.write_text(test_input, encoding="utf-8")
            argv = self.argv + [
                str(program_path),
                str(input_path),
                str(time_limit_ms),
                str(memory_limit_kb),
            ]
            try:
                proc = subprocess.run(
                    argv,
                    cwd=scratch,
                    capture_output=True,
                    text=True,
                    timeout=max(60.0, time_limit_ms / 1000.0 * 3 + 30.0),
                )
            except FileNotFoundError as exc:
                raise InfrastructureError(f"shim executable not found: {self.argv[0]!r}") from exc
            except subprocess.TimeoutExpired as exc:
                raise InfrastructureError("shim did not respond within its own deadline") from exc
        line = proc.stdout.strip().splitlines()
        if proc.returncode != 0 or not line:
            raise InfrastructureError(
                f"shim exited with {proc.returncode} and no report: {proc.stderr[-500:]!r}"
            )
        try:
            obj = json.loads(line[-1])
            return ShimReport(
                status=obj["status"],
                wall_ms=float(obj["wall_ms"]),
                cpu_ms=float(obj["cpu_ms"]),
                max_rss_kb=int(obj["max_rss_kb"]),
                stdout=obj["stdout"],
                stderr_tail=obj.get("stderr_tail", ""),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InfrastructureError(f"unparseable shim report: {line[-1]!r}") from exc


class CannedShim:
    """Test double: returns prepared reports keyed by program/input/run."""

    def __init__(self, lookup: Callable[[str, str, int], ShimReport]):
        self._lookup = lookup

    def run(self, program, test_input, time_limit_ms, memory_limit_kb, run_index):
        return self._lookup(program, test_input, run_index)


@dataclass(frozen=True)
class TestOutcome:
    status: str  # pass | wrong_answer | timeout | runtime_error | compile_error
    median_wall_ms: float
    median_cpu_ms: float
    max_rss_kb: int

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "median_wall_ms": self.median_wall_ms,
            "median_cpu_ms": self.median_cpu_ms,
            "max_rss_kb": self.max_rss_kb,
        }


@dataclass(frozen=True)
class RunResult:
    sample_id: str
    per_test: tuple[TestOutcome, ...]
    passed: int
    total: int
    scaled_time_ms: float | None
    io_pass: bool

    def as_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "per_test": [t.as_dict() for t in self.per_test],
            "passed": self.passed,
            "total": self.total,
            "scaled_time_ms": self.scaled_time_ms,
            "io_pass": self.io_pass,
        }


def normalize_output(text: str) -> list[str]:
    """Judge comparison form: per-line trailing whitespace and trailing blank
    lines stripped, otherwise exact."""
    lines = [line.rstrip() for line in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return lines


def outputs_match(actual: str, expected: str) -> bool:
    if actual.startswith(STDOUT_DIGEST_PREFIX):
        # oversized stdout was digested by the shim; compare digests
        expected_bytes = expected.encode("utf-8")
        digest = hashlib.sha256(expected_bytes).hexdigest()
        return actual == f"{STDOUT_DIGEST_PREFIX}{digest}:{len(expected_bytes)}"
    return normalize_output(actual) == normalize_output(expected)


def _classify(report: ShimReport, expected_output: str) -> str:
    if report.status == "ok":
        return "pass" if outputs_match(report.stdout, expected_output) else "wrong_answer"
    if report.status == "timeout":
        return "timeout"
    return "runtime_error"  # runtime_error and oom both count as runtime failures


def _run_test(
    source: str, test: IoTest, limits: Limits, shim: Shim
) -> TestOutcome:
    walls: list[float] = []
    cpus: list[float] = []
    rss = 0
    status = "pass"
    for run_index in range(limits.runs_per_test):
        report = shim.run(source, test.input, limits.time_limit_ms, limits.memory_limit_kb, run_index)
        walls.append(report.wall_ms)
        cpus.append(report.cpu_ms)
        rss = max(rss, report.max_rss_kb)
        outcome = _classify(report, test.expected_output)
        if outcome != "pass":
            status = outcome
            break  # timing a failing program is meaningless; skip remaining runs
    return TestOutcome(
        status=status,
        median_wall_ms=float(statistics.median(walls)),
        median_cpu_ms=float(statistics.median(cpus)),
        max_rss_kb=rss,
    )


def run_candidate(
    source: str,
    tests: Sequence[IoTest],
    limits: Limits,
    shim: Shim,
    sample_id: str = "candidate",
    jobs: int = 1,
) -> RunResult:
    """Run a program against all tests under the timing protocol."""
    if not tests:
        raise ValueError("tests must be non-empty")
    try:
        compile(source, "<candidate>", "exec")
    except (SyntaxError, ValueError):
        failed = TestOutcome(status="compile_error", median_wall_ms=0.0, median_cpu_ms=0.0, max_rss_kb=0)
        return RunResult(
            sample_id=sample_id,
            per_test=tuple(failed for _ in tests),
            passed=0,
            total=len(tests),
            scaled_time_ms=None,
            io_pass=False,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = tuple(pool.map(lambda t: _run_test(source, t, limits, shim), tests))
    else:
        outcomes = tuple(_run_test(source, t, limits, shim) for t in tests)

    passed = sum(1 for o in outcomes if o.status == "pass")
    io_pass = passed == len(tests)
    scaled = scale_time([o.median_wall_ms for o in outcomes], len(tests)) if io_pass else None
    return RunResult(
        sample_id=sample_id,
        per_test=outcomes,
        passed=passed,
        total=len(tests),
        scaled_time_ms=scaled,
        io_pass=io_pass,
    )


def scale_time(per_test_times: Sequence[float], n_tests: int) -> float:
    """Convert a candidate's per-test times to the 47-test reference suite."""
    if n_tests < 1 or len(per_test_times) != n_tests:
        raise ValueError(f"expected {n_tests} per-test times, got {len(per_test_times)}")
    return sum(per_test_times) * REFERENCE_TEST_COUNT / n_tests


# ---------------------------------------------------------------------------
# candidate filtering


@dataclass(frozen=True)
class RankedCandidate:
    sample: CodeSample
    estimated_ms: float | None
    npi: float | None
    error: str | None = None

    def as_dict(self) -> dict:
        return {
            "sample_id": self.sample.id,
            "estimated_ms": self.estimated_ms,
            "npi": self.npi,
            "error": self.error,
        }


@dataclass(frozen=True)
class FilterResult:
    chosen: CodeSample
    ranked: tuple[RankedCandidate, ...]


class ExternalEstimator:
    """Predictions read from a JSON object mapping sample id -> value.

    ``quantity`` is ``"time_ms"`` (the value feeds the time-to-score mapping)
    or ``"npi"`` (the value is used as the score directly).
    """

    def __init__(self, predictions: dict[str, float] | str | Path, quantity: str = "time_ms"):
        if not isinstance(predictions, dict):
            predictions = json.loads(Path(predictions).read_text(encoding="utf-8"))
        if quantity not in ("time_ms", "npi"):
            raise ValueError(f"quantity must be 'time_ms' or 'npi', got {quantity!r}")
        self.predictions = dict(predictions)
        self.quantity = quantity

    def __call__(self, sample: CodeSample) -> float:
        try:
            return float(self.predictions[sample.id])
        except KeyError as exc:
            raise EstimatorError(f"no prediction for sample {sample.id!r}") from exc


class MeasuredEstimator:
    """Runs the candidate and uses its scaled time; requires I/O pass."""

    quantity = "time_ms"

    def __init__(self, tests: Sequence[IoTest], limits: Limits, shim: Shim, jobs: int = 1):
        self.tests = tests
        self.limits = limits
        self.shim = shim
        self.jobs = jobs

    def __call__(self, sample: CodeSample) -> float:
        result = run_candidate(sample.source, self.tests, self.limits, self.shim, sample.id, self.jobs)
        if not result.io_pass:
            raise EstimatorError(
                f"sample {sample.id!r} failed I/O tests ({result.passed}/{result.total}); "
                "measured estimation needs a passing candidate"
            )
        return result.scaled_time_ms


def npi_filter(
    candidates: Sequence[CodeSample],
    estimator: Callable[[CodeSample], float],
    profile: EfficiencyProfile,
) -> FilterResult:
    """Rank candidates by efficiency score and pick the best one.

    Ties break on lower estimated time, then input order.  A candidate the
    estimator fails on is ranked last with its error recorded, not dropped.
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    quantity = getattr(estimator, "quantity", "time_ms")
    ranked: list[tuple[tuple, RankedCandidate]] = []
    for order, sample in enumerate(candidates):
        try:
            value = float(estimator(sample))
        except EstimatorError as exc:
            entry = RankedCandidate(sample, None, None, error=str(exc))
            ranked.append(((1, 0.0, float("inf"), order), entry))
            continue
        if quantity == "npi":
            score, est_ms = value, None
            sort_time = float("inf")
        else:
            score, est_ms = npi(value, profile), value
            sort_time = value
        entry = RankedCandidate(sample, est_ms, score)
        ranked.append(((0, -score, sort_time, order), entry))
    ranked.sort(key=lambda item: item[0])
    ordered = tuple(entry for _, entry in ranked)
    return FilterResult(chosen=ordered[0].sample, ranked=ordered)
