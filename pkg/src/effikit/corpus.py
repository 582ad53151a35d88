"""Dataset data model and line-delimited JSON persistence.

A dataset file is JSONL: the first line is a manifest record carrying the
schema name and format version, every following line is one self-contained
record (``problem``, ``sample`` or ``pair``).  Three schema profiles exist:

- ``aceob``: benchmark pairs (problem records + pair records with alternates)
- ``ori``:   flat code records (problem records + sample records)
- ``npi``:   sample records only (code + time + efficiency score)

Unknown fields on any record are preserved verbatim in ``extra`` so that data
carried for other tooling survives a load/save round-trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

SCHEMAS = ("aceob", "ori", "npi")
FORMAT_VERSION = 1

# difficulty ranges per schema profile
_DIFFICULTY_RANGE = {"aceob": (0, 18), "ori": (0, 27), "npi": (0, 27)}

ORIGINS = ("human", "generated")


class CorpusError(Exception):
    """Base class for dataset errors."""


class DatasetFormatError(CorpusError):
    """Structurally broken dataset file (bad JSON, bad manifest)."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class SchemaError(CorpusError):
    """A record violates the schema; names the record and the field."""

    def __init__(self, record_id: str, fieldname: str, message: str):
        super().__init__(f"record {record_id!r}, field {fieldname!r}: {message}")
        self.record_id = record_id
        self.fieldname = fieldname


@dataclass(frozen=True)
class Violation:
    record_id: str
    rule: str
    message: str


@dataclass(frozen=True)
class IoTest:
    input: str
    expected_output: str
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EfficiencyProfile:
    """A problem's execution-time anchors in milliseconds."""

    t_min_ms: float
    t_med_ms: float
    t_max_ms: float

    def __post_init__(self):
        for name in ("t_min_ms", "t_med_ms", "t_max_ms"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or value <= 0:
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if not (self.t_min_ms <= self.t_med_ms <= self.t_max_ms):
            raise ValueError(
                "profile ordering violated: expected t_min_ms <= t_med_ms <= t_max_ms, "
                f"got ({self.t_min_ms}, {self.t_med_ms}, {self.t_max_ms})"
            )


@dataclass(frozen=True)
class Problem:
    id: str
    statement: str
    input_format: str
    output_format: str
    public_tests: tuple[IoTest, ...]
    hidden_tests: tuple[IoTest, ...]
    difficulty: int
    tags: frozenset[str]
    time_limit_ms: int
    memory_limit_kb: int
    profile: EfficiencyProfile
    source_urls: tuple[str, ...] | None = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CodeSample:
    id: str
    problem_id: str
    source: str
    token_count: int
    origin: str = "human"
    measured_time_ms: float | None = None
    scaled_time_ms: float | None = None
    peak_memory_kb: int | None = None
    npi: float | None = None
    compile_ok: bool | None = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CodePair:
    problem_id: str
    inefficient: CodeSample
    efficient: CodeSample
    alternates: tuple[CodeSample, ...] = ()
    extra: dict = field(default_factory=dict)


@dataclass
class Corpus:
    schema: str
    problems: dict[str, Problem] = field(default_factory=dict)
    samples: list[CodeSample] = field(default_factory=list)
    pairs: list[CodePair] = field(default_factory=list)


# ---------------------------------------------------------------------------
# record parsing


def _need(obj: dict, key: str, kind, record_id: str, allow_none: bool = False):
    if key not in obj:
        raise SchemaError(record_id, key, "required field missing")
    value = obj[key]
    if value is None and allow_none:
        return None
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(record_id, key, f"expected number, got {type(value).__name__}")
        return float(value)
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise SchemaError(record_id, key, f"expected integer, got {type(value).__name__}")
        return value
    if not isinstance(value, kind):
        raise SchemaError(record_id, key, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _opt(obj: dict, key: str, kind, record_id: str):
    if key not in obj or obj[key] is None:
        return None
    return _need(obj, key, kind, record_id)


def _extra(obj: dict, known: Iterable[str]) -> dict:
    known = set(known) | {"record"}
    return {k: v for k, v in obj.items() if k not in known}


def _parse_io_test(obj: Any, record_id: str) -> IoTest:
    if not isinstance(obj, dict):
        raise SchemaError(record_id, "tests", "each test must be an object")
    return IoTest(
        input=_need(obj, "input", str, record_id),
        expected_output=_need(obj, "expected_output", str, record_id),
        extra=_extra(obj, ("input", "expected_output")),
    )


def _parse_profile(obj: Any, record_id: str) -> EfficiencyProfile:
    if not isinstance(obj, dict):
        raise SchemaError(record_id, "profile", "expected object")
    try:
        return EfficiencyProfile(
            t_min_ms=_need(obj, "t_min_ms", float, record_id),
            t_med_ms=_need(obj, "t_med_ms", float, record_id),
            t_max_ms=_need(obj, "t_max_ms", float, record_id),
        )
    except ValueError as exc:
        raise SchemaError(record_id, "profile", str(exc)) from exc


_PROBLEM_FIELDS = (
    "id", "statement", "input_format", "output_format", "public_tests",
    "hidden_tests", "difficulty", "tags", "time_limit_ms", "memory_limit_kb",
    "profile", "source_urls",
)


def _parse_problem(obj: dict, schema: str) -> Problem:
    record_id = str(obj.get("id", "<problem without id>"))
    difficulty = _need(obj, "difficulty", int, record_id)
    lo, hi = _DIFFICULTY_RANGE[schema]
    if not lo <= difficulty <= hi:
        raise SchemaError(
            record_id, "difficulty",
            f"out of range for schema {schema!r}: expected {lo}..{hi}, got {difficulty}",
        )
    tags = _need(obj, "tags", list, record_id)
    if schema == "aceob" and not tags:
        raise SchemaError(record_id, "tags", "must be non-empty for aceob records")
    for limit in ("time_limit_ms", "memory_limit_kb"):
        if _need(obj, limit, int, record_id) <= 0:
            raise SchemaError(record_id, limit, "must be positive")
    source_urls = _opt(obj, "source_urls", list, record_id)
    return Problem(
        id=_need(obj, "id", str, record_id),
        statement=_need(obj, "statement", str, record_id),
        input_format=_need(obj, "input_format", str, record_id),
        output_format=_need(obj, "output_format", str, record_id),
        public_tests=tuple(_parse_io_test(t, record_id) for t in _need(obj, "public_tests", list, record_id)),
        hidden_tests=tuple(_parse_io_test(t, record_id) for t in _need(obj, "hidden_tests", list, record_id)),
        difficulty=difficulty,
        tags=frozenset(str(t) for t in tags),
        time_limit_ms=obj["time_limit_ms"],
        memory_limit_kb=obj["memory_limit_kb"],
        profile=_parse_profile(obj.get("profile"), record_id),
        source_urls=tuple(source_urls) if source_urls is not None else None,
        extra=_extra(obj, _PROBLEM_FIELDS),
    )


_SAMPLE_FIELDS = (
    "id", "problem_id", "source", "token_count", "origin", "measured_time_ms",
    "scaled_time_ms", "peak_memory_kb", "npi", "compile_ok",
)


def _parse_sample(obj: dict) -> CodeSample:
    record_id = str(obj.get("id", "<sample without id>"))
    token_count = _need(obj, "token_count", int, record_id)
    if token_count < 0:
        raise SchemaError(record_id, "token_count", "must be non-negative")
    origin = _need(obj, "origin", str, record_id)
    if origin not in ORIGINS:
        raise SchemaError(record_id, "origin", f"must be one of {ORIGINS}, got {origin!r}")
    npi = _opt(obj, "npi", float, record_id)
    if npi is not None and not 0.0 <= npi <= 100.0:
        raise SchemaError(record_id, "npi", f"must lie in [0, 100], got {npi}")
    for key in ("measured_time_ms", "scaled_time_ms"):
        value = _opt(obj, key, float, record_id)
        if value is not None and value <= 0:
            raise SchemaError(record_id, key, "must be strictly positive when present")
    peak = _opt(obj, "peak_memory_kb", int, record_id)
    if peak is not None and peak <= 0:
        raise SchemaError(record_id, "peak_memory_kb", "must be strictly positive when present")
    return CodeSample(
        id=_need(obj, "id", str, record_id),
        problem_id=_need(obj, "problem_id", str, record_id),
        source=_need(obj, "source", str, record_id),
        token_count=token_count,
        origin=origin,
        measured_time_ms=_opt(obj, "measured_time_ms", float, record_id),
        scaled_time_ms=_opt(obj, "scaled_time_ms", float, record_id),
        peak_memory_kb=peak,
        npi=npi,
        compile_ok=_opt(obj, "compile_ok", bool, record_id),
        extra=_extra(obj, _SAMPLE_FIELDS),
    )


def _parse_pair(obj: dict) -> CodePair:
    record_id = str(obj.get("problem_id", "<pair without problem_id>"))
    inefficient = _parse_sample(_need(obj, "inefficient", dict, record_id))
    efficient = _parse_sample(_need(obj, "efficient", dict, record_id))
    alternates = tuple(_parse_sample(a) for a in obj.get("alternates", []))
    return CodePair(
        problem_id=_need(obj, "problem_id", str, record_id),
        inefficient=inefficient,
        efficient=efficient,
        alternates=alternates,
        extra=_extra(obj, ("problem_id", "inefficient", "efficient", "alternates")),
    )


# ---------------------------------------------------------------------------
# serialization


def _drop_none(obj: dict) -> dict:
    return {k: v for k, v in obj.items() if v is not None}


def _io_test_to_json(t: IoTest) -> dict:
    return {"input": t.input, "expected_output": t.expected_output, **t.extra}


def _problem_to_json(p: Problem) -> dict:
    obj = {
        "record": "problem",
        "id": p.id,
        "statement": p.statement,
        "input_format": p.input_format,
        "output_format": p.output_format,
        "public_tests": [_io_test_to_json(t) for t in p.public_tests],
        "hidden_tests": [_io_test_to_json(t) for t in p.hidden_tests],
        "difficulty": p.difficulty,
        "tags": sorted(p.tags),
        "time_limit_ms": p.time_limit_ms,
        "memory_limit_kb": p.memory_limit_kb,
        "profile": {
            "t_min_ms": p.profile.t_min_ms,
            "t_med_ms": p.profile.t_med_ms,
            "t_max_ms": p.profile.t_max_ms,
        },
    }
    if p.source_urls is not None:
        obj["source_urls"] = list(p.source_urls)
    obj.update(p.extra)
    return obj


def _sample_to_json(s: CodeSample, record: bool = True) -> dict:
    obj = {
        "record": "sample" if record else None,
        "id": s.id,
        "problem_id": s.problem_id,
        "source": s.source,
        "token_count": s.token_count,
        "origin": s.origin,
        "measured_time_ms": s.measured_time_ms,
        "scaled_time_ms": s.scaled_time_ms,
        "peak_memory_kb": s.peak_memory_kb,
        "npi": s.npi,
        "compile_ok": s.compile_ok,
    }
    obj = _drop_none(obj)
    obj.update(s.extra)
    return obj


def _pair_to_json(p: CodePair) -> dict:
    obj = {
        "record": "pair",
        "problem_id": p.problem_id,
        "inefficient": _sample_to_json(p.inefficient, record=False),
        "efficient": _sample_to_json(p.efficient, record=False),
        "alternates": [_sample_to_json(a, record=False) for a in p.alternates],
    }
    obj.update(p.extra)
    return obj


# ---------------------------------------------------------------------------
# public operations


def load_dataset(path: str | Path, schema: str) -> Corpus:
    """Read a JSONL dataset, type-checking every record against ``schema``.

    Raises DatasetFormatError for malformed JSON (with the line number) and
    SchemaError for records that violate the schema (naming record and field).
    """
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}, expected one of {SCHEMAS}")
    path = Path(path)
    corpus = Corpus(schema=schema)
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(f"malformed JSON: {exc.msg}", line_no) from exc
            if not isinstance(obj, dict):
                raise DatasetFormatError("record must be a JSON object", line_no)
            kind = obj.get("record")
            if kind == "manifest":
                declared = obj.get("schema")
                if declared != schema:
                    raise DatasetFormatError(
                        f"manifest declares schema {declared!r} but {schema!r} was requested",
                        line_no,
                    )
                continue
            if kind == "problem":
                problem = _parse_problem(obj, schema)
                corpus.problems[problem.id] = problem
            elif kind == "sample":
                corpus.samples.append(_parse_sample(obj))
            elif kind == "pair":
                corpus.pairs.append(_parse_pair(obj))
            else:
                raise DatasetFormatError(f"unknown record kind {kind!r}", line_no)
    return corpus


def save_dataset(corpus: Corpus, path: str | Path) -> None:
    """Write the corpus as JSONL; requires ``validate(corpus)`` to be clean.

    Round-trip stable: ``load_dataset(save_dataset(c)) == c`` field by field.
    Optional fields that are absent are omitted rather than null-filled.
    """
    violations = validate(corpus)
    if violations:
        first = violations[0]
        raise ValueError(
            f"refusing to save invalid corpus ({len(violations)} violation(s); "
            f"first: {first.record_id}: {first.rule}: {first.message})"
        )
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        manifest = {"record": "manifest", "schema": corpus.schema, "version": FORMAT_VERSION}
        handle.write(json.dumps(manifest, ensure_ascii=False) + "\n")
        for problem_id in sorted(corpus.problems):
            handle.write(json.dumps(_problem_to_json(corpus.problems[problem_id]), ensure_ascii=False) + "\n")
        for sample in corpus.samples:
            handle.write(json.dumps(_sample_to_json(sample), ensure_ascii=False) + "\n")
        for pair in corpus.pairs:
            handle.write(json.dumps(_pair_to_json(pair), ensure_ascii=False) + "\n")


def _check_sample(sample: CodeSample, out: list[Violation]) -> None:
    if sample.token_count < 0:
        out.append(Violation(sample.id, "token_count", "must be non-negative"))
    if sample.npi is not None and not 0.0 <= sample.npi <= 100.0:
        out.append(Violation(sample.id, "npi", f"must lie in [0, 100], got {sample.npi}"))
    if sample.origin not in ORIGINS:
        out.append(Violation(sample.id, "origin", f"must be one of {ORIGINS}"))
    for key in ("measured_time_ms", "scaled_time_ms"):
        value = getattr(sample, key)
        if value is not None and value <= 0:
            out.append(Violation(sample.id, key, "must be strictly positive when present"))


def validate(corpus: Corpus) -> list[Violation]:
    """Check all invariants; returns violations instead of raising.

    Total by design: any structurally constructed Corpus yields a (possibly
    empty) violation list, never an exception.
    """
    out: list[Violation] = []
    lo, hi = _DIFFICULTY_RANGE.get(corpus.schema, (0, 27))

    referenced: set[str] = set()
    for sample in corpus.samples:
        referenced.add(sample.problem_id)
    for pair in corpus.pairs:
        referenced.add(pair.problem_id)

    for problem in corpus.problems.values():
        if not lo <= problem.difficulty <= hi:
            out.append(Violation(problem.id, "difficulty", f"out of range {lo}..{hi}"))
        if corpus.schema == "aceob" and not problem.tags:
            out.append(Violation(problem.id, "tags", "must be non-empty for aceob records"))
        if problem.id in referenced and not problem.hidden_tests:
            out.append(Violation(problem.id, "hidden_tests", "problem used for scoring has no hidden tests"))
        if problem.time_limit_ms <= 0:
            out.append(Violation(problem.id, "time_limit_ms", "must be positive"))
        if problem.memory_limit_kb <= 0:
            out.append(Violation(problem.id, "memory_limit_kb", "must be positive"))

    has_problems = corpus.schema in ("aceob", "ori")
    for sample in corpus.samples:
        _check_sample(sample, out)
        if has_problems and corpus.problems and sample.problem_id not in corpus.problems:
            out.append(Violation(sample.id, "problem_id", f"unknown problem {sample.problem_id!r}"))

    for index, pair in enumerate(corpus.pairs):
        pair_id = f"pair[{index}]:{pair.problem_id}"
        for member in (pair.inefficient, pair.efficient, *pair.alternates):
            _check_sample(member, out)
            if member.problem_id != pair.problem_id:
                out.append(Violation(member.id, "problem_id", f"does not match pair problem {pair.problem_id!r}"))
        if corpus.problems and pair.problem_id not in corpus.problems:
            out.append(Violation(pair_id, "problem_id", f"unknown problem {pair.problem_id!r}"))
        ineff, eff = pair.inefficient, pair.efficient
        if ineff.scaled_time_ms is None or eff.scaled_time_ms is None:
            out.append(Violation(pair_id, "scaled_time_ms", "both pair members need scaled times"))
        elif not eff.scaled_time_ms < ineff.scaled_time_ms:
            out.append(
                Violation(
                    pair_id, "pair_ordering",
                    f"efficient member must be strictly faster "
                    f"({eff.scaled_time_ms} >= {ineff.scaled_time_ms})",
                )
            )
    return out
