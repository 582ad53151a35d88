"""Command-line surface.

Thin wrappers over the library: every subcommand parses arguments, calls one
core operation and serializes the result.  Exit codes: 0 success, 1 operation
error, 2 usage error.  ``--json`` emits exactly one JSON document on stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .codebleu import DEFAULT_KEYWORD_WEIGHT, DEFAULT_WEIGHTS, codebleu
from .corpus import Corpus, DatasetFormatError, load_dataset, save_dataset
from .efficiency import EfficiencyProfile, bucket_proportions, npi
from .evalstats import (
    DEFAULT_BUCKETS,
    PredictionRecord,
    ScoredSample,
    grouped_report,
    report_to_csv,
    rmse,
    spearman,
)
from .ioccb import ioccb
from .pairing import PairingConfig, build_pairs
from .pynorm import CompileError, LexError, standardize_identifiers
from .runner import (
    CommandShim,
    EstimatorError,
    ExternalEstimator,
    InfrastructureError,
    Limits,
    MeasuredEstimator,
    npi_filter,
    run_candidate,
)

DEFAULT_SHIM = os.environ.get("EFFIKIT_SHIM", "effishim")


class CliError(Exception):
    pass


def _emit(args, payload: dict, plain: str | None = None) -> None:
    if getattr(args, "json", False) or plain is None:
        print(json.dumps(payload))
    else:
        print(plain)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _sniff_schema(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            first = handle.readline().strip()
        obj = json.loads(first)
        if obj.get("record") == "manifest" and obj.get("schema") in corpus_mod.SCHEMAS:
            return obj["schema"]
    except (OSError, json.JSONDecodeError):
        pass
    return "ori"


def _load(path: str, schema: str | None) -> Corpus:
    return load_dataset(path, schema or _sniff_schema(path))


def _parse_profile(text: str) -> EfficiencyProfile:
    parts = text.split(",")
    if len(parts) != 3:
        raise CliError(f"profile must be tmin,tmed,tmax; got {text!r}")
    try:
        return EfficiencyProfile(*(float(p) for p in parts))
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _parse_weights(text: str | None):
    if text is None:
        return DEFAULT_WEIGHTS
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise CliError(f"bad weights {text!r}") from exc


def _read_records(path: str) -> list[dict]:
    """Prediction/score files: JSON array or one JSON object per line."""
    text = _read(path).strip()
    if not text:
        return []
    if text.startswith("["):
        data = json.loads(text)
        if not isinstance(data, list):
            raise CliError(f"{path}: expected a JSON array")
        return data
    out = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if line:
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise CliError(f"{path} line {line_no}: {exc.msg}") from exc
    return out


def _problem_or_fail(corpus: Corpus, problem_id: str):
    problem = corpus.problems.get(problem_id)
    if problem is None:
        raise CliError(f"problem {problem_id!r} not in dataset")
    if not problem.hidden_tests:
        raise CliError(f"problem {problem_id!r} has no hidden tests")
    return problem


def _limits(args, problem) -> Limits:
    return Limits(
        time_limit_ms=args.time_limit_ms or problem.time_limit_ms,
        memory_limit_kb=args.memory_limit_kb or problem.memory_limit_kb,
        runs_per_test=args.runs,
    )


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_normalize(args) -> None:
    result = standardize_identifiers(_read(args.file))
    _emit(
        args,
        {"source": result.source, "rename_map": result.rename_map, "compile_ok": result.compile_ok},
        plain=result.source.rstrip("\n"),
    )


def cmd_score_codebleu(args) -> None:
    breakdown = codebleu(
        _read(args.candidate),
        _read(args.reference),
        weights=_parse_weights(args.weights),
        keyword_weight=args.keyword_weight,
    )
    print(json.dumps(breakdown.as_dict()))


def cmd_score_ioccb(args) -> None:
    result = ioccb(
        _read(args.candidate),
        _read(args.truth),
        [_read(path) for path in args.alt],
        weights=_parse_weights(args.weights),
    )
    print(json.dumps(result.as_dict()))


def cmd_score_npi(args) -> None:
    value = npi(args.time, _parse_profile(args.profile))
    _emit(args, {"npi": value}, plain=f"{value:g}")


def cmd_run(args) -> None:
    corpus = _load(args.dataset, args.schema)
    problem = _problem_or_fail(corpus, args.problem)
    result = run_candidate(
        _read(args.file),
        problem.hidden_tests,
        _limits(args, problem),
        CommandShim(args.shim),
        sample_id=Path(args.file).stem,
        jobs=args.jobs,
    )
    print(json.dumps(result.as_dict()))


def cmd_filter(args) -> None:
    corpus = _load(args.dataset, args.schema)
    problem = _problem_or_fail(corpus, args.problem)
    candidate_dir = Path(args.candidates_dir)
    files = sorted(candidate_dir.glob("*.py"))
    if not files:
        raise CliError(f"no .py candidates in {candidate_dir}")
    samples = [
        corpus_mod.CodeSample(
            id=path.stem,
            problem_id=args.problem,
            source=path.read_text(encoding="utf-8"),
            token_count=0,
            origin="generated",
        )
        for path in files
    ]
    spec = args.estimator
    if spec == "measured":
        estimator = MeasuredEstimator(
            problem.hidden_tests, _limits(args, problem), CommandShim(args.shim), jobs=args.jobs
        )
    elif spec.startswith("external:"):
        estimator = ExternalEstimator(spec.split(":", 1)[1])
    elif spec.startswith("external-npi:"):
        estimator = ExternalEstimator(spec.split(":", 1)[1], quantity="npi")
    else:
        raise CliError(f"unknown estimator {spec!r} (expected measured, external:FILE or external-npi:FILE)")
    result = npi_filter(samples, estimator, problem.profile)
    chosen_path = candidate_dir / f"{result.chosen.id}.py"
    payload = {"chosen": str(chosen_path), "ranking": [r.as_dict() for r in result.ranked]}
    print(json.dumps(payload))


def _read_config(path: str | None) -> PairingConfig:
    if path is None:
        return PairingConfig()
    values: dict[str, float] = {}
    for line_no, line in enumerate(_read(path).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{path} line {line_no}: expected key=value")
        key, _, raw = line.partition("=")
        key = key.strip()
        if key not in PairingConfig.__dataclass_fields__:
            raise CliError(f"{path} line {line_no}: unknown key {key!r}")
        field_type = PairingConfig.__dataclass_fields__[key].type
        values[key] = int(raw.strip()) if "int" in str(field_type) else float(raw.strip())
    try:
        return PairingConfig(**values)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def cmd_build_pairs(args) -> None:
    corpus = _load(args.dataset, args.schema)
    config = _read_config(args.config)
    result = build_pairs(corpus, config, seed=args.seed, jobs=args.jobs)
    save_dataset(result, args.output)
    _emit(
        args,
        {"pairs": len(result.pairs), "problems": len(result.problems), "output": args.output},
        plain=f"wrote {len(result.pairs)} pairs over {len(result.problems)} problems to {args.output}",
    )


def cmd_stats_breakpoints(args) -> None:
    corpus = _load(args.dataset, args.schema)
    table = bucket_proportions(corpus, args.difficulty)
    print(json.dumps(table.as_dict()))


def _parse_buckets(text: str | None):
    if text is None:
        return DEFAULT_BUCKETS
    buckets = []
    for part in text.split(","):
        try:
            label, span = part.split(":")
            lo, hi = span.split("-")
            buckets.append((label, int(lo), int(hi)))
        except ValueError as exc:
            raise CliError(f"bad bucket spec {part!r} (want Label:lo-hi)") from exc
    return tuple(buckets)


def cmd_report(args) -> None:
    corpus = _load(args.dataset, args.schema)
    scored = []
    for i, obj in enumerate(_read_records(args.scores)):
        try:
            scored.append(
                ScoredSample(
                    sample_id=str(obj["sample_id"]),
                    problem_id=str(obj["problem_id"]),
                    io_pass=bool(obj["io_pass"]),
                    npi=float(obj["npi"]),
                    ioccb=float(obj["ioccb"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(f"{args.scores}: bad score record #{i + 1}: {exc}") from exc
    rows = grouped_report(scored, corpus, buckets=_parse_buckets(args.buckets))
    Path(args.output).write_text(report_to_csv(rows), encoding="utf-8")
    _emit(
        args,
        {"rows": len(rows), "output": args.output},
        plain=f"wrote {len(rows)} rows to {args.output}",
    )


def _prediction_records(path: str) -> list[PredictionRecord]:
    records = []
    for i, obj in enumerate(_read_records(path)):
        try:
            records.append(
                PredictionRecord(
                    sample_id=str(obj["sample_id"]),
                    predicted=float(obj["predicted"]),
                    actual=float(obj["actual"]),
                    quantity=str(obj.get("quantity", "time_ms")),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(f"{path}: bad prediction record #{i + 1}: {exc}") from exc
    return records


def cmd_eval_rmse(args) -> None:
    records = _prediction_records(args.predictions)
    value = rmse(records)
    _emit(
        args,
        {"rmse": value, "n": len(records), "quantity": records[0].quantity if records else None},
        plain=f"{value:.4f}",
    )


def cmd_eval_spearman(args) -> None:
    records = _prediction_records(args.predictions)
    rho, p = spearman([r.predicted for r in records], [r.actual for r in records])
    _emit(args, {"rho": rho, "p": p, "n": len(records)}, plain=f"rho={rho:.6f} p={p:.3g}")


def cmd_serve(args) -> None:
    import uvicorn

    uvicorn.run("effikit.service:app", host=args.host, port=args.port)


# ---------------------------------------------------------------------------
# parser


def _add_json(parser) -> None:
    parser.add_argument("--json", action="store_true", help="emit one JSON document on stdout")


def _add_dataset_opts(parser) -> None:
    parser.add_argument("--schema", choices=corpus_mod.SCHEMAS, default=None,
                        help="dataset schema (default: sniff the manifest)")


def _add_run_opts(parser) -> None:
    parser.add_argument("--runs", type=int, default=30, help="timing runs per test (default 30)")
    parser.add_argument("--time-limit-ms", type=int, default=None)
    parser.add_argument("--memory-limit-kb", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--shim", default=DEFAULT_SHIM,
                        help="shim command (default: $EFFIKIT_SHIM or 'effishim')")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="effikit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="standardize identifiers of a source file")
    p.add_argument("file")
    _add_json(p)
    p.set_defaults(fn=cmd_normalize)

    score = sub.add_parser("score", help="similarity and efficiency scores")
    score_sub = score.add_subparsers(dest="score_command", required=True)

    p = score_sub.add_parser("codebleu")
    p.add_argument("candidate")
    p.add_argument("reference")
    p.add_argument("--weights", default=None, help="four comma-separated weights")
    p.add_argument("--keyword-weight", type=float, default=DEFAULT_KEYWORD_WEIGHT)
    _add_json(p)
    p.set_defaults(fn=cmd_score_codebleu)

    p = score_sub.add_parser("ioccb")
    p.add_argument("candidate")
    p.add_argument("truth")
    p.add_argument("--alt", action="append", default=[], help="alternate reference file (repeatable)")
    p.add_argument("--weights", default=None)
    _add_json(p)
    p.set_defaults(fn=cmd_score_ioccb)

    p = score_sub.add_parser("npi")
    p.add_argument("--time", type=float, required=True, help="execution time in ms")
    p.add_argument("--profile", required=True, help="tmin,tmed,tmax in ms")
    _add_json(p)
    p.set_defaults(fn=cmd_score_npi)

    p = sub.add_parser("run", help="run a program against a problem's hidden tests")
    p.add_argument("file")
    p.add_argument("--problem", required=True)
    p.add_argument("--dataset", required=True)
    _add_dataset_opts(p)
    _add_run_opts(p)
    _add_json(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("filter", help="pick the most efficient candidate")
    p.add_argument("candidates_dir")
    p.add_argument("--problem", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--estimator", required=True,
                   help="measured | external:FILE | external-npi:FILE")
    _add_dataset_opts(p)
    _add_run_opts(p)
    _add_json(p)
    p.set_defaults(fn=cmd_filter)

    p = sub.add_parser("build-pairs", help="construct the pair dataset")
    p.add_argument("dataset")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None, help="key=value pairing config file")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    _add_dataset_opts(p)
    _add_json(p)
    p.set_defaults(fn=cmd_build_pairs)

    stats = sub.add_parser("stats", help="dataset statistics")
    stats_sub = stats.add_subparsers(dest="stats_command", required=True)
    p = stats_sub.add_parser("breakpoints")
    p.add_argument("dataset")
    p.add_argument("--difficulty", type=int, required=True)
    _add_dataset_opts(p)
    _add_json(p)
    p.set_defaults(fn=cmd_stats_breakpoints)

    p = sub.add_parser("report", help="grouped score report as CSV")
    p.add_argument("scores")
    p.add_argument("dataset")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--buckets", default=None, help="Label:lo-hi[,Label:lo-hi...]")
    _add_dataset_opts(p)
    _add_json(p)
    p.set_defaults(fn=cmd_report)

    evalp = sub.add_parser("eval", help="evaluation statistics")
    eval_sub = evalp.add_subparsers(dest="eval_command", required=True)
    p = eval_sub.add_parser("rmse")
    p.add_argument("predictions")
    _add_json(p)
    p.set_defaults(fn=cmd_eval_rmse)
    p = eval_sub.add_parser("spearman")
    p.add_argument("predictions")
    _add_json(p)
    p.set_defaults(fn=cmd_eval_spearman)

    p = sub.add_parser("serve", help="start the HTTP scoring service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except (CliError, CompileError, LexError, DatasetFormatError, corpus_mod.SchemaError,
            InfrastructureError, EstimatorError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
