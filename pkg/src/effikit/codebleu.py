"""Four-component code similarity score on a 0-100 scale.

combined = w1*ngram + w2*weighted_ngram + w3*syntax + w4*dataflow

- ngram: BLEU-style geometric mean of modified n-gram precisions (n=1..4)
  with add-one smoothing on zero counts and a brevity penalty.
- weighted_ngram: same, but n-grams containing a language keyword contribute
  ``keyword_weight`` times in both clipped counts and totals.
- syntax: clipped multiset match over all rooted AST subtrees of depth >= 2,
  identifier leaves anonymized.
- dataflow: clipped multiset match over definition edges (variable <- the
  variables its defining expression reads), variables anonymized by
  definition order.

The score is asymmetric in (candidate, reference), as BLEU is.  Unparseable
input degrades the syntax/dataflow components to 0 with a flag instead of
failing, since generated code is frequently uncompilable.
"""

from __future__ import annotations

import ast
import logging
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .pynorm import LexError, TokenStream, tokenize

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"
KEYWORDS_PATH = DATA_DIR / "python_keywords.txt"

DEFAULT_WEIGHTS = (0.25, 0.25, 0.25, 0.25)
DEFAULT_KEYWORD_WEIGHT = 5.0
MAX_NGRAM = 4

_keywords: frozenset[str] | None = None


def language_keywords() -> frozenset[str]:
    global _keywords
    if _keywords is None:
        _keywords = frozenset(
            line.strip() for line in KEYWORDS_PATH.read_text(encoding="utf-8").splitlines() if line.strip()
        )
    return _keywords


@dataclass(frozen=True)
class ScoreBreakdown:
    ngram: float
    weighted_ngram: float
    syntax: float
    dataflow: float
    combined: float
    weights: tuple[float, float, float, float]
    flags: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "ngram": self.ngram,
            "weighted_ngram": self.weighted_ngram,
            "syntax": self.syntax,
            "dataflow": self.dataflow,
            "combined": self.combined,
            "weights": list(self.weights),
            "flags": list(self.flags),
        }


def _check_weights(weights) -> tuple[float, float, float, float]:
    weights = tuple(float(w) for w in weights)
    if len(weights) != 4 or any(w < 0 for w in weights):
        raise ValueError(f"weights must be 4 non-negative reals, got {weights}")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {sum(weights)}")
    return weights


# ---------------------------------------------------------------------------
# n-gram components


def _ngrams(texts: tuple[str, ...], n: int) -> Counter:
    return Counter(tuple(texts[i : i + n]) for i in range(len(texts) - n + 1))


def _brevity_penalty(c_len: int, r_len: int) -> float:
    if c_len >= r_len:
        return 1.0
    return math.exp(1.0 - r_len / c_len)


def _precision(cand: Counter, ref: Counter, weight_of) -> float:
    num = 0.0
    den = 0.0
    for gram, count in cand.items():
        w = weight_of(gram)
        den += w * count
        num += w * min(count, ref.get(gram, 0))
    if num == 0.0:
        return (num + 1.0) / (den + 1.0)  # add-one smoothing on zero counts
    return num / den


def _bleu(candidate: TokenStream, reference: TokenStream, weight_of) -> float:
    if len(candidate) == 0 or len(reference) == 0:
        logger.warning("empty token stream in n-gram match; score defined as 0")
        return 0.0
    cand_texts = candidate.texts
    ref_texts = reference.texts
    log_sum = 0.0
    for n in range(1, MAX_NGRAM + 1):
        p = _precision(_ngrams(cand_texts, n), _ngrams(ref_texts, n), weight_of)
        log_sum += math.log(p) / MAX_NGRAM
    return _brevity_penalty(len(cand_texts), len(ref_texts)) * math.exp(log_sum) * 100.0


def ngram_match(candidate: TokenStream, reference: TokenStream) -> float:
    """Smoothed 4-gram BLEU between two token streams, scaled to 0-100."""
    return _bleu(candidate, reference, lambda gram: 1.0)


def weighted_ngram_match(
    candidate: TokenStream,
    reference: TokenStream,
    keyword_weight: float = DEFAULT_KEYWORD_WEIGHT,
) -> float:
    """As ngram_match, with keyword-bearing n-grams weighted keyword_weight x."""
    if keyword_weight <= 0:
        raise ValueError("keyword_weight must be positive")
    kw = language_keywords()

    def weight_of(gram: tuple[str, ...]) -> float:
        return keyword_weight if any(tok in kw for tok in gram) else 1.0

    return _bleu(candidate, reference, weight_of)


# ---------------------------------------------------------------------------
# syntax component

# identifier-bearing AST fields, masked so naming does not affect structure
_IDENT_FIELDS = frozenset({"id", "name", "arg", "attr", "asname", "module", "names", "rest"})
_SKIP_FIELDS = frozenset({"ctx", "type_comment", "type_ignores"})


def _subtree_multiset(tree: ast.AST) -> Counter:
    """Serializations of all rooted subtrees of depth >= 2."""
    out: Counter = Counter()

    def walk(node: ast.AST) -> tuple[str, int]:
        parts = []
        children = []
        for name, value in ast.iter_fields(node):
            if name in _SKIP_FIELDS:
                continue
            if name in _IDENT_FIELDS:
                parts.append("_")
                continue
            if isinstance(value, ast.AST):
                children.append(value)
            elif isinstance(value, list):
                children.extend(v for v in value if isinstance(v, ast.AST))
                parts.extend(repr(v) for v in value if not isinstance(v, ast.AST))
            else:
                parts.append(repr(value))
        rendered = []
        depth = 1
        for child in children:
            text, child_depth = walk(child)
            rendered.append(text)
            depth = max(depth, child_depth + 1)
        label = type(node).__name__ + ("[" + ",".join(parts) + "]" if parts else "")
        text = label + "(" + ",".join(rendered) + ")"
        if depth >= 2:
            out[text] += 1
        return text, depth

    walk(tree)
    return out


def syntax_match(candidate: str, reference: str) -> float:
    """Fraction of candidate subtrees found in the reference, 0-100.

    Either side failing to parse yields 0 (callers flag it).
    """
    try:
        cand_tree = ast.parse(candidate)
        ref_tree = ast.parse(reference)
    except SyntaxError:
        return 0.0
    cand = _subtree_multiset(cand_tree)
    ref = _subtree_multiset(ref_tree)
    total = sum(cand.values())
    if total == 0:
        return 100.0 if sum(ref.values()) == 0 else 0.0
    matched = sum(min(count, ref.get(text, 0)) for text, count in cand.items())
    return matched / total * 100.0


# ---------------------------------------------------------------------------
# dataflow component


def _read_names(expr: ast.AST) -> list[str]:
    """Variables read by an expression, deduplicated, in source order."""
    seen: list[str] = []
    for node in ast.walk(expr):
        if isinstance(node, ast.Name) and isinstance(node.ctx, ast.Load) and node.id not in seen:
            seen.append(node.id)
    return seen


def _target_names(target: ast.AST) -> list[str]:
    out = []
    for node in ast.walk(target):
        if isinstance(node, ast.Name) and isinstance(node.ctx, ast.Store):
            out.append(node.id)
    return out


def _dataflow_edges(tree: ast.AST) -> Counter:
    """Multiset of (source, defined) edges with variables anonymized.

    Variables with a definition are labelled d1, d2, ... by first-definition
    order; variables only ever read are labelled u1, u2, ... by first-read
    order; a definition whose expression reads no variables is recorded as
    coming from the empty source "".
    """
    events: list[tuple[list[str], list[str]]] = []  # (sources, targets) in order
    defined_order: list[str] = []
    read_order: list[str] = []

    def note_defined(names: list[str]) -> None:
        for n in names:
            if n not in defined_order:
                defined_order.append(n)

    def note_read(names: list[str]) -> None:
        for n in names:
            if n not in read_order:
                read_order.append(n)

    def add(sources: list[str], targets: list[str]) -> None:
        note_read(sources)
        note_defined(targets)
        events.append((sources, targets))

    for node in ast.walk(tree):
        if isinstance(node, ast.Assign):
            add(_read_names(node.value), [n for t in node.targets for n in _target_names(t)])
        elif isinstance(node, ast.AugAssign):
            targets = _target_names(node.target) or (
                [node.target.id] if isinstance(node.target, ast.Name) else []
            )
            sources = _read_names(node.value)
            if isinstance(node.target, ast.Name) and node.target.id not in sources:
                sources = sources + [node.target.id]
            add(sources, targets)
        elif isinstance(node, ast.AnnAssign) and node.value is not None:
            add(_read_names(node.value), _target_names(node.target))
        elif isinstance(node, (ast.For, ast.AsyncFor)):
            add(_read_names(node.iter), _target_names(node.target))
        elif isinstance(node, ast.withitem) and node.optional_vars is not None:
            add(_read_names(node.context_expr), _target_names(node.optional_vars))
        elif isinstance(node, ast.NamedExpr):
            add(_read_names(node.value), _target_names(node.target))
        elif isinstance(node, ast.comprehension):
            add(_read_names(node.iter), _target_names(node.target))
        elif isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            add([], [node.name])
        elif isinstance(node, (ast.Import, ast.ImportFrom)):
            add([], [alias.asname or alias.name.split(".")[0] for alias in node.names])

    labels: dict[str, str] = {}
    for i, name in enumerate(defined_order, start=1):
        labels[name] = f"d{i}"
    counter = 0
    for name in read_order:
        if name not in labels:
            counter += 1
            labels[name] = f"u{counter}"

    edges: Counter = Counter()
    for sources, targets in events:
        for target in targets:
            if sources:
                for src in sources:
                    edges[(labels[src], labels[target])] += 1
            else:
                edges[("", labels[target])] += 1
    return edges


def dataflow_match(candidate: str, reference: str) -> float:
    """Clipped fraction of candidate dataflow edges found in the reference."""
    try:
        cand_tree = ast.parse(candidate)
        ref_tree = ast.parse(reference)
    except SyntaxError:
        return 0.0
    cand = _dataflow_edges(cand_tree)
    ref = _dataflow_edges(ref_tree)
    total = sum(cand.values())
    if total == 0:
        return 100.0 if sum(ref.values()) == 0 else 0.0
    matched = sum(min(count, ref.get(edge, 0)) for edge, count in cand.items())
    return matched / total * 100.0


# ---------------------------------------------------------------------------
# combined score


def codebleu(
    candidate: str,
    reference: str,
    weights=DEFAULT_WEIGHTS,
    keyword_weight: float = DEFAULT_KEYWORD_WEIGHT,
) -> ScoreBreakdown:
    """Weighted combination of the four components; never raises on bad input."""
    weights = _check_weights(weights)
    flags: list[str] = []

    ngram = weighted = 0.0
    try:
        cand_stream = tokenize(candidate)
        ref_stream = tokenize(reference)
        if len(cand_stream) == 0 or len(ref_stream) == 0:
            flags.append("empty_token_stream")
        else:
            ngram = ngram_match(cand_stream, ref_stream)
            weighted = weighted_ngram_match(cand_stream, ref_stream, keyword_weight)
    except LexError:
        flags.append("lex_error")

    parse_ok = True
    for side, text in (("candidate", candidate), ("reference", reference)):
        try:
            ast.parse(text)
        except SyntaxError:
            flags.append(f"{side}_unparseable")
            parse_ok = False
    if parse_ok:
        syntax = syntax_match(candidate, reference)
        dataflow = dataflow_match(candidate, reference)
    else:
        syntax = dataflow = 0.0

    combined = (
        weights[0] * ngram + weights[1] * weighted + weights[2] * syntax + weights[3] * dataflow
    )
    return ScoreBreakdown(
        ngram=ngram,
        weighted_ngram=weighted,
        syntax=syntax,
        dataflow=dataflow,
        combined=combined,
        weights=weights,
        flags=tuple(flags),
    )


def symmetric_codebleu(a: str, b: str, weights=DEFAULT_WEIGHTS) -> float:
    """Mean of both argument orders; the clustering/matching similarity."""
    return 0.5 * (codebleu(a, b, weights).combined + codebleu(b, a, weights).combined)
