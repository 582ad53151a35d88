"""Independent oracle implementations used to freeze expected values.

Everything here is written from the textbook definition, deliberately not
sharing code (or data structures) with the package implementation.
"""

from __future__ import annotations

import ast
import itertools
import math


# --- BLEU ------------------------------------------------------------------

def _gram_counts(tokens, n):
    counts = {}
    for i in range(0, len(tokens) - n + 1):
        key = "\x00".join(tokens[i : i + n])
        counts[key] = counts.get(key, 0) + 1
    return counts


def bleu_oracle(cand, ref, max_n=4, keyword_weight=1.0, keywords=frozenset()):
    """Geometric-mean BLEU with add-one smoothing on zero counts and brevity
    penalty, with optional keyword weighting of n-grams; 0-100 scale."""
    if not cand or not ref:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        c_counts = _gram_counts(cand, n)
        r_counts = _gram_counts(ref, n)
        num = den = 0.0
        for key, count in c_counts.items():
            has_kw = any(tok in keywords for tok in key.split("\x00"))
            w = keyword_weight if has_kw else 1.0
            den += w * count
            num += w * min(count, r_counts.get(key, 0))
        p = (num + 1.0) / (den + 1.0) if num == 0.0 else num / den
        log_sum += math.log(p)
    bp = 1.0 if len(cand) >= len(ref) else math.exp(1.0 - len(ref) / len(cand))
    return 100.0 * bp * math.exp(log_sum / max_n)


# --- AST subtrees -----------------------------------------------------------

_IDENTS = {"id", "name", "arg", "attr", "asname", "module", "names", "rest"}


def _tree(node):
    """Nested-tuple mirror of the AST with identifiers anonymized."""
    atoms = []
    kids = []
    for fieldname, value in ast.iter_fields(node):
        if fieldname in ("ctx", "type_comment", "type_ignores"):
            continue
        if fieldname in _IDENTS:
            atoms.append("<ident>")
        elif isinstance(value, ast.AST):
            kids.append(_tree(value))
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, ast.AST):
                    kids.append(_tree(item))
                else:
                    atoms.append(repr(item))
        else:
            atoms.append(repr(value))
    return (type(node).__name__, tuple(atoms), tuple(kids))


def _depth(tree):
    return 1 + max((_depth(k) for k in tree[2]), default=0)


def _all_subtrees(tree, out):
    if _depth(tree) >= 2:
        out.append(tree)
    for kid in tree[2]:
        _all_subtrees(kid, out)


def syntax_match_oracle(candidate: str, reference: str) -> float:
    """Clipped multiset fraction of candidate subtrees (depth >= 2) present in
    the reference, implemented by explicit list removal."""
    cand, ref = [], []
    _all_subtrees(_tree(ast.parse(candidate)), cand)
    _all_subtrees(_tree(ast.parse(reference)), ref)
    if not cand:
        return 100.0 if not ref else 0.0
    pool = list(ref)
    matched = 0
    for subtree in cand:
        if subtree in pool:
            pool.remove(subtree)
            matched += 1
    return matched / len(cand) * 100.0


# --- assignment -------------------------------------------------------------

def assignment_brute_force(scores) -> float:
    """Maximum total over all row-to-column injections."""
    rows, cols = len(scores), len(scores[0])
    best = -math.inf
    if rows <= cols:
        for perm in itertools.permutations(range(cols), rows):
            best = max(best, sum(scores[i][j] for i, j in enumerate(perm)))
    else:
        for perm in itertools.permutations(range(rows), cols):
            best = max(best, sum(scores[i][j] for j, i in enumerate(perm)))
    return best


# --- Spearman ----------------------------------------------------------------

def spearman_oracle(x, y) -> float:
    """Averaged-rank Pearson, computed directly."""

    def ranks(values):
        pos = {}
        for rank, idx in enumerate(sorted(range(len(values)), key=lambda i: values[i]), start=1):
            pos.setdefault(values[idx], []).append(rank)
        avg = {v: sum(rs) / len(rs) for v, rs in pos.items()}
        return [avg[v] for v in values]

    rx, ry = ranks(x), ranks(y)
    n = len(x)
    mx, my = sum(rx) / n, sum(ry) / n
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
    return num / den


# --- percentile trimming ------------------------------------------------------

def trimmed_stats_oracle(times, frac=0.005):
    """(min, median, max) after dropping floor(n*frac) per tail; independent
    median (sorting, middle pair average)."""
    values = sorted(times)
    k = math.floor(len(values) * frac)
    kept = values[k : len(values) - k] if k else values
    m = len(kept)
    median = kept[m // 2] if m % 2 else (kept[m // 2 - 1] + kept[m // 2]) / 2
    return kept[0], median, kept[-1]


# --- longest common contiguous substring --------------------------------------

def lccs_brute(a: str, b: str) -> int:
    best = 0
    for i in range(len(a)):
        for j in range(i + best + 1, len(a) + 1):
            if a[i:j] in b:
                best = j - i
            else:
                break
    return best
