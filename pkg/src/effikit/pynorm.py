"""Normalization of subject Python source code.

Four passes over dataset programs:

- ``strip_noise``: purely lexical; removes comments and denylisted statements
  (recursion-limit setters and the like), works on code that does not compile.
- ``ast_roundtrip``: parse and re-emit, yielding a canonical layout (4-space
  indent, one statement per line).
- ``standardize_identifiers``: renames every locally bound variable to varN
  and every locally defined function/class to funcN, in first-occurrence
  order.  Builtins, imported names, attribute names, call keywords, and
  names bound in class bodies (methods and class attributes, which are
  accessed as attributes) are left untouched; renaming is a flat injective
  name-to-name substitution, so scoping relationships are preserved exactly.
- ``tokenize``: the lexical token stream whose length defines token counts.

Caveat: programs that reflect on their own identifier strings (``eval``,
``locals()['x']``) are outside the contract of ``standardize_identifiers``.
"""

from __future__ import annotations

import ast
import io
import keyword
import re
import tokenize as _tokenize
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_DENYLIST_PATH = DATA_DIR / "noise_denylist.txt"


class CompileError(Exception):
    """Source does not parse; carries the parser diagnostic."""

    def __init__(self, message: str, lineno: int | None = None, offset: int | None = None):
        where = f" (line {lineno}, col {offset})" if lineno is not None else ""
        super().__init__(message + where)
        self.lineno = lineno
        self.offset = offset


class LexError(Exception):
    """Source does not lex; carries the offending position."""

    def __init__(self, message: str, lineno: int, offset: int):
        super().__init__(f"{message} (line {lineno}, col {offset})")
        self.lineno = lineno
        self.offset = offset


class Token(NamedTuple):
    kind: str  # keyword | identifier | literal | operator | delimiter
    text: str


@dataclass(frozen=True)
class TokenStream:
    """Lexical tokens in source order; layout (newlines, indentation) and
    comments are excluded, so stream length is the program's token count.
    Joining token texts with spaces re-parses only for single-statement
    sources; the stream is a counting/matching artifact, not a renderer."""

    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)


@dataclass(frozen=True)
class NormalizedCode:
    source: str
    rename_map: dict[str, str] = field(default_factory=dict)
    compile_ok: bool = True


_KEYWORDS = frozenset(keyword.kwlist)
_DELIMITERS = frozenset({"(", ")", "[", "]", "{", "}", ",", ":", ";", "."})


def tokenize(source: str) -> TokenStream:
    """Lexical tokens in source order, comments and layout tokens excluded."""
    out: list[Token] = []
    try:
        for tok in _tokenize.generate_tokens(io.StringIO(source).readline):
            if tok.type == _tokenize.NAME:
                kind = "keyword" if tok.string in _KEYWORDS else "identifier"
            elif tok.type in (_tokenize.NUMBER, _tokenize.STRING):
                kind = "literal"
            elif tok.type == _tokenize.OP:
                kind = "delimiter" if tok.string in _DELIMITERS else "operator"
            elif tok.type == _tokenize.ERRORTOKEN:
                if tok.string.strip() == "":
                    continue  # stray whitespace errortoken (e.g. inside broken code)
                raise LexError(f"cannot lex {tok.string!r}", tok.start[0], tok.start[1])
            else:
                continue  # NEWLINE/NL/INDENT/DEDENT/COMMENT/ENCODING/ENDMARKER
            out.append(Token(kind, tok.string))
    except LexError:
        raise
    except (_tokenize.TokenError, IndentationError, SyntaxError) as exc:
        position = getattr(exc, "args", [None, (1, 0)])
        lineno, offset = position[1] if len(position) > 1 and isinstance(position[1], tuple) else (1, 0)
        raise LexError(str(exc), lineno, offset) from exc
    return TokenStream(tuple(out))


def token_count(source: str) -> int:
    return len(tokenize(source))


# ---------------------------------------------------------------------------
# strip_noise: purely lexical, must survive uncompilable input


def _scan_comments(source: str) -> str:
    """Remove comments; lines left empty by removal are dropped entirely."""
    out_lines: list[str] = []
    quote = ""  # active string delimiter carried across lines, or ""
    for line in source.split("\n"):
        i = 0
        comment_at: int | None = None
        escaped_eol = False
        n = len(line)
        while i < n:
            ch = line[i]
            if quote:
                if ch == "\\":
                    if i + 1 >= n:
                        escaped_eol = True  # string continues on the next line
                    i += 2
                    continue
                if line.startswith(quote, i):
                    i += len(quote)
                    quote = ""
                    continue
                i += 1
                continue
            if ch in "\"'":
                if line.startswith(ch * 3, i):
                    quote = ch * 3
                    i += 3
                else:
                    quote = ch
                    i += 1
                continue
            if ch == "#":
                comment_at = i
                break
            i += 1
        if quote and len(quote) == 1 and not escaped_eol:
            quote = ""  # unterminated single-line string: state does not leak
        if comment_at is not None:
            kept = line[:comment_at].rstrip()
            if kept:
                out_lines.append(kept)
            # else: whole line was a comment, drop it
        else:
            out_lines.append(line)
    return "\n".join(out_lines)


def _logical_lines(lines: list[str]) -> list[list[int]]:
    """Group physical line indices into logical statements (comment-free input)."""
    groups: list[list[int]] = []
    current: list[int] = []
    quote = ""
    depth = 0
    continuation = False
    for idx, line in enumerate(lines):
        starts_new = not current or (not quote and depth == 0 and not continuation)
        if starts_new and current:
            groups.append(current)
            current = []
        current.append(idx)
        i, n = 0, len(line)
        escaped_eol = False
        while i < n:
            ch = line[i]
            if quote:
                if ch == "\\":
                    if i + 1 >= n:
                        escaped_eol = True
                    i += 2
                    continue
                if line.startswith(quote, i):
                    i += len(quote)
                    quote = ""
                    continue
                i += 1
                continue
            if ch in "\"'":
                if line.startswith(ch * 3, i):
                    quote = ch * 3
                    i += 3
                else:
                    quote = ch
                    i += 1
                continue
            if ch in "([{":
                depth += 1
            elif ch in ")]}":
                depth = max(0, depth - 1)
            i += 1
        if quote and len(quote) == 1 and not escaped_eol:
            quote = ""
        continuation = line.endswith("\\")
    if current:
        groups.append(current)
    return groups


def load_denylist(path: str | Path = DEFAULT_DENYLIST_PATH) -> list[re.Pattern]:
    """One statement-pattern (regex) per line; blank lines and # lines skipped."""
    patterns = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        raw = raw.strip()
        if raw and not raw.startswith("#"):
            patterns.append(re.compile(raw))
    return patterns


_default_denylist: list[re.Pattern] | None = None


def _denylist_default() -> list[re.Pattern]:
    global _default_denylist
    if _default_denylist is None:
        _default_denylist = load_denylist()
    return _default_denylist


def strip_noise(source: str, denylist: Iterable[re.Pattern | str] | None = None) -> str:
    """Strip comments and denylisted statements, leaving everything else as-is.

    Top-level denylisted statements are removed; nested ones are replaced with
    ``pass`` so the enclosing suite stays parseable.
    """
    if denylist is None:
        patterns = _denylist_default()
    else:
        patterns = [p if isinstance(p, re.Pattern) else re.compile(p) for p in denylist]
    cleaned = _scan_comments(source)
    if not patterns:
        return cleaned
    lines = cleaned.split("\n")
    drop: set[int] = set()
    replace: dict[int, str] = {}
    for group in _logical_lines(lines):
        text = "\n".join(lines[i] for i in group).strip()
        if not text:
            continue
        if any(p.search(text) for p in patterns):
            first = lines[group[0]]
            indent = first[: len(first) - len(first.lstrip())]
            if indent:
                replace[group[0]] = indent + "pass"
                drop.update(group[1:])
            else:
                drop.update(group)
    out = []
    for idx, line in enumerate(lines):
        if idx in drop:
            continue
        out.append(replace.get(idx, line))
    return "\n".join(out)


# ---------------------------------------------------------------------------
# AST round-trip


def _parse(source: str) -> ast.Module:
    try:
        return ast.parse(source)
    except SyntaxError as exc:
        raise CompileError(exc.msg or "syntax error", exc.lineno, exc.offset) from exc


def ast_roundtrip(source: str) -> str:
    """Parse and re-emit; output is canonical and parses to an equal tree."""
    return ast.unparse(_parse(source)) + "\n"


# ---------------------------------------------------------------------------
# identifier standardization


class _Collector(ast.NodeVisitor):
    """Find bound names, their classification, and first-occurrence order."""

    def __init__(self):
        self.bound: set[str] = set()
        self.imported: set[str] = set()
        self.funcish: set[str] = set()
        self.first_pos: dict[str, tuple[int, int]] = {}
        self.seen: set[str] = set()

    def _observe(self, name: str, node: ast.AST) -> None:
        self.seen.add(name)
        pos = (getattr(node, "lineno", 1), getattr(node, "col_offset", 0))
        if name not in self.first_pos or pos < self.first_pos[name]:
            self.first_pos[name] = pos

    def visit_Name(self, node: ast.Name):
        self._observe(node.id, node)
        if isinstance(node.ctx, ast.Store):
            self.bound.add(node.id)
        self.generic_visit(node)

    def visit_arg(self, node: ast.arg):
        self._observe(node.arg, node)
        self.bound.add(node.arg)
        self.generic_visit(node)

    def _visit_def(self, node):
        self._observe(node.name, node)
        self.bound.add(node.name)
        self.funcish.add(node.name)
        self.generic_visit(node)

    visit_FunctionDef = _visit_def
    visit_AsyncFunctionDef = _visit_def
    visit_ClassDef = _visit_def

    def visit_ExceptHandler(self, node: ast.ExceptHandler):
        if node.name:
            self._observe(node.name, node)
            self.bound.add(node.name)
        self.generic_visit(node)

    def _visit_global(self, node):
        for name in node.names:
            self._observe(name, node)
        self.generic_visit(node)

    visit_Global = _visit_global
    visit_Nonlocal = _visit_global

    def _visit_import(self, node):
        for alias in node.names:
            local = alias.asname or alias.name.split(".")[0]
            self.imported.add(local)
            self.seen.add(local)
        self.generic_visit(node)

    visit_Import = _visit_import
    visit_ImportFrom = _visit_import

    def visit_MatchAs(self, node):
        if node.name:
            self._observe(node.name, node)
            self.bound.add(node.name)
        self.generic_visit(node)

    def visit_MatchStar(self, node):
        if node.name:
            self._observe(node.name, node)
            self.bound.add(node.name)
        self.generic_visit(node)

    def visit_MatchMapping(self, node):
        if node.rest:
            self._observe(node.rest, node)
            self.bound.add(node.rest)
        self.generic_visit(node)


_SCOPE_NODES = (ast.FunctionDef, ast.AsyncFunctionDef, ast.Lambda)


def _class_scope_names(tree: ast.AST) -> set[str]:
    """Names bound directly in any class body.

    These become attributes of the class and are accessed as attribute names
    (``obj.method``), so renaming their definitions would change behavior.
    Descent stops at function/lambda boundaries: bindings inside methods are
    ordinary locals and stay renameable.
    """
    out: set[str] = set()

    def collect(stmt: ast.AST) -> None:
        stack = [stmt]
        while stack:
            node = stack.pop()
            if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                out.add(node.name)
                continue  # new scope (nested class bodies are visited separately)
            if isinstance(node, ast.Lambda):
                continue
            if isinstance(node, ast.Name) and isinstance(node.ctx, (ast.Store, ast.Del)):
                out.add(node.id)
            elif isinstance(node, ast.ExceptHandler) and node.name:
                out.add(node.name)
            elif isinstance(node, (ast.MatchAs, ast.MatchStar)) and node.name:
                out.add(node.name)
            elif isinstance(node, ast.MatchMapping) and node.rest:
                out.add(node.rest)
            elif isinstance(node, (ast.Import, ast.ImportFrom)):
                out.update(alias.asname or alias.name.split(".")[0] for alias in node.names)
            stack.extend(ast.iter_child_nodes(node))

    for node in ast.walk(tree):
        if isinstance(node, ast.ClassDef):
            for stmt in node.body:
                collect(stmt)
    return out


class _Renamer(ast.NodeTransformer):
    def __init__(self, mapping: dict[str, str]):
        self.mapping = mapping

    def _new(self, name: str) -> str:
        return self.mapping.get(name, name)

    def visit_Name(self, node: ast.Name):
        node.id = self._new(node.id)
        return self.generic_visit(node)

    def visit_arg(self, node: ast.arg):
        node.arg = self._new(node.arg)
        return self.generic_visit(node)

    def _visit_def(self, node):
        node.name = self._new(node.name)
        return self.generic_visit(node)

    visit_FunctionDef = _visit_def
    visit_AsyncFunctionDef = _visit_def
    visit_ClassDef = _visit_def

    def visit_ExceptHandler(self, node):
        if node.name:
            node.name = self._new(node.name)
        return self.generic_visit(node)

    def _visit_global(self, node):
        node.names = [self._new(n) for n in node.names]
        return node

    visit_Global = _visit_global
    visit_Nonlocal = _visit_global

    def visit_MatchAs(self, node):
        if node.name:
            node.name = self._new(node.name)
        return self.generic_visit(node)

    def visit_MatchStar(self, node):
        if node.name:
            node.name = self._new(node.name)
        return self.generic_visit(node)

    def visit_MatchMapping(self, node):
        if node.rest:
            node.rest = self._new(node.rest)
        return self.generic_visit(node)


def standardize_identifiers(source: str) -> NormalizedCode:
    """Rename bound variables to varN and defined functions/classes to funcN.

    Numbers count from 1 in first-occurrence order.  Names that are never
    bound in the unit (builtins, module globals), imported names, and names
    bound in class bodies (methods, class attributes: used as attribute
    names at their call sites) keep their spelling; canonical names that
    would collide with a retained name are skipped so the substitution stays
    capture-free.
    """
    tree = _parse(source)
    collector = _Collector()
    collector.visit(tree)

    renameable = collector.bound - collector.imported - _class_scope_names(tree)
    retained = (collector.seen - renameable) | collector.imported
    ordered = sorted(renameable, key=lambda n: (collector.first_pos.get(n, (1, 0)), n))

    mapping: dict[str, str] = {}
    counters = {"var": 0, "func": 0}

    def next_canonical(prefix: str) -> str:
        while True:
            counters[prefix] += 1
            candidate = f"{prefix}{counters[prefix]}"
            if candidate not in retained:
                return candidate

    for name in ordered:
        prefix = "func" if name in collector.funcish else "var"
        mapping[name] = next_canonical(prefix)

    new_tree = _Renamer(mapping).visit(tree)
    ast.fix_missing_locations(new_tree)
    return NormalizedCode(source=ast.unparse(new_tree) + "\n", rename_map=mapping, compile_ok=True)
