"""Shared test helpers."""

from __future__ import annotations

import ast


def rename_consistently(source: str, old: str, new: str) -> str:
    """Apply a consistent identifier renaming via the syntax tree (all Name,
    parameter and def/class occurrences), independent of the implementation
    under test."""

    class Renamer(ast.NodeTransformer):
        def visit_Name(self, node):
            if node.id == old:
                node.id = new
            return self.generic_visit(node)

        def visit_arg(self, node):
            if node.arg == old:
                node.arg = new
            return self.generic_visit(node)

        def visit_FunctionDef(self, node):
            if node.name == old:
                node.name = new
            return self.generic_visit(node)

        visit_AsyncFunctionDef = visit_FunctionDef
        visit_ClassDef = visit_FunctionDef

        def visit_Global(self, node):
            node.names = [new if n == old else n for n in node.names]
            return node

        visit_Nonlocal = visit_Global

    tree = Renamer().visit(ast.parse(source))
    ast.fix_missing_locations(tree)
    return ast.unparse(tree) + "\n"
