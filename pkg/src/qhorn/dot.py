"""Graphviz rendering of derivations and refutation trees."""
from __future__ import annotations

from typing import Sequence

from .formula import render_clause
from .sldq import Derivation, RefutationTree


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(d: Derivation | Sequence[Derivation] | RefutationTree, name: str = "refutation") -> str:
    """One node per goal list, edges labelled with the side clause index or ∀-Red.

    Several derivations from the same top goal are merged into one tree.
    Node ids follow a pre-order walk, so output is deterministic.
    """
    if isinstance(d, Derivation):
        tree = RefutationTree.from_derivations([d])
    elif isinstance(d, RefutationTree):
        tree = d
    else:
        tree = RefutationTree.from_derivations(list(d))

    lines = [f"digraph {name} {{"]
    ids: dict[int, str] = {}
    edges: list[str] = []
    stack = [tree.root]
    while stack:
        node = stack.pop()
        nid = f"n{len(ids)}"
        ids[id(node)] = nid
        lines.append(f"  {nid} [label={_quote(render_clause(node.goal))}];")
        stack.extend(child for _, child in reversed(node.children))
    stack = [tree.root]
    while stack:
        node = stack.pop()
        for label, child in node.children:
            edges.append(f"  {ids[id(node)]} -> {ids[id(child)]} [label={_quote(label)}];")
        stack.extend(child for _, child in reversed(node.children))
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"
