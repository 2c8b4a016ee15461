"""Labeled, ordered trees for parsed formal statements.

Internal (operator) nodes carry the literal ``<SLOT>`` suffix on their
label; leaves never do.  This keeps an operator from ever matching an
operand with the same spelling when trees are compared label-by-label.
"""
from __future__ import annotations

import json
from typing import Iterator

SLOT = "<SLOT>"


class OperatorTree:
    """Immutable labeled, ordered tree.

    Instances compare and hash structurally.  ``size`` counts all nodes.
    Construction enforces the placeholder law: a node has children iff
    its label ends with ``<SLOT>``.
    """

    __slots__ = ("label", "children", "size", "_render")

    def __init__(self, label: str, children: tuple["OperatorTree", ...] = ()):
        children = tuple(children)
        if not label:
            raise ValueError("node label must be nonempty")
        if children and not label.endswith(SLOT):
            raise ValueError(f"internal node label {label!r} lacks the {SLOT} suffix")
        if not children and label.endswith(SLOT):
            raise ValueError(f"leaf label {label!r} must not carry the {SLOT} suffix")
        self.label = label
        self.children = children
        self.size = 1 + sum(c.size for c in children)
        self._render: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def base_label(self) -> str:
        """Label with the placeholder suffix stripped."""
        return self.label[: -len(SLOT)] if self.label.endswith(SLOT) else self.label

    def render(self) -> str:
        """Canonical, injective one-line s-expression rendering."""
        if self._render is None:
            if self.children:
                inner = " ".join(c.render() for c in self.children)
                self._render = f"({_escape(self.base_label)} {inner})"
            else:
                self._render = _escape(self.label)
        return self._render

    def at(self, path: tuple[int, ...]) -> "OperatorTree":
        node = self
        for i in path:
            node = node.children[i]
        return node

    def replace_at(self, path: tuple[int, ...], subtree: "OperatorTree") -> "OperatorTree":
        if not path:
            return subtree
        i = path[0]
        kids = list(self.children)
        kids[i] = kids[i].replace_at(path[1:], subtree)
        return OperatorTree(self.label, tuple(kids))

    def paths(self) -> Iterator[tuple[int, ...]]:
        """All node paths in preorder; the root is the empty path."""
        stack = [((), self)]
        while stack:
            path, node = stack.pop()
            yield path
            for i in range(len(node.children) - 1, -1, -1):
                stack.append((path + (i,), node.children[i]))

    def to_obj(self) -> dict:
        return {"label": self.label, "children": [c.to_obj() for c in self.children]}

    def to_json(self) -> str:
        """Canonical JSON form; byte-exact for identical trees."""
        return json.dumps(self.to_obj(), ensure_ascii=False, separators=(",", ":"))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, OperatorTree):
            return NotImplemented
        return self.size == other.size and self.render() == other.render()

    def __hash__(self) -> int:
        return hash(self.render())

    def __repr__(self) -> str:
        return f"OperatorTree({self.render()})"


def leaf(label: str) -> OperatorTree:
    return OperatorTree(label)


def node(base_label: str, children) -> OperatorTree:
    """Internal node; appends the placeholder suffix to ``base_label``."""
    return OperatorTree(base_label + SLOT, tuple(children))


def tree_size(t: OperatorTree) -> int:
    """Number of nodes in ``t``."""
    return t.size


def from_obj(obj) -> OperatorTree:
    if not isinstance(obj, dict) or "label" not in obj:
        raise ValueError("expected an object with a 'label' field")
    label = obj["label"]
    if not isinstance(label, str):
        raise ValueError("'label' must be a string")
    children = obj.get("children", [])
    if not isinstance(children, list):
        raise ValueError("'children' must be a list")
    return OperatorTree(label, tuple(from_obj(c) for c in children))


def from_json(text: str) -> OperatorTree:
    return from_obj(json.loads(text))


def _escape(label: str) -> str:
    if any(ch in label for ch in ' ()"\\') or not label:
        return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return label
