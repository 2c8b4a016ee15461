"""Statement AST -> operator tree conversion.

A statement's binder list folds into its body right-to-left: a binder whose
name is referenced later becomes a ∀ node ``[name, type, rest]``; a binder
whose name never recurs (hypotheses, anonymous instances) becomes a plain
arrow ``[type, rest]``, matching how elaborated goals display.  The same
normalization applies to ∀ nodes written inside the body, so the two
spellings of a hypothesis produce one tree.
"""
from __future__ import annotations

from .lexer import LexError, lenient_tokens
from .parser import ParseError, StatementAst, parse_statement
from .trees import SLOT, OperatorTree, leaf, node

# Nodes of shape [name, type-or-domain-or-value, body] that bind a name.
BINDING_LABELS = ("∀", "∃", "fun", "let", "∑")
_BINDING_SLOT = tuple(lbl + SLOT for lbl in BINDING_LABELS)


def occurs(name: str, tree: OperatorTree) -> bool:
    """Whether ``name`` is referenced in ``tree`` (including as a dotted
    prefix such as ``name.fst`` or as an applied head)."""
    dotted = name + "."
    base = tree.base_label
    if base == name or base.startswith(dotted):
        return True
    return any(occurs(name, c) for c in tree.children)


def _fold_binders(ast: StatementAst) -> OperatorTree:
    result = ast.body
    for binder in reversed(ast.binders):
        ty = binder.type if binder.type is not None else leaf("_")
        for name in reversed(binder.names):
            if name == "_" or not occurs(name, result):
                result = node("→", (ty, result))
            else:
                result = node("∀", (leaf(name), ty, result))
    return result


def _normalize(tree: OperatorTree) -> OperatorTree:
    kids = tuple(_normalize(c) for c in tree.children)
    if tree.label == "∀" + SLOT and len(kids) == 3 and not occurs(kids[0].label, kids[2]):
        return node("→", (kids[1], kids[2]))
    if kids == tree.children:
        return tree
    return OperatorTree(tree.label, kids)


def build_opt(ast: StatementAst) -> OperatorTree:
    """Operator tree of the statement's type, binders folded in.

    The theorem name is dropped; it carries no meaning for comparison.
    Total on well-formed ASTs.
    """
    return _normalize(_fold_binders(ast))


def statement_opt(source: str) -> OperatorTree:
    """Parse ``source`` and build its operator tree in one step."""
    return build_opt(parse_statement(source))


def token_fallback_tree(source: str) -> OperatorTree:
    """Best-effort token-level tree for statements that fail to parse.

    Used by the degraded scoring path so a batch never aborts on one
    malformed record.
    """
    tokens = lenient_tokens(source)
    if not tokens:
        return leaf("∅")
    return node("tokens", tuple(leaf(t.text) for t in tokens))


def try_statement_opt(source: str) -> tuple[OperatorTree, bool]:
    """(tree, degraded): the parsed tree, or the token fallback on failure."""
    try:
        return statement_opt(source), False
    except (LexError, ParseError):
        return token_fallback_tree(source), True
