"""Operator table: the single configuration unit for precedence and associativity.

Binding powers are Lean-flavored: arrows sit at the bottom, logical
connectives above them, comparisons above those, then arithmetic, with
exponentiation and application tightest.  Any consistent table would do;
this ordering keeps ordinary Mathlib-style statements parseable as written.
"""
from __future__ import annotations

RIGHT = "right"
LEFT = "left"
NONE = "none"

# infix operator -> (binding power, associativity)
INFIX: dict[str, tuple[int, str]] = {
    "↔": (20, RIGHT),
    "→": (25, RIGHT),
    "∨": (30, RIGHT),
    "∧": (35, RIGHT),
    "×": (35, RIGHT),
    "=": (50, NONE),
    "≠": (50, NONE),
    "<": (50, NONE),
    ">": (50, NONE),
    "≤": (50, NONE),
    "≥": (50, NONE),
    "∈": (50, NONE),
    "+": (65, LEFT),
    "-": (65, LEFT),
    "*": (70, LEFT),
    "/": (70, LEFT),
    "%": (70, LEFT),
    "^": (75, RIGHT),
}

# prefix operator -> binding power of its operand
PREFIX: dict[str, int] = {
    "¬": 40,
    "-": 75,
}

# The coercion arrow binds a single tight atom (so ↑r * x reads (↑r) * x).
COERCION = "↑"

APPLICATION_PREC = 1024
COMPARISON_PREC = 50

# ASCII spellings normalized to the unicode operator they denote.
ASCII_ALIASES: dict[str, str] = {
    "->": "→",
    "<->": "↔",
    "<=": "≤",
    ">=": "≥",
    "!=": "≠",
}

# Unicode symbols that open a binder scope; word binders are keywords.
SYMBOL_BINDERS = {"∀", "∃", "λ", "∑"}

OPERATOR_CHARS = set("=≠≤≥<>+-*/^%∧∨→↔∈×¬↑∀∃λ∑")

KEYWORDS = {"theorem", "lemma", "by", "sorry", "in"}
BINDER_KEYWORDS = {"let", "fun"}

BRACKETS = set("(){}[]")
PUNCTUATION = {":", ",", ";", ":=", "=>"}

# Subscript digits are legal identifier continuation characters (h₀, h₁, ...).
_SUBSCRIPTS = "₀₁₂₃₄₅₆₇₈₉"


def is_ident_start(ch: str) -> bool:
    return ch == "_" or (ch.isalpha() and ch not in OPERATOR_CHARS)


def is_ident_continue(ch: str) -> bool:
    return (
        ch == "_"
        or ch == "'"
        or ch in _SUBSCRIPTS
        or (ch.isalnum() and ch not in OPERATOR_CHARS)
    )
