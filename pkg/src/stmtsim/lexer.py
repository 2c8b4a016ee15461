"""Tokenizer for Lean-style theorem statements."""
from __future__ import annotations

from dataclasses import dataclass

from . import grammar


class LexError(Exception):
    """Unrecognized character in the source."""

    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(f"{message} at bytes {span[0]}..{span[1]}")
        self.message = message
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str  # identifier | numeral | operator | binder-keyword | bracket | punctuation | keyword
    text: str
    span: tuple[int, int]  # byte offsets into the UTF-8 source


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens.

    Every non-whitespace character belongs to exactly one token; spans are
    non-overlapping byte ranges, so the source can be reassembled from
    tokens plus the original whitespace.  Raises :class:`LexError` on a
    character outside the declared operator table.
    """
    return _scan(source, strict=True)


def lenient_tokens(source: str) -> list[Token]:
    """Like :func:`tokenize` but unknown characters become one-char operator
    tokens instead of raising.  Used by the degraded scoring path."""
    return _scan(source, strict=False)


def _scan(source: str, strict: bool) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    byte = 0
    n = len(source)

    def blen(s: str) -> int:
        return len(s.encode("utf-8"))

    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            byte += blen(ch)
            continue
        start = byte

        # Multi-char punctuation / ASCII operator aliases, longest first.
        two = source[i : i + 3]
        matched = None
        for cand in ("<->",):
            if two.startswith(cand):
                matched = cand
                break
        if matched is None:
            for cand in (":=", "=>", "->", "<=", ">=", "!="):
                if source.startswith(cand, i):
                    matched = cand
                    break
        if matched is not None:
            kind = "punctuation" if matched in (":=", "=>") else "operator"
            tokens.append(Token(kind, matched, (start, start + blen(matched))))
            i += len(matched)
            byte += blen(matched)
            continue

        if ch.isdigit():
            j = i + 1
            while j < n and source[j].isdigit():
                j += 1
            # Decimal numeral: a dot counts only when digits follow.
            if j + 1 < n and source[j] == "." and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            tokens.append(Token("numeral", text, (start, start + blen(text))))
            i = j
            byte += blen(text)
            continue

        if ch == "." and i + 1 < n and source[i + 1].isdigit():
            # Postfix projection such as .1 / .2
            j = i + 1
            while j < n and source[j].isdigit():
                j += 1
            text = source[i:j]
            tokens.append(Token("operator", text, (start, start + blen(text))))
            i = j
            byte += blen(text)
            continue

        if grammar.is_ident_start(ch):
            j = i + 1
            while j < n:
                c = source[j]
                if grammar.is_ident_continue(c):
                    j += 1
                elif (
                    c == "."
                    and j + 1 < n
                    and grammar.is_ident_start(source[j + 1])
                ):
                    # Dotted name (Finset.range) stays one identifier.
                    j += 2
                else:
                    break
            text = source[i:j]
            if text in grammar.KEYWORDS:
                kind = "keyword"
            elif text in grammar.BINDER_KEYWORDS:
                kind = "binder-keyword"
            else:
                kind = "identifier"
            tokens.append(Token(kind, text, (start, start + blen(text))))
            i = j
            byte += blen(text)
            continue

        if ch in grammar.OPERATOR_CHARS:
            tokens.append(Token("operator", ch, (start, start + blen(ch))))
        elif ch in grammar.BRACKETS:
            tokens.append(Token("bracket", ch, (start, start + blen(ch))))
        elif ch in (":", ",", ";"):
            tokens.append(Token("punctuation", ch, (start, start + blen(ch))))
        elif strict:
            raise LexError(f"unrecognized character {ch!r}", (start, start + blen(ch)))
        else:
            tokens.append(Token("operator", ch, (start, start + blen(ch))))
        i += 1
        byte += blen(ch)

    return tokens
