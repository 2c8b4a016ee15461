"""Recursive-descent / precedence-climbing parser for theorem statements.

The grammar covers the statement fragment this library scores: ``theorem``
declarations with ``( )`` / ``{ }`` / ``[ ]`` binder groups, the binders
∀/∃/fun(λ)/let and the big-operator ∑, anonymous constructors ``(a, b)``,
postfix projections ``.1`` / ``.2``, the infix/prefix operators declared in
:mod:`stmtsim.grammar`, and juxtaposition application.  Anything past a
top-level ``:=`` (the proof stub) is discarded.

Expressions parse directly into :class:`~stmtsim.trees.OperatorTree` form;
parenthesization never survives parsing, only the shape it induced.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from . import grammar
from .lexer import Token, tokenize
from .trees import OperatorTree, leaf, node


class ParseError(Exception):
    """Malformed statement, with the offending span and expected tokens."""

    def __init__(self, message: str, span: tuple[int, int], expected: frozenset[str] = frozenset()):
        detail = f"{message} at bytes {span[0]}..{span[1]}"
        if expected:
            detail += " (expected one of: " + ", ".join(sorted(expected)) + ")"
        super().__init__(detail)
        self.message = message
        self.span = span
        self.expected = expected


class BinderKind(enum.Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"
    INSTANCE = "instance"


@dataclass(frozen=True)
class Binder:
    names: tuple[str, ...]
    kind: BinderKind
    type: OperatorTree | None

    def __post_init__(self):
        if not self.names or any(not n for n in self.names):
            raise ValueError("binder names must be nonempty")


@dataclass(frozen=True)
class StatementAst:
    name: str | None
    binders: tuple[Binder, ...]
    body: OperatorTree


_EOF = Token("eof", "", (0, 0))

# fun is the canonical spelling; λ normalizes to it.
_BINDER_LABELS = {"∀": "∀", "∃": "∃", "λ": "fun", "fun": "fun"}


_MAX_NESTING = 100  # each level costs several interpreter frames


class _Parser:
    def __init__(self, tokens: list[Token], source: str):
        self.tokens = tokens
        self.pos = 0
        self.depth = 0
        end = len(source.encode("utf-8"))
        self.eof = Token("eof", "", (end, end))

    def peek(self, ahead: int = 0) -> Token:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else self.eof

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            raise ParseError(
                f"unexpected {tok.text!r}" if tok.kind != "eof" else "unexpected end of input",
                tok.span,
                frozenset({text}),
            )
        return self.advance()

    def error(self, message: str, expected: frozenset[str] = frozenset()):
        tok = self.peek()
        raise ParseError(message, tok.span, expected)

    # -- expressions ---------------------------------------------------

    def parse_expr(self, min_prec: int) -> OperatorTree:
        self.depth += 1
        try:
            return self._parse_expr(min_prec)
        finally:
            self.depth -= 1

    def _parse_expr(self, min_prec: int) -> OperatorTree:
        if self.depth > _MAX_NESTING:
            self.error("expression nests too deeply")
        left = self.parse_app()
        while True:
            tok = self.peek()
            op = grammar.ASCII_ALIASES.get(tok.text, tok.text)
            if tok.kind != "operator" or op not in grammar.INFIX:
                break
            prec, assoc = grammar.INFIX[op]
            if prec < min_prec:
                break
            self.advance()
            if assoc == grammar.LEFT:
                right = self.parse_expr(prec + 1)
            elif assoc == grammar.RIGHT:
                right = self.parse_expr(prec)
            else:  # non-associative comparisons
                right = self.parse_expr(prec + 1)
                nxt = grammar.ASCII_ALIASES.get(self.peek().text, self.peek().text)
                if self.peek().kind == "operator" and grammar.INFIX.get(nxt, (0,))[0] == grammar.COMPARISON_PREC:
                    self.error(f"comparison {op!r} does not chain")
            left = node(op, (left, right))
        return left

    def parse_app(self) -> OperatorTree:
        head = self.parse_tight()
        args = []
        while self._starts_argument():
            args.append(self.parse_tight())
        if not args:
            return head
        if head.is_leaf:
            return node(head.label, args)
        return node("app", (head, *args))

    def _starts_argument(self) -> bool:
        tok = self.peek()
        if tok.kind in ("identifier", "numeral"):
            return True
        if tok.kind == "bracket" and tok.text == "(":
            return True
        if tok.kind == "operator" and tok.text == grammar.COERCION:
            return True
        return False

    def parse_tight(self) -> OperatorTree:
        """Atom with prefix coercions and postfix projections."""
        tok = self.peek()
        if tok.kind == "operator" and tok.text == grammar.COERCION:
            self.advance()
            return node(grammar.COERCION, (self.parse_tight(),))
        result = self.parse_atom()
        while self.peek().kind == "operator" and self.peek().text.startswith(".") and self.peek().text[1:].isdigit():
            proj = self.advance().text
            result = node(proj, (result,))
        return result

    def parse_atom(self) -> OperatorTree:
        tok = self.peek()
        text = grammar.ASCII_ALIASES.get(tok.text, tok.text)

        if tok.kind == "numeral":
            self.advance()
            return leaf(tok.text)

        if tok.kind == "identifier":
            self.advance()
            # Type* / Sort* are atomic when the star is adjacent.
            nxt = self.peek()
            if (
                tok.text in ("Type", "Sort")
                and nxt.kind == "operator"
                and nxt.text == "*"
                and nxt.span[0] == tok.span[1]
            ):
                self.advance()
                return leaf(tok.text + "*")
            return leaf(tok.text)

        if tok.kind == "operator" and text in grammar.SYMBOL_BINDERS:
            if text == "∑":
                return self.parse_big_operator()
            return self.parse_binder_expr(_BINDER_LABELS[text])

        if tok.kind == "binder-keyword" and tok.text == "fun":
            return self.parse_binder_expr("fun")

        if tok.kind == "binder-keyword" and tok.text == "let":
            return self.parse_let()

        if tok.kind == "operator" and text in grammar.PREFIX:
            self.advance()
            operand = self.parse_expr(grammar.PREFIX[text])
            return node(text, (operand,))

        if tok.kind == "bracket" and tok.text == "(":
            self.advance()
            first = self.parse_expr(0)
            elements = [first]
            while self.peek().text == ",":
                self.advance()
                elements.append(self.parse_expr(0))
            self.expect(")")
            tree = elements[-1]
            for prev in reversed(elements[:-1]):
                tree = node("pair", (prev, tree))
            return tree

        if tok.kind == "eof":
            self.error("unexpected end of input, expected an expression")
        if tok.kind == "operator":
            self.error(f"missing left operand before {tok.text!r}")
        self.error(f"unexpected {tok.text!r}, expected an expression")
        raise AssertionError("unreachable")

    # -- binders -------------------------------------------------------

    def parse_binder_expr(self, label: str) -> OperatorTree:
        self.advance()
        groups = self.parse_binder_groups(stop={",", "=>"})
        if not groups:
            self.error(f"{label} needs at least one binder")
        sep = "=>" if label == "fun" else ","
        self.expect(sep)
        body = self.parse_expr(0)
        for names, _kind, ty in reversed(groups):
            for name in reversed(names):
                body = node(label, (leaf(name), ty or leaf("_"), body))
        return body

    def parse_big_operator(self) -> OperatorTree:
        self.advance()
        name_tok = self.peek()
        if name_tok.kind != "identifier":
            self.error("∑ needs a bound variable")
        self.advance()
        sep = self.peek()
        if not (sep.text == "∈" or (sep.kind == "keyword" and sep.text == "in")):
            self.error("∑ binder needs its range", frozenset({"∈"}))
        self.advance()
        domain = self.parse_expr(0)
        self.expect(",")
        body = self.parse_expr(0)
        return node("∑", (leaf(name_tok.text), domain, body))

    def parse_let(self) -> OperatorTree:
        self.advance()
        name_tok = self.peek()
        if name_tok.kind != "identifier":
            self.error("let needs a name")
        self.advance()
        if self.peek().text == ":":
            self.advance()
            self.parse_expr(0)  # inferable annotation; not kept in the tree
        self.expect(":=")
        value = self.parse_expr(0)
        self.expect(";")
        body = self.parse_expr(0)
        return node("let", (leaf(name_tok.text), value, body))

    def parse_binder_groups(self, stop: set[str]) -> list[tuple[tuple[str, ...], BinderKind, OperatorTree | None]]:
        """Binder groups for ∀/∃/fun: bare names or bracketed groups."""
        groups: list[tuple[tuple[str, ...], BinderKind, OperatorTree | None]] = []
        bare: list[str] = []
        while True:
            tok = self.peek()
            if tok.text in stop or tok.kind == "eof":
                break
            if tok.kind == "identifier":
                bare.append(self.advance().text)
                continue
            if tok.text == ":" and bare:
                self.advance()
                ty = self.parse_expr(0)
                groups.append((tuple(bare), BinderKind.EXPLICIT, ty))
                bare = []
                break  # a bare typed run must be the final group
            if tok.kind == "bracket" and tok.text in "({[":
                if bare:
                    groups.append((tuple(bare), BinderKind.EXPLICIT, None))
                    bare = []
                groups.append(self.parse_bracketed_binder())
                continue
            self.error(f"unexpected {tok.text!r} in binder list")
        if bare:
            groups.append((tuple(bare), BinderKind.EXPLICIT, None))
        return groups

    def parse_bracketed_binder(self) -> tuple[tuple[str, ...], BinderKind, OperatorTree | None]:
        opener = self.advance().text
        closer = {"(": ")", "{": "}", "[": "]"}[opener]
        kind = {
            "(": BinderKind.EXPLICIT,
            "{": BinderKind.IMPLICIT,
            "[": BinderKind.INSTANCE,
        }[opener]

        names: list[str] = []
        # [CommRing R] style instance binders carry a bare type expression.
        named = False
        if self.peek().kind == "identifier":
            ahead = 0
            while self.peek(ahead).kind == "identifier":
                ahead += 1
            named = self.peek(ahead).text == ":"
        if kind is not BinderKind.INSTANCE and not named:
            self.error(f"binder group {opener}...{closer} needs 'names : type'")
        if named:
            while self.peek().kind == "identifier":
                names.append(self.advance().text)
            self.expect(":")
            ty = self.parse_expr(0)
        else:
            names = ["_"]
            ty = self.parse_expr(0)
        self.expect(closer)
        return tuple(names), kind, ty


def parse_statement(source: str) -> StatementAst:
    """Parse a ``theorem``-shaped declaration or a bare type expression.

    The proof stub (everything from a trailing ``:=`` on) is discarded.
    Raises :class:`ParseError` (or :class:`~stmtsim.lexer.LexError`) on
    malformed input.
    """
    tokens = tokenize(source)
    p = _Parser(tokens, source)
    tok = p.peek()

    name = None
    binders: tuple[Binder, ...] = ()
    if tok.kind == "keyword" and tok.text in ("theorem", "lemma"):
        p.advance()
        name_tok = p.peek()
        if name_tok.kind != "identifier":
            p.error("theorem needs a name")
        name = p.advance().text
        groups = []
        while p.peek().kind == "bracket" and p.peek().text in "({[":
            groups.append(p.parse_bracketed_binder())
        binders = tuple(Binder(names, kind, ty) for names, kind, ty in groups)
        p.expect(":")
        body = p.parse_expr(0)
        if p.peek().text == ":=":
            p.pos = len(p.tokens)  # drop the proof stub
    else:
        body = p.parse_expr(0)

    trailing = p.peek()
    if trailing.kind != "eof":
        raise ParseError(f"unexpected trailing {trailing.text!r}", trailing.span)
    return StatementAst(name, binders, body)


def parse_expression(source: str) -> OperatorTree:
    """Parse a bare expression (no theorem header) into its tree."""
    ast = parse_statement(source)
    if ast.name is not None:
        raise ParseError("expected a bare expression, found a declaration", (0, 0))
    return ast.body
