"""Rewrite rules: pattern language, built-in procedures, and the library.

Each rule turns a goal (an equality-rooted tree) into a no-weaker goal:
proving the rewritten goal suffices to prove the original.  Pattern rules
are ``lhs -> rhs`` s-expressions with ``?``-prefixed metavariables and may
fire at any subtree position.  Built-in procedural rules (referenced by
reserved names) cover the cases patterns cannot express: congruence steps
that need the single-residual-goal restriction, binder-name unification,
capture-checked substitution, and whole-goal normalization passes.

Library file format: a JSON list of ``{name, lhs, rhs, guard?, commutes?}``
entries; an entry without ``lhs`` must name a built-in.  The shipped
default library round-trips byte-exactly through load/save.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .trees import SLOT, OperatorTree, leaf, node

__all__ = [
    "RuleError",
    "RewriteRule",
    "RuleLibrary",
    "apply_rule",
    "load_rules",
    "loads_rules",
    "dumps_rules",
    "default_library",
    "BUILTIN_RULES",
    "const_fold",
    "cast_collapse",
]


class RuleError(Exception):
    """Malformed rule library or pattern."""


# -- pattern language -------------------------------------------------------


@dataclass(frozen=True)
class _PVar:
    name: str


@dataclass(frozen=True)
class _PLeaf:
    label: str


@dataclass(frozen=True)
class _PNode:
    head: "str | _PVar"
    children: tuple


def _tokenize_pattern(text: str) -> list[str]:
    out: list[str] = []
    cur = ""
    for ch in text:
        if ch in "()":
            if cur:
                out.append(cur)
                cur = ""
            out.append(ch)
        elif ch.isspace():
            if cur:
                out.append(cur)
                cur = ""
        else:
            cur += ch
    if cur:
        out.append(cur)
    return out


def parse_pattern(text: str):
    tokens = _tokenize_pattern(text)
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise RuleError(f"pattern ended early: {text!r}")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens) or tokens[pos] == ")":
                raise RuleError(f"empty pattern node in {text!r}")
            head_tok = tokens[pos]
            pos += 1
            head = _PVar(head_tok[1:]) if head_tok.startswith("?") else head_tok
            children = []
            while pos < len(tokens) and tokens[pos] != ")":
                children.append(read())
            if pos >= len(tokens):
                raise RuleError(f"unbalanced pattern: {text!r}")
            pos += 1  # ')'
            if not children:
                raise RuleError(f"pattern node needs children in {text!r}")
            return _PNode(head, tuple(children))
        if tok == ")":
            raise RuleError(f"unbalanced pattern: {text!r}")
        if tok.startswith("?"):
            if len(tok) == 1:
                raise RuleError(f"bare '?' in {text!r}")
            return _PVar(tok[1:])
        return _PLeaf(tok)

    pat = read()
    if pos != len(tokens):
        raise RuleError(f"trailing tokens in pattern {text!r}")
    return pat


def _pattern_vars(pat) -> set[str]:
    if isinstance(pat, _PVar):
        return {pat.name}
    if isinstance(pat, _PLeaf):
        return set()
    out = _pattern_vars_head(pat.head)
    for c in pat.children:
        out |= _pattern_vars(c)
    return out


def _pattern_vars_head(head) -> set[str]:
    return {head.name} if isinstance(head, _PVar) else set()


def match_pattern(pat, tree: OperatorTree, bindings: dict[str, OperatorTree]) -> bool:
    if isinstance(pat, _PVar):
        bound = bindings.get(pat.name)
        if bound is None:
            bindings[pat.name] = tree
            return True
        return bound == tree
    if isinstance(pat, _PLeaf):
        return tree.is_leaf and tree.label == pat.label
    if tree.is_leaf or len(tree.children) != len(pat.children):
        return False
    if isinstance(pat.head, _PVar):
        head_leaf = leaf(tree.base_label)
        bound = bindings.get(pat.head.name)
        if bound is None:
            bindings[pat.head.name] = head_leaf
        elif bound != head_leaf:
            return False
    elif tree.base_label != pat.head:
        return False
    return all(match_pattern(p, c, bindings) for p, c in zip(pat.children, tree.children))


def substitute_pattern(pat, bindings: dict[str, OperatorTree]) -> OperatorTree | None:
    if isinstance(pat, _PVar):
        return bindings[pat.name]
    if isinstance(pat, _PLeaf):
        return leaf(pat.label)
    if isinstance(pat.head, _PVar):
        head_tree = bindings[pat.head.name]
        if not head_tree.is_leaf:
            return None  # a non-leaf cannot serve as a node label
        head = head_tree.label
    else:
        head = pat.head
    kids = []
    for c in pat.children:
        sub = substitute_pattern(c, bindings)
        if sub is None:
            return None
        kids.append(sub)
    return node(head, kids)


# -- guards -----------------------------------------------------------------


def _guard_numeral(t: OperatorTree) -> bool:
    return t.is_leaf and t.label.replace(".", "", 1).isdigit()


def _guard_leaf(t: OperatorTree) -> bool:
    return t.is_leaf


_GUARDS = {"numeral": _guard_numeral, "leaf": _guard_leaf}


def _check_guard(guard: str, bindings: dict[str, OperatorTree]) -> bool:
    parts = guard.split()
    if len(parts) != 2 or not parts[1].startswith("?"):
        raise RuleError(f"unsupported guard {guard!r}")
    pred = _GUARDS.get(parts[0])
    if pred is None:
        raise RuleError(f"unknown guard predicate {parts[0]!r}")
    bound = bindings.get(parts[1][1:])
    return bound is not None and pred(bound)


# -- substitution and name handling ----------------------------------------


class _CaptureError(Exception):
    pass


_BINDING_SLOT = {"∀" + SLOT, "∃" + SLOT, "fun" + SLOT, "let" + SLOT, "∑" + SLOT}


def _free_names(t: OperatorTree, acc: set[str]) -> None:
    acc.add(t.base_label)
    for c in t.children:
        _free_names(c, acc)


def subst_name(tree: OperatorTree, name: str, replacement: OperatorTree) -> OperatorTree:
    """Replace free occurrences of ``name`` by ``replacement``.

    Shadow-aware: rebinding of ``name`` stops the descent.  Raises
    :class:`_CaptureError` when a binder in scope would capture a name free
    in ``replacement``; callers treat that as a failed rule application.
    """
    repl_names: set[str] = set()
    _free_names(replacement, repl_names)

    def walk(t: OperatorTree) -> OperatorTree:
        if t.is_leaf:
            return replacement if t.label == name else t
        if t.label in _BINDING_SLOT and len(t.children) == 3:
            bound = t.children[0].label
            head, mid = t.children[0], walk(t.children[1])
            if bound == name:
                return OperatorTree(t.label, (head, mid, t.children[2]))
            body = t.children[2]
            if _occurs_name(name, body) and bound in repl_names:
                raise _CaptureError(bound)
            return OperatorTree(t.label, (head, mid, walk(body)))
        if t.base_label == name:
            if replacement.is_leaf:
                return OperatorTree(replacement.label + SLOT, tuple(walk(c) for c in t.children))
            return node("app", (replacement, *(walk(c) for c in t.children)))
        return OperatorTree(t.label, tuple(walk(c) for c in t.children))

    return walk(tree)


def _occurs_name(name: str, t: OperatorTree) -> bool:
    if t.base_label == name:
        return True
    return any(_occurs_name(name, c) for c in t.children)


def fresh_name(goal: OperatorTree) -> str:
    used: set[str] = set()
    _free_names(goal, used)
    k = 0
    while f"✝{k}" in used:
        k += 1
    return f"✝{k}"


# -- built-in procedural rules ----------------------------------------------

_EQ = "=" + SLOT
_ARROW = "→" + SLOT
_FORALL = "∀" + SLOT
_FUN = "fun" + SLOT
_LET = "let" + SLOT
_CAST = "↑" + SLOT

# Heads handled by dedicated congruence rules; the generic one skips them.
_PI_LIKE = {_ARROW, _FORALL, _FUN, _LET, "∃" + SLOT, "∑" + SLOT}


def _eq_goal(left: OperatorTree, right: OperatorTree) -> OperatorTree:
    return node("=", (left, right))


def _goal_sides(goal: OperatorTree) -> tuple[OperatorTree, OperatorTree] | None:
    if goal.label == _EQ and len(goal.children) == 2:
        return goal.children[0], goal.children[1]
    return None


def _bi_congr_arg(goal, path):
    """f a ... x ... = f a ... y ...  with exactly one differing argument
    reduces to  x = y.  More than one difference would need several
    residual goals, which the search forbids."""
    if path:
        return None
    sides = _goal_sides(goal)
    if sides is None:
        return None
    left, right = sides
    if left.is_leaf or left.label != right.label or len(left.children) != len(right.children):
        return None
    if left.label in _PI_LIKE:
        return None
    diffs = [k for k, (a, b) in enumerate(zip(left.children, right.children)) if a != b]
    if len(diffs) != 1:
        return None
    k = diffs[0]
    return _eq_goal(left.children[k], right.children[k])


def _bi_congr_fun(goal, path):
    """f x ... = g x ...  with identical arguments reduces to  f = g."""
    if path:
        return None
    sides = _goal_sides(goal)
    if sides is None:
        return None
    left, right = sides
    if left.is_leaf or right.is_leaf or left.label == right.label:
        return None
    if left.label in _PI_LIKE or right.label in _PI_LIKE:
        return None
    if left.children != right.children:
        return None
    return _eq_goal(leaf(left.base_label), leaf(right.base_label))


def _bi_implies_congr(goal, path):
    """(a → c) = (b → d) reduces to the one differing pair; both pairs
    differing is rejected (two residual goals)."""
    if path:
        return None
    sides = _goal_sides(goal)
    if sides is None:
        return None
    left, right = sides
    if left.label != _ARROW or right.label != _ARROW:
        return None
    (a, c), (b, d) = left.children, right.children
    if a == b and c != d:
        return _eq_goal(c, d)
    if c == d and a != b:
        return _eq_goal(a, b)
    return None


def _unify_binders(goal, left, right, label: str):
    name_l, ty_l, body_l = left.children
    name_r, ty_r, body_r = right.children
    if ty_l != ty_r:
        return None
    if name_l.label == name_r.label:
        return _eq_goal(body_l, body_r)
    common = fresh_name(goal)
    try:
        new_l = subst_name(body_l, name_l.label, leaf(common))
        new_r = subst_name(body_r, name_r.label, leaf(common))
    except _CaptureError:
        return None
    return _eq_goal(new_l, new_r)


def _bi_forall_congr(goal, path):
    """∀ x : T, P = ∀ y : T, Q  reduces to  P = Q  with the bound names
    unified (kept when equal, renamed to a fresh common name otherwise)."""
    if path:
        return None
    sides = _goal_sides(goal)
    if sides is None:
        return None
    left, right = sides
    if left.label != _FORALL or right.label != _FORALL:
        return None
    return _unify_binders(goal, left, right, "∀")


def _bi_ext(goal, path):
    """(fun x : A => f x) = (fun y : A => g y)  reduces to the bodies'
    equality with the bound names unified."""
    if path:
        return None
    sides = _goal_sides(goal)
    if sides is None:
        return None
    left, right = sides
    if left.label != _FUN or right.label != _FUN:
        return None
    return _unify_binders(goal, left, right, "fun")


def _pi_parts(t: OperatorTree):
    """(name | None, type, body) for a ∀ node or an arrow."""
    if t.label == _FORALL and len(t.children) == 3:
        return t.children[0].label, t.children[1], t.children[2]
    if t.label == _ARROW and len(t.children) == 2:
        return None, t.children[0], t.children[1]
    return None, None, None


def _make_pi(name: str | None, ty: OperatorTree, body: OperatorTree) -> OperatorTree:
    if name is None:
        return node("→", (ty, body))
    return node("∀", (leaf(name), ty, body))


def _bi_forall_swap(goal, path):
    """Swap two adjacent independent binders (∀ or hypothesis arrows)."""
    target = goal.at(path)
    n1, t1, b1 = _pi_parts(target)
    if t1 is None:
        return None
    n2, t2, b2 = _pi_parts(b1)
    if t2 is None:
        return None
    if n1 is not None and n1 == n2:
        return None  # shadowed name: swapping would rebind the body
    if n1 is not None and _occurs_name(n1, t2):
        return None  # inner type depends on the outer binder
    if n2 is not None and _occurs_name(n2, t1):
        return None  # swapping would capture n2 in the outer type
    swapped = _make_pi(n2, t2, _make_pi(n1, t1, b2))
    return goal.replace_at(path, swapped)


def _bi_let_inline(goal, path):
    """let x := v; body  unfolds to  body[x := v]."""
    target = goal.at(path)
    if target.label != _LET or len(target.children) != 3:
        return None
    bound = target.children[0]
    value, body = target.children[1], target.children[2]
    try:
        inlined = subst_name(body, bound.label, value)
    except _CaptureError:
        return None
    return goal.replace_at(path, inlined)


# Caps keeping numeral folding cheap and exact.
_MAX_EXP = 32
_MAX_MAG = Fraction(10) ** 15


def _numeral_value(t: OperatorTree) -> Fraction | None:
    if t.is_leaf:
        text = t.label
        if text.replace(".", "", 1).isdigit():
            return Fraction(text)
        return None
    if t.label == "-" + SLOT and len(t.children) == 1:
        v = _numeral_value(t.children[0])
        return None if v is None else -v
    if t.label == "/" + SLOT and len(t.children) == 2:
        a = _numeral_value(t.children[0])
        b = _numeral_value(t.children[1])
        if a is None or b is None or b == 0:
            return None
        return a / b
    return None


def _numeral_tree(v: Fraction) -> OperatorTree:
    if v < 0:
        return node("-", (_numeral_tree(-v),))
    if v.denominator == 1:
        return leaf(str(v.numerator))
    return node("/", (leaf(str(v.numerator)), leaf(str(v.denominator))))


_ARITH_OPS = {"+", "-", "*", "/", "%", "^"}


def _fold_once(t: OperatorTree) -> OperatorTree:
    kids = tuple(_fold_once(c) for c in t.children)
    t = t if kids == t.children else OperatorTree(t.label, kids)
    if t.is_leaf or len(t.children) != 2 or t.base_label not in _ARITH_OPS:
        # unary minus over numerals is already canonical
        return t
    a = _numeral_value(t.children[0])
    b = _numeral_value(t.children[1])
    if a is None or b is None:
        return t
    op = t.base_label
    try:
        if op == "+":
            v = a + b
        elif op == "-":
            v = a - b
        elif op == "*":
            v = a * b
        elif op == "/":
            if b == 0:
                return t
            v = a / b
        elif op == "%":
            if a.denominator != 1 or b.denominator != 1 or b == 0:
                return t
            v = Fraction(a.numerator % b.numerator)
        else:  # ^
            if b.denominator != 1 or abs(b.numerator) > _MAX_EXP:
                return t
            if b.numerator < 0 and a == 0:
                return t
            v = a ** b.numerator
    except (OverflowError, ZeroDivisionError):
        return t
    if abs(v.numerator) > _MAX_MAG or v.denominator > _MAX_MAG:
        return t
    folded = _numeral_tree(v)
    return folded if folded != t else t


def const_fold(t: OperatorTree) -> OperatorTree:
    """Exact rational folding of numeral subtrees (+ − * / ^ %)."""
    return _fold_once(t)


def _collapse_once(t: OperatorTree) -> OperatorTree:
    kids = tuple(_collapse_once(c) for c in t.children)
    t = t if kids == t.children else OperatorTree(t.label, kids)
    if t.label == _CAST and len(t.children) == 1:
        child = t.children[0]
        if _numeral_value(child) is not None:
            return child
        if child.label == _CAST:
            return child
    return t


def cast_collapse(t: OperatorTree) -> OperatorTree:
    """Drop coercion arrows over numerals and collapse stacked coercions."""
    return _collapse_once(t)


def _bi_const_fold(goal, path):
    if path:
        return None
    folded = const_fold(goal)
    return folded if folded != goal else None


def _bi_cast_collapse(goal, path):
    if path:
        return None
    collapsed = cast_collapse(goal)
    return collapsed if collapsed != goal else None


BUILTIN_RULES = {
    "congr-arg": _bi_congr_arg,
    "congr-fun": _bi_congr_fun,
    "implies-congr": _bi_implies_congr,
    "forall-congr": _bi_forall_congr,
    "ext": _bi_ext,
    "forall-swap": _bi_forall_swap,
    "let-inline": _bi_let_inline,
    "const-fold": _bi_const_fold,
    "cast-collapse": _bi_cast_collapse,
}

# Built-ins that only ever fire on the whole goal.
ROOT_ONLY_BUILTINS = {
    "congr-arg",
    "congr-fun",
    "implies-congr",
    "forall-congr",
    "ext",
    "const-fold",
    "cast-collapse",
}


# -- rules and libraries -----------------------------------------------------


@dataclass(frozen=True)
class RewriteRule:
    """One goal transformation.

    Pattern rules carry ``lhs``/``rhs``; built-ins carry only their
    reserved name.  ``commutes`` marks self-inverse rules (pure metadata).
    """

    name: str
    lhs: str | None = None
    rhs: str | None = None
    guard: str | None = None
    commutes: bool | None = None

    def __post_init__(self):
        if self.lhs is None:
            if self.rhs is not None:
                raise RuleError(f"rule {self.name!r} has rhs without lhs")
            if self.name not in BUILTIN_RULES:
                raise RuleError(f"unknown built-in rule {self.name!r}")
            return
        if self.rhs is None:
            raise RuleError(f"rule {self.name!r} has lhs without rhs")
        lhs_pat = parse_pattern(self.lhs)
        rhs_pat = parse_pattern(self.rhs)
        extra = _pattern_vars(rhs_pat) - _pattern_vars(lhs_pat)
        if extra:
            raise RuleError(f"rule {self.name!r}: rhs metavariables {sorted(extra)} not bound by lhs")
        object.__setattr__(self, "_lhs_pat", lhs_pat)
        object.__setattr__(self, "_rhs_pat", rhs_pat)

    @property
    def is_builtin(self) -> bool:
        return self.lhs is None

    @property
    def root_only(self) -> bool:
        return self.is_builtin and self.name in ROOT_ONLY_BUILTINS


# Pattern rules keep compiled patterns in hidden slots set by __post_init__.
RewriteRule._lhs_pat = None  # type: ignore[attr-defined]
RewriteRule._rhs_pat = None  # type: ignore[attr-defined]


def apply_rule(rule: RewriteRule, goal: OperatorTree, position: tuple[int, ...]) -> OperatorTree | None:
    """Apply ``rule`` at ``position``; None when it does not fire.

    The result is again a goal tree; applications that would leave the
    goal unchanged are treated as non-matches.
    """
    if rule.is_builtin:
        result = BUILTIN_RULES[rule.name](goal, position)
        if result is None or result == goal:
            return None
        return result
    target = goal.at(position)
    bindings: dict[str, OperatorTree] = {}
    if not match_pattern(rule._lhs_pat, target, bindings):
        return None
    if rule.guard is not None and not _check_guard(rule.guard, bindings):
        return None
    replacement = substitute_pattern(rule._rhs_pat, bindings)
    if replacement is None or replacement == target:
        return None
    if not position and (replacement.label != _EQ or len(replacement.children) != 2):
        return None  # a rewrite of the whole goal must stay equality-rooted
    return goal.replace_at(position, replacement)


@dataclass(frozen=True)
class RuleLibrary:
    rules: tuple[RewriteRule, ...]

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def names(self) -> list[str]:
        return [r.name for r in self.rules]


_FIELD_ORDER = ("name", "lhs", "rhs", "guard", "commutes")


def loads_rules(text: str) -> RuleLibrary:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RuleError(f"rule library is not valid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise RuleError("rule library must be a JSON list")
    rules = []
    seen: set[str] = set()
    for entry in raw:
        if not isinstance(entry, dict) or "name" not in entry:
            raise RuleError(f"rule entry needs a name: {entry!r}")
        unknown = set(entry) - set(_FIELD_ORDER)
        if unknown:
            raise RuleError(f"rule {entry['name']!r} has unknown fields {sorted(unknown)}")
        if entry["name"] in seen:
            raise RuleError(f"duplicate rule name {entry['name']!r}")
        seen.add(entry["name"])
        rules.append(RewriteRule(**entry))
    return RuleLibrary(tuple(rules))


def load_rules(path) -> RuleLibrary:
    with open(path, encoding="utf-8") as fh:
        return loads_rules(fh.read())


def dumps_rules(library: RuleLibrary) -> str:
    entries = []
    for rule in library.rules:
        entry = {}
        for field in _FIELD_ORDER:
            value = getattr(rule, field)
            if value is not None:
                entry[field] = value
        entries.append(entry)
    return json.dumps(entries, ensure_ascii=False, indent=2) + "\n"


_default: RuleLibrary | None = None


def default_library() -> RuleLibrary:
    """The shipped rule library (cached)."""
    global _default
    if _default is None:
        text = resources.files("stmtsim.data").joinpath("rules.json").read_text("utf-8")
        _default = loads_rules(text)
    return _default
