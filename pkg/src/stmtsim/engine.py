"""Transformation-augmented distance: merge, heuristic search, scoring.

A statement pair becomes one equality goal between the two folded types.
The search rewrites that goal with semantics-preserving rules, using the
tree edit distance between the equality's sides as its heuristic, and
reports the smallest distance seen.  Closing the goal (both sides become
structurally identical) yields distance exactly 0 — the true value, not
an approximation; otherwise the result is an upper bound that never
exceeds the plain edit distance of the original sides.

Determinism contract: for a fixed pair, rule library, and node-count
budget the result is bit-for-bit reproducible.  Wall-clock limits are
advisory and must be disabled wherever reproducibility matters.
Invocations share no state, so they are safe to run concurrently.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from heapq import heappop, heappush

from .opt import build_opt, token_fallback_tree, try_statement_opt
from .parser import StatementAst
from .rules import RuleLibrary, apply_rule, const_fold, default_library
from .ted import ted_distance
from .trees import OperatorTree, node, tree_size

__all__ = [
    "BudgetError",
    "SearchBudget",
    "SearchNode",
    "TransTedResult",
    "DEFAULT_BUDGET",
    "merge_to_equality",
    "enumerate_children",
    "transted",
    "transted_similarity",
    "score_statement_pair",
    "ted_statement_pair",
]


class BudgetError(Exception):
    """Non-positive search budget."""


@dataclass(frozen=True)
class SearchBudget:
    """Limits for one search.

    ``max_expanded_nodes`` is the reproducibility-bearing limit; the wall
    clock is a safety net only (None disables it, as tests must).
    """

    max_expanded_nodes: int = 10_000
    max_depth: int = 30
    max_wall_time: float | None = 10.0


DEFAULT_BUDGET = SearchBudget()

Trace = tuple[tuple[str, tuple[int, ...]], ...]


@dataclass(frozen=True)
class SearchNode:
    """A goal in the search space.

    ``heuristic`` is the edit distance between the equality's two sides;
    0 means the goal is completed.
    """

    goal: OperatorTree
    heuristic: int | Fraction
    depth: int
    trace: Trace = ()

    @property
    def completed(self) -> bool:
        return self.heuristic == 0


@dataclass(frozen=True)
class TransTedResult:
    distance: int | Fraction
    similarity: float
    proved_equal: bool
    trace: Trace
    expanded: int
    degraded: bool = False


def merge_to_equality(label: StatementAst, prediction: StatementAst) -> OperatorTree:
    """Single equality goal between the pair's folded types (label left)."""
    return node("=", (build_opt(label), build_opt(prediction)))


def _sides(goal: OperatorTree) -> tuple[OperatorTree, OperatorTree]:
    return goal.children[0], goal.children[1]


def _heuristic(goal: OperatorTree) -> int | Fraction:
    left, right = _sides(goal)
    return ted_distance(left, right)


def _start_node(goal: OperatorTree) -> SearchNode:
    return SearchNode(goal, _heuristic(goal), 0)


def enumerate_children(node_: SearchNode, rules: RuleLibrary) -> list[SearchNode]:
    """All successful (rule, position) applications, heuristics recomputed.

    Order is deterministic: library order, then preorder position.  The
    node must not already be completed.
    """
    if node_.completed:
        raise ValueError("cannot expand a completed node")
    goal = node_.goal
    positions = list(goal.paths())
    children: list[SearchNode] = []
    for rule in rules:
        rule_positions = ((),) if rule.root_only else positions
        for pos in rule_positions:
            rewritten = apply_rule(rule, goal, pos)
            if rewritten is None:
                continue
            children.append(
                SearchNode(
                    rewritten,
                    _heuristic(rewritten),
                    node_.depth + 1,
                    node_.trace + ((rule.name, pos),),
                )
            )
    return children


def _validate_budget(budget: SearchBudget) -> None:
    if budget.max_expanded_nodes <= 0 or budget.max_depth <= 0:
        raise BudgetError("budget limits must be positive")
    if budget.max_wall_time is not None and budget.max_wall_time <= 0:
        raise BudgetError("wall-time limit must be positive (or None)")


def transted(
    label: StatementAst,
    prediction: StatementAst,
    budget: SearchBudget = DEFAULT_BUDGET,
    rules: RuleLibrary | None = None,
) -> TransTedResult:
    """Smallest side-to-side distance over all goals the search visits.

    Runs numeral folding on the merged goal, returns 0 immediately when
    the sides are already structurally identical, and otherwise searches
    best-first on (heuristic, depth, canonical rendering).  The reported
    distance never exceeds the edit distance of the initially merged sides, and a
    larger node budget can only lower it.
    """
    _validate_budget(budget)
    if rules is None:
        rules = default_library()
    merged = merge_to_equality(label, prediction)
    t1, t2 = _sides(merged)
    denominator = max(tree_size(t1), tree_size(t2))
    return _search(merged, denominator, budget, rules)


def _start_goal(merged: OperatorTree) -> OperatorTree:
    """Numeral-fold the merged goal unless that moves the sides apart."""
    folded = const_fold(merged)
    if folded == merged or _heuristic(folded) <= _heuristic(merged):
        return folded
    return merged


def _search(merged: OperatorTree, denominator: int, budget: SearchBudget, rules: RuleLibrary) -> TransTedResult:
    t1, t2 = _sides(merged)
    if t1 == t2:
        return TransTedResult(0, 1.0, True, (), 0)

    goal = _start_goal(merged)
    best: int | Fraction = _heuristic(goal)
    best_trace: Trace = ()
    if best == 0:
        return TransTedResult(0, 1.0, True, (), 0)
    start_trace: Trace = ()

    # Canonical orientation keeps the search symmetric in its two inputs:
    # the swap is itself a legal rewrite (root equality commutation).
    s1, s2 = _sides(goal)
    if s2.render() < s1.render():
        goal = node("=", (s2, s1))
        start_trace = (("comm-eq", ()),)

    start = SearchNode(goal, best, 0, start_trace)

    deadline = None if budget.max_wall_time is None else time.monotonic() + budget.max_wall_time
    seen = {goal.render()}
    frontier: list[tuple] = []
    heappush(frontier, (start.heuristic, start.depth, goal.render(), start))
    expanded = 0

    while frontier:
        if expanded >= budget.max_expanded_nodes:
            break
        if deadline is not None and time.monotonic() > deadline:
            break
        _, _, _, current = heappop(frontier)
        expanded += 1
        if current.depth >= budget.max_depth:
            continue
        # Same enumeration order as enumerate_children, but goals already
        # seen are dropped before their heuristic is computed.
        current_goal = current.goal
        positions = list(current_goal.paths())
        for rule in rules:
            for pos in ((),) if rule.root_only else positions:
                rewritten = apply_rule(rule, current_goal, pos)
                if rewritten is None:
                    continue
                key = rewritten.render()
                if key in seen:
                    continue
                seen.add(key)
                child = SearchNode(
                    rewritten,
                    _heuristic(rewritten),
                    current.depth + 1,
                    current.trace + ((rule.name, pos),),
                )
                if child.completed:
                    return TransTedResult(0, 1.0, True, child.trace, expanded)
                if child.heuristic < best:
                    best, best_trace = child.heuristic, child.trace
                heappush(frontier, (child.heuristic, child.depth, key, child))

    similarity = float(1 - Fraction(best) / denominator)
    return TransTedResult(best, similarity, False, best_trace, expanded)


def transted_similarity(result: TransTedResult, t1: OperatorTree, t2: OperatorTree) -> float:
    """1 - distance / max(side sizes); unclamped, like the plain metric."""
    return float(1 - Fraction(result.distance) / max(tree_size(t1), tree_size(t2)))


def replay_trace(
    label: StatementAst,
    prediction: StatementAst,
    trace: Trace,
    rules: RuleLibrary | None = None,
) -> OperatorTree:
    """Re-apply a result's rule trace from the search's start goal.

    The trace is evidence, not a proof object; this makes it checkable:
    for a proved result the replayed goal's sides are identical, and in
    general its side-to-side distance equals the reported distance.
    """
    if rules is None:
        rules = default_library()
    by_name = {rule.name: rule for rule in rules}
    goal = _start_goal(merge_to_equality(label, prediction))
    for name, position in trace:
        try:
            step = apply_rule(by_name[name], goal, position)
        except (IndexError, KeyError):
            step = None
        if step is None:
            raise ValueError(f"trace step {name}@{position} does not apply")
        goal = step
    return goal


def score_statement_pair(
    label_source: str,
    prediction_source: str,
    budget: SearchBudget = DEFAULT_BUDGET,
    rules: RuleLibrary | None = None,
) -> TransTedResult:
    """Transformation-augmented similarity straight from statement text.

    When either statement fails to parse the comparison degrades to the
    plain edit distance over best-effort token-level trees and the result
    is flagged ``degraded``.
    """
    _validate_budget(budget)
    if rules is None:
        rules = default_library()
    try:
        from .parser import parse_statement

        label_ast = parse_statement(label_source)
        pred_ast = parse_statement(prediction_source)
    except Exception:
        left = token_fallback_tree(label_source)
        right = token_fallback_tree(prediction_source)
        distance = ted_distance(left, right)
        denominator = max(tree_size(left), tree_size(right))
        similarity = float(1 - Fraction(distance) / denominator)
        return TransTedResult(distance, similarity, distance == 0, (), 0, degraded=True)
    return transted(label_ast, pred_ast, budget, rules)


def ted_statement_pair(label_source: str, prediction_source: str) -> tuple[int | Fraction, float, bool]:
    """(distance, similarity, degraded) under the plain edit metric."""
    left, ldeg = try_statement_opt(label_source)
    right, rdeg = try_statement_opt(prediction_source)
    distance = ted_distance(left, right)
    denominator = max(tree_size(left), tree_size(right))
    return distance, float(1 - Fraction(distance) / denominator), ldeg or rdeg
