from __future__ import annotations

import random
from pathlib import Path

import pytest

from stmtsim.trees import OperatorTree, leaf, node

FIXTURE_PATH = Path(__file__).resolve().parents[1] / "src" / "stmtsim" / "data" / "benchmark_fixture.jsonl"

EXERCISE_LABEL = (
    "theorem exercise_1_1b (x : ℝ) (y : ℚ) (h : y ≠ 0) : "
    "( Irrational x ) -> Irrational ( x * y ) := by sorry"
)
EXERCISE_PRED = (
    "theorem mul_rat_tac_11959 (r : ℚ) (x : ℝ) (h : Irrational x) (hr : r ≠ 0) : "
    "Irrational (r * x) := by sorry"
)
LINE_LABEL = (
    "theorem mathd_algebra_142 (m b : ℝ) (h₀ : m * 7 + b = -1) (h₁ : m * -1 + b = 7) : "
    "m + b = 5 := by sorry"
)
LINE_PRED = (
    "theorem my_favorite_theorem : let B : ℝ × ℝ := (7, -1); let C : ℝ × ℝ := (-1, 7); "
    "∀ m b : ℝ, (B.2 = m * B.1 + b ∧ C.2 = m * C.1 + b) → m + b = 5  := by sorry"
)

# Statements covering the grammar the parser claims: binder kinds, the
# binder expressions, projections, casts, big operators, prefix operators.
CORPUS = [
    "theorem t1 (x : ℝ) : x = x := by sorry",
    "theorem t2 {R : Type*} [CommRing R] (x : R) : (x + 1) ^ 2 * x = x ^ 3 + 2 * x ^ 2 + x := by sorry",
    "theorem t3 (a b c : ℤ) : a + b * c ≤ a * b + c := by sorry",
    "theorem t4 (p q : Prop) : p ∧ q → q ∨ p := by sorry",
    "theorem t5 (x : ℝ) : ¬ x < 0 → x ≥ 0 := by sorry",
    "theorem t6 (y : ℚ) (x : ℝ) (h : y ≠ 0) : Irrational x → Irrational (↑y * x) := by sorry",
    "theorem t7 : (∑ x ∈ Finset.range 10, (x + 1) ^ 2) % 4 = 1 := by sorry",
    "theorem t8 : ∀ x : ℝ, ∃ y : ℝ, y > x := by sorry",
    "theorem t9 (f : ℝ → ℝ) : (fun x : ℝ => f x) = f := by sorry",
    "theorem t10 : let k := 3 ^ 2; k + 1 = 10 := by sorry",
    "theorem t11 (v : ℝ × ℝ) : (v.1, v.2) = v := by sorry",
    "theorem t12 (a b : ℕ) : a % b + b * (a / b) = a := by sorry",
    "theorem t13 (x : ℝ) : x * -1 = -x := by sorry",
    "theorem t14 (p : Prop) : ¬ ¬ p ↔ p := by sorry",
    "1 + 1 = 2",
    "∀ x : ℝ, x ^ 2 ≥ 0",
    EXERCISE_LABEL,
    EXERCISE_PRED,
    LINE_LABEL,
    LINE_PRED,
]

PAIR_CORPUS = [
    (EXERCISE_LABEL, EXERCISE_PRED),
    (LINE_LABEL, LINE_PRED),
    ("theorem a (x y : ℝ) : x + y = 2 := by sorry", "theorem b (x y : ℝ) : y + x = 2 := by sorry"),
    ("theorem a (p q r : Prop) : p ∧ q → r := by sorry", "theorem b (p q r : Prop) : p → q → r := by sorry"),
    ("theorem a (x : ℝ) : x + 1 = 2 := by sorry", "theorem b (x : ℝ) : x + 1 = 3 := by sorry"),
    ("theorem a (x : ℝ) : x ^ 2 ≥ 0 := by sorry", "theorem b (p q : Prop) : p ∨ q → q ∨ p := by sorry"),
    ("theorem a (n : ℕ) : n * 2 = n + n := by sorry", "theorem a (n : ℕ) : n * 2 = n + n := by sorry"),
]

LABELS = ("a", "b", "c")


def random_tree(rng: random.Random, size: int) -> OperatorTree:
    """Uniform-ish random ordered labeled tree with exactly ``size`` nodes."""
    if size == 1:
        return leaf(rng.choice(LABELS))
    budget = size - 1
    parts: list[int] = []
    while budget:
        take = rng.randint(1, budget)
        parts.append(take)
        budget -= take
    return node(rng.choice(LABELS), tuple(random_tree(rng, p) for p in parts))


def all_trees(size: int):
    """Every ordered tree with ``size`` nodes over the 3-letter alphabet."""
    if size == 1:
        for lbl in LABELS:
            yield leaf(lbl)
        return
    for parts in _compositions(size - 1):
        for kids in _forests(parts):
            for lbl in LABELS:
                yield node(lbl, kids)


def _compositions(total: int):
    if total == 0:
        yield ()
        return
    for head in range(1, total + 1):
        for rest in _compositions(total - head):
            yield (head, *rest)


def _forests(parts: tuple[int, ...]):
    if not parts:
        yield ()
        return
    for first in all_trees(parts[0]):
        for rest in _forests(parts[1:]):
            yield (first, *rest)


@pytest.fixture(scope="session")
def fixture_path() -> Path:
    return FIXTURE_PATH
