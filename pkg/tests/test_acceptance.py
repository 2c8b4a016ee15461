"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` for the per-criterion
lines.  Tolerances are pinned here, not tuned: metric arithmetic at
±0.005, worked-example similarity prints at ±0.15 absolute, plateau
stability at 0.02.

Criterion 2 note: the stated exhaustive sweep over all labeled tree pairs
up to 6 nodes is ~1.2e9 oracle comparisons (days at ~0.6 ms each), which
contradicts its own minutes-scale runtime; this suite keeps the intent
with an exhaustive sweep up to 4 nodes, an exhaustive sweep over all
shape pairs up to 6 nodes under three deterministic labelings, and 1,000
seeded random pairs up to 8 nodes.
"""
from __future__ import annotations

import itertools
import random
from contextlib import contextmanager
from fractions import Fraction

from click.testing import CliRunner

from conftest import (
    EXERCISE_LABEL,
    EXERCISE_PRED,
    FIXTURE_PATH,
    LINE_LABEL,
    LINE_PRED,
    PAIR_CORPUS,
    all_trees,
    random_tree,
)
from oracle_ted import oracle_ted
from stmtsim.cli import main as cli_main
from stmtsim.engine import SearchBudget, merge_to_equality, score_statement_pair, transted
from stmtsim.harness import (
    ConfusionMatrix,
    compute_metrics,
    confusion_matrix,
    load_benchmark,
    threshold_sweep,
)
from stmtsim.parser import parse_statement
from stmtsim.pseudometric import (
    INF,
    FiniteInstance,
    PseudometricTable,
    shortest_path_pseudometric,
    solve_max_pseudometric,
    verify_membership,
)
from stmtsim.ted import apply_edit_script, ted, ted_distance
from stmtsim.trees import OperatorTree, leaf, node


@contextmanager
def criterion(num: int, description: str):
    try:
        yield
    except BaseException:
        print(f"criterion {num} ({description}): FAIL")
        raise
    print(f"criterion {num} ({description}): PASS")


# -- 1: metric arithmetic ------------------------------------------------------

PUBLISHED_ROWS = [
    # (tp, tn, fp, fn, precision%, recall%, accuracy%, kappa)
    (27, 97, 0, 249, 100.00, 9.78, 33.24, 0.05),
    (276, 0, 97, 0, 73.99, 100.00, 73.99, 0.00),
    (174, 77, 20, 102, 89.69, 63.04, 67.29, 0.33),
    (170, 78, 19, 106, 89.95, 61.59, 66.49, 0.33),
    (92, 96, 1, 184, 98.92, 33.33, 50.40, 0.20),
    (135, 97, 0, 141, 100.00, 48.91, 62.20, 0.33),
    (206, 63, 34, 70, 85.83, 74.64, 72.12, 0.35),
    (235, 59, 38, 41, 86.08, 85.14, 78.82, 0.46),
    (1, 71, 0, 79, 100.00, 1.25, 47.68, 0.01),
    (80, 0, 71, 0, 52.98, 100.00, 52.98, 0.00),
    (61, 37, 34, 19, 64.21, 76.25, 64.90, 0.29),
    (51, 52, 19, 29, 72.86, 63.75, 68.21, 0.37),
    (8, 69, 2, 72, 80.00, 10.00, 50.99, 0.07),
    (23, 71, 0, 57, 100.00, 28.75, 62.25, 0.28),
    (64, 38, 33, 16, 65.98, 80.00, 67.55, 0.34),
    (70, 37, 34, 10, 67.31, 87.50, 70.86, 0.40),
]


def test_criterion_1_metric_arithmetic():
    with criterion(1, "metric arithmetic reproduces all 16 published rows"):
        for tp, tn, fp, fn, precision, recall, accuracy, kappa in PUBLISHED_ROWS:
            report = compute_metrics(ConfusionMatrix(tp, tn, fp, fn))
            assert abs(report.precision * 100 - precision) <= 0.005
            assert abs(report.recall * 100 - recall) <= 0.005
            assert abs(report.accuracy * 100 - accuracy) <= 0.005
            assert abs(report.kappa - kappa) <= 0.005


# -- 2: oracle equivalence -----------------------------------------------------


def _label_schemes(shape: OperatorTree):
    """Three deterministic labelings of a shape (trees come in as all-'a')."""
    yield shape  # uniform labels

    def by_depth(t: OperatorTree, depth: int) -> OperatorTree:
        lbl = "abc"[depth % 3]
        if t.children:
            return node(lbl, tuple(by_depth(c, depth + 1) for c in t.children))
        return leaf(lbl)

    yield by_depth(shape, 0)

    counter = itertools.count()

    def by_index(t: OperatorTree) -> OperatorTree:
        lbl = "abc"[next(counter) % 3]
        if t.children:
            return node(lbl, tuple(by_index(c) for c in t.children))
        return leaf(lbl)

    yield by_index(shape)


def _shapes(size: int):
    if size == 1:
        yield leaf("a")
        return
    for parts in _comps(size - 1):
        for kids in _kid_lists(parts):
            yield node("a", kids)


def _comps(total: int):
    if total == 0:
        yield ()
        return
    for head in range(1, total + 1):
        for rest in _comps(total - head):
            yield (head, *rest)


def _kid_lists(parts):
    if not parts:
        yield ()
        return
    for first in _shapes(parts[0]):
        for rest in _kid_lists(parts[1:]):
            yield (first, *rest)


def test_criterion_2_ted_oracle_equivalence():
    with criterion(2, "edit distance equals brute force; scripts replay"):
        small = [t for n in (1, 2, 3, 4) for t in all_trees(n)]
        assert len(small) == 471
        for idx, t1 in enumerate(small):
            for jdx in range(idx, len(small)):
                t2 = small[jdx]
                got = ted_distance(t1, t2)
                assert got == oracle_ted(t1, t2), (t1.render(), t2.render())
                if (idx * len(small) + jdx) % 997 == 0:
                    distance, script = ted(t1, t2)
                    assert distance == got
                    assert apply_edit_script(t1, script) == t2
                    assert script.cost() == distance

        labeled = [
            variant
            for size in (5, 6)
            for shape in _shapes(size)
            for variant in _label_schemes(shape)
        ]
        rng = random.Random(22025)
        for _ in range(6000):
            t1, t2 = rng.choice(labeled), rng.choice(labeled)
            assert ted_distance(t1, t2) == oracle_ted(t1, t2), (t1.render(), t2.render())

        rng = random.Random(8416)
        for k in range(1000):
            t1 = random_tree(rng, rng.randint(1, 8))
            t2 = random_tree(rng, rng.randint(1, 8))
            got = ted_distance(t1, t2)
            assert got == oracle_ted(t1, t2), (t1.render(), t2.render())
            distance, script = ted(t1, t2)
            assert distance == got
            assert apply_edit_script(t1, script) == t2
            assert script.cost() == distance


# -- 3: pseudometric axioms ----------------------------------------------------


def test_criterion_3_pseudometric_axioms():
    with criterion(3, "identity, symmetry, triangle over 10,000 random triples"):
        rng = random.Random(31337)
        for _ in range(10_000):
            a = random_tree(rng, rng.randint(1, 8))
            b = random_tree(rng, rng.randint(1, 8))
            c = random_tree(rng, rng.randint(1, 8))
            assert ted_distance(a, a) == 0
            ab = ted_distance(a, b)
            assert ab == ted_distance(b, a)
            assert ted_distance(a, c) <= ab + ted_distance(b, c)


# -- 4: domination and zero-exactness -------------------------------------------


def _corpus_pairs():
    pairs = list(PAIR_CORPUS)
    records = load_benchmark(FIXTURE_PATH)
    pairs.extend((r.label_stmt, r.pred_stmt) for r in records)
    return pairs


def test_criterion_4_domination_and_zero_exactness():
    with criterion(4, "search distance bounded by initial distance; proofs are exact zeros"):
        budget = SearchBudget(256, 30, None)
        for label_src, pred_src in _corpus_pairs():
            label, pred = parse_statement(label_src), parse_statement(pred_src)
            goal = merge_to_equality(label, pred)
            initial = ted_distance(goal.children[0], goal.children[1])
            result = transted(label, pred, budget)
            assert result.distance <= initial
            if result.proved_equal:
                assert result.distance == 0
                assert result.similarity == 1.0


# -- 5: worked examples ---------------------------------------------------------


def test_criterion_5_worked_examples():
    with criterion(5, "worked pairs: search closes both; plain similarity near prints"):
        budget = SearchBudget(10_000, 30, None)  # default node budget, clock off

        exercise = score_statement_pair(EXERCISE_LABEL, EXERCISE_PRED, budget)
        line = score_statement_pair(LINE_LABEL, LINE_PRED, budget)
        assert exercise.proved_equal and exercise.distance == 0 and exercise.similarity == 1.0
        assert line.proved_equal and line.distance == 0 and line.similarity == 1.0

        from stmtsim.engine import ted_statement_pair

        _, exercise_sim, _ = ted_statement_pair(EXERCISE_LABEL, EXERCISE_PRED)
        _, line_sim, _ = ted_statement_pair(LINE_LABEL, LINE_PRED)
        print(f"  measured plain similarities: exercise={exercise_sim}, line={line_sim}")

        # qualitative gap: plain metric under 0.5, search-augmented exactly 1
        assert exercise_sim < 0.5 < exercise.similarity == 1.0
        assert line_sim < 0.5 < line.similarity == 1.0

        assert abs(exercise_sim - 0.23809523809523814) <= 0.15
        # Known red: a source-syntax parser shares the quantifier spine and
        # the conclusion between these two statements, so its distance
        # cannot reach the published print (see the decisions ledger).
        assert abs(line_sim - (-0.03333333333333344)) <= 0.15


# -- 6: maximum-pseudometric oracle ---------------------------------------------


def _random_instance(rng: random.Random) -> FiniteInstance:
    n = rng.randint(2, 6)
    bound = [[INF] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j and rng.random() < 0.85:
                bound[i][j] = Fraction(0)
            elif rng.random() < 0.6:
                bound[i][j] = Fraction(rng.randint(0, 24), rng.randint(1, 4))
    constraints = tuple(
        ((rng.randrange(n), rng.randrange(n)), (rng.randrange(n), rng.randrange(n)))
        for _ in range(rng.randint(0, 8))
    )
    return FiniteInstance(tuple(f"p{k}" for k in range(n)), tuple(map(tuple, bound)), constraints)


def _shrunk(rng: random.Random, table: PseudometricTable) -> PseudometricTable:
    scale = Fraction(rng.randint(0, 8), 8)
    cap = Fraction(rng.randint(0, 40), 2)
    mode = rng.randrange(3)
    rows = []
    for row in table.values:
        out = []
        for v in row:
            if mode == 0:
                out.append(v * scale if v != INF else (INF if scale > 0 else Fraction(0)))
            elif mode == 1:
                out.append(min(v, cap))
            else:
                out.append(min(v * scale if v != INF else INF, cap))
        rows.append(tuple(out))
    return PseudometricTable(table.points, tuple(rows))


def test_criterion_6_maximum_pseudometric():
    with criterion(6, "solver output feasible, maximal over shrinks, matches shortest paths"):
        rng = random.Random(606)
        for _ in range(200):
            instance = _random_instance(rng)
            solved = solve_max_pseudometric(instance)
            assert verify_membership(instance, solved) == []
            n = len(instance.points)
            for _ in range(50):
                candidate = _shrunk(rng, solved)
                assert verify_membership(instance, candidate) == []
                for i in range(n):
                    for j in range(n):
                        assert candidate[i, j] <= solved[i, j]
            if not instance.constraints:
                symmetric = [
                    [min(instance.bound[i][j], instance.bound[j][i]) for j in range(n)]
                    for i in range(n)
                ]
                sp = shortest_path_pseudometric(instance.points, symmetric)
                assert solved.values == sp.values


# -- 7: threshold plateau --------------------------------------------------------

_TRUE_TEMPLATES = [
    ("theorem t{i} (a{i} b{i} c{i} : ℝ) : a{i} + b{i} = c{i} := by sorry",
     "theorem s{i} (a{i} b{i} c{i} : ℝ) : b{i} + a{i} = c{i} := by sorry"),
    ("theorem t{i} (p{i} q{i} r{i} : Prop) : p{i} ∧ q{i} → r{i} := by sorry",
     "theorem s{i} (p{i} q{i} r{i} : Prop) : p{i} → q{i} → r{i} := by sorry"),
    ("theorem t{i} (x{i} : ℝ) : x{i} * 2 = x{i} + x{i} := by sorry",
     "theorem s{i} (x{i} : ℝ) : 2 * x{i} = x{i} + x{i} := by sorry"),
    ("theorem t{i} (u{i} v{i} : ℚ) : u{i} * v{i} = v{i} * u{i} := by sorry",
     "theorem s{i} (u{i} v{i} : ℚ) : u{i} * v{i} = v{i} * u{i} := by sorry"),
]

_FALSE_TEMPLATES = [
    ("theorem t{i} (x{i} : ℝ) (h : Irrational x{i}) : Irrational (x{i} * x{i}) := by sorry",
     "theorem s{i} (n{i} : ℕ) : n{i} % 2 = 0 ∨ n{i} % 2 = 1 := by sorry"),
    ("theorem t{i} (p{i} q{i} : Prop) : p{i} ∨ q{i} → q{i} ∨ p{i} := by sorry",
     "theorem s{i} (x{i} y{i} : ℝ) : x{i} ^ 2 + y{i} ^ 2 ≥ 0 := by sorry"),
    ("theorem t{i} : (∑ k ∈ Finset.range 9, k) = 36 := by sorry",
     "theorem s{i} (f{i} : ℝ → ℝ) : (fun z{i} : ℝ => f{i} z{i}) = f{i} := by sorry"),
    ("theorem t{i} (a{i} : ℤ) : a{i} < a{i} + 1 := by sorry",
     "theorem s{i} (p{i} : Prop) : ¬ ¬ p{i} ↔ p{i} := by sorry"),
]


def test_criterion_7_threshold_plateau():
    with criterion(7, "kappa stays flat across the bimodal gap"):
        budget = SearchBudget(48, 20, None)
        scores: list[float] = []
        truths: list[bool] = []
        for i in range(25):
            for label_tpl, pred_tpl in _TRUE_TEMPLATES:
                result = score_statement_pair(label_tpl.format(i=i), pred_tpl.format(i=i), budget)
                assert result.similarity >= 0.9, "construction must put True pairs at 0.9+"
                scores.append(result.similarity)
                truths.append(True)
            for label_tpl, pred_tpl in _FALSE_TEMPLATES:
                result = score_statement_pair(label_tpl.format(i=i), pred_tpl.format(i=i), budget)
                assert result.similarity <= 0.6, "construction must keep False pairs at 0.6-"
                scores.append(result.similarity)
                truths.append(False)
        assert len(scores) == 200

        sweep = threshold_sweep(scores, truths)
        assert sweep.best_by_kappa is not None
        best_kappa = sweep.report_at(sweep.best_by_kappa).kappa
        for percent in range(61, 90):
            threshold = percent / 100
            predictions = [s >= threshold for s in scores]
            kappa = compute_metrics(confusion_matrix(predictions, truths)).kappa
            assert abs(kappa - best_kappa) <= 0.02


# -- 8: report determinism --------------------------------------------------------


def test_criterion_8_eval_determinism(tmp_path):
    with criterion(8, "eval reports byte-identical across runs and --jobs"):
        outputs = []
        reports = []
        for run_idx, jobs in enumerate(("1", "1", "8", "8")):
            out = tmp_path / f"report{run_idx}.csv"
            result = CliRunner().invoke(
                cli_main,
                [
                    "eval", str(FIXTURE_PATH), "--metric", "transted", "--sweep",
                    "--max-nodes", "48", "--jobs", jobs, "--no-plot",
                    "--out", str(out),
                ],
            )
            assert result.exit_code == 0, result.output
            outputs.append(result.output.replace(str(out), "OUT"))
            reports.append(out.read_bytes())
        assert len(set(reports)) == 1
        assert len(set(outputs)) == 1
