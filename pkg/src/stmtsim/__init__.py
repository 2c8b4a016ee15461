"""Structural similarity for formal theorem statements.

Statements parse into labeled ordered operator trees; distances between
trees come from the exact ordered tree edit distance, optionally tightened
by a budgeted search over semantics-preserving rewrites; an evaluation
harness scores metrics against annotated statement-pair benchmarks.
"""

from .engine import (
    DEFAULT_BUDGET,
    BudgetError,
    SearchBudget,
    SearchNode,
    TransTedResult,
    enumerate_children,
    merge_to_equality,
    score_statement_pair,
    ted_statement_pair,
    transted,
    transted_similarity,
)
from .harness import (
    AnnotationLabel,
    BenchmarkRecord,
    ConfusionMatrix,
    DuplicateIdError,
    FormatError,
    MetricsReport,
    ScoreEntry,
    SweepResult,
    apply_external_scores,
    binarize,
    compute_metrics,
    confusion_matrix,
    emit_report,
    load_benchmark,
    load_external_scores,
    score_dataset,
    threshold_sweep,
)
from .lexer import LexError, Token, tokenize
from .opt import build_opt, statement_opt, token_fallback_tree
from .parser import Binder, BinderKind, ParseError, StatementAst, parse_statement
from .pseudometric import (
    INF,
    FiniteInstance,
    PseudometricTable,
    Violation,
    load_instance,
    shortest_path_pseudometric,
    solve_max_pseudometric,
    verify_membership,
)
from .rules import (
    RewriteRule,
    RuleError,
    RuleLibrary,
    apply_rule,
    cast_collapse,
    const_fold,
    default_library,
    dumps_rules,
    load_rules,
    loads_rules,
)
from .ted import (
    UNIT_COSTS,
    DeleteOp,
    EditCosts,
    EditScript,
    InsertOp,
    RelabelOp,
    apply_edit_script,
    ted,
    ted_distance,
    ted_similarity,
    tree_size,
)
from .trees import SLOT, OperatorTree, from_json, leaf, node

__version__ = "0.1.0"
