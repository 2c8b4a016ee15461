"""Benchmark ingestion, label binarization, scoring, and classification metrics.

Benchmarks are JSON Lines files of expert-annotated statement pairs; each
record carries a five-way annotation crossing semantic provability with
structural likeness:

    a  mutually provable, alike
    b  mutually provable, unalike
    c  not mutually provable, alike
    d  not mutually provable, alike after semantics-preserving rewrites
    e  not mutually provable, unalike

Binarization maps those onto True/False under a policy: ``strict`` accepts
a and b; ``human_in_loop`` accepts a through d.  Continuous similarity
scores become predictions via a threshold (score >= threshold is True);
the sweep evaluates every distinguishable threshold — the midpoints of
adjacent distinct scores bracketed by the two infinities — so inserting
further thresholds can never change a confusion matrix.

Scoring a record list is embarrassingly parallel and aggregation is
order-independent; reports must come out byte-identical either way.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

__all__ = [
    "AnnotationLabel",
    "BenchmarkRecord",
    "ConfusionMatrix",
    "MetricsReport",
    "SweepResult",
    "ScoreEntry",
    "FormatError",
    "DuplicateIdError",
    "load_benchmark",
    "loads_benchmark",
    "binarize",
    "score_dataset",
    "load_external_scores",
    "apply_external_scores",
    "confusion_matrix",
    "compute_metrics",
    "threshold_sweep",
    "emit_report",
]


class FormatError(Exception):
    """Malformed benchmark or scores file."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class DuplicateIdError(Exception):
    pass


class AnnotationLabel(enum.Enum):
    PROVABLE_LIKE = "a"
    PROVABLE_UNLIKE = "b"
    UNPROVABLE_LIKE = "c"
    UNPROVABLE_LIKE_AFTER_REWRITE = "d"
    UNPROVABLE_UNLIKE = "e"


_STRICT_TRUE = {AnnotationLabel.PROVABLE_LIKE, AnnotationLabel.PROVABLE_UNLIKE}
_LOOP_FALSE = {AnnotationLabel.UNPROVABLE_UNLIKE}

POLICIES = ("strict", "human_in_loop")


def binarize(label: AnnotationLabel, policy: str) -> bool:
    """strict: {a, b} are True; human_in_loop: everything but e is True."""
    if policy == "strict":
        return label in _STRICT_TRUE
    if policy == "human_in_loop":
        return label not in _LOOP_FALSE
    raise ValueError(f"unknown policy {policy!r}")


@dataclass(frozen=True)
class BenchmarkRecord:
    id: str
    source: str
    nl: str
    label_stmt: str
    pred_stmt: str
    annotation: AnnotationLabel


_REQUIRED_FIELDS = ("id", "source", "nl", "label_stmt", "pred_stmt", "annotation")


def loads_benchmark(text: str) -> list[BenchmarkRecord]:
    records: list[BenchmarkRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON ({exc.msg})", lineno) from exc
        if not isinstance(obj, dict):
            raise FormatError("record must be a JSON object", lineno)
        for field in _REQUIRED_FIELDS:
            if field not in obj:
                raise FormatError(f"missing field {field!r}", lineno)
        try:
            annotation = AnnotationLabel(obj["annotation"])
        except ValueError as exc:
            raise FormatError(f"annotation must be one of a..e, got {obj['annotation']!r}", lineno) from exc
        if not obj["label_stmt"] or not obj["pred_stmt"]:
            raise FormatError("statements must be nonempty", lineno)
        if obj["id"] in seen:
            raise DuplicateIdError(f"duplicate record id {obj['id']!r} at line {lineno}")
        seen.add(obj["id"])
        records.append(
            BenchmarkRecord(
                id=obj["id"],
                source=obj["source"],
                nl=obj["nl"],
                label_stmt=obj["label_stmt"],
                pred_stmt=obj["pred_stmt"],
                annotation=annotation,
            )
        )
    return records


def load_benchmark(path) -> list[BenchmarkRecord]:
    """Parse a JSONL benchmark; rejects duplicate ids and bad records."""
    with open(path, encoding="utf-8") as fh:
        return loads_benchmark(fh.read())


@dataclass(frozen=True)
class ScoreEntry:
    id: str
    score: float | None
    error: str | None = None
    degraded: bool = False


def score_dataset(
    records: Sequence[BenchmarkRecord],
    scorer: Callable[[str, str], float],
) -> list[ScoreEntry]:
    """One entry per record, order preserved.

    A scorer failure becomes a per-record error entry; the batch always
    completes.  A scorer may return ``(score, degraded)`` to flag records
    scored through a fallback path.
    """
    return [_score_one(record, scorer) for record in records]


def _score_one(record: BenchmarkRecord, scorer: Callable[[str, str], float]) -> ScoreEntry:
    try:
        value = scorer(record.label_stmt, record.pred_stmt)
    except Exception as exc:
        return ScoreEntry(record.id, None, error=f"{type(exc).__name__}: {exc}")
    if isinstance(value, tuple):
        score, degraded = value
        return ScoreEntry(record.id, float(score), degraded=degraded)
    return ScoreEntry(record.id, float(value))


def load_external_scores(path) -> dict[str, float]:
    """{id: score} from a JSONL file of {id, score} rows."""
    table: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON ({exc.msg})", lineno) from exc
            if "id" not in obj or "score" not in obj:
                raise FormatError("scores rows need 'id' and 'score'", lineno)
            table[obj["id"]] = float(obj["score"])
    return table


def apply_external_scores(records: Sequence[BenchmarkRecord], table: dict[str, float]) -> list[ScoreEntry]:
    """Entries from precomputed scores; a missing id becomes an error entry."""
    entries: list[ScoreEntry] = []
    for record in records:
        if record.id in table:
            entries.append(ScoreEntry(record.id, table[record.id]))
        else:
            entries.append(ScoreEntry(record.id, None, error=f"no external score for id {record.id!r}"))
    return entries


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion_matrix(predictions: Sequence[bool], truths: Sequence[bool]) -> ConfusionMatrix:
    if len(predictions) != len(truths):
        raise ValueError("predictions and truths differ in length")
    tp = tn = fp = fn = 0
    for p, t in zip(predictions, truths):
        if p and t:
            tp += 1
        elif p:
            fp += 1
        elif t:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, tn, fp, fn)


@dataclass(frozen=True)
class MetricsReport:
    """Precision/recall/accuracy as fractions of 1, kappa in [-1, 1].

    Undefined fields (empty predicted or actual class) are None and render
    as ``n/a``; everything else is kept at full precision, rounding only
    at display time.
    """

    matrix: ConfusionMatrix
    precision: float | None
    recall: float | None
    accuracy: float
    kappa: float | None


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Two-class metrics with chance-corrected agreement.

    Kappa is (p_o - p_e) / (1 - p_e) with expected agreement from the
    marginals; it is 0 by convention whenever the marginals make chance
    agreement certain (one predicted class empty and degenerate truths).
    """
    total = cm.total
    if total <= 0:
        raise ValueError("confusion matrix is empty")
    tp, tn, fp, fn = Fraction(cm.tp), Fraction(cm.tn), Fraction(cm.fp), Fraction(cm.fn)
    n = Fraction(total)
    precision = None if cm.tp + cm.fp == 0 else tp / (tp + fp)
    recall = None if cm.tp + cm.fn == 0 else tp / (tp + fn)
    accuracy = (tp + tn) / n
    p_e = ((tp + fp) * (tp + fn) + (tn + fn) * (tn + fp)) / (n * n)
    if p_e == 1:
        kappa = 0.0
    else:
        kappa = float((accuracy - p_e) / (1 - p_e))
    return MetricsReport(
        matrix=cm,
        precision=None if precision is None else float(precision),
        recall=None if recall is None else float(recall),
        accuracy=float(accuracy),
        kappa=kappa,
    )


@dataclass(frozen=True)
class SweepResult:
    """Metrics at every distinguishable threshold (strictly increasing).

    Ties for the best threshold break toward the larger threshold; with
    single-class truths kappa is uninformative and the bests are None.
    """

    rows: tuple[tuple[float, MetricsReport], ...]
    best_by_kappa: float | None
    best_by_accuracy: float | None

    def report_at(self, threshold: float) -> MetricsReport:
        for t, report in self.rows:
            if t == threshold:
                return report
        raise KeyError(f"threshold {threshold!r} not in sweep")


def candidate_thresholds(scores: Sequence[float]) -> list[float]:
    distinct = sorted(set(scores))
    mids = [(a + b) / 2 for a, b in zip(distinct, distinct[1:])]
    return [-math.inf, *mids, math.inf]


def threshold_sweep(scores: Sequence[float], truths: Sequence[bool]) -> SweepResult:
    """Evaluate ``score >= threshold`` across all candidate thresholds."""
    if len(scores) != len(truths):
        raise ValueError("scores and truths differ in length")
    if not scores:
        raise ValueError("nothing to sweep")
    rows = []
    for threshold in candidate_thresholds(scores):
        predictions = [s >= threshold for s in scores]
        rows.append((threshold, compute_metrics(confusion_matrix(predictions, truths))))
    degenerate = len(set(truths)) < 2
    best_kappa = None
    best_accuracy = None
    if not degenerate:
        best_kappa = max(rows, key=lambda r: (r[1].kappa, r[0]))[0]
        best_accuracy = max(rows, key=lambda r: (r[1].accuracy, r[0]))[0]
    return SweepResult(tuple(rows), best_kappa, best_accuracy)


# -- reports ----------------------------------------------------------------

_CSV_COLUMNS = ("threshold", "tp", "tn", "fp", "fn", "precision", "recall", "accuracy", "kappa")


def _num(value: float | None) -> str:
    if value is None:
        return "n/a"
    if value == math.inf:
        return "inf"
    if value == -math.inf:
        return "-inf"
    return repr(value)


def _json_num(value: float | None):
    if value is None:
        return None
    if value == math.inf:
        return "inf"
    if value == -math.inf:
        return "-inf"
    return value


def _report_row(threshold: float | None, report: MetricsReport) -> dict:
    cm = report.matrix
    return {
        "threshold": _json_num(threshold),
        "tp": cm.tp,
        "tn": cm.tn,
        "fp": cm.fp,
        "fn": cm.fn,
        "precision": _json_num(report.precision),
        "recall": _json_num(report.recall),
        "accuracy": _json_num(report.accuracy),
        "kappa": _json_num(report.kappa),
    }


def emit_report(result: "SweepResult | MetricsReport", format: str = "csv") -> str:
    """Deterministic CSV or JSON document for a sweep or a single report."""
    if isinstance(result, SweepResult):
        rows = list(result.rows)
        extra = {
            "best_by_kappa": _json_num(result.best_by_kappa),
            "best_by_accuracy": _json_num(result.best_by_accuracy),
        }
    else:
        rows = [(None, result)]
        extra = {}

    if format == "json":
        doc = {"rows": [_report_row(t, rep) for t, rep in rows], **extra}
        return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for threshold, report in rows:
            cm = report.matrix
            writer.writerow(
                [
                    "" if threshold is None else _num(threshold),
                    cm.tp,
                    cm.tn,
                    cm.fp,
                    cm.fn,
                    _num(report.precision),
                    _num(report.recall),
                    _num(report.accuracy),
                    _num(report.kappa),
                ]
            )
        return buf.getvalue()
    raise ValueError(f"unknown report format {format!r}")


def parse_report_json(text: str) -> dict:
    """Inverse of the JSON emitter (used by round-trip checks)."""
    return json.loads(text)
