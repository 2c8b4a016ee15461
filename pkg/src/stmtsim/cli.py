"""Command-line surface.

Subcommands: ``parse`` (statement -> canonical tree JSON), ``ted`` and
``transted`` (single-pair scores), ``eval`` (benchmark scoring, threshold
sweeps, CSV/JSON reports with an optional figure), ``oracle`` (finite
pseudometric instances).

Exit codes are stable across subcommands: 0 success, 2 input or parse
error, 3 I/O error, 4 budget misconfiguration.
"""
from __future__ import annotations

import functools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import harness
from .engine import BudgetError, SearchBudget, score_statement_pair, ted_statement_pair
from .harness import FormatError
from .lexer import LexError
from .opt import statement_opt
from .parser import ParseError
from .pseudometric import load_instance, solve_max_pseudometric, table_to_obj, verify_membership
from .rules import RuleError, default_library, load_rules
from .ted import ted

EXIT_INPUT = 2
EXIT_IO = 3
EXIT_BUDGET = 4

_INPUT_ERRORS = (LexError, ParseError, FormatError, harness.DuplicateIdError, RuleError, json.JSONDecodeError, ValueError)


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BudgetError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_BUDGET)
        except _INPUT_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_IO)

    return wrapper


@click.group()
def main():
    """Structural similarity for formal theorem statements."""


def _read_statement(text: str, from_file: bool) -> str:
    if from_file:
        return Path(text).read_text(encoding="utf-8")
    return text


def _caret_diagnostic(source: str, span: tuple[int, int]) -> str:
    raw = source.encode("utf-8")
    prefix = raw[: span[0]].decode("utf-8", errors="replace")
    width = max(1, len(raw[span[0] : span[1]].decode("utf-8", errors="replace")))
    line = source.splitlines()[prefix.count("\n")] if source else ""
    col = len(prefix.split("\n")[-1])
    return f"{line}\n{' ' * col}{'^' * width}"


def _full(value: float) -> str:
    return repr(float(value))


def _display(value: float) -> str:
    return f"{value:.2f}"


def _load_library(rules_path: str | None):
    if rules_path:
        return load_rules(rules_path)
    return default_library()


@main.command("parse")
@click.argument("statement")
@click.option("--from-file", is_flag=True, help="Treat STATEMENT as a path to read.")
@_exit_codes
def cmd_parse(statement: str, from_file: bool):
    """Print the canonical tree JSON for one statement."""
    source = _read_statement(statement, from_file)
    try:
        tree = statement_opt(source)
    except (LexError, ParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        click.echo(_caret_diagnostic(source, exc.span), err=True)
        sys.exit(EXIT_INPUT)
    click.echo(tree.to_json())


@main.command("ted")
@click.argument("stmt1")
@click.argument("stmt2")
@click.option("--files", is_flag=True, help="Treat the arguments as paths.")
@click.option("--script", "with_script", is_flag=True, help="Also print the edit script as JSON.")
@_exit_codes
def cmd_ted(stmt1: str, stmt2: str, files: bool, with_script: bool):
    """Edit distance and similarity between two statements."""
    t1 = statement_opt(_read_statement(stmt1, files))
    t2 = statement_opt(_read_statement(stmt2, files))
    distance, script = ted(t1, t2)
    similarity = 1 - distance / max(t1.size, t2.size)
    click.echo(f"distance {distance}, similarity {_full(similarity)} ({_display(similarity)})")
    if with_script:
        ops = []
        for op in script.ops:
            entry = {"op": type(op).__name__.removesuffix("Op").lower()}
            entry.update({k: list(v) if isinstance(v, tuple) else v for k, v in op.__dict__.items()})
            ops.append(entry)
        click.echo(json.dumps(ops, ensure_ascii=False))


def _format_trace(trace) -> str:
    steps = [f"{name}@{'.'.join(map(str, pos)) if pos else 'root'}" for name, pos in trace]
    return "[" + ", ".join(steps) + "]"


@main.command("transted")
@click.argument("stmt1")
@click.argument("stmt2")
@click.option("--files", is_flag=True, help="Treat the arguments as paths.")
@click.option("--max-nodes", default=10_000, show_default=True, help="Search budget in expanded nodes.")
@click.option("--max-depth", default=30, show_default=True)
@click.option("--max-seconds", default=None, type=float, help="Advisory wall-clock limit (off by default).")
@click.option("--rules", "rules_path", envvar="STMTSIM_RULES", default=None, help="Rule library JSON path.")
@_exit_codes
def cmd_transted(stmt1, stmt2, files, max_nodes, max_depth, max_seconds, rules_path):
    """Transformation-augmented distance between two statements."""
    budget = SearchBudget(max_nodes, max_depth, max_seconds)
    library = _load_library(rules_path)
    result = score_statement_pair(
        _read_statement(stmt1, files), _read_statement(stmt2, files), budget, library
    )
    click.echo(
        f"distance {result.distance}, similarity {_full(result.similarity)} ({_display(result.similarity)}), "
        f"proved: {'true' if result.proved_equal else 'false'}, trace: {_format_trace(result.trace)}"
    )
    click.echo(f"expanded {result.expanded}" + (", degraded" if result.degraded else ""))


def _transted_worker(args):
    label, pred, max_nodes, max_depth, rules_path = args
    budget = SearchBudget(max_nodes, max_depth, None)
    library = _load_library(rules_path)
    result = score_statement_pair(label, pred, budget, library)
    return result.similarity, result.degraded


def _ted_worker(args):
    label, pred = args[0], args[1]
    _, similarity, degraded = ted_statement_pair(label, pred)
    return similarity, degraded


@main.command("eval")
@click.argument("benchmark")
@click.option("--metric", type=click.Choice(["ted", "transted", "external"]), default="transted", show_default=True)
@click.option("--scores", "scores_path", default=None, help="JSONL {id, score} file for --metric external.")
@click.option("--policy", type=click.Choice(list(harness.POLICIES)), default="strict", show_default=True)
@click.option("--sweep", is_flag=True, help="Evaluate every distinguishable threshold.")
@click.option("--threshold", default=0.5, show_default=True, help="Decision threshold when not sweeping.")
@click.option("--out", "out_path", default=None, help="Write the report here (stdout otherwise).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--jobs", default=1, show_default=True, help="Worker processes for scoring.")
@click.option("--plot/--no-plot", default=True, show_default=True, help="Render a figure beside a swept report.")
@click.option("--max-nodes", default=256, show_default=True, help="Per-record search budget; batches default lower than single pairs.")
@click.option("--max-depth", default=30, show_default=True)
@click.option("--rules", "rules_path", envvar="STMTSIM_RULES", default=None)
@_exit_codes
def cmd_eval(benchmark, metric, scores_path, policy, sweep, threshold, out_path, fmt, jobs, plot, max_nodes, max_depth, rules_path):
    """Score an annotated benchmark and report classification metrics.

    Scoring is reproducible under the node-count budget regardless of
    --jobs; the wall-clock limit is disabled here for that reason.
    """
    records = harness.load_benchmark(benchmark)
    if not records:
        raise FormatError("benchmark has no records")

    if metric == "external":
        if not scores_path:
            raise click.UsageError("--metric external needs --scores")
        entries = harness.apply_external_scores(records, harness.load_external_scores(scores_path))
    else:
        worker = _transted_worker if metric == "transted" else _ted_worker
        args = [(r.label_stmt, r.pred_stmt, max_nodes, max_depth, rules_path) for r in records]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(worker, args))
        else:
            outcomes = [worker(a) for a in args]
        entries = [
            harness.ScoreEntry(r.id, score, degraded=degraded)
            for r, (score, degraded) in zip(records, outcomes)
        ]

    scored = [(r, e) for r, e in zip(records, entries) if e.score is not None]
    errors = [(r, e) for r, e in zip(records, entries) if e.score is None]
    degraded = sum(1 for _, e in scored if e.degraded)
    if not scored:
        raise FormatError("no record could be scored")

    truths = [harness.binarize(r.annotation, policy) for r, _ in scored]
    scores = [e.score for _, e in scored]

    if sweep:
        result = harness.threshold_sweep(scores, truths)
        summary = (
            f"records {len(records)}, scored {len(scored)}, errors {len(errors)}, degraded {degraded}; "
            f"best-by-kappa {harness._num(result.best_by_kappa)}, "
            f"best-by-accuracy {harness._num(result.best_by_accuracy)}"
        )
    else:
        predictions = [s >= threshold for s in scores]
        result = harness.compute_metrics(harness.confusion_matrix(predictions, truths))
        summary = (
            f"records {len(records)}, scored {len(scored)}, errors {len(errors)}, degraded {degraded}; "
            f"threshold {threshold}: accuracy {harness._num(result.accuracy)}"
            + (f" ({_display(result.accuracy * 100)}%)" if result.accuracy is not None else "")
            + (f", kappa {harness._num(result.kappa)} ({_display(result.kappa)})" if result.kappa is not None else "")
        )

    document = harness.emit_report(result, fmt)
    if out_path:
        Path(out_path).write_text(document, encoding="utf-8")
        click.echo(f"report written to {out_path}")
        if sweep and plot:
            figure_path = str(Path(out_path).with_suffix(".png"))
            from .plotting import render_sweep_figure

            render_sweep_figure(result, figure_path, title=f"{metric} threshold sweep")
            click.echo(f"figure written to {figure_path}")
    else:
        click.echo(document, nl=False)
    for record, entry in errors:
        click.echo(f"error record {record.id}: {entry.error}", err=True)
    click.echo(summary)


@main.command("oracle")
@click.argument("instance")
@_exit_codes
def cmd_oracle(instance: str):
    """Solve a finite pseudometric instance and verify the solution."""
    inst = load_instance(instance)
    table = solve_max_pseudometric(inst)
    violations = verify_membership(inst, table)
    doc = table_to_obj(table)
    doc["violations"] = [
        {"kind": v.kind, "witness": list(v.witness), "detail": v.detail} for v in violations
    ]
    click.echo(json.dumps(doc, ensure_ascii=False, indent=2))


if __name__ == "__main__":
    main()
