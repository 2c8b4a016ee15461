"""Finite instances of the bounded, constraint-monotone pseudometric problem.

Given a finite point set, an upper-bound table ``b`` over the extended
non-negative rationals, and constraint pairs requiring
``d(x, y) <= d(u, v)``, the feasible set (pseudometrics below ``b``
satisfying every constraint) has a unique pointwise-maximum element.  On
finite instances that maximum is the greatest fixed point of a monotone
lowering operator, computed here by iterating full passes — identity,
symmetrization, triangle closure, constraint relaxation — until nothing
changes.

Arithmetic is exact: rationals plus a distinguished infinity, where
``inf + r = inf`` and ``min(inf, r) = r``; infinities are never
subtracted.  Instances are independent computations and safe to run
concurrently.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "INF",
    "FiniteInstance",
    "PseudometricTable",
    "Violation",
    "shortest_path_pseudometric",
    "solve_max_pseudometric",
    "verify_membership",
    "load_instance",
    "loads_instance",
    "table_to_obj",
]

INF = math.inf


def _parse_value(raw) -> Fraction | float:
    if raw == "inf" or raw == math.inf:
        return INF
    if isinstance(raw, bool):
        raise ValueError(f"not a distance value: {raw!r}")
    if isinstance(raw, Fraction):
        value = raw
    elif isinstance(raw, int):
        value = Fraction(raw)
    elif isinstance(raw, float):
        value = Fraction(str(raw))
    elif isinstance(raw, str):
        value = Fraction(raw)
    else:
        raise ValueError(f"not a distance value: {raw!r}")
    if value < 0:
        raise ValueError(f"distances are non-negative, got {raw!r}")
    return value


def _value_obj(value):
    if value == INF:
        return "inf"
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return str(value)


@dataclass(frozen=True)
class FiniteInstance:
    points: tuple[str, ...]
    bound: tuple[tuple[Fraction | float, ...], ...]
    constraints: tuple[tuple[tuple[int, int], tuple[int, int]], ...]

    def __post_init__(self):
        n = len(self.points)
        if len(self.bound) != n or any(len(row) != n for row in self.bound):
            raise ValueError("bound table must be square over the points")
        for (x, y), (u, v) in self.constraints:
            for idx in (x, y, u, v):
                if not 0 <= idx < n:
                    raise ValueError(f"constraint index {idx} out of range")


@dataclass(frozen=True)
class PseudometricTable:
    points: tuple[str, ...]
    values: tuple[tuple[Fraction | float, ...], ...]

    def __getitem__(self, pair: tuple[int, int]):
        return self.values[pair[0]][pair[1]]


@dataclass(frozen=True)
class Violation:
    kind: str  # identity | symmetry | triangle | bound | constraint
    witness: tuple[int, ...]
    detail: str


def shortest_path_pseudometric(points, weights) -> PseudometricTable:
    """All-pairs shortest-path distances over a symmetric weight table.

    Pairs with no finite path stay at infinity (the infimum over an empty
    path set).  The diagonal is 0 by convention.
    """
    points = tuple(points)
    n = len(points)
    d = [[_parse_value(weights[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if d[i][j] != d[j][i]:
                raise ValueError(f"weights must be symmetric; differ at ({i}, {j})")
    for i in range(n):
        d[i][i] = Fraction(0)
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == INF:
                continue
            row = d[i]
            for j in range(n):
                if dk[j] == INF:
                    continue
                via = dik + dk[j]
                if via < row[j]:
                    row[j] = via
    return PseudometricTable(points, tuple(tuple(row) for row in d))


def solve_max_pseudometric(instance: FiniteInstance) -> PseudometricTable:
    """Greatest feasible pseudometric under the instance's bound and
    constraints: start from the bound and lower entries until every
    condition holds.  Each pass only lowers values; the pass count is
    bounded and convergence asserted."""
    n = len(instance.points)
    d = [list(row) for row in instance.bound]
    max_passes = n * n * (len(instance.constraints) + n) + 2

    for _ in range(max_passes):
        changed = False
        for i in range(n):
            if d[i][i] != 0:
                d[i][i] = Fraction(0)
                changed = True
        for i in range(n):
            for j in range(i + 1, n):
                low = min(d[i][j], d[j][i])
                if d[i][j] != low or d[j][i] != low:
                    d[i][j] = d[j][i] = low
                    changed = True
        for k in range(n):
            for i in range(n):
                if d[i][k] == INF:
                    continue
                for j in range(n):
                    if d[k][j] == INF:
                        continue
                    via = d[i][k] + d[k][j]
                    if via < d[i][j]:
                        d[i][j] = via
                        changed = True
        for (x, y), (u, v) in instance.constraints:
            if d[u][v] < d[x][y]:
                d[x][y] = d[u][v]
                changed = True
        if not changed:
            break
    else:
        raise RuntimeError("fixed point did not converge within the pass bound")

    return PseudometricTable(instance.points, tuple(tuple(row) for row in d))


def verify_membership(instance: FiniteInstance, candidate: PseudometricTable) -> list[Violation]:
    """Every violated pseudometric axiom, bound, or constraint, with
    witnesses.  An empty report means the candidate is feasible."""
    if candidate.points != instance.points:
        raise ValueError("candidate table is over different points")
    n = len(instance.points)
    d = candidate.values
    out: list[Violation] = []
    for i in range(n):
        if d[i][i] != 0:
            out.append(Violation("identity", (i,), f"d({i},{i}) = {d[i][i]} != 0"))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                out.append(Violation("symmetry", (i, j), f"d({i},{j}) = {d[i][j]} != d({j},{i}) = {d[j][i]}"))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                left = d[i][k]
                if d[i][j] == INF or d[j][k] == INF:
                    continue  # an infinite right side bounds everything
                if left > d[i][j] + d[j][k]:
                    out.append(
                        Violation(
                            "triangle",
                            (i, j, k),
                            f"d({i},{k}) = {left} > {d[i][j]} + {d[j][k]}",
                        )
                    )
    for i in range(n):
        for j in range(n):
            if d[i][j] > instance.bound[i][j]:
                out.append(Violation("bound", (i, j), f"d({i},{j}) = {d[i][j]} > b = {instance.bound[i][j]}"))
    for (x, y), (u, v) in instance.constraints:
        if d[x][y] > d[u][v]:
            out.append(Violation("constraint", (x, y, u, v), f"d({x},{y}) = {d[x][y]} > d({u},{v}) = {d[u][v]}"))
    return out


def loads_instance(text: str) -> FiniteInstance:
    obj = json.loads(text)
    points = tuple(obj["points"])
    bound = tuple(tuple(_parse_value(v) for v in row) for row in obj["bound"])
    constraints = tuple(
        ((pair[0][0], pair[0][1]), (pair[1][0], pair[1][1])) for pair in obj.get("constraints", [])
    )
    return FiniteInstance(points, bound, constraints)


def load_instance(path) -> FiniteInstance:
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read())


def table_to_obj(table: PseudometricTable) -> dict:
    return {
        "points": list(table.points),
        "distance": [[_value_obj(v) for v in row] for row in table.values],
    }
