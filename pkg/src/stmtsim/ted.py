"""Ordered tree edit distance with edit-script recovery.

The distance is the exact minimum cost of delete / insert / relabel
operations turning one tree into the other (delete reattaches the node's
children to its parent in order; insert is its inverse).  The
implementation is the classical keyroot dynamic program of Zhang and
Shasha; trees here are small (tens of nodes), so exactness is cheap.

Costs are exact rationals; delete and insert must cost the same so the
distance is symmetric.  Similarity converts to float only on return.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .trees import OperatorTree, tree_size

__all__ = [
    "EditCosts",
    "UNIT_COSTS",
    "DeleteOp",
    "InsertOp",
    "RelabelOp",
    "EditScript",
    "tree_size",
    "ted",
    "ted_distance",
    "ted_similarity",
    "apply_edit_script",
]


@dataclass(frozen=True)
class EditCosts:
    delete: Fraction
    insert: Fraction
    relabel: Fraction

    def __post_init__(self):
        for field in ("delete", "insert", "relabel"):
            value = getattr(self, field)
            if not isinstance(value, Fraction):
                object.__setattr__(self, field, Fraction(value))
            if getattr(self, field) < 0:
                raise ValueError(f"{field} cost must be non-negative")
        if self.delete != self.insert:
            raise ValueError("delete and insert costs must be equal (symmetry)")


UNIT_COSTS = EditCosts(Fraction(1), Fraction(1), Fraction(1))


@dataclass(frozen=True)
class DeleteOp:
    """Remove the node at ``path``; its children splice into its parent."""

    path: tuple[int, ...]


@dataclass(frozen=True)
class InsertOp:
    """Insert a node under ``parent`` at ``index`` adopting ``count``
    existing children starting there.  An empty ``parent`` path addresses
    the top level, which allows a new root."""

    label: str
    parent: tuple[int, ...]
    index: int
    count: int


@dataclass(frozen=True)
class RelabelOp:
    path: tuple[int, ...]
    label: str


@dataclass(frozen=True)
class EditScript:
    ops: tuple[DeleteOp | InsertOp | RelabelOp, ...]

    def cost(self, costs: EditCosts = UNIT_COSTS):
        total = Fraction(0)
        for op in self.ops:
            if isinstance(op, DeleteOp):
                total += costs.delete
            elif isinstance(op, InsertOp):
                total += costs.insert
            else:
                total += costs.relabel
        return _as_int(total)

    def __len__(self) -> int:
        return len(self.ops)


def _as_int(value):
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    return value


# -- core dynamic program -------------------------------------------------


class _Flat:
    """Postorder arrays for one tree (1-based, classic formulation)."""

    __slots__ = ("labels", "lml", "keyroots", "n", "paths")

    def __init__(self, root: OperatorTree):
        labels: list[str] = [""]  # index 0 unused
        lml: list[int] = [0]
        paths: list[tuple[int, ...]] = [()]

        def walk(t: OperatorTree, path: tuple[int, ...]) -> int:
            first_leaf = 0
            for i, c in enumerate(t.children):
                child_leaf = walk(c, path + (i,))
                if first_leaf == 0:
                    first_leaf = child_leaf
            labels.append(t.label)
            paths.append(path)
            idx = len(labels) - 1
            lml.append(first_leaf if first_leaf else idx)
            return lml[idx]

        walk(root, ())
        self.labels = labels
        self.lml = lml
        self.paths = paths
        self.n = len(labels) - 1
        seen: set[int] = set()
        keyroots: list[int] = []
        for i in range(self.n, 0, -1):
            if lml[i] not in seen:
                seen.add(lml[i])
                keyroots.append(i)
        keyroots.reverse()
        self.keyroots = keyroots


# Flattening is pure per tree; trees hash structurally, so a small cache
# pays off across the many heuristic calls on shared subproblems.
@lru_cache(maxsize=8192)
def _flat_of(tree: OperatorTree) -> _Flat:
    return _Flat(tree)


def _unit_treedist(a: _Flat, b: _Flat) -> int:
    """Unit-cost distance, integer arithmetic, interned labels.

    Same recurrence as :func:`_forest_table`; tightened because this runs
    inside the search heuristic.
    """
    intern: dict[str, int] = {}
    la = [intern.setdefault(s, len(intern)) for s in a.labels]
    lb = [intern.setdefault(s, len(intern)) for s in b.labels]
    alml, blml = a.lml, b.lml
    n1, n2 = a.n, b.n
    td = [[0] * (n2 + 1) for _ in range(n1 + 1)]

    # One shared forest buffer, reused across keyroot subproblems.
    fd = [[0] * (n2 + 2) for _ in range(n1 + 2)]

    for i in a.keyroots:
        li = a.lml[i]
        m = i - li + 1
        for j in b.keyroots:
            lj = b.lml[j]
            n = j - lj + 1
            row0 = fd[0]
            row0[0] = 0
            for y in range(1, n + 1):
                row0[y] = y
            for x in range(1, m + 1):
                ai = li + x - 1
                a_whole = alml[ai] == li
                ai_label = la[ai]
                ai_off = alml[ai] - li
                td_ai = td[ai]
                prev = fd[x - 1]
                cur = fd[x]
                cur[0] = x
                for y in range(1, n + 1):
                    bj = lj + y - 1
                    if a_whole and blml[bj] == lj:
                        best = prev[y - 1] + (0 if ai_label == lb[bj] else 1)
                        alt = prev[y] + 1
                        if alt < best:
                            best = alt
                        alt = cur[y - 1] + 1
                        if alt < best:
                            best = alt
                        cur[y] = best
                        td_ai[bj] = best
                    else:
                        best = fd[ai_off][blml[bj] - lj] + td_ai[bj]
                        alt = prev[y] + 1
                        if alt < best:
                            best = alt
                        alt = cur[y - 1] + 1
                        if alt < best:
                            best = alt
                        cur[y] = best
    return td[n1][n2]


def _forest_table(a: _Flat, b: _Flat, i: int, j: int, td, cdel, cins, crel, record: bool):
    """Forest-distance table for the keyroot problem rooted at (i, j).

    Offsets are relative: fd[x][y] is the distance between the prefixes
    a[l(i)..l(i)+x-1] and b[l(j)..l(j)+y-1].  When ``record`` is set,
    treedist cells are written into ``td`` as they complete.
    """
    li, lj = a.lml[i], b.lml[j]
    m = i - li + 1
    n = j - lj + 1
    la, lb = a.labels, b.labels
    alml, blml = a.lml, b.lml

    fd = [[0] * (n + 1) for _ in range(m + 1)]
    for x in range(1, m + 1):
        fd[x][0] = fd[x - 1][0] + cdel
    for y in range(1, n + 1):
        fd[0][y] = fd[0][y - 1] + cins
    for x in range(1, m + 1):
        ai = li + x - 1
        a_whole = alml[ai] == li
        for y in range(1, n + 1):
            bj = lj + y - 1
            if a_whole and blml[bj] == lj:
                cost = 0 if la[ai] == lb[bj] else crel
                best = fd[x - 1][y - 1] + cost
                alt = fd[x - 1][y] + cdel
                if alt < best:
                    best = alt
                alt = fd[x][y - 1] + cins
                if alt < best:
                    best = alt
                fd[x][y] = best
                if record:
                    td[ai][bj] = best
            else:
                best = fd[alml[ai] - li][blml[bj] - lj] + td[ai][bj]
                alt = fd[x - 1][y] + cdel
                if alt < best:
                    best = alt
                alt = fd[x][y - 1] + cins
                if alt < best:
                    best = alt
                fd[x][y] = best
    return fd


def _treedist(a: _Flat, b: _Flat, costs: EditCosts):
    cdel, cins, crel = costs.delete, costs.insert, costs.relabel
    if cdel.denominator == cins.denominator == crel.denominator == 1:
        cdel, cins, crel = int(cdel), int(cins), int(crel)
    td = [[0] * (b.n + 1) for _ in range(a.n + 1)]
    for i in a.keyroots:
        for j in b.keyroots:
            _forest_table(a, b, i, j, td, cdel, cins, crel, record=True)
    return td, (cdel, cins, crel)


def ted_distance(t1: OperatorTree, t2: OperatorTree, costs: EditCosts = UNIT_COSTS):
    """Exact tree edit distance; the fast path used as a search heuristic."""
    if costs is UNIT_COSTS or costs == UNIT_COSTS:
        return _unit_treedist(_flat_of(t1), _flat_of(t2))
    a, b = _Flat(t1), _Flat(t2)
    td, _ = _treedist(a, b, costs)
    return _as_int(td[a.n][b.n])


# -- mapping recovery ------------------------------------------------------


def _recover_mapping(a: _Flat, b: _Flat, td, cvals) -> list[tuple[int, int]]:
    cdel, cins, crel = cvals
    pairs: list[tuple[int, int]] = []

    def recurse(i: int, j: int) -> None:
        li, lj = a.lml[i], b.lml[j]
        fd = _forest_table(a, b, i, j, td, cdel, cins, crel, record=False)
        x, y = i - li + 1, j - lj + 1
        while x > 0 or y > 0:
            if x > 0 and fd[x][y] == fd[x - 1][y] + cdel:
                x -= 1
                continue
            if y > 0 and fd[x][y] == fd[x][y - 1] + cins:
                y -= 1
                continue
            ai, bj = li + x - 1, lj + y - 1
            if a.lml[ai] == li and b.lml[bj] == lj:
                pairs.append((ai, bj))
                x -= 1
                y -= 1
            else:
                recurse(ai, bj)
                x = a.lml[ai] - li
                y = b.lml[bj] - lj

    recurse(a.n, b.n)
    pairs.sort()
    return pairs


# -- mapping -> executable script ------------------------------------------


class _MutNode:
    __slots__ = ("label", "children", "partner")

    def __init__(self, label: str, children: list["_MutNode"], partner: int):
        self.label = label
        self.children = children
        self.partner = partner  # postorder index in t2, or 0 if unmatched


def _to_mut(t: OperatorTree, flat: _Flat, partner_of: dict[tuple[int, ...], int]) -> _MutNode:
    def build(tree: OperatorTree, path: tuple[int, ...]) -> _MutNode:
        kids = [build(c, path + (i,)) for i, c in enumerate(tree.children)]
        return _MutNode(tree.label, kids, partner_of.get(path, 0))

    return build(t, ())


def _script_from_mapping(
    t1: OperatorTree, t2: OperatorTree, a: _Flat, b: _Flat, pairs: list[tuple[int, int]]
) -> EditScript:
    """Turn an optimal mapping into an executable script by simulation.

    Every recorded path is valid at the moment its operation applies.  The
    working state is a forest under a virtual root, so scripts that replace
    or remove the root stay well-formed mid-flight.
    """
    partner_of = {a.paths[i]: j for i, j in pairs}
    matched_b = {j for _, j in pairs}
    ops: list[DeleteOp | InsertOp | RelabelOp] = []

    forest = [_to_mut(t1, a, partner_of)]

    def path_iter(nodes: list[_MutNode], prefix: tuple[int, ...]):
        for i, nd in enumerate(nodes):
            yield prefix + (i,), nd
            yield from path_iter(nd.children, prefix + (i,))

    # Relabel matched nodes whose labels differ.
    for path, nd in path_iter(forest, ()):
        if nd.partner and nd.label != b.labels[nd.partner]:
            ops.append(RelabelOp(path, b.labels[nd.partner]))
            nd.label = b.labels[nd.partner]

    # Delete unmatched t1 nodes, root-most first; children splice in place.
    while True:
        target = next((p for p, nd in path_iter(forest, ()) if not nd.partner), None)
        if target is None:
            break
        parent_list = forest
        for i in target[:-1]:
            parent_list = parent_list[i].children
        idx = target[-1]
        victim = parent_list[idx]
        parent_list[idx : idx + 1] = victim.children
        ops.append(DeleteOp(target))

    # Insert unmatched t2 nodes, top-down; spans follow the t2 intervals.
    post_of_path: dict[tuple[int, ...], int] = {b.paths[k]: k for k in range(1, b.n + 1)}
    desc: dict[int, set[int]] = {k: set() for k in range(1, b.n + 1)}
    for k in range(1, b.n + 1):
        for lo in range(b.lml[k], k):
            desc[k].add(lo)

    pre_paths = sorted(post_of_path.keys())
    node_of: dict[int, _MutNode] = {}
    for path, nd in path_iter(forest, ()):
        if nd.partner:
            node_of[nd.partner] = nd

    for path in pre_paths:
        k = post_of_path[path]
        if k in matched_b:
            continue
        parent_path = path[:-1]
        if parent_path in post_of_path and post_of_path[parent_path] in node_of:
            parent_nd = node_of[post_of_path[parent_path]]
            siblings = parent_nd.children
        elif parent_path == ():
            parent_nd = None
            siblings = forest
        else:
            raise AssertionError("t2 parent not materialized before child")
        inside = [i for i, ch in enumerate(siblings) if ch.partner in desc[k]]
        if inside:
            lo, hi = inside[0], inside[-1]
            if inside != list(range(lo, hi + 1)):
                raise AssertionError("mapping adopted a non-contiguous span")
        else:
            # Position among siblings by t2 order: count siblings whose
            # partners precede k in postorder.
            lo = sum(1 for ch in siblings if ch.partner and ch.partner < b.lml[k])
            hi = lo - 1
        new = _MutNode(b.labels[k], siblings[lo : hi + 1], k)
        siblings[lo : hi + 1] = [new]
        node_of[k] = new

        # Current path of the parent for the op record.
        def locate(target: _MutNode) -> tuple[int, ...]:
            def rec(nodes: list[_MutNode], prefix: tuple[int, ...]):
                for i, nd in enumerate(nodes):
                    if nd is target:
                        return prefix + (i,)
                    found = rec(nd.children, prefix + (i,))
                    if found is not None:
                        return found
                return None

            found = rec(forest, ())
            assert found is not None
            return found

        parent_rec = locate(parent_nd) if parent_nd is not None else ()
        ops.append(InsertOp(b.labels[k], parent_rec, lo, hi + 1 - lo))

    return EditScript(tuple(ops))


def ted(t1: OperatorTree, t2: OperatorTree, costs: EditCosts = UNIT_COSTS):
    """(distance, script): the exact minimum and a script achieving it.

    Applying the script to ``t1`` (see :func:`apply_edit_script`) yields a
    tree equal to ``t2``; the script's summed cost equals the distance.
    """
    a, b = _Flat(t1), _Flat(t2)
    td, cvals = _treedist(a, b, costs)
    distance = _as_int(td[a.n][b.n])
    pairs = _recover_mapping(a, b, td, cvals)
    script = _script_from_mapping(t1, t2, a, b, pairs)
    return distance, script


def ted_similarity(t1: OperatorTree, t2: OperatorTree) -> float:
    """1 - distance / max(size); unit costs.

    Nominally in [0, 1] with 1 for identical trees, but *not* clamped: the
    distance between very differently shaped trees can exceed the larger
    size, making the score slightly negative.  The raw value is reported.
    """
    d = ted_distance(t1, t2, UNIT_COSTS)
    return float(1 - Fraction(d) / max(tree_size(t1), tree_size(t2)))


# -- script application ----------------------------------------------------


def apply_edit_script(t: OperatorTree, script: EditScript) -> OperatorTree:
    """Replay ``script`` against ``t`` and return the resulting tree.

    Raises ValueError if the script leaves anything other than a single
    well-formed tree.
    """

    class N:
        __slots__ = ("label", "children")

        def __init__(self, label, children):
            self.label = label
            self.children = children

    def convert(tree: OperatorTree) -> N:
        return N(tree.label, [convert(c) for c in tree.children])

    forest = [convert(t)]

    def sibling_list(path: tuple[int, ...]) -> list:
        nodes = forest
        for i in path:
            nodes = nodes[i].children
        return nodes

    for op in script.ops:
        if isinstance(op, RelabelOp):
            parent = sibling_list(op.path[:-1])
            parent[op.path[-1]].label = op.label
        elif isinstance(op, DeleteOp):
            parent = sibling_list(op.path[:-1])
            victim = parent[op.path[-1]]
            parent[op.path[-1] : op.path[-1] + 1] = victim.children
        else:
            siblings = sibling_list(op.parent)
            adopted = siblings[op.index : op.index + op.count]
            siblings[op.index : op.index + op.count] = [N(op.label, adopted)]

    if len(forest) != 1:
        raise ValueError(f"script left {len(forest)} roots")

    def back(nd) -> OperatorTree:
        return OperatorTree(nd.label, tuple(back(c) for c in nd.children))

    return back(forest[0])
