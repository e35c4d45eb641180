"""Zero-suppressed decision diagrams over arms ``1..d``.

Vertices are dense integer ids.  Ids 0 and 1 are the 0- and 1-terminal;
non-terminal vertices have ids ``2..r`` in topological order (every child id
is smaller than its parent id) and the root is the largest id.  A family of
sets is the set of root-to-1 routes, each 1-arc contributing its vertex label.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numba
import numpy as np

SuperArm = tuple[int, ...]


class ZddError(ValueError):
    pass


class EmptyFamilyError(ZddError):
    pass


class FamilyOverflowError(ZddError):
    pass


class ZddParseError(ZddError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Zdd:
    """Array form of a ZDD.

    ``label``, ``lo`` and ``hi`` have one entry per vertex, terminals
    included; terminal entries carry the sentinel label ``d + 1`` and point
    to themselves.
    """

    d: int
    label: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    root: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_nodes(cls, d: int, nodes: Iterable[tuple[int, int, int]], root: int | None = None) -> "Zdd":
        """Build from ``(label, lo, hi)`` triples for ids ``2, 3, ...``."""
        nodes = list(nodes)
        n = len(nodes) + 2
        label = np.full(n, d + 1, dtype=np.int64)
        lo = np.array([0, 1] + [x[1] for x in nodes], dtype=np.int64)
        hi = np.array([0, 1] + [x[2] for x in nodes], dtype=np.int64)
        for k, node in enumerate(nodes):
            label[k + 2] = node[0]
        if root is None:
            root = n - 1
        return cls(d, label, lo, hi, int(root))

    @classmethod
    def empty(cls, d: int) -> "Zdd":
        return cls.from_nodes(d, [], root=0)

    @classmethod
    def base(cls, d: int) -> "Zdd":
        """The family ``{{}}``."""
        return cls.from_nodes(d, [], root=1)

    @property
    def n_vertices(self) -> int:
        """|V| including both terminals."""
        return len(self.label)

    def nodes(self) -> list[tuple[int, int, int]]:
        return [(int(self.label[v]), int(self.lo[v]), int(self.hi[v])) for v in range(2, self.n_vertices)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Zdd):
            return NotImplemented
        return (
            self.d == other.d
            and self.root == other.root
            and np.array_equal(self.label, other.label)
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Zdd(d={self.d}, n_vertices={self.n_vertices}, root={self.root})"


def validate(zdd: Zdd) -> list[str]:
    """Return a list of violated invariants; empty iff ``zdd`` is valid."""
    problems: list[str] = []
    n = zdd.n_vertices
    d = zdd.d
    if zdd.root < 0 or zdd.root >= n:
        return [f"root id {zdd.root} out of range"]
    if n > 2 and zdd.root != n - 1:
        problems.append(f"root {zdd.root} is not the maximal id {n - 1}")
    seen: dict[tuple[int, int, int], int] = {}
    for v in range(2, n):
        lbl, lo, hi = int(zdd.label[v]), int(zdd.lo[v]), int(zdd.hi[v])
        if not 1 <= lbl <= d:
            problems.append(f"vertex {v}: label {lbl} outside 1..{d}")
        for name, c in (("lo", lo), ("hi", hi)):
            if not 0 <= c < v:
                problems.append(f"vertex {v}: {name} child {c} violates topological order")
            elif c >= 2 and zdd.label[c] <= lbl:
                problems.append(f"vertex {v}: unordered labels ({lbl} -> {int(zdd.label[c])})")
        if hi == 0:
            problems.append(f"vertex {v}: redundant vertex (hi child is the 0-terminal)")
        key = (lbl, lo, hi)
        if key in seen:
            problems.append(f"vertex {v}: sharable vertex (same label and children as {seen[key]})")
        else:
            seen[key] = v
    if problems:
        return problems
    reach = np.zeros(n, dtype=bool)
    reach[zdd.root] = True
    for v in range(zdd.root, 1, -1):
        if reach[v]:
            reach[zdd.lo[v]] = True
            reach[zdd.hi[v]] = True
    for v in range(2, n):
        if not reach[v]:
            problems.append(f"vertex {v}: unreachable from root")
    return problems


def check_valid(zdd: Zdd) -> None:
    problems = validate(zdd)
    if problems:
        raise ZddError("invalid ZDD: " + "; ".join(problems))


def count(zdd: Zdd) -> int:
    """Number of sets in the family, as an exact Python integer."""
    if "count" not in zdd._cache:
        c = [0, 1] + [0] * (zdd.n_vertices - 2)
        lo, hi = zdd.lo.tolist(), zdd.hi.tolist()
        for v in range(2, zdd.n_vertices):
            c[v] = c[lo[v]] + c[hi[v]]
        zdd._cache["count"] = c[zdd.root]
    return zdd._cache["count"]


def enumerate_family(zdd: Zdd, limit: int = 10**6) -> list[SuperArm]:
    """All members of the family as sorted tuples."""
    n = count(zdd)
    if n > limit:
        raise FamilyOverflowError(f"family has {n} members, limit is {limit}")
    out: list[SuperArm] = []
    stack: list[tuple[int, tuple[int, ...]]] = [(zdd.root, ())]
    while stack:
        v, prefix = stack.pop()
        if v == 0:
            continue
        if v == 1:
            out.append(prefix)
            continue
        stack.append((int(zdd.lo[v]), prefix))
        stack.append((int(zdd.hi[v]), prefix + (int(zdd.label[v]),)))
    return out


def contains(zdd: Zdd, arms: Iterable[int]) -> bool:
    wanted = sorted(set(arms))
    if any(a < 1 or a > zdd.d for a in wanted):
        return False
    v, k = zdd.root, 0
    while v > 1:
        lbl = int(zdd.label[v])
        if k < len(wanted) and wanted[k] == lbl:
            v = int(zdd.hi[v])
            k += 1
        elif k < len(wanted) and wanted[k] < lbl:
            return False
        else:
            v = int(zdd.lo[v])
    return v == 1 and k == len(wanted)


def _cardinality_bounds(zdd: Zdd) -> tuple[int, int]:
    if zdd.root == 0:
        raise EmptyFamilyError("empty family")
    big = 1 << 62
    # the 0-terminal carries no routes: +big for min, -big for max
    most = [-big, 0] + [0] * (zdd.n_vertices - 2)
    least = [big, 0] + [0] * (zdd.n_vertices - 2)
    for v in range(2, zdd.n_vertices):
        a, b = int(zdd.lo[v]), int(zdd.hi[v])
        most[v] = max(most[a], most[b] + 1)
        least[v] = min(least[a], least[b] + 1)
    return least[zdd.root], most[zdd.root]


def max_cardinality(zdd: Zdd) -> int:
    """Largest member size; ``L`` of the bandit is its square root."""
    return _cardinality_bounds(zdd)[1]


def min_cardinality(zdd: Zdd) -> int:
    return _cardinality_bounds(zdd)[0]


@numba.njit(cache=True)
def _min_cost_kernel(label, lo, hi, root, cost):
    n = label.shape[0]
    val = np.empty(n)
    take = np.zeros(n, dtype=np.bool_)
    val[0] = np.inf
    val[1] = 0.0
    for v in range(2, n):
        a = val[lo[v]]
        b = val[hi[v]] + cost[label[v] - 1]
        if b < a:
            val[v] = b
            take[v] = True
        else:
            val[v] = a
    return val[root], take


def min_additive_cost(zdd: Zdd, cost) -> tuple[float, SuperArm]:
    """Minimise ``sum(cost[i-1] for i in X)`` over the family.

    Ties go to the 0-child, so the minimiser is deterministic.
    """
    if zdd.root == 0:
        raise EmptyFamilyError("empty family")
    cost = np.asarray(cost, dtype=np.float64)
    if cost.shape != (zdd.d,):
        raise ValueError(f"cost vector has shape {cost.shape}, expected ({zdd.d},)")
    value, take = _min_cost_kernel(zdd.label, zdd.lo, zdd.hi, zdd.root, cost)
    arms = []
    v = zdd.root
    while v > 1:
        if take[v]:
            arms.append(int(zdd.label[v]))
            v = int(zdd.hi[v])
        else:
            v = int(zdd.lo[v])
    return float(value), tuple(arms)


def canonicalize(zdd: Zdd) -> Zdd:
    """Renumber reachable vertices into a canonical order.

    Vertices are sorted by label descending, then by the new ids of their
    (lo, hi) children.  Two ZDDs for the same family and arm count come out
    array-identical.
    """
    if zdd.root <= 1:
        return Zdd.from_nodes(zdd.d, [], root=zdd.root)
    reach = np.zeros(zdd.n_vertices, dtype=bool)
    reach[zdd.root] = True
    for v in range(zdd.root, 1, -1):
        if reach[v]:
            reach[zdd.lo[v]] = True
            reach[zdd.hi[v]] = True
    by_label: dict[int, list[int]] = {}
    for v in range(2, zdd.n_vertices):
        if reach[v]:
            by_label.setdefault(int(zdd.label[v]), []).append(v)
    new_id = {0: 0, 1: 1}
    nodes: list[tuple[int, int, int]] = []
    for lbl in sorted(by_label, reverse=True):
        keyed = sorted(
            ((new_id[int(zdd.lo[v])], new_id[int(zdd.hi[v])]), v) for v in by_label[lbl]
        )
        for (lo, hi), v in keyed:
            new_id[v] = len(nodes) + 2
            nodes.append((lbl, lo, hi))
    return Zdd.from_nodes(zdd.d, nodes, root=new_id[zdd.root])


def write_zdd(zdd: Zdd, stream: TextIO) -> None:
    n = zdd.n_vertices - 2
    stream.write(f"zdd {zdd.d} {n}\n")
    for v in range(2, zdd.n_vertices):
        stream.write(f"{v} {int(zdd.label[v])} {int(zdd.lo[v])} {int(zdd.hi[v])}\n")
    stream.write(f"root {zdd.root}\n")


def read_zdd(stream: TextIO) -> Zdd:
    """Parse the text format written by :func:`write_zdd` and validate it."""
    lines = [(k + 1, ln.split()) for k, ln in enumerate(stream)]
    lines = [(k, toks) for k, toks in lines if toks and not toks[0].startswith("#")]
    if not lines:
        raise ZddParseError("empty input")

    def ints(k, toks, n):
        if len(toks) != n:
            raise ZddParseError(f"expected {n} fields, got {len(toks)}", k)
        try:
            return [int(x) for x in toks]
        except ValueError:
            raise ZddParseError("non-integer field", k) from None

    k, toks = lines[0]
    if toks[0] != "zdd":
        raise ZddParseError("header must start with 'zdd'", k)
    d, n = ints(k, toks[1:], 2)
    if d < 1 or n < 0:
        raise ZddParseError("bad header values", k)
    if len(lines) != n + 2:
        raise ZddParseError(f"expected {n} vertex lines and a root line, got {len(lines) - 1} lines", lines[-1][0])
    nodes = []
    for idx, (k, toks) in enumerate(lines[1 : n + 1]):
        vid, lbl, lo, hi = ints(k, toks, 4)
        if vid != idx + 2:
            raise ZddParseError(f"vertex id {vid} out of sequence (expected {idx + 2})", k)
        for c in (lo, hi):
            if not 0 <= c < vid:
                raise ZddParseError(f"dangling or forward child id {c}", k)
        if not 1 <= lbl <= d:
            raise ZddParseError(f"label {lbl} outside 1..{d}", k)
        nodes.append((lbl, lo, hi))
    k, toks = lines[-1]
    if toks[0] != "root":
        raise ZddParseError("last line must be 'root <id>'", k)
    (root,) = ints(k, toks[1:], 1)
    if not 0 <= root < n + 2:
        raise ZddParseError(f"root id {root} out of range", k)
    zdd = Zdd.from_nodes(d, nodes, root=root)
    problems = validate(zdd)
    if problems:
        raise ZddParseError("validation failed: " + "; ".join(problems))
    return zdd
