"""Constructing ZDDs: from explicit families, and s-t paths by frontier search.

Also holds the brute-force enumerators used as independent oracles at small
scale (simple paths by DFS, Steiner trees by subset scan).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

from .zdd import SuperArm, Zdd, ZddError, ZddParseError, canonicalize


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    beta: float = 1.0


@dataclass
class Graph:
    """Simple undirected graph; edge ``k`` (1-based) is arm ``k``."""

    n_nodes: int
    edges: list[Edge]
    start: int | None = None
    goal: int | None = None
    terminals: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.n_nodes < 1:
            raise GraphError("graph needs at least one node")
        pairs = set()
        for k, e in enumerate(self.edges, start=1):
            if e.id != k:
                raise GraphError(f"edge ids must be 1..d in order; got {e.id} at position {k}")
            if e.u == e.v:
                raise GraphError(f"edge {e.id} is a self-loop")
            for x in (e.u, e.v):
                if not 0 <= x < self.n_nodes:
                    raise GraphError(f"edge {e.id}: node {x} out of range")
            pair = frozenset((e.u, e.v))
            if pair in pairs:
                raise GraphError(f"duplicate edge {e.u}-{e.v}")
            pairs.add(pair)

    @property
    def d(self) -> int:
        return len(self.edges)

    @property
    def beta(self) -> list[float]:
        return [e.beta for e in self.edges]

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """``adj[x]`` lists ``(neighbour, edge_id)``."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_nodes)]
        for e in self.edges:
            adj[e.u].append((e.v, e.id))
            adj[e.v].append((e.u, e.id))
        return adj

    def relabeled(self, order: Sequence[int]) -> "Graph":
        """Copy whose edge ``k`` is ``self``'s edge ``order[k-1]``."""
        if sorted(order) != list(range(1, self.d + 1)):
            raise GraphError("edge order must be a permutation of 1..d")
        edges = [Edge(k, self.edges[o - 1].u, self.edges[o - 1].v, self.edges[o - 1].beta)
                 for k, o in enumerate(order, start=1)]
        return Graph(self.n_nodes, edges, self.start, self.goal, list(self.terminals))


@dataclass(frozen=True)
class GridSpec:
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 2 or self.cols < 2:
            raise GraphError("grid needs at least 2 rows and 2 columns")

    def node(self, r: int, c: int) -> int:
        return r * self.cols + c

    @property
    def corners(self) -> list[int]:
        return [self.node(0, 0), self.node(0, self.cols - 1),
                self.node(self.rows - 1, 0), self.node(self.rows - 1, self.cols - 1)]


def build_grid(spec: GridSpec) -> Graph:
    """Lattice with unit edges; nodes row-major, per node the right edge then the down edge.

    Start and goal are the top-left and bottom-right corners, terminals are
    the four corners.
    """
    edges = []
    for r in range(spec.rows):
        for c in range(spec.cols):
            x = spec.node(r, c)
            if c + 1 < spec.cols:
                edges.append(Edge(len(edges) + 1, x, x + 1))
            if r + 1 < spec.rows:
                edges.append(Edge(len(edges) + 1, x, x + spec.cols))
    n = spec.rows * spec.cols
    return Graph(n, edges, start=0, goal=n - 1, terminals=spec.corners)


def read_graph(stream: TextIO) -> Graph:
    """Parse ``graph <n> <m>`` followed by ``<id> <u> <v> <beta>`` lines.

    Optional ``start``/``goal``/``terminal <node>`` lines may appear anywhere
    after the header; ``#`` starts a comment line.
    """
    n_nodes = n_edges = None
    edges: list[Edge] = []
    start = goal = None
    terminals: list[int] = []
    for k, raw in enumerate(stream, start=1):
        toks = raw.split()
        if not toks or toks[0].startswith("#"):
            continue
        try:
            if n_nodes is None:
                if toks[0] != "graph" or len(toks) != 3:
                    raise ZddParseError("header must be 'graph <n_nodes> <n_edges>'", k)
                n_nodes, n_edges = int(toks[1]), int(toks[2])
            elif toks[0] in ("start", "goal", "terminal"):
                if len(toks) != 2:
                    raise ZddParseError(f"'{toks[0]}' takes one node", k)
                x = int(toks[1])
                if not 0 <= x < n_nodes:
                    raise ZddParseError(f"node {x} out of range", k)
                if toks[0] == "start":
                    start = x
                elif toks[0] == "goal":
                    goal = x
                else:
                    terminals.append(x)
            else:
                if len(toks) != 4:
                    raise ZddParseError("edge line must be '<edge_id> <u> <v> <beta>'", k)
                eid, u, v, beta = int(toks[0]), int(toks[1]), int(toks[2]), float(toks[3])
                if eid != len(edges) + 1:
                    raise ZddParseError(f"edge id {eid} out of sequence (expected {len(edges) + 1})", k)
                if beta < 0:
                    raise ZddParseError("edge length must be nonnegative", k)
                edges.append(Edge(eid, u, v, beta))
                Graph(n_nodes, edges)  # duplicate / range checks with a line number
        except ValueError as exc:
            if isinstance(exc, ZddParseError):
                raise
            raise ZddParseError(str(exc), k) from None
    if n_nodes is None:
        raise ZddParseError("missing 'graph' header")
    if len(edges) != n_edges:
        raise ZddParseError(f"header promises {n_edges} edges, found {len(edges)}")
    return Graph(n_nodes, edges, start, goal, terminals)


def write_graph(graph: Graph, stream: TextIO) -> None:
    stream.write(f"graph {graph.n_nodes} {graph.d}\n")
    for e in graph.edges:
        stream.write(f"{e.id} {e.u} {e.v} {e.beta!r}\n")
    if graph.start is not None:
        stream.write(f"start {graph.start}\n")
    if graph.goal is not None:
        stream.write(f"goal {graph.goal}\n")
    for x in graph.terminals:
        stream.write(f"terminal {x}\n")


def reduce_from_family(family: Iterable[Iterable[int]], d: int) -> Zdd:
    """The ordered, reduced (and canonically numbered) ZDD of an explicit family."""
    members = {frozenset(x) for x in family}
    for x in members:
        if any(not 1 <= i <= d for i in x):
            raise ZddError(f"member {sorted(x)} has an arm outside 1..{d}")
    nodes: list[tuple[int, int, int]] = []
    unique: dict[tuple[int, int, int], int] = {}
    memo: dict[frozenset, int] = {}

    def mk(lbl, lo, hi):
        if hi == 0:
            return lo
        key = (lbl, lo, hi)
        if key not in unique:
            nodes.append(key)
            unique[key] = len(nodes) + 1
        return unique[key]

    # iterative post-order to stay clear of the recursion limit on deep families
    stack = [frozenset(members)]
    while stack:
        fam = stack[-1]
        if fam in memo:
            stack.pop()
            continue
        if not fam:
            memo[fam] = 0
            stack.pop()
            continue
        if fam == {frozenset()}:
            memo[fam] = 1
            stack.pop()
            continue
        top = min(min(x) for x in fam if x)
        hi_fam = frozenset(x - {top} for x in fam if top in x)
        lo_fam = frozenset(x for x in fam if top not in x)
        pending = [f for f in (lo_fam, hi_fam) if f not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        memo[fam] = mk(top, memo[lo_fam], memo[hi_fam])
    root = memo[frozenset(members)]
    return canonicalize(Zdd.from_nodes(d, nodes, root=root))


def bfs_edge_order(graph: Graph, s: int) -> list[int]:
    """Edge ids in the order a breadth-first search from ``s`` first meets them."""
    adj = graph.adjacency()
    seen_node = [False] * graph.n_nodes
    seen_edge = set()
    order = []
    queue = deque([s])
    seen_node[s] = True
    while queue:
        x = queue.popleft()
        for y, eid in sorted(adj[x]):
            if eid not in seen_edge:
                seen_edge.add(eid)
                order.append(eid)
            if not seen_node[y]:
                seen_node[y] = True
                queue.append(y)
    order.extend(e.id for e in graph.edges if e.id not in seen_edge)
    return order


def _normalize(entries: list[int]) -> tuple[int, ...]:
    # path-component ids renumbered by first appearance; 0 and -1 are fixed codes
    ren: dict[int, int] = {}
    out = []
    for x in entries:
        if x > 0:
            if x not in ren:
                ren[x] = len(ren) + 1
            x = ren[x]
        out.append(x)
    return tuple(out)


def build_st_paths(graph: Graph, s: int, t: int, edge_order: Sequence[int] | None = None) -> Zdd:
    """ZDD of all simple s-t paths, by frontier-based search.

    Arm ``k`` of the result is the ``k``-th edge of ``edge_order`` (default:
    the graph's own edge ids, so arms and edge ids coincide).

    Frontier entries: ``0`` untouched, ``-1`` degree two (closed), and a
    positive path-component id for a degree-one endpoint.
    """
    for x in (s, t):
        if not 0 <= x < graph.n_nodes:
            raise GraphError(f"node {x} not in graph")
    if s == t:
        raise GraphError("start and goal must differ")
    if edge_order is not None:
        graph = graph.relabeled(edge_order)
    d = graph.d
    ends = [(e.u, e.v) for e in graph.edges]
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for k, (u, v) in enumerate(ends):
        for x in (u, v):
            first.setdefault(x, k)
            last[x] = k
    if s not in first or t not in first:
        return Zdd.empty(d)

    # active[k]: nodes already seen before edge k and still needed at edge k
    active = []
    for k in range(d + 1):
        active.append(sorted(x for x in first if first[x] < k <= last[x]))

    REJECT, ACCEPT = 0, 1
    layers: list[dict[tuple, tuple]] = [dict() for _ in range(d)]
    layers[0][()] = None
    for k in range(d):
        u, v = ends[k]
        nxt = active[k + 1]
        for state in layers[k]:
            cur = dict(zip(active[k], state))
            for x in (u, v):
                cur.setdefault(x, 0)
            children = []
            for take in (False, True):
                st = dict(cur)
                ok = True
                if take:
                    a, b = st[u], st[v]
                    if a == -1 or b == -1:
                        ok = False
                    elif (u in (s, t) and a != 0) or (v in (s, t) and b != 0):
                        ok = False
                    elif a > 0 and a == b:
                        ok = False  # cycle
                    else:
                        fresh = max([c for c in st.values() if c > 0], default=0) + 1
                        if a == 0 and b == 0:
                            st[u] = st[v] = fresh
                        elif a == 0:
                            st[u], st[v] = b, -1
                        elif b == 0:
                            st[u], st[v] = -1, a
                        else:
                            for x, c in st.items():
                                if c == b:
                                    st[x] = a
                            st[u] = st[v] = -1
                if ok:
                    for x in (u, v):
                        if last[x] == k:
                            c = st[x]
                            if x in (s, t):
                                ok = ok and c > 0
                            else:
                                ok = ok and c <= 0
                if not ok:
                    children.append(REJECT)
                elif k + 1 == d:
                    children.append(ACCEPT)
                else:
                    key = _normalize([st[x] for x in nxt])
                    layers[k + 1].setdefault(key, None)
                    children.append(("S", key))
            layers[k][state] = tuple(children)

    nodes: list[tuple[int, int, int]] = []
    unique: dict[tuple[int, int, int], int] = {}
    ids: dict[tuple, int] = {}
    for k in range(d - 1, -1, -1):
        below = ids
        ids = {}
        for state, (lo, hi) in layers[k].items():
            lo_id = lo if isinstance(lo, int) else below[lo[1]]
            hi_id = hi if isinstance(hi, int) else below[hi[1]]
            if hi_id == 0:
                ids[state] = lo_id
                continue
            key = (k + 1, lo_id, hi_id)
            if key not in unique:
                nodes.append(key)
                unique[key] = len(nodes) + 1
            ids[state] = unique[key]
    root = ids[()]
    return canonicalize(Zdd.from_nodes(d, nodes, root=root))


def brute_force_st_paths(graph: Graph, s: int, t: int, max_nodes: int = 30,
                         max_paths: int = 10**6) -> set[SuperArm]:
    """All simple s-t paths (as sorted edge-id tuples) by depth-first search."""
    if graph.n_nodes > max_nodes:
        raise GraphError(f"brute force capped at {max_nodes} nodes")
    for x in (s, t):
        if not 0 <= x < graph.n_nodes:
            raise GraphError(f"node {x} not in graph")
    adj = graph.adjacency()
    out: set[SuperArm] = set()
    on_path = [False] * graph.n_nodes
    on_path[s] = True
    used: list[int] = []
    stack = [iter(adj[s])]
    while stack:
        step = next(stack[-1], None)
        if step is None:
            stack.pop()
            if used:
                y = _last_node(graph, s, used)
                on_path[y] = False
                used.pop()
            continue
        y, eid = step
        if on_path[y]:
            continue
        if y == t:
            out.add(tuple(sorted(used + [eid])))
            if len(out) > max_paths:
                raise GraphError(f"more than {max_paths} paths")
            continue
        on_path[y] = True
        used.append(eid)
        stack.append(iter(adj[y]))
    return out


def _last_node(graph: Graph, s: int, used: list[int]) -> int:
    x = s
    for eid in used:
        e = graph.edges[eid - 1]
        x = e.v if e.u == x else e.u
    return x


def brute_force_steiner_trees(graph: Graph, terminals: Sequence[int], max_edges: int = 22) -> set[SuperArm]:
    """Edge subsets forming a tree (connected, acyclic) that spans every terminal."""
    d = graph.d
    if d > max_edges:
        raise GraphError(f"subset scan capped at {max_edges} edges")
    terms = set(terminals)
    ends = [(e.u, e.v) for e in graph.edges]
    out: set[SuperArm] = set()
    for mask in range(1, 1 << d):
        parent = {}

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x

        ok = True
        chosen = []
        for k in range(d):
            if mask >> k & 1:
                u, v = ends[k]
                ru, rv = find(u), find(v)
                if ru == rv:
                    ok = False
                    break
                parent[ru] = rv
                chosen.append(k + 1)
        if not ok:
            continue
        touched = {x for k in chosen for x in ends[k - 1]}
        if not terms <= touched:
            continue
        if len({find(x) for x in touched}) == 1:
            out.add(tuple(chosen))
    return out
