"""Colored multigraphs with valence accounting.

Vertices are dense integer ids ``0..n-1`` and colors are interned as positions
in a :class:`ColorTable`, so every comparison between colors is an integer
comparison that follows the table order.
"""
from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence


class GraphError(ValueError):
    """Raised for invalid vertices, edits or graph text."""


@dataclass(frozen=True)
class ColorTable:
    """Ordered (symbol, valence) pairs; list position is the color order."""

    entries: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        seen = set()
        for sym, val in self.entries:
            if not sym or any(ch.isdigit() or ch.isspace() for ch in sym):
                raise GraphError(f"bad color symbol {sym!r}")
            if sym in seen:
                raise GraphError(f"duplicate color symbol {sym!r}")
            if val < 1:
                raise GraphError(f"valence of {sym} must be >= 1")
            seen.add(sym)

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "ColorTable":
        return cls(tuple((s, int(v)) for s, v in pairs))

    def __len__(self) -> int:
        return len(self.entries)

    def id(self, symbol: str) -> int:
        for i, (sym, _) in enumerate(self.entries):
            if sym == symbol:
                return i
        raise GraphError(f"unknown color {symbol!r}")

    def symbol(self, cid: int) -> str:
        return self.entries[cid][0]

    def valence(self, cid: int) -> int:
        return self.entries[cid][1]

    @property
    def symbols(self) -> list[str]:
        return [s for s, _ in self.entries]


#: O < N < C, the order used in the examples of the method description.
DEFAULT_COLORS = ColorTable.of(("O", 2), ("N", 3), ("C", 4))


class ShapeClass(enum.Enum):
    MULTI_TREE = "MultiTree"
    MONOCYCLIC = "Monocyclic"
    BIBLOCK_2AUG = "BiBlock2Aug"
    SHARED_2AUG = "Shared2Aug"
    OTHER = "Other"

    @classmethod
    def parse(cls, text: str) -> "ShapeClass":
        key = text.strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "tree": cls.MULTI_TREE, "multitree": cls.MULTI_TREE,
            "mono": cls.MONOCYCLIC, "monocyclic": cls.MONOCYCLIC,
            "biblock": cls.BIBLOCK_2AUG, "biblock2aug": cls.BIBLOCK_2AUG,
            "shared": cls.SHARED_2AUG, "shared2aug": cls.SHARED_2AUG,
            "other": cls.OTHER,
        }
        try:
            return aliases[key]
        except KeyError:
            raise GraphError(f"unknown shape {text!r}") from None


class ChemicalGraph:
    """Immutable colored multigraph.

    ``mult(u, v)`` is the number of parallel edges between ``u`` and ``v``
    (0 when nonadjacent).  Edits return new graphs.
    """

    __slots__ = ("table", "colors", "d", "_adj", "_key")

    def __init__(
        self,
        table: ColorTable,
        colors: Sequence[int],
        edges: Iterable[tuple[int, int, int]] = (),
        d: int = 3,
        *,
        check_valence: bool = True,
    ) -> None:
        self.table = table
        self.colors = tuple(int(c) for c in colors)
        self.d = int(d)
        n = len(self.colors)
        for c in self.colors:
            if not 0 <= c < len(table):
                raise GraphError(f"unknown color id {c}")
        adj: list[dict[int, int]] = [{} for _ in range(n)]
        for u, v, m in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range")
            if v in adj[u]:
                raise GraphError(f"duplicate pair ({u}, {v})")
            if not 1 <= m <= self.d:
                raise GraphError(f"multiplicity {m} outside [1, {self.d}]")
            adj[u][v] = m
            adj[v][u] = m
        self._adj = tuple(dict(sorted(a.items())) for a in adj)
        self._key = None
        if check_valence:
            for v in range(n):
                if self.res(v) < 0:
                    raise GraphError(f"valence overflow at vertex {v}")

    @classmethod
    def _raw(cls, table, colors, adj, d) -> "ChemicalGraph":
        g = object.__new__(cls)
        g.table = table
        g.colors = colors
        g.d = d
        g._adj = adj
        g._key = None
        return g

    # basic queries -----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.colors)

    def _check(self, v: int) -> None:
        if not 0 <= v < len(self.colors):
            raise GraphError(f"unknown vertex {v}")

    def mult(self, u: int, v: int) -> int:
        n = len(self.colors)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"unknown vertex {u if not 0 <= u < n else v}")
        return self._adj[u].get(v, 0)

    def neighbors(self, v: int) -> Mapping[int, int]:
        """Neighbor -> multiplicity, sorted by neighbor id."""
        if not 0 <= v < len(self.colors):
            raise GraphError(f"unknown vertex {v}")
        return self._adj[v]

    def deg(self, v: int) -> int:
        if not 0 <= v < len(self.colors):
            raise GraphError(f"unknown vertex {v}")
        return sum(self._adj[v].values())

    def res(self, v: int) -> int:
        if not 0 <= v < len(self.colors):
            raise GraphError(f"unknown vertex {v}")
        return self.table.entries[self.colors[v]][1] - sum(self._adj[v].values())

    def edges(self) -> list[tuple[int, int, int]]:
        return [(u, v, m) for u in range(self.n) for v, m in self._adj[u].items() if u < v]

    @property
    def pair_count(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def color_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.colors:
            out[c] = out.get(c, 0) + 1
        return out

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    # edits ---------------------------------------------------------------

    def add_edges(self, x: int, y: int, q: int) -> "ChemicalGraph":
        self._check(x)
        self._check(y)
        if x == y:
            raise GraphError("self-loop")
        if y in self._adj[x]:
            raise GraphError(f"vertices {x} and {y} are already adjacent")
        if q < 1 or q > self.d:
            raise GraphError(f"multiplicity {q} outside [1, {self.d}]")
        if q > self.res(x) or q > self.res(y):
            raise GraphError(f"adding {q} edges overflows a valence")
        adj = list(self._adj)
        ax = dict(adj[x])
        ax[y] = q
        ay = dict(adj[y])
        ay[x] = q
        adj[x] = dict(sorted(ax.items()))
        adj[y] = dict(sorted(ay.items()))
        return ChemicalGraph._raw(self.table, self.colors, tuple(adj), self.d)

    def remove_pair(self, x: int, y: int) -> "ChemicalGraph":
        self._check(x)
        self._check(y)
        if y not in self._adj[x]:
            raise GraphError(f"vertices {x} and {y} are not adjacent")
        adj = list(self._adj)
        ax = dict(adj[x])
        del ax[y]
        ay = dict(adj[y])
        del ay[x]
        adj[x] = ax
        adj[y] = ay
        return ChemicalGraph._raw(self.table, self.colors, tuple(adj), self.d)

    def add_leaf(self, u: int, color: int, q: int) -> "ChemicalGraph":
        """New vertex ``n`` of ``color`` joined to ``u`` by ``q`` edges."""
        if q > self.res(u) or q > self.table.valence(color) or not 1 <= q <= self.d:
            raise GraphError("leaf multiplicity overflows a valence")
        n = self.n
        adj = list(self._adj)
        au = dict(adj[u])
        au[n] = q
        adj[u] = au
        adj.append({u: q})
        return ChemicalGraph._raw(self.table, self.colors + (color,), tuple(adj), self.d)

    def relabel(self, order: Sequence[int]) -> "ChemicalGraph":
        """Graph whose vertex ``i`` is this graph's vertex ``order[i]``."""
        pos = {old: new for new, old in enumerate(order)}
        return ChemicalGraph(
            self.table,
            [self.colors[o] for o in order],
            [(pos[u], pos[v], m) for u, v, m in self.edges()],
            self.d,
            check_valence=False,
        )

    # value semantics --------------------------------------------------------

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.colors, tuple(self.edges()))
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ChemicalGraph) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        syms = "".join(self.table.symbol(c) for c in self.colors)
        return f"ChemicalGraph({syms}, {self.edges()})"


# ---------------------------------------------------------------------------
# free-function surface


def residual_degree(g: ChemicalGraph, v: int) -> int:
    return g.res(v)


def add_edges(g: ChemicalGraph, x: int, y: int, q: int) -> ChemicalGraph:
    return g.add_edges(x, y, q)


def remove_pair_edges(g: ChemicalGraph, x: int, y: int) -> ChemicalGraph:
    return g.remove_pair(x, y)


def bridges(g: ChemicalGraph) -> set[frozenset[int]]:
    """Bridges of the simple skeleton (iterative lowlink DFS)."""
    n = g.n
    disc = [-1] * n
    low = [0] * n
    out: set[frozenset[int]] = set()
    timer = 0
    for start in range(n):
        if disc[start] != -1:
            continue
        disc[start] = low[start] = timer
        timer += 1
        stack = [(start, -1, iter(g.neighbors(start)))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, u, iter(g.neighbors(w))))
                    advanced = True
                    break
                low[u] = min(low[u], disc[w])
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if low[u] > disc[p]:
                        out.add(frozenset((p, u)))
    return out


def classify(g: ChemicalGraph) -> ShapeClass:
    if not g.is_connected():
        raise GraphError("classify needs a connected graph")
    n = g.n
    pairs = g.pair_count
    if pairs == n - 1:
        return ShapeClass.MULTI_TREE
    if pairs == n:
        return ShapeClass.MONOCYCLIC
    if pairs == n + 1:
        br = bridges(g)
        cyc_deg = [0] * n
        for u, v, _ in g.edges():
            if frozenset((u, v)) not in br:
                cyc_deg[u] += 1
                cyc_deg[v] += 1
        # a vertex of cycle-degree 3 is where two cycles share a path
        if any(c == 3 for c in cyc_deg):
            return ShapeClass.SHARED_2AUG
        return ShapeClass.BIBLOCK_2AUG
    return ShapeClass.OTHER


def simple_path(g: ChemicalGraph, a: int, b: int, banned: set[frozenset[int]] = frozenset(),
                allowed: set[int] | None = None) -> list[int] | None:
    """Shortest path from ``a`` to ``b`` avoiding ``banned`` pairs (BFS)."""
    prev = {a: -1}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            path = [b]
            while prev[path[-1]] != -1:
                path.append(prev[path[-1]])
            return path[::-1]
        for w in g.neighbors(u):
            if w in prev or frozenset((u, w)) in banned:
                continue
            if allowed is not None and w not in allowed:
                continue
            prev[w] = u
            queue.append(w)
    return None


def cycle_edges(g: ChemicalGraph) -> list[tuple[int, int]]:
    br = bridges(g)
    return [(u, v) for u, v, _ in g.edges() if frozenset((u, v)) not in br]


def _normalize_cycle(cyc: list[int]) -> list[int]:
    i = cyc.index(min(cyc))
    rot = cyc[i:] + cyc[:i]
    if len(rot) > 2 and rot[-1] < rot[1]:
        rot = [rot[0]] + rot[1:][::-1]
    return rot


def cycles_of(g: ChemicalGraph) -> list[list[int]]:
    """Edge-disjoint skeleton cycles (one per monocyclic graph, two per bi-block)."""
    remaining = cycle_edges(g)
    keep = {frozenset(e) for e in remaining}
    core = ChemicalGraph(
        g.table, g.colors, [(u, v, m) for u, v, m in g.edges() if frozenset((u, v)) in keep],
        g.d, check_valence=False,
    )
    done: set[frozenset[int]] = set()
    out = []
    for u, v in remaining:
        if frozenset((u, v)) in done:
            continue
        path = simple_path(core, u, v, done | {frozenset((u, v))})
        if path is None:  # pragma: no cover - guarded by classify
            raise GraphError("inconsistent cycle structure")
        done.update(frozenset(p) for p in zip(path, path[1:]))
        done.add(frozenset((u, v)))
        out.append(_normalize_cycle(path))
    return out


def cycle_of(g: ChemicalGraph) -> list[int]:
    """The unique cycle of a monocyclic graph, lowest label first, then toward
    its lower-labeled cycle neighbor."""
    if g.pair_count != g.n or not g.is_connected():
        raise GraphError("cycle_of needs a monocyclic graph")
    # peel leaves until only the cycle is left
    deg = [len(a) for a in g._adj]
    stack = [v for v in range(g.n) if deg[v] == 1]
    gone = [False] * g.n
    while stack:
        v = stack.pop()
        gone[v] = True
        for w in g._adj[v]:
            if not gone[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    stack.append(w)
    start = min(v for v in range(g.n) if not gone[v])
    cyc = [start]
    prev = -1
    while True:
        u = cyc[-1]
        nxt = min(w for w in g._adj[u] if not gone[w] and w != prev)
        if nxt == start:
            break
        prev = u
        cyc.append(nxt)
    return _normalize_cycle(cyc)


# ---------------------------------------------------------------------------
# graph text format

_FORMULA_RE = re.compile(r"([A-Za-z][a-z]*)(\d*)")


def parse_formula(text: str, table: ColorTable) -> dict[int, int]:
    """``C4N2O`` -> {color id: count}."""
    out: dict[int, int] = {}
    pos = 0
    text = text.strip()
    for m in _FORMULA_RE.finditer(text):
        if m.start() != pos:
            raise GraphError(f"bad formula {text!r}")
        pos = m.end()
        cid = table.id(m.group(1))
        out[cid] = out.get(cid, 0) + (int(m.group(2)) if m.group(2) else 1)
    if pos != len(text) or not out:
        raise GraphError(f"bad formula {text!r}")
    return out


def format_graph(g: ChemicalGraph, gid: object = 1) -> str:
    lines = [f"graph {gid}", f"n {g.n}"]
    lines += [f"v {i + 1} {g.table.symbol(c)}" for i, c in enumerate(g.colors)]
    lines += [f"e {u + 1} {v + 1} {m}" for u, v, m in g.edges()]
    lines.append("end")
    return "\n".join(lines) + "\n"


def write_graphs(graphs: Iterable[ChemicalGraph], start: int = 1) -> str:
    return "".join(format_graph(g, i) for i, g in enumerate(graphs, start))


def parse_graphs(text: str, table: ColorTable = DEFAULT_COLORS, d: int = 3) -> Iterator[tuple[str, ChemicalGraph]]:
    """Yield ``(id, graph)`` for each block; ``#`` lines are comments."""
    gid = None
    n = None
    colors: dict[int, int] = {}
    edges: list[tuple[int, int, int]] = []
    seen_pairs: set[frozenset[int]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        try:
            if tok[0] == "graph":
                if gid is not None:
                    raise GraphError("nested graph block")
                gid = tok[1] if len(tok) > 1 else ""
                n, colors, edges, seen_pairs = None, {}, [], set()
            elif gid is None:
                raise GraphError(f"{tok[0]!r} outside a graph block")
            elif tok[0] == "n":
                n = int(tok[1])
            elif tok[0] == "v":
                idx = int(tok[1]) - 1
                if idx in colors:
                    raise GraphError(f"vertex {idx + 1} declared twice")
                colors[idx] = table.id(tok[2])
            elif tok[0] == "e":
                u, v, m = int(tok[1]) - 1, int(tok[2]) - 1, int(tok[3])
                if u == v:
                    raise GraphError("self-loop")
                pair = frozenset((u, v))
                if pair in seen_pairs:
                    raise GraphError(f"duplicate pair ({u + 1}, {v + 1})")
                seen_pairs.add(pair)
                edges.append((u, v, m))
            elif tok[0] == "end":
                if n is None or sorted(colors) != list(range(n)):
                    raise GraphError("vertex declarations do not match n")
                yield gid, ChemicalGraph(table, [colors[i] for i in range(n)], edges, d)
                gid = None
            else:
                raise GraphError(f"unknown record {tok[0]!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, GraphError):
                raise GraphError(f"line {lineno}: {exc}") from None
            raise GraphError(f"line {lineno}: malformed record {line!r}") from None
    if gid is not None:
        raise GraphError("unterminated graph block")
