"""Bi-block 2-augmented trees as children of monocyclic graphs.

A bi-block graph ``H`` has one parent: delete the edge of the anchor pair
picked by the cycle codes.  Children of a monocyclic ``G`` are generated by
adding ``q`` edges between an ancestor ``x`` and a descendant ``y`` of the
unique big pendent tree, keeping only pairs that are potential edges,
admissible in the canonical big tree, and pass the child check.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from .features import FeatureVector, PathSpec, coverage_ok, upper_ok
from .graph import ChemicalGraph, GraphError, ShapeClass, classify, cycle_of, cycles_of
from .mono import admissible_pairs
from .trees import (
    Signature, _arrange, _join, _shift, adjacency_signatures, canonicalize, graph_signature,
    rank_signatures, tree_from_graph,
)

RankFn = Callable[[int], object]


# ---------------------------------------------------------------------------
# monocyclic decomposition


@dataclass
class MonocyclicView:
    graph: ChemicalGraph
    cycle: list[int]
    root: list[int]          # r(v, G)
    parent: list[int]        # -1 on the cycle
    depth: list[int]
    size: list[int]          # |G<v>|
    children: list[list[int]]

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def big_root(self) -> int | None:
        """Root of the pendent tree holding at least half the vertices."""
        for c in self.cycle:
            if 2 * self.size[c] >= self.n:
                return c
        return None

    def pendent(self, v: int) -> list[int]:
        """Vertices of G<v> (v and its descendants)."""
        out = [v]
        for u in out:
            out.extend(self.children[u])
        return out

    def path_up(self, y: int, x: int) -> list[int]:
        """Vertices from ``x`` down to its descendant ``y``."""
        out = [y]
        while out[-1] != x:
            p = self.parent[out[-1]]
            if p < 0:
                raise GraphError(f"{x} is not an ancestor of {y}")
            out.append(p)
        return out[::-1]

    def is_descendant(self, y: int, x: int) -> bool:
        while y >= 0:
            if y == x:
                return True
            y = self.parent[y]
        return False


def decompose(g: ChemicalGraph) -> MonocyclicView:
    cyc = cycle_of(g)
    n = g.n
    on = set(cyc)
    root = [-1] * n
    parent = [-1] * n
    depth = [0] * n
    children: list[list[int]] = [[] for _ in range(n)]
    order = []
    for c in cyc:
        root[c] = c
        queue = [c]
        for u in queue:
            order.append(u)
            for w in g.neighbors(u):
                if w in on or root[w] >= 0:
                    continue
                root[w] = c
                parent[w] = u
                depth[w] = depth[u] + 1
                children[u].append(w)
                queue.append(w)
    size = [1] * n
    for u in reversed(order):
        if parent[u] >= 0:
            size[parent[u]] += size[u]
    return MonocyclicView(g, cyc, root, parent, depth, size, children)


# ---------------------------------------------------------------------------
# ranking of the pendent trees any child can have


@dataclass
class PendentRanking:
    """Ranks of G<u> (``full``) and of G<parent(u)> minus the u-branch (``cut``)."""

    ranks: dict[Signature, int] = field(default_factory=dict)
    full: dict[int, int] = field(default_factory=dict)
    cut: dict[int, int] = field(default_factory=dict)

    def lookup(self, table: dict[int, int], u: int) -> int:
        try:
            return table[u]
        except KeyError:
            raise GraphError(f"rank lookup miss at vertex {u}") from None


def pendent_family(view: MonocyclicView) -> list[tuple[str, int, int, list[int]]]:
    """``(kind, key vertex, root, vertices)`` for every tree to rank; empty when
    no pendent tree is big enough to have children."""
    v = view.big_root
    if v is None:
        return []
    out = []
    for u in view.cycle:
        if u != v:
            out.append(("full", u, u, view.pendent(u)))
    big = view.pendent(v)
    for u in big:
        out.append(("full", u, u, view.pendent(u)))
        if u != v:
            p = view.parent[u]
            drop = set(view.pendent(u))
            out.append(("cut", u, p, [w for w in view.pendent(p) if w not in drop]))
    return out


def rank_pendent_family(view: MonocyclicView, sorter: str = "builtin") -> PendentRanking:
    """Rank the family of :func:`pendent_family` together with every rooted
    subtree of its members."""
    v = view.big_root
    if v is None:
        return PendentRanking()
    g = view.graph
    on = set(view.cycle)
    closure: list[Signature] = []
    full: dict[int, Signature] = {}
    for c in view.cycle:
        sigs, _ = adjacency_signatures(g, c, skip=on)
        closure.extend(sigs.values())
        if c != v:
            full[c] = sigs[c]
        else:
            full.update(sigs)
    cut: dict[int, Signature] = {}
    for u in view.pendent(v):
        p = view.parent[u]
        if p < 0:
            continue
        items = [(_shift(full[w][0]), (g.mult(p, w),) + full[w][1]) for w in view.children[p] if w != u]
        _arrange(items)
        cut[u] = _join(g.colors[p], items)
        closure.append(cut[u])
    ranks = rank_signatures(closure, sorter)
    return PendentRanking(ranks, {u: ranks[s] for u, s in full.items()},
                          {u: ranks[s] for u, s in cut.items()})


# ---------------------------------------------------------------------------
# codes


def _code_path(path: Sequence[int], rank: RankFn, mult: Callable[[int, int], int]) -> tuple:
    out: list = [rank(path[0])]
    for a, b in zip(path, path[1:]):
        out += (mult(a, b), rank(b))
    return tuple(out)


def _code_cycle(cyc: Sequence[int], rank: RankFn, mult) -> tuple:
    """``cyc`` starts at the anchor; the smaller of the two readings."""
    fwd = list(cyc)
    back = [cyc[0]] + list(cyc[1:])[::-1]
    return min(_code_path(fwd, rank, mult), _code_path(back, rank, mult))


def _code_anchor(a: int, p1: int, p2: int, col, deg, rank: RankFn) -> tuple:
    ti = (col(p1), deg(p1), rank(p1))
    tj = (col(p2), deg(p2), rank(p2))
    if tj < ti:
        ti, tj = tj, ti
    return (col(a), deg(a), rank(a), ti[0], tj[0], ti[1], tj[1], ti[2], tj[2])


def _cycle_star(n: int, q_size: int, cyc: Sequence[int], path: Sequence[int],
                col, deg, rank: RankFn, mult) -> tuple:
    """Heuristic cycle code; ``cyc`` starts at this cycle's anchor and ``path``
    runs from that anchor to the other one."""
    return (
        n - q_size,
        len(cyc),
        _code_anchor(cyc[0], cyc[1], cyc[-1], col, deg, rank),
        _code_path(path, rank, mult),
        _code_cycle(cyc, rank, mult),
    )


def _rotate(cyc: Sequence[int], start: int) -> list[int]:
    i = list(cyc).index(start)
    return list(cyc[i:]) + list(cyc[:i])


def _reach(g: ChemicalGraph, start: int, banned: set[frozenset[int]]) -> list[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in g.neighbors(u):
            if w not in seen and frozenset((u, w)) not in banned:
                seen.add(w)
                stack.append(w)
    return sorted(seen)


def _pairs(seq: Sequence[int], closed: bool) -> set[frozenset[int]]:
    out = {frozenset(p) for p in zip(seq, seq[1:])}
    if closed and len(seq) > 2:
        out.add(frozenset((seq[-1], seq[0])))
    return out


@dataclass
class BiBlockView:
    graph: ChemicalGraph
    cycles: tuple[list[int], list[int]]   # each rotated to start at its anchor
    path: list[int]                       # anc(C) ... anc(C')
    q_sizes: tuple[int, int]
    anchor_pairs: tuple[tuple[int, int], ...]
    mma: int
    pendent: dict[int, list[int]]         # H<w> for w on the cycles and path

    @property
    def anchors(self) -> tuple[int, int]:
        return self.path[0], self.path[-1]

    def signature_rank(self) -> RankFn:
        """Rank function over this graph's own pendent trees."""
        sigs = {w: graph_signature(self.graph, w, vs) for w, vs in self.pendent.items()}
        ranks = rank_signatures(sigs.values())
        return lambda w: ranks[sigs[w]]

    def cycle_codes(self, rank: RankFn | None = None) -> tuple[tuple, tuple]:
        rank = rank or self.signature_rank()
        g = self.graph
        n = g.n
        (c0, c1), p = self.cycles, self.path
        col = g.colors.__getitem__
        a = _cycle_star(n, self.q_sizes[0], c0, p, col, g.deg, rank, g.mult)
        b = _cycle_star(n, self.q_sizes[1], c1, p[::-1], col, g.deg, rank, g.mult)
        return a, b


def biblock_view(h: ChemicalGraph, first: Sequence[int] | None = None) -> BiBlockView:
    """Decompose a bi-block graph.  ``first`` (a vertex set) picks which cycle
    is C; otherwise the order of :func:`cycles_of` is kept."""
    if classify(h) is not ShapeClass.BIBLOCK_2AUG:
        raise GraphError("biblock_view needs a bi-block 2-augmented tree")
    c0, c1 = cycles_of(h)
    if first is not None and set(first) == set(c1):
        c0, c1 = c1, c0
    s0, s1 = set(c0), set(c1)
    common = s0 & s1
    if common:
        path = [next(iter(common))]
    else:
        prev = {v: -1 for v in c0}
        queue = deque(c0)
        end = -1
        while queue:
            u = queue.popleft()
            if u in s1:
                end = u
                break
            for w in h.neighbors(u):
                if w not in prev:
                    prev[w] = u
                    queue.append(w)
        path = [end]
        while prev[path[-1]] != -1:
            path.append(prev[path[-1]])
        path.reverse()
    a0, a1 = path[0], path[-1]
    c0, c1 = _rotate(c0, a0), _rotate(c1, a1)
    e0, e1, ep = _pairs(c0, True), _pairs(c1, True), _pairs(path, False)
    q0 = len(_reach(h, a0, ep | e1))
    q1 = len(_reach(h, a1, ep | e0))
    banned = e0 | e1 | ep
    pend = {w: _reach(h, w, banned) for w in set(c0) | set(c1) | set(path)}
    pairs = ((a0, c0[1]), (a0, c0[-1]), (a1, c1[1]), (a1, c1[-1]))
    mma = min(h.mult(x, y) for x, y in pairs)
    return BiBlockView(h, (c0, c1), path, (q0, q1), pairs, mma, pend)


def parent_of(h: ChemicalGraph, rank: RankFn | None = None) -> tuple[ChemicalGraph, tuple[int, int]]:
    """Delete the anchor-pair edge chosen by the codes."""
    view = biblock_view(h)
    rank = rank or view.signature_rank()
    a, b = view.cycle_codes(rank)
    cyc = view.cycles[0] if a <= b else view.cycles[1]
    fwd = cyc
    back = [cyc[0]] + cyc[1:][::-1]
    pf = _code_path(fwd, rank, h.mult)
    pb = _code_path(back, rank, h.mult)
    if pb < pf or (pb == pf and back[1] < fwd[1]):
        fwd = back
    u, u2 = fwd[0], fwd[1]
    return h.remove_pair(u, u2), (u, u2)


# ---------------------------------------------------------------------------
# potential edges


def potential_edges(view: MonocyclicView) -> set[tuple[int, int]]:
    """``(x, y)`` with ``y`` a strict descendant of ``x`` whose new cycle code
    prefix does not exceed the old one, found with the skipping rules."""
    v = view.big_root
    out: set[tuple[int, int]] = set()
    if v is None:
        return out
    n = view.n
    clen = len(view.cycle)
    size, depth, kids = view.size, view.depth, view.children

    def emit(x: int, below: list[int], strict: bool) -> None:
        for y in below:
            if view.parent[y] == x:
                continue
            if strict or depth[y] <= clen + depth[x] - 1:
                out.add((x, y))

    for vc in kids[v]:
        thr = n - size[vc]
        sub = view.pendent(vc)
        if size[v] >= thr:
            emit(v, sub, size[v] > thr)
        stack = [vc]
        while stack:
            x = stack.pop()
            if size[x] < thr:
                continue  # nothing below can qualify either
            emit(x, view.pendent(x)[1:], size[x] > thr)
            stack.extend(kids[x])
    return out


def potential_edges_bruteforce(g: ChemicalGraph) -> set[tuple[int, int]]:
    """Definition applied literally: build every ``G + xy`` and measure blocks."""
    view = decompose(g)
    n = g.n
    out = set()
    for x in range(n):
        for y in view.pendent(x)[1:]:
            if g.mult(x, y):
                continue
            h = g.add_edges(x, y, 1) if min(g.res(x), g.res(y)) >= 1 else _force_edge(g, x, y)
            bv = biblock_view(h, first=view.cycle)
            new_len = len(bv.cycles[1])
            if (n - bv.q_sizes[1], new_len) <= (n - bv.q_sizes[0], len(bv.cycles[0])):
                out.add((x, y))
    return out


def _force_edge(g: ChemicalGraph, x: int, y: int) -> ChemicalGraph:
    # structure only; valences are irrelevant to block sizes
    return ChemicalGraph(g.table, g.colors, g.edges() + [(x, y, 1)], g.d, check_valence=False)


# ---------------------------------------------------------------------------
# child check


def child_check(view: MonocyclicView, x: int, y: int, q: int, ranking: PendentRanking) -> bool:
    """Does ``G + q*xy`` have ``G`` as its parent?"""
    g = view.graph
    n = g.n
    if x == y or g.mult(x, y) or not view.is_descendant(y, x):
        raise GraphError("child_check needs a nonadjacent ancestor-descendant pair")
    if not 1 <= q <= min(g.d, g.res(x), g.res(y)):
        raise GraphError(f"multiplicity {q} not allowed for this pair")
    v = view.root[x]
    down = view.path_up(y, v)            # v ... x ... y
    ix = down.index(x)
    new_cycle = down[ix:]                # x ... y, closed by the new edge
    c_v = down[1]
    old_key = (view.size[c_v], len(view.cycle))
    new_key = (n - view.size[x], len(new_cycle))
    if new_key > old_key:
        return False

    nxt = {a: b for a, b in zip(down, down[1:])}
    cyc_rest = set(view.cycle) - {v}

    def rank(w: int) -> int:
        if w == y:
            return ranking.lookup(ranking.full, y)
        if w in nxt:
            return ranking.lookup(ranking.cut, nxt[w])
        if w in cyc_rest:
            return ranking.lookup(ranking.full, w)
        raise GraphError(f"rank lookup miss at vertex {w}")

    def mult(a: int, b: int) -> int:
        return q if {a, b} == {x, y} else g.mult(a, b)

    def deg(w: int) -> int:
        return g.deg(w) + (q if w == x or w == y else 0)

    ring = [x] + new_cycle[1:][::-1]     # x, y, parent(y), ..., child of x
    if new_key == old_key:
        col = g.colors.__getitem__
        old_ring = _rotate(view.cycle, v)
        star_new = _cycle_star(n, n - new_key[0], ring, down[ix::-1], col, deg, rank, mult)
        star_old = _cycle_star(n, n - old_key[0], old_ring, down[:ix + 1], col, deg, rank, mult)
        if star_new > star_old:
            return False
    back = [x] + ring[1:][::-1]
    return _code_path(ring, rank, mult) <= _code_path(back, rank, mult)


# ---------------------------------------------------------------------------
# driver


def generate_children(
    view: MonocyclicView,
    hi: FeatureVector | None = None,
    spec: PathSpec | None = None,
    d: int | None = None,
    ranking: PendentRanking | None = None,
    stats: dict | None = None,
) -> Iterator[tuple[ChemicalGraph, tuple[int, int, int]]]:
    """Yield ``(G + q*xy, (x, y, q))`` for every child of ``G`` passing the
    upper bound and coverage rule."""
    g = view.graph
    v = view.big_root
    if v is None:
        return
    d = g.d if d is None else d
    epot = potential_edges(view)
    if not epot:
        return
    ranking = ranking or rank_pendent_family(view)
    tree = canonicalize(tree_from_graph(g, v, view.pendent(v)))
    lab = tree.labels
    for pair in admissible_pairs(tree, check=False):
        x, y = lab[pair.u], lab[pair.v]
        if (x, y) not in epot:
            continue
        for q in range(1, min(d, g.res(x), g.res(y)) + 1):
            if not child_check(view, x, y, q, ranking):
                _bump(stats, "biblock.not_child")
                continue
            h = g.add_edges(x, y, q)
            if hi is not None and not upper_ok(h, hi):
                _bump(stats, "biblock.pruned_upper")
                continue
            if spec is not None and not coverage_ok(h, spec):
                _bump(stats, "biblock.pruned_coverage")
                continue
            yield h, (x, y, q)


def _bump(stats: dict | None, key: str) -> None:
    if stats is not None:
        stats[key] = stats.get(key, 0) + 1
