"""Rooted multi-trees: DFS codes, signatures, ranking, centroids, copy flags.

A signature is ``(delta, M)``: ``delta`` is the flat (color, depth) DFS code
and ``M`` the multiplicities to the parent in DFS order, both plain integer
tuples.  Signatures compare with Python's tuple order, which is the standard
lexicographic order (a proper prefix is smaller).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from operator import add
from typing import Callable, Collection, Hashable, Iterable, Mapping, Sequence

from .graph import ChemicalGraph, GraphError

Signature = tuple[tuple[int, ...], tuple[int, ...]]


def lex_compare(a: Sequence, b: Sequence) -> int:
    """-1, 0 or 1 under the standard lexicographic order."""
    a, b = tuple(a), tuple(b)
    return (a > b) - (a < b)


@dataclass(frozen=True, eq=False)
class RootedTree:
    """Ordered rooted multi-tree on vertices ``0..n-1``.

    ``children`` fixes the left-to-right order.  ``labels[i]`` is the id of
    vertex ``i`` in whatever graph the tree was cut from.
    """

    colors: tuple[int, ...]
    parent: tuple[int, ...]
    mul: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    root: int
    labels: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.colors)

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        out = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children[v]))
        return tuple(out)

    @cached_property
    def dfs(self) -> tuple[int, ...]:
        idx = [0] * self.n
        for i, v in enumerate(self.preorder):
            idx[v] = i
        return tuple(idx)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        dep = [0] * self.n
        for v in self.preorder:
            for c in self.children[v]:
                dep[c] = dep[v] + 1
        return tuple(dep)

    @cached_property
    def size(self) -> tuple[int, ...]:
        sz = [1] * self.n
        for v in reversed(self.preorder):
            p = self.parent[v]
            if p >= 0:
                sz[p] += sz[v]
        return tuple(sz)

    @cached_property
    def left(self) -> tuple[int, ...]:
        """Left sibling, -1 when none."""
        out = [-1] * self.n
        for ch in self.children:
            for a, b in zip(ch, ch[1:]):
                out[b] = a
        return tuple(out)

    def delta(self) -> tuple[int, ...]:
        dep = self.depth
        out: list[int] = []
        for v in self.preorder:
            out += (self.colors[v], dep[v])
        return tuple(out)

    def mults(self) -> tuple[int, ...]:
        return tuple(self.mul[v] for v in self.preorder[1:])

    def signature(self) -> Signature:
        """``(delta, M)`` of this ordering (not necessarily canonical)."""
        return self.delta(), self.mults()

    def is_ancestor(self, a: int, b: int) -> bool:
        """True when ``a`` is ``b`` or lies above it."""
        d = self.dfs
        return d[a] <= d[b] < d[a] + self.size[a]

    def reordered(self, children: Sequence[Sequence[int]]) -> "RootedTree":
        return RootedTree(self.colors, self.parent, self.mul,
                          tuple(tuple(c) for c in children), self.root, self.labels)

    def in_dfs_order(self) -> "RootedTree":
        """Same ordered tree with vertex ``i`` being the ``i``-th DFS vertex."""
        order = self.preorder
        pos = {v: i for i, v in enumerate(order)}
        return RootedTree(
            tuple(self.colors[v] for v in order),
            tuple(pos[self.parent[v]] if self.parent[v] >= 0 else -1 for v in order),
            tuple(self.mul[v] for v in order),
            tuple(tuple(pos[c] for c in self.children[v]) for v in order),
            0,
            tuple(self.labels[v] for v in order),
        )


def tree_from_graph(g: ChemicalGraph, root: int, vertices: Collection[int] | None = None) -> RootedTree:
    """Tree induced by ``vertices`` (default: all of ``g``) hanging from ``root``.

    Children start in ascending graph-id order.
    """
    n_all = g.n
    allowed = None if vertices is None else set(vertices)
    if not 0 <= root < n_all or (allowed is not None and root not in allowed):
        raise GraphError("root outside the vertex set")
    adj = g._adj
    order = [root]
    local = {root: 0}
    par = [-1]
    mul = [0]
    kids: list[list[int]] = [[]]
    i = 0
    while i < len(order):
        u = order[i]
        for w, m in adj[u].items():
            if allowed is not None and w not in allowed:
                continue
            if w in local:
                if local[w] != par[i]:
                    raise GraphError("vertex set does not induce a tree")
                continue
            local[w] = len(order)
            order.append(w)
            par.append(i)
            mul.append(m)
            kids.append([])
            kids[i].append(local[w])
        i += 1
    if len(order) != (n_all if allowed is None else len(allowed)):
        raise GraphError("vertex set is not connected")
    return RootedTree(
        tuple(g.colors[v] for v in order), tuple(par), tuple(mul),
        tuple(tuple(k) for k in kids), 0, tuple(order),
    )


def tree_to_graph(t: RootedTree, table, d: int = 3) -> ChemicalGraph:
    edges = [(t.parent[v], v, t.mul[v]) for v in range(t.n) if t.parent[v] >= 0]
    return ChemicalGraph(table, t.colors, edges, d, check_valence=False)


# ---------------------------------------------------------------------------
# signatures


_ALT = (0, 1) * 512


def _shift(delta: tuple[int, ...]) -> tuple[int, ...]:
    if len(delta) > len(_ALT):
        return tuple(x + 1 if i % 2 else x for i, x in enumerate(delta))
    return tuple(map(add, delta, _ALT))


def _arrange(items: list) -> None:
    """Sort branches ``(shifted delta, mul-prefixed M, ...)`` into canonical order.

    Branch a precedes b when a+b > b+a.  That is the same as comparing the
    infinite repetitions of a and b, and two repetitions that differ do so
    within len(a)+len(b) entries, so a truncated repetition is an exact sort
    key.  Equal deltas fall back to the larger M.
    """
    if len(items) < 2:
        return
    width = 2 * max(len(it[0]) for it in items)
    items.sort(key=lambda it: ((it[0] * (width // len(it[0]) + 1))[:width], it[1]), reverse=True)


def _join(color: int, items: list) -> Signature:
    delta = (color, 0)
    mm: tuple[int, ...] = ()
    for it in items:
        delta += it[0]
        mm += it[1]
    return delta, mm


def subtree_signatures(t: RootedTree) -> tuple[list[Signature], list[list[int]]]:
    """Signature of every rooted subtree ``T_v`` plus the canonical child order.

    Children of each vertex are arranged so that the concatenated DFS code is
    maximal; ties go to the larger multiplicity code.
    """
    n = t.n
    sigs: list[Signature | None] = [None] * n
    order: list[list[int]] = [[] for _ in range(n)]
    for v in reversed(t.preorder):
        ch = t.children[v]
        if not ch:
            sigs[v] = ((t.colors[v], 0), ())
            continue
        items = []
        for c in ch:
            cd, cm = sigs[c]
            items.append((_shift(cd), (t.mul[c],) + cm, c))
        _arrange(items)
        order[v] = [it[2] for it in items]
        sigs[v] = _join(t.colors[v], items)
    return sigs, order  # type: ignore[return-value]


def adjacency_signatures(g: ChemicalGraph, root: int | Sequence[int], allowed: Collection[int] | None = None,
                         skip: Collection[int] = ()) -> tuple[dict[int, Signature], dict[int, int]]:
    """Subtree signatures of the tree hanging from ``root`` (or of the forest
    hanging from several roots), straight from the adjacency lists.  Returns
    ``(signature by vertex, parent by vertex)``.

    Vertices outside ``allowed`` or inside ``skip`` are not entered.
    """
    adj = g._adj
    colors = g.colors
    order = [root] if isinstance(root, int) else list(root)
    par = dict.fromkeys(order, -1)
    mul = dict.fromkeys(order, 0)
    for u in order:
        p = par[u]
        for w, m in adj[u].items():
            if w == p or w in skip or (allowed is not None and w not in allowed):
                continue
            if w in par:
                raise GraphError("vertex set does not induce a tree")
            par[w] = u
            mul[w] = m
            order.append(w)
    sigs: dict[int, Signature] = {}
    kids: dict[int, list] = {}
    for v in reversed(order):
        items = kids.pop(v, None)
        if items is None:
            sig = ((colors[v], 0), ())
        else:
            _arrange(items)
            sig = _join(colors[v], items)
        sigs[v] = sig
        p = par[v]
        if p >= 0:
            kids.setdefault(p, []).append((_shift(sig[0]), (mul[v],) + sig[1]))
    return sigs, par


def signature(t: RootedTree) -> Signature:
    return subtree_signatures(t)[0][t.root]


def canonicalize(t: RootedTree) -> RootedTree:
    """Canonical ordered tree, re-indexed so that vertex ``i`` has DFS index ``i``."""
    _, order = subtree_signatures(t)
    return t.reordered(order).in_dfs_order()


def graph_signature(g: ChemicalGraph, root: int, vertices: Collection[int] | None = None) -> Signature:
    allowed = None if vertices is None else set(vertices)
    if not 0 <= root < g.n or (allowed is not None and root not in allowed):
        raise GraphError("root outside the vertex set")
    sigs, _ = adjacency_signatures(g, root, allowed)
    if len(sigs) != (g.n if allowed is None else len(allowed)):
        raise GraphError("vertex set is not connected")
    return sigs[root]


def signature_text(sig: Signature, table) -> tuple[str, str]:
    delta, mm = sig
    dtext = "".join(f"{table.symbol(delta[i])}{delta[i + 1]}" for i in range(0, len(delta), 2))
    return dtext, ",".join(str(m) for m in mm)


# ---------------------------------------------------------------------------
# ranking


def _flatten(sig: Signature) -> tuple[int, ...]:
    # delta entries are >= 0, so a -1 separator keeps prefix order intact
    return sig[0] + (-1,) + sig[1]


def radix_sort(seqs: Sequence[Sequence[int]]) -> list[int]:
    """Indices of ``seqs`` in ascending lexicographic order.

    Length-bucketed LSD bucket sort over small nonnegative-shifted integers,
    the classic method for variable-length strings.
    """
    if not seqs:
        return []
    lo = min((min(s) for s in seqs if s), default=0)
    hi = max((max(s) for s in seqs if s), default=0)
    maxlen = max(len(s) for s in seqs)
    by_len: list[list[int]] = [[] for _ in range(maxlen + 1)]
    for i, s in enumerate(seqs):
        by_len[len(s)].append(i)
    cur: list[int] = []
    width = hi - lo + 1
    for pos in range(maxlen - 1, -1, -1):
        # sequences with length exactly pos+1 join before this pass
        cur = by_len[pos + 1] + cur
        buckets: list[list[int]] = [[] for _ in range(width)]
        for i in cur:
            buckets[seqs[i][pos] - lo].append(i)
        cur = [i for b in buckets for i in b]
    return by_len[0] + cur


def rank_signatures(sigs: Iterable[Signature], sorter: str = "builtin") -> dict[Signature, int]:
    """Dense 1-based ranks in ascending signature order."""
    uniq = list(set(sigs))
    if sorter == "radix":
        order = [uniq[i] for i in radix_sort([_flatten(s) for s in uniq])]
    elif sorter == "builtin":
        order = sorted(uniq)
    else:
        raise ValueError(f"unknown sorter {sorter!r}")
    return {s: i for i, s in enumerate(order, 1)}


def rank_trees(family: Iterable[RootedTree], sorter: str = "builtin") -> tuple[dict[Signature, int], list[int]]:
    """Ranks over every rooted subtree of every member.

    Returns the signature -> rank map of the closure and the rank of each
    family member (in input order).
    """
    roots = []
    closure: list[Signature] = []
    for t in family:
        sigs, _ = subtree_signatures(t)
        closure.extend(sigs)
        roots.append(sigs[t.root])
    ranks = rank_signatures(closure, sorter)
    return ranks, [ranks[s] for s in roots]


# ---------------------------------------------------------------------------
# centroids and unrooted keys


def _component_sizes(g: ChemicalGraph) -> list[int]:
    """For a tree: size of the largest component left by deleting each vertex."""
    n = g.n
    parent = [-1] * n
    order = [0]
    seen = {0}
    adj = g._adj
    for u in order:
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                parent[w] = u
                order.append(w)
    sub = [1] * n
    for v in reversed(order):
        if parent[v] >= 0:
            sub[parent[v]] += sub[v]
    worst = [0] * n
    for v in range(n):
        big = n - sub[v]
        for w in adj[v]:
            if w != parent[v]:
                big = max(big, sub[w])
        worst[v] = big
    return worst


def centroid(g: ChemicalGraph) -> tuple[int, ...]:
    """One vertex (unicentroid) or an adjacent pair (bicentroid)."""
    if g.pair_count != g.n - 1 or not g.is_connected():
        raise GraphError("centroid needs a tree")
    worst = _component_sizes(g)
    best = [v for v in range(g.n) if worst[v] <= g.n // 2]
    if len(best) == 2 and g.n % 2 == 0 and all(worst[v] == g.n // 2 for v in best):
        return tuple(best)
    return (min(best, key=lambda v: worst[v]),)


def centroid_tree(g: ChemicalGraph) -> RootedTree:
    """Canonical tree rooted at the centroid (first endpoint for a bicentroid,
    chosen so that its half has the larger signature)."""
    cen = centroid(g)
    if len(cen) == 1:
        return canonicalize(tree_from_graph(g, cen[0]))
    a, b = cen
    sa = adjacency_signatures(g, a, skip=(b,))[0][a]
    sb = adjacency_signatures(g, b, skip=(a,))[0][b]
    root = a if sa >= sb else b
    return canonicalize(tree_from_graph(g, root))


def unrooted_tree_key(g: ChemicalGraph) -> tuple:
    """Complete isomorphism invariant of a multi-tree."""
    cen = centroid(g)
    if len(cen) == 1:
        return (1, graph_signature(g, cen[0]))
    a, b = cen
    sa = adjacency_signatures(g, a, skip=(b,))[0][a]
    sb = adjacency_signatures(g, b, skip=(a,))[0][b]
    return (2, max(sa, sb), min(sa, sb), g.mult(a, b))


# ---------------------------------------------------------------------------
# ancestors and copy flags


def lca_gua(t: RootedTree, u: int, v: int) -> tuple[int, int, int]:
    """``(lca, gua(u, v), gua(v, u))``; in the ancestor case both guas are the
    child of the ancestor on the way to the other vertex."""
    if u == v:
        raise ValueError("lca_gua needs two distinct vertices")
    dep = t.depth
    a, b = u, v
    pa, pb = -1, -1
    while dep[a] > dep[b]:
        pa, a = a, t.parent[a]
    while dep[b] > dep[a]:
        pb, b = b, t.parent[b]
    while a != b:
        pa, a = a, t.parent[a]
        pb, b = b, t.parent[b]
    if pa == -1:
        pa = pb
    if pb == -1:
        pb = pa
    return a, pa, pb


def copy_flags(t: RootedTree, sigs: Sequence[Signature] | None = None) -> tuple[int, ...]:
    """1 where a vertex repeats its left sibling's branch (edge multiplicity included)."""
    if sigs is None:
        sigs = subtree_signatures(t)[0]
    out = [0] * t.n
    for v in range(t.n):
        lft = t.left[v]
        if lft >= 0 and t.mul[v] == t.mul[lft] and sigs[v] == sigs[lft]:
            out[v] = 1
    return tuple(out)


def is_canonical(t: RootedTree) -> bool:
    sigs, order = subtree_signatures(t)
    return all(
        tuple(sigs[c] for c in order[v]) == tuple(sigs[c] for c in t.children[v])
        and tuple(t.mul[c] for c in order[v]) == tuple(t.mul[c] for c in t.children[v])
        for v in range(t.n)
    )
