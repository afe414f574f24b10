"""Monocyclic graphs from multi-trees: admissible pairs and the restricted filters."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .features import FeatureVector, PathSpec, coverage_ok, upper_ok
from .graph import ChemicalGraph, GraphError
from .trees import (
    RootedTree, Signature, adjacency_signatures, centroid, copy_flags, graph_signature, is_canonical,
    lca_gua, subtree_signatures, tree_from_graph,
)


@dataclass(frozen=True)
class AdmissiblePair:
    u: int
    v: int


def _copy_prefix(t: RootedTree, copy: tuple[int, ...]) -> list[int]:
    # number of copy flags on the path from v up to the root, v included
    acc = [0] * t.n
    for v in t.preorder:
        p = t.parent[v]
        acc[v] = copy[v] + (acc[p] if p >= 0 else 0)
    return acc


def admissible_pairs(t: RootedTree, check: bool = True) -> list[AdmissiblePair]:
    """All admissible pairs of a canonical tree, in DFS-index order.

    Vertices are identified by DFS index, so ``t`` must be in DFS order (as
    returned by :func:`~chemenum.trees.canonicalize`).
    """
    if check and (not is_canonical(t) or t.preorder != tuple(range(t.n))):
        raise GraphError("admissible_pairs needs a canonical tree in DFS order")
    copy = copy_flags(t)
    acc = _copy_prefix(t, copy)
    size = t.size
    left = t.left
    par = t.parent
    out = []
    for u in range(t.n):
        for v in range(u + 1, t.n):
            if par[v] == u or par[u] == v:
                continue
            lca, gu, gv = lca_gua(t, u, v)
            if acc[lca]:
                continue  # (a-1)
            if lca == u:
                if copy[gu] or acc[v] - acc[gv]:
                    continue  # (a-2), ancestor case
            else:
                if acc[u] - acc[lca] or acc[v] - acc[gv]:
                    continue  # (a-2)
                if copy[gv]:  # (a-3)
                    if left[gv] != gu or v < u + size[gu]:
                        continue
            out.append(AdmissiblePair(u, v))
    return out


def seed_tree(tree: ChemicalGraph) -> RootedTree:
    """Canonical tree rooted at the centroid (an endpoint for a bicentroid)."""
    from .trees import centroid_tree
    return centroid_tree(tree)


def generate_monocyclic(
    t: RootedTree,
    tree_graph: ChemicalGraph,
    hi: FeatureVector | None = None,
    d: int | None = None,
    restrict: bool = False,
    spec: PathSpec | None = None,
    stats: dict | None = None,
) -> Iterator[tuple[ChemicalGraph, tuple[int, int, int]]]:
    """Yield ``(T + q*xy, (x, y, q))`` over admissible pairs and feasible ``q``.

    ``t`` is canonical with ``t.labels`` pointing into ``tree_graph``.  Graphs
    failing the upper bound or the coverage rule are dropped; lower bounds are
    left to the caller.
    """
    d = tree_graph.d if d is None else d
    centroid_root = _is_centroid_root(t)
    for pair in admissible_pairs(t, check=False):
        if restrict:
            big = (has_big_pendent_centroid(t, pair.u, pair.v) if centroid_root
                   else has_big_pendent(t, pair.u, pair.v))
            if not big:
                if stats is not None:
                    stats["mono.restricted"] = stats.get("mono.restricted", 0) + 1
                continue
        x, y = t.labels[pair.u], t.labels[pair.v]
        top = min(d, tree_graph.res(x), tree_graph.res(y))
        for q in range(1, top + 1):
            g = tree_graph.add_edges(x, y, q)
            if hi is not None and not upper_ok(g, hi):
                if stats is not None:
                    stats["mono.pruned_upper"] = stats.get("mono.pruned_upper", 0) + 1
                continue
            if spec is not None and not coverage_ok(g, spec):
                if stats is not None:
                    stats["mono.pruned_coverage"] = stats.get("mono.pruned_coverage", 0) + 1
                continue
            yield g, (x, y, q)


def _is_centroid_root(t: RootedTree) -> bool:
    half = t.n // 2
    sizes = t.size
    return all(sizes[c] <= half for c in t.children[t.root])


# ---------------------------------------------------------------------------
# restricted filters


def _path_up(t: RootedTree, a: int, stop: int) -> list[int]:
    out = [a]
    while out[-1] != stop:
        out.append(t.parent[out[-1]])
    return out


def pendent_sizes_after_addition(t: RootedTree, x: int, y: int) -> list[tuple[int, int]]:
    """Pendent-tree size of every cycle vertex of ``T + xy``, from subtree sizes."""
    if t.parent[x] == y or t.parent[y] == x or x == y:
        raise GraphError("x and y must be distinct and nonadjacent")
    lca, _, _ = lca_gua(t, x, y)
    size = t.size
    out = []
    cut = 0
    for end in (x, y):
        if end == lca:
            continue
        path = _path_up(t, end, lca)
        out.append((end, size[end]))
        for c, w in zip(path, path[1:-1]):
            out.append((w, size[w] - size[c]))
        cut += size[path[-2]]
    out.append((lca, t.n - cut))
    return out


def has_big_pendent(t: RootedTree, x: int, y: int) -> bool:
    """Walk the x-y path and report whether ``T + xy`` gets a pendent tree of
    at least n/2 vertices."""
    n = t.n
    lca, _, _ = lca_gua(t, x, y)
    size = t.size
    m = n
    answer = False
    for end in (x, y):
        if end == lca:
            continue
        if 2 * size[end] >= n:
            answer = True
        c, w = end, t.parent[end]
        while w != lca:
            if 2 * (size[w] - size[c]) >= n:
                answer = True
            c, w = w, t.parent[w]
        m -= size[c]
    return answer or 2 * m >= n


def has_big_pendent_centroid(t: RootedTree, x: int, y: int) -> bool:
    """Same answer as :func:`has_big_pendent` for a centroid-rooted tree, with
    the centroid shortcuts."""
    n = t.n
    r = t.root
    size = t.size
    kids = t.children[r]
    partner = [c for c in kids if 2 * size[c] == n]
    lca, gx, gy = lca_gua(t, x, y)
    if not partner:
        if any(2 * size[c] > n for c in kids):
            raise GraphError("tree is not rooted at its centroid")
        if lca != r or lca in (x, y):
            return True
        return 2 * (n - size[gx] - size[gy]) >= n
    b = partner[0]
    in_x = t.is_ancestor(b, x)
    in_y = t.is_ancestor(b, y)
    if in_x == in_y:
        return True  # centroid edge off the path
    return {x, y} & {r, b} != set()


# ---------------------------------------------------------------------------
# canonical key of monocyclic graphs (used to merge seeds)


def pendent_partition(g: ChemicalGraph, cycle: list[int]) -> dict[int, list[int]]:
    on_cycle = set(cycle)
    out = {}
    for c in cycle:
        seen = {c}
        stack = [c]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if w not in seen and w not in on_cycle:
                    seen.add(w)
                    stack.append(w)
        out[c] = sorted(seen)
    return out


def pendent_signatures(g: ChemicalGraph, cycle: list[int]) -> dict[int, Signature]:
    """Signature of the pendent tree at each cycle vertex."""
    sigs, _ = adjacency_signatures(g, cycle, skip=set(cycle))
    return {c: sigs[c] for c in cycle}


def monocyclic_key(g: ChemicalGraph, cycle: list[int] | None = None) -> tuple:
    """Complete isomorphism invariant: the largest cyclic reading of
    (pendent-tree signature, bond multiplicity) around the cycle.

    ``cycle`` may be passed when already known, in traversal order.
    """
    if cycle is None:
        from .graph import cycle_of
        cycle = cycle_of(g)
    sig = pendent_signatures(g, cycle)
    k = len(cycle)
    adj = g._adj
    best = None
    for seq in (cycle, cycle[::-1]):
        tokens = []
        for i, c in enumerate(seq):
            tokens.append(sig[c])
            tokens.append(adj[c][seq[(i + 1) % k]])
        tokens += tokens
        for s in range(0, 2 * k, 2):
            code = tuple(tokens[s:s + 2 * k])
            if best is None or code > best:
                best = code
    return (k, best)
