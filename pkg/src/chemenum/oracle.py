"""Brute-force ground truth: isomorphism testing and exhaustive enumeration.

Nothing here uses the canonical-form machinery of the generators, so the two
can be checked against each other.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .features import PathSpec, eulf_ok
from .graph import ChemicalGraph, ColorTable, GraphError, ShapeClass, classify

MAX_ORACLE_ATOMS = 9


# ---------------------------------------------------------------------------
# isomorphism


def _refine(g: ChemicalGraph, rounds: int = 3) -> list[int]:
    """Color refinement labels (stable integer ids valid only within one call
    pair, so use :func:`invariant` for cross-graph buckets)."""
    lab = [hash((c,)) for c in g.colors]
    for _ in range(rounds):
        lab = [hash((lab[v], tuple(sorted((lab[w], m) for w, m in g.neighbors(v).items()))))
               for v in range(g.n)]
    return lab


def invariant(g: ChemicalGraph) -> tuple:
    """Isomorphism invariant used for bucketing."""
    return (g.n, tuple(sorted(g.colors)), tuple(sorted(_refine(g))))


def _vertex_label(g: ChemicalGraph, v: int) -> tuple:
    return (g.colors[v], g.deg(v), tuple(sorted((g.colors[w], m) for w, m in g.neighbors(v).items())))


def find_isomorphism(g1: ChemicalGraph, g2: ChemicalGraph,
                     fixed: dict[int, int] | None = None) -> dict[int, int] | None:
    """A color- and multiplicity-preserving bijection, or None."""
    n = g1.n
    if n != g2.n or g1.pair_count != g2.pair_count:
        return None
    lab1 = [_vertex_label(g1, v) for v in range(n)]
    lab2 = [_vertex_label(g2, v) for v in range(n)]
    if sorted(lab1) != sorted(lab2):
        return None
    r1, r2 = _refine(g1), _refine(g2)
    if sorted(r1) != sorted(r2):
        return None
    cand = {v: [w for w in range(n) if r2[w] == r1[v]] for v in range(n)}
    # visit in BFS order so each new vertex usually has a mapped neighbor
    order: list[int] = []
    seen: set[int] = set()
    starts = list(fixed or ()) + sorted(range(n), key=lambda v: len(cand[v]))
    for s in starts:
        if s in seen:
            continue
        seen.add(s)
        queue = [s]
        for u in queue:
            order.append(u)
            for w in g1.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    phi: dict[int, int] = {}
    used: set[int] = set()

    def ok(v: int, w: int) -> bool:
        for a, b in phi.items():
            if g1.mult(v, a) != g2.mult(w, b):
                return False
        return True

    def rec(i: int) -> bool:
        if i == n:
            return True
        v = order[i]
        options = [fixed[v]] if fixed and v in fixed else cand[v]
        for w in options:
            if w in used or r2[w] != r1[v] or not ok(v, w):
                continue
            phi[v] = w
            used.add(w)
            if rec(i + 1):
                return True
            del phi[v]
            used.discard(w)
        return False

    return dict(phi) if rec(0) else None


def isomorphic(g1: ChemicalGraph, g2: ChemicalGraph) -> bool:
    return find_isomorphism(g1, g2) is not None


def rooted_isomorphic(g1: ChemicalGraph, r1: int, g2: ChemicalGraph, r2: int) -> bool:
    if g1.colors[r1] != g2.colors[r2]:
        return False
    return find_isomorphism(g1, g2, {r1: r2}) is not None


def automorphisms(g: ChemicalGraph) -> list[tuple[int, ...]]:
    """Every automorphism as a tuple ``p`` with ``p[v]`` the image of ``v``."""
    n = g.n
    lab = [_vertex_label(g, v) for v in range(n)]
    ref = _refine(g)
    out: list[tuple[int, ...]] = []
    phi = [-1] * n
    used = [False] * n

    def rec(v: int) -> None:
        if v == n:
            out.append(tuple(phi))
            return
        for w in range(n):
            if used[w] or lab[w] != lab[v] or ref[w] != ref[v]:
                continue
            if any(g.mult(v, a) != g.mult(w, phi[a]) for a in range(v)):
                continue
            phi[v] = w
            used[w] = True
            rec(v + 1)
            used[w] = False
        phi[v] = -1

    rec(0)
    return out


# ---------------------------------------------------------------------------
# iso-class sets


@dataclass
class IsoClassSet:
    """Pairwise non-isomorphic graphs, checked on insert."""

    graphs: list[ChemicalGraph] = field(default_factory=list)
    _buckets: dict[tuple, list[int]] = field(default_factory=dict, repr=False)

    def find(self, g: ChemicalGraph) -> int | None:
        for i in self._buckets.get(invariant(g), ()):
            if isomorphic(self.graphs[i], g):
                return i
        return None

    def add(self, g: ChemicalGraph) -> bool:
        """Insert ``g`` unless an isomorphic graph is present; True if inserted."""
        key = invariant(g)
        for i in self._buckets.get(key, ()):
            if isomorphic(self.graphs[i], g):
                return False
        self._buckets.setdefault(key, []).append(len(self.graphs))
        self.graphs.append(g)
        return True

    def __len__(self) -> int:
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)


@dataclass
class RepresentsReport:
    missing: list[ChemicalGraph]
    duplicates: list[ChemicalGraph]
    extra: list[ChemicalGraph]

    @property
    def ok(self) -> bool:
        return not (self.missing or self.duplicates or self.extra)

    def summary(self) -> str:
        return f"missing={len(self.missing)} duplicates={len(self.duplicates)} extra={len(self.extra)}"


def represents(candidate: Iterable[ChemicalGraph], truth: Iterable[ChemicalGraph]) -> RepresentsReport:
    truth_set = IsoClassSet()
    for g in truth:
        truth_set.add(g)
    hit = [False] * len(truth_set)
    seen = IsoClassSet()
    dup, extra = [], []
    for g in candidate:
        if not seen.add(g):
            dup.append(g)
            continue
        i = truth_set.find(g)
        if i is None:
            extra.append(g)
        else:
            hit[i] = True
    missing = [truth_set.graphs[i] for i, h in enumerate(hit) if not h]
    return RepresentsReport(missing, dup, extra)


# ---------------------------------------------------------------------------
# exhaustive enumeration

_PLAIN = ColorTable.of(("X", 64))


def _skeleton(n: int, edges: Iterable[tuple[int, int]]) -> ChemicalGraph:
    return ChemicalGraph(_PLAIN, [0] * n, [(u, v, 1) for u, v in edges], 1, check_valence=False)


def unlabeled_trees(n: int) -> list[ChemicalGraph]:
    """One simple tree per isomorphism class, grown by leaf addition."""
    level = IsoClassSet()
    level.add(_skeleton(1, []))
    for k in range(1, n):
        nxt = IsoClassSet()
        for t in level:
            for u in range(k):
                nxt.add(_skeleton(k + 1, [(a, b) for a, b, _ in t.edges()] + [(u, k)]))
        level = nxt
    return list(level)


_SHAPE_EXTRA = {
    ShapeClass.MULTI_TREE: 0,
    ShapeClass.MONOCYCLIC: 1,
    ShapeClass.BIBLOCK_2AUG: 2,
    ShapeClass.SHARED_2AUG: 2,
}

_skeleton_cache: dict[tuple[int, ShapeClass], list[ChemicalGraph]] = {}


def skeletons(n: int, shape: ShapeClass) -> list[ChemicalGraph]:
    """Unlabeled connected simple graphs of the given shape."""
    key = (n, shape)
    if key in _skeleton_cache:
        return _skeleton_cache[key]
    extra = _SHAPE_EXTRA[shape]
    out = IsoClassSet()
    for t in unlabeled_trees(n):
        base = [(a, b) for a, b, _ in t.edges()]
        nonadj = [(a, b) for a, b in itertools.combinations(range(n), 2) if t.mult(a, b) == 0]
        for add in itertools.combinations(nonadj, extra):
            s = _skeleton(n, base + list(add))
            if classify(s) is shape:
                out.add(s)
    _skeleton_cache[key] = list(out)
    return _skeleton_cache[key]


def _colorings(skel: ChemicalGraph, atoms: dict[int, int], table: ColorTable,
               auts: list[tuple[int, ...]]) -> Iterable[tuple[int, ...]]:
    n = skel.n
    deg = [len(skel.neighbors(v)) for v in range(n)]
    left = dict(atoms)
    cur: list[int] = []

    def rec(v: int) -> Iterable[tuple[int, ...]]:
        if v == n:
            perm = tuple(cur)
            # keep the lexicographically smallest coloring of each orbit
            if not any(tuple(perm[p[i]] for i in range(n)) < perm for p in auts):
                yield perm
            return
        for c in sorted(left):
            if left[c] == 0 or deg[v] > table.valence(c):
                continue
            left[c] -= 1
            cur.append(c)
            yield from rec(v + 1)
            cur.pop()
            left[c] += 1

    yield from rec(0)


def _multiplicities(skel: ChemicalGraph, colors: Sequence[int], table: ColorTable, d: int,
                    stab: list[tuple[int, ...]]) -> Iterable[tuple[int, ...]]:
    edges = [(u, v) for u, v, _ in skel.edges()]
    index = {frozenset(e): i for i, e in enumerate(edges)}
    res = [table.valence(colors[v]) - len(skel.neighbors(v)) for v in range(skel.n)]
    vec = [1] * len(edges)
    images = [[index[frozenset((p[u], p[v]))] for u, v in edges] for p in stab]

    def rec(i: int) -> Iterable[tuple[int, ...]]:
        if i == len(edges):
            cur = tuple(vec)
            if all(tuple(cur[img[j]] for j in range(len(cur))) >= cur for img in images):
                yield cur
            return
        u, v = edges[i]
        for m in range(1, d + 1):
            extra = m - 1
            if extra > res[u] or extra > res[v]:
                break
            res[u] -= extra
            res[v] -= extra
            vec[i] = m
            yield from rec(i + 1)
            res[u] += extra
            res[v] += extra
        vec[i] = 1

    yield from rec(0)


def enumerate_all(shape: ShapeClass, atoms: dict[int, int], d: int, table: ColorTable,
                  spec: PathSpec | None = None, check: bool = False) -> IsoClassSet:
    """Every colored multigraph of ``shape`` on exactly ``atoms``, one per
    isomorphism class, optionally filtered by ``spec`` bounds.

    Orbit representatives are picked by lex-minimality under the skeleton's
    automorphism group, so no pairwise isomorphism test is needed; ``check``
    runs one anyway.
    """
    if shape not in _SHAPE_EXTRA:
        raise GraphError(f"cannot enumerate shape {shape.value}")
    n = sum(atoms.values())
    if n > MAX_ORACLE_ATOMS:
        raise GraphError(f"oracle limited to {MAX_ORACLE_ATOMS} atoms, got {n}")
    if n < 1:
        raise GraphError("need at least one atom")
    out = IsoClassSet()
    for skel in skeletons(n, shape):
        auts = automorphisms(skel)
        for colors in _colorings(skel, atoms, table, auts):
            stab = [p for p in auts if all(colors[p[v]] == colors[v] for v in range(n))]
            for vec in _multiplicities(skel, colors, table, d, stab):
                g = ChemicalGraph(table, colors,
                                  [(u, v, m) for (u, v, _), m in zip(skel.edges(), vec)], d)
                if spec is not None and not eulf_ok(g, spec):
                    continue
                if check:
                    if not out.add(g):
                        raise AssertionError("orbit representatives collided")
                else:
                    out.graphs.append(g)
    return out
