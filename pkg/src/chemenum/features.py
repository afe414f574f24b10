"""Colored sequences, path frequencies and the bounds built on them.

A colored sequence is stored as a flat integer tuple ``(c0, m1, c1, ..., mK, cK)``
with colors as :class:`~chemenum.graph.ColorTable` ids.  Its text form
concatenates symbols and single-digit multiplicities, e.g. ``C1N2C``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .graph import ChemicalGraph, ColorTable, GraphError

Seq = tuple[int, ...]
INF = math.inf


class SpecError(ValueError):
    """Malformed spec file or inconsistent bounds."""


def seq_length(t: Seq) -> int:
    return len(t) // 2


def rev(t: Seq) -> Seq:
    return t[::-1]


def seq_to_text(t: Seq, table: ColorTable) -> str:
    return "".join(table.symbol(x) if i % 2 == 0 else str(x) for i, x in enumerate(t))


_SEQ_RE = re.compile(r"(\D+)(\d)?")


def seq_from_text(text: str, table: ColorTable) -> Seq:
    out: list[int] = []
    pos = 0
    for m in _SEQ_RE.finditer(text):
        if m.start() != pos:
            break
        pos = m.end()
        out.append(table.id(m.group(1)))
        if m.group(2) is not None:
            mult = int(m.group(2))
            if mult < 1:
                raise SpecError(f"multiplicity 0 in {text!r}")
            out.append(mult)
    if pos != len(text) or not out or len(out) % 2 == 0:
        raise SpecError(f"bad colored sequence {text!r}")
    return tuple(out)


def gamma(g: ChemicalGraph, path: Iterable[int]) -> Seq:
    path = list(path)
    if len(set(path)) != len(path):
        raise GraphError("path repeats a vertex")
    out = [g.colors[path[0]]]
    for a, b in zip(path, path[1:]):
        m = g.mult(a, b)
        if m == 0:
            raise GraphError(f"vertices {a} and {b} are not adjacent")
        out += [m, g.colors[b]]
    return tuple(out)


def iter_paths(g: ChemicalGraph, max_len: int | None = None) -> Iterator[tuple[int, ...]]:
    """All rooted (ordered) paths with at most ``max_len`` edges, length 0 included."""
    limit = g.n if max_len is None else max_len
    for root in range(g.n):
        stack = [(root,)]
        while stack:
            p = stack.pop()
            yield p
            if len(p) - 1 >= limit:
                continue
            last = p[-1]
            for w in g.neighbors(last):
                if w not in p:
                    stack.append(p + (w,))


def _path_counts(g: ChemicalGraph, max_len: int) -> dict[Seq, int]:
    colors = g.colors
    if max_len <= 0:
        return {(c,): k for c, k in g.color_counts().items()}
    counts: dict[Seq, int] = {}
    adj = g._adj
    for root in range(g.n):
        stack = [(root, (colors[root],), 1 << root)]
        while stack:
            v, t, seen = stack.pop()
            counts[t] = counts.get(t, 0) + 1
            if len(t) // 2 >= max_len:
                continue
            for w, m in adj[v].items():
                if not seen >> w & 1:
                    stack.append((w, t + (m, colors[w]), seen | 1 << w))
    return counts


def frq(t: Seq, g: ChemicalGraph) -> int:
    return _path_counts(g, seq_length(t)).get(tuple(t), 0)


@dataclass(frozen=True)
class FeatureVector:
    """Map from colored sequences of length <= ``level`` to counts.

    Missing keys read as ``default``; upper bounds use ``INF`` as default when
    only a chosen set of sequences is bounded.
    """

    counts: Mapping[Seq, float]
    level: int
    default: float = 0

    def __getitem__(self, t: Seq) -> float:
        return self.counts.get(t, self.default)

    def keys(self):
        return self.counts.keys()

    def __le__(self, other: "FeatureVector") -> bool:
        keys = set(self.counts) | set(other.counts)
        level = min(self.level, other.level)
        if self.default > other.default:
            return False
        return all(self[t] <= other[t] for t in keys if seq_length(t) <= level)


def feature_vector(g: ChemicalGraph, k: int) -> FeatureVector:
    if k < 0:
        raise ValueError("level must be >= 0")
    return FeatureVector(_path_counts(g, k), k)


def relax_lower(g: FeatureVector) -> FeatureVector:
    """Lower bound that stays valid after deleting one adjacent pair."""
    out: dict[Seq, float] = {}
    for t, v in g.counts.items():
        if len(t) == 1:
            out[t] = v
        elif len(t) == 3:
            drop = 2 if t[0] == t[2] else 1
            out[t] = max(0, v - drop)
    return FeatureVector(out, g.level, 0)


def upper_ok(g: ChemicalGraph, hi: FeatureVector, counts: Mapping[Seq, int] | None = None) -> bool:
    if counts is None:
        counts = _path_counts(g, hi.level)
    for t, c in counts.items():
        if seq_length(t) <= hi.level and c > hi[t]:
            return False
    return True


def lower_ok(g: ChemicalGraph, lo: FeatureVector, counts: Mapping[Seq, int] | None = None) -> bool:
    if counts is None:
        counts = _path_counts(g, lo.level)
    return all(counts.get(t, 0) >= v for t, v in lo.counts.items() if seq_length(t) <= lo.level)


def feasible(g: ChemicalGraph, lo: FeatureVector, hi: FeatureVector) -> bool:
    counts = _path_counts(g, max(lo.level, hi.level))
    if any(g.res(v) < 0 for v in range(g.n)):
        return False
    return lower_ok(g, lo, counts) and upper_ok(g, hi, counts)


@dataclass
class PathSpec:
    """Path set with per-sequence bounds plus the path-coverage rule.

    ``bounds`` maps every sequence of the path set to ``(lower, upper)``;
    level-0 entries are the atom counts.  ``mode`` is ``"A"`` (all paths of
    length <= L are in the set), ``"P"`` (all paths longer than L are in the
    set) or ``"none"``.
    """

    colors: ColorTable
    d: int
    N: int
    L: int = 0
    mode: str = "none"
    s: int = 0
    bounds: dict[Seq, tuple[int, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.mode not in ("A", "P", "none"):
            raise SpecError(f"unknown mode {self.mode!r}")
        for t, (lo, hi) in self.bounds.items():
            if lo > hi:
                raise SpecError(f"lower bound exceeds upper bound for {seq_to_text(t, self.colors)}")
            if len(t) == 1 and lo != hi:
                raise SpecError("atom counts need equal lower and upper bounds")
            if seq_length(t) > self.N:
                raise SpecError(f"sequence {seq_to_text(t, self.colors)} longer than N={self.N}")
        for c in range(len(self.colors)):
            self.bounds.setdefault((c,), (0, 0))

    @property
    def path_set(self) -> frozenset[Seq]:
        return frozenset(t for t, (lo, hi) in self.bounds.items() if hi > 0)

    @property
    def atoms(self) -> dict[int, int]:
        return {t[0]: lo for t, (lo, _) in self.bounds.items() if len(t) == 1 and lo > 0}

    @property
    def n_atoms(self) -> int:
        return sum(self.atoms.values())

    def lower(self) -> FeatureVector:
        return FeatureVector({t: lo for t, (lo, _) in self.bounds.items()}, self.N, 0)

    def upper(self) -> FeatureVector:
        return FeatureVector({t: hi for t, (_, hi) in self.bounds.items()}, self.N, INF)


def coverage_ok(g: ChemicalGraph, spec: PathSpec) -> bool:
    """Path-coverage rule of the PathSpec mode.  Closed under taking subgraphs
    that keep pair multiplicities, so it is safe for pruning."""
    if spec.mode == "none":
        return True
    pi = spec.path_set
    if spec.mode == "A":
        return all(t in pi for t in _path_counts(g, spec.L))
    # mode P: every path longer than L must be listed, so none may exceed N
    adj = [g.neighbors(v) for v in range(g.n)]
    colors = g.colors
    for root in range(g.n):
        stack = [(root, (colors[root],), 1 << root)]
        while stack:
            v, t, seen = stack.pop()
            if len(t) // 2 > spec.L and t not in pi:
                return False
            for w, m in adj[v].items():
                if not seen >> w & 1:
                    stack.append((w, t + (m, colors[w]), seen | 1 << w))
    return True


def eulf_ok(g: ChemicalGraph, spec: PathSpec) -> bool:
    counts = _path_counts(g, spec.N)
    for t, (lo, hi) in spec.bounds.items():
        if not lo <= counts.get(t, 0) <= hi:
            return False
    return coverage_ok(g, spec)


# ---------------------------------------------------------------------------
# spec file format


def parse_spec(text: str) -> PathSpec:
    colors: list[tuple[str, int]] = []
    d = None
    n_level = None
    L = 0
    mode = "none"
    s = 0
    raw_paths: list[tuple[str, int, float]] = []
    raw_atoms: list[tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            key = tok[0]
            if key == "color":
                colors.append((tok[1], int(tok[2])))
            elif key == "d":
                d = int(tok[1])
            elif key in ("K", "N"):
                n_level = int(tok[1])
            elif key == "L":
                L = int(tok[1])
            elif key == "mode":
                mode = tok[1] if tok[1] in ("A", "P") else tok[1].lower()
            elif key == "s":
                s = int(tok[1])
            elif key == "path":
                hi = INF if tok[3] == "*" else int(tok[3])
                raw_paths.append((tok[1], int(tok[2]), hi))
            elif key == "atom":
                raw_atoms.append((tok[1], int(tok[2])))
            else:
                raise SpecError(f"unknown record {key!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, SpecError):
                raise SpecError(f"line {lineno}: {exc}") from None
            raise SpecError(f"line {lineno}: malformed record {line!r}") from None
    table = ColorTable.of(*colors) if colors else None
    if table is None:
        from .graph import DEFAULT_COLORS
        table = DEFAULT_COLORS
    if d is None:
        raise SpecError("missing 'd' record")
    if not raw_atoms:
        raise SpecError("at least one 'atom' record is required")
    bounds: dict[Seq, tuple[int, float]] = {}
    try:
        for sym, count in raw_atoms:
            bounds[(table.id(sym),)] = (count, count)
        for text_seq, lo, hi in raw_paths:
            t = seq_from_text(text_seq, table)
            if len(t) == 1 and t in bounds and bounds[t] != (lo, hi):
                raise SpecError(f"path {text_seq} conflicts with its atom record")
            if any(m > d for m in t[1::2]):
                raise SpecError(f"path {text_seq} exceeds d={d}")
            bounds[t] = (lo, hi)
    except GraphError as exc:
        raise SpecError(str(exc)) from None
    if n_level is None:
        n_level = max((seq_length(t) for t in bounds), default=0)
    return PathSpec(table, d, n_level, L, mode, s, bounds)


def format_spec(spec: PathSpec) -> str:
    lines = [f"color {sym} {val}" for sym, val in spec.colors.entries]
    lines += [f"d {spec.d}", f"K {spec.N}", f"L {spec.L}", f"mode {spec.mode}", f"s {spec.s}"]
    for t in sorted(spec.bounds, key=lambda t: (len(t), t)):
        lo, hi = spec.bounds[t]
        if len(t) == 1:
            if lo > 0:
                lines.append(f"atom {spec.colors.symbol(t[0])} {lo}")
            continue
        hi_text = "*" if hi == INF else str(int(hi))
        lines.append(f"path {seq_to_text(t, spec.colors)} {lo} {hi_text}")
    return "\n".join(lines) + "\n"
