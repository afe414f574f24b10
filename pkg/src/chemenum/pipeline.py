"""Stage driver: multi-trees, then monocyclic graphs, then bi-block graphs.

Each stage keeps only graphs that may still grow into a feasible final graph:
upper bounds and coverage are hereditary, and lower bounds are relaxed once
per edge-addition step still to come.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .biblock import decompose, generate_children
from .features import (
    FeatureVector, PathSpec, coverage_ok, eulf_ok, feature_vector, lower_ok, relax_lower, upper_ok,
)
from .graph import ChemicalGraph, ShapeClass, classify, simple_path
from .mono import generate_monocyclic, monocyclic_key
from .trees import centroid_tree, unrooted_tree_key

log = logging.getLogger(__name__)

STAGES = ("tree", "mono", "biblock")
SHAPES = {"tree": ShapeClass.MULTI_TREE, "mono": ShapeClass.MONOCYCLIC, "biblock": ShapeClass.BIBLOCK_2AUG}

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_SOLUTIONS = 3
EXIT_COUNT_LIMIT = 4
EXIT_TIME_LIMIT = 5
EXIT_ORACLE_MISMATCH = 6


class _Stop(Exception):
    def __init__(self, status: int) -> None:
        super().__init__(status)
        self.status = status


@dataclass
class RunConfig:
    spec: PathSpec
    stages: tuple[str, ...] = STAGES
    inputs: Sequence[ChemicalGraph] | None = None
    count_limit: int | None = None
    time_limit: float = 60.0
    relax: int = 0
    restrict: bool | None = None
    workers: int = 1
    oracle_verify: bool = False

    def __post_init__(self) -> None:
        stages = tuple(self.stages)
        if not stages or any(s not in STAGES for s in stages):
            raise ValueError(f"unknown stage list {stages}")
        first = STAGES.index(stages[0])
        if stages != STAGES[first:first + len(stages)]:
            raise ValueError("stages must form a contiguous chain")
        if stages[0] != "tree" and self.inputs is None:
            raise ValueError(f"stage {stages[0]} needs input graphs")
        if self.count_limit is not None and self.count_limit < 1:
            raise ValueError("count limit must be positive")
        if self.time_limit <= 0 or self.workers < 1 or self.relax < 0:
            raise ValueError("limits must be positive")
        self.stages = stages


@dataclass
class RunResult:
    status: int
    graphs: list[ChemicalGraph]
    stats: dict[str, float] = field(default_factory=dict)
    parents: list[ChemicalGraph | None] = field(default_factory=list)


def build_instance(sample: ChemicalGraph, N: int, L: int, s: int, mode: str = "A") -> PathSpec:
    """Bounds from the path frequencies of one sample graph."""
    if min(N, L, s) < 0:
        raise ValueError("N, L and s must be >= 0")
    f = feature_vector(sample, N)
    bounds = {}
    for t, c in f.counts.items():
        bounds[t] = (c, c) if len(t) == 1 else (max(0, c - s), c + s)
    d = max((m for _, _, m in sample.edges()), default=1)
    return PathSpec(sample.table, d, N, L, mode, s, bounds)


def _relaxed(lo: FeatureVector, times: int) -> FeatureVector:
    for _ in range(times):
        lo = relax_lower(lo)
    return lo


class _Clock:
    def __init__(self, limit: float) -> None:
        self.start = time.monotonic()
        self.limit = limit

    def check(self) -> None:
        if time.monotonic() - self.start > self.limit:
            raise _Stop(EXIT_TIME_LIMIT)

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.start


def generate_trees(spec: PathSpec, lo: FeatureVector, hi: FeatureVector,
                   clock: _Clock | None = None, stats: dict | None = None) -> list[ChemicalGraph]:
    """All multi-trees on the atom multiset, one per isomorphism class,
    satisfying ``lo``/``hi`` and the coverage rule."""
    atoms = spec.atoms
    n = sum(atoms.values())
    table = spec.colors
    level: dict[tuple, ChemicalGraph] = {}
    for c in sorted(atoms):
        g = ChemicalGraph(table, [c], [], spec.d)
        if upper_ok(g, hi) and coverage_ok(g, spec):
            level[unrooted_tree_key(g)] = g
    for _ in range(1, n):
        nxt: dict[tuple, ChemicalGraph] = {}
        for t in level.values():
            if clock:
                clock.check()
            have = t.color_counts()
            for u in range(t.n):
                for c in sorted(atoms):
                    if have.get(c, 0) >= atoms[c]:
                        continue
                    for q in range(1, min(spec.d, t.res(u), table.valence(c)) + 1):
                        t2 = t.add_leaf(u, c, q)
                        if not upper_ok(t2, hi) or not coverage_ok(t2, spec):
                            if stats is not None:
                                stats["tree.pruned"] = stats.get("tree.pruned", 0) + 1
                            continue
                        key = unrooted_tree_key(t2)
                        if key not in nxt:
                            nxt[key] = t2
        level = nxt
    return [t for t in level.values() if lower_ok(t, lo)]


def _mono_from_seed(args) -> tuple[list[ChemicalGraph], dict]:
    tree, hi, spec, restrict = args
    stats: dict = {}
    t = centroid_tree(tree)
    out = []
    for g, (x, y, _) in generate_monocyclic(t, tree, hi, spec.d, restrict, spec, stats):
        out.append((g, monocyclic_key(g, simple_path(tree, x, y))))
    return out, stats


def _children_of(args) -> tuple[list[ChemicalGraph], dict]:
    g, hi, spec = args
    stats: dict = {}
    out = [h for h, _ in generate_children(decompose(g), hi, spec, spec.d, stats=stats)]
    return out, stats


def _merge(stats: dict, part: dict) -> None:
    for k, v in part.items():
        stats[k] = stats.get(k, 0) + v


def _map(fn, items: list, workers: int):
    if workers == 1 or len(items) < 2:
        return map(fn, items)
    return _pool_map(fn, items, workers)


def _pool_map(fn, items, workers):
    pool = ProcessPoolExecutor(max_workers=workers)
    try:
        yield from pool.map(fn, items, chunksize=max(1, len(items) // (8 * workers)))
    finally:
        pool.shutdown(cancel_futures=True)


def run(config: RunConfig) -> RunResult:
    spec = config.spec
    clock = _Clock(config.time_limit)
    stats: dict[str, float] = {}
    final = config.stages[-1]
    level_final = STAGES.index(final)
    hi = spec.upper()
    lo = spec.lower()
    restrict = ("biblock" in config.stages) if config.restrict is None else config.restrict

    def depth(stage: str) -> int:
        return config.relax + level_final - STAGES.index(stage)

    current: list[ChemicalGraph] = []
    parents: list[ChemicalGraph | None] = []
    status = EXIT_OK
    try:
        for stage in config.stages:
            stage_lo = _relaxed(lo, depth(stage))
            if stage == "tree":
                current = generate_trees(spec, stage_lo, hi, clock, stats)
                parents = [None] * len(current)
            elif stage == "mono":
                if stage == config.stages[0]:
                    seeds = list(config.inputs)
                    _check_shapes(seeds, ShapeClass.MULTI_TREE)
                else:
                    seeds = current
                seen: set[tuple] = set()
                current, parents = [], []
                jobs = [(t, hi, spec, restrict) for t in seeds]
                for tree, (found, part) in zip(seeds, _map(_mono_from_seed, jobs, config.workers)):
                    clock.check()
                    _merge(stats, part)
                    for g, key in found:
                        if key in seen:
                            stats["mono.merged"] = stats.get("mono.merged", 0) + 1
                            continue
                        seen.add(key)
                        if not lower_ok(g, stage_lo):
                            stats["mono.pruned_lower"] = stats.get("mono.pruned_lower", 0) + 1
                            continue
                        current.append(g)
                        parents.append(tree)
                stats["mono.seeds"] = len(seeds)
            else:
                if stage == config.stages[0]:
                    seeds = list(config.inputs)
                    _check_shapes(seeds, ShapeClass.MONOCYCLIC)
                else:
                    seeds = current
                current, parents = [], []
                jobs = [(g, hi, spec) for g in seeds]
                for g, (found, part) in zip(seeds, _map(_children_of, jobs, config.workers)):
                    clock.check()
                    _merge(stats, part)
                    for h in found:
                        if lower_ok(h, stage_lo):
                            current.append(h)
                            parents.append(g)
                stats["biblock.seeds"] = len(seeds)
            stats[f"{stage}.count"] = len(current)
            log.info("stage %s: %d graphs", stage, len(current))
    except _Stop as stop:
        status = stop.status
        current, parents = [], []

    if status == EXIT_OK and depth(final) == 0:
        keep = [i for i, g in enumerate(current) if eulf_ok(g, spec)]
        stats["final.rejected"] = len(current) - len(keep)
        current = [current[i] for i in keep]
        parents = [parents[i] for i in keep]
    if status == EXIT_OK and config.count_limit is not None and len(current) > config.count_limit:
        current = current[:config.count_limit]
        parents = parents[:config.count_limit]
        status = EXIT_COUNT_LIMIT
    if status == EXIT_OK and config.oracle_verify:
        status = _oracle_status(config, current, stats)
    if status == EXIT_OK and not current:
        status = EXIT_NO_SOLUTIONS
    stats["output.count"] = len(current)
    stats["time.wall"] = round(clock.elapsed, 3)
    return RunResult(status, current, stats, parents)


def _check_shapes(graphs: Iterable[ChemicalGraph], shape: ShapeClass) -> None:
    for g in graphs:
        if classify(g) is not shape:
            raise ValueError(f"input graph is {classify(g).value}, expected {shape.value}")


def _oracle_status(config: RunConfig, graphs: list[ChemicalGraph], stats: dict) -> int:
    from .oracle import MAX_ORACLE_ATOMS, enumerate_all, represents

    spec = config.spec
    if config.stages[0] != "tree" or config.relax or spec.n_atoms > MAX_ORACLE_ATOMS:
        stats["oracle.skipped"] = 1
        return EXIT_OK
    truth = enumerate_all(SHAPES[config.stages[-1]], spec.atoms, spec.d, spec.colors, spec)
    report = represents(graphs, truth)
    stats["oracle.truth"] = len(truth)
    stats["oracle.missing"] = len(report.missing)
    stats["oracle.duplicates"] = len(report.duplicates)
    stats["oracle.extra"] = len(report.extra)
    return EXIT_OK if report.ok else EXIT_ORACLE_MISMATCH


def format_stats(stats: dict) -> str:
    def fmt(v):
        return str(int(v)) if isinstance(v, float) and v.is_integer() and not math.isinf(v) else str(v)
    return "".join(f"# {k} {fmt(v)}\n" for k, v in sorted(stats.items()))
