import pytest

from chemenum.features import INF, PathSpec, eulf_ok, seq_from_text
from chemenum.graph import DEFAULT_COLORS as T, ShapeClass, classify, write_graphs
from chemenum.oracle import enumerate_all, represents
from chemenum.pipeline import (
    EXIT_COUNT_LIMIT, EXIT_NO_SOLUTIONS, EXIT_OK, EXIT_TIME_LIMIT, RunConfig, build_instance,
    format_stats, generate_trees, run,
)

from conftest import C, N, O, g0


def atoms_spec(atoms, d, **kw):
    return PathSpec(T, d, kw.pop("N", 0), kw.pop("L", 0), kw.pop("mode", "none"), 0,
                    {(c,): (k, k) for c, k in atoms.items()})


def test_config_validation():
    spec = atoms_spec({C: 5}, 1)
    with pytest.raises(ValueError):
        RunConfig(spec, ("tree", "biblock"))
    with pytest.raises(ValueError):
        RunConfig(spec, ("mono",))
    with pytest.raises(ValueError):
        RunConfig(spec, ("leaf",))
    with pytest.raises(ValueError):
        RunConfig(spec, count_limit=0)
    with pytest.raises(ValueError):
        RunConfig(spec, time_limit=0)


def test_trees_stage_matches_oracle():
    spec = atoms_spec({C: 4, N: 2}, 2)
    got = run(RunConfig(spec, ("tree",)))
    assert represents(got.graphs, enumerate_all(ShapeClass.MULTI_TREE, spec.atoms, 2, T)).ok


def test_mono_stage_matches_oracle():
    spec = atoms_spec({C: 4, N: 1, O: 1}, 2)
    got = run(RunConfig(spec, ("tree", "mono"), restrict=False))
    assert represents(got.graphs, enumerate_all(ShapeClass.MONOCYCLIC, spec.atoms, 2, T)).ok


def test_g0_instance_matches_oracle():
    spec = build_instance(g0(), 2, 2, 0, "none")
    res = run(RunConfig(spec))
    truth = enumerate_all(ShapeClass.BIBLOCK_2AUG, spec.atoms, spec.d, T, spec)
    assert res.status == (EXIT_OK if len(truth) else EXIT_NO_SOLUTIONS)
    assert represents(res.graphs, truth).ok


@pytest.mark.parametrize("s,mode", [(1, "A"), (2, "A"), (1, "P"), (2, "none")])
def test_bounded_instances_match_oracle(s, mode):
    sample = g0().add_edges(0, 4, 1).remove_pair(1, 2)  # triangle moved onto the tail
    spec = build_instance(sample, 2, 1, s, mode)
    spec.bounds[(C,)] = (6, 6)
    res = run(RunConfig(spec))
    truth = enumerate_all(ShapeClass.BIBLOCK_2AUG, spec.atoms, spec.d, T, spec)
    assert represents(res.graphs, truth).ok
    assert all(eulf_ok(h, spec) for h in res.graphs)


def test_output_is_deterministic():
    spec = atoms_spec({C: 5, N: 1}, 2)
    a = run(RunConfig(spec))
    b = run(RunConfig(spec))
    assert write_graphs(a.graphs) == write_graphs(b.graphs)
    assert all(classify(h) is ShapeClass.BIBLOCK_2AUG for h in a.graphs)


def test_workers_give_same_classes():
    spec = atoms_spec({C: 5, N: 1}, 2)
    one = run(RunConfig(spec))
    two = run(RunConfig(spec, workers=2))
    assert len(one.graphs) == len(two.graphs)
    assert represents(two.graphs, one.graphs).ok


def test_count_limit_status():
    res = run(RunConfig(atoms_spec({C: 6}, 2), count_limit=2))
    assert res.status == EXIT_COUNT_LIMIT and len(res.graphs) == 2


def test_time_limit_status():
    res = run(RunConfig(atoms_spec({C: 8}, 3), time_limit=1e-6))
    assert res.status == EXIT_TIME_LIMIT and res.graphs == []


def test_no_solution_status():
    # four carbons cannot hold two cycles
    res = run(RunConfig(atoms_spec({C: 4}, 1)))
    assert res.status == EXIT_NO_SOLUTIONS and res.stats["output.count"] == 0


def test_oracle_verify_passes():
    res = run(RunConfig(atoms_spec({C: 5, O: 1}, 2), oracle_verify=True))
    assert res.status == EXIT_OK
    assert res.stats["oracle.missing"] == res.stats["oracle.extra"] == 0


def test_stage_inputs_chain():
    spec = atoms_spec({C: 6}, 2)
    trees = run(RunConfig(spec, ("tree",), relax=1)).graphs
    monos = run(RunConfig(spec, ("mono",), inputs=trees, restrict=True)).graphs
    full = run(RunConfig(spec, ("tree", "mono"), restrict=True)).graphs
    assert represents(monos, full).ok
    kids = run(RunConfig(spec, ("biblock",), inputs=monos))
    assert represents(kids.graphs, run(RunConfig(spec)).graphs).ok


def test_stage_input_shape_checked():
    spec = atoms_spec({C: 6}, 2)
    trees = run(RunConfig(spec, ("tree",))).graphs
    with pytest.raises(ValueError):
        run(RunConfig(spec, ("biblock",), inputs=trees))


def test_generate_trees_respects_upper_bound():
    spec = atoms_spec({C: 5}, 1)
    spec.bounds[seq_from_text("C1C1C1C", T)] = (0, 0)
    spec.N = 3
    got = generate_trees(spec, spec.lower(), spec.upper())
    # only trees without a 3-edge path: the star
    assert len(got) == 1


def test_parents_recorded():
    spec = atoms_spec({C: 6}, 1)
    res = run(RunConfig(spec))
    assert len(res.parents) == len(res.graphs)
    for h, p in zip(res.graphs, res.parents):
        assert classify(p) is ShapeClass.MONOCYCLIC
        assert p.pair_count + 1 == h.pair_count


def test_format_stats():
    assert format_stats({"b": 2.0, "a": 1, "c": INF}) == "# a 1\n# b 2\n# c inf\n"
