import random

import pytest
from hypothesis import given

from chemenum.biblock import (
    biblock_view, child_check, decompose, generate_children, parent_of, pendent_family, potential_edges,
    potential_edges_bruteforce, rank_pendent_family,
)
from chemenum.graph import DEFAULT_COLORS as T, ChemicalGraph, GraphError, ShapeClass, classify
from chemenum.oracle import enumerate_all, isomorphic

from conftest import C, g0, g1
from helpers import biblocks, monocyclics, random_monocyclic, shuffled

# fixture vertex vK is index K-1
V1, V2, V3, V4, V5, V6 = range(6)


def test_decompose_g0(G0):
    view = decompose(G0)
    assert view.cycle == [V1, V2, V3]
    assert sorted(view.pendent(V1)) == [V1, V4, V5]
    assert view.pendent(V2) == [V2] and view.pendent(V3) == [V3]
    assert view.big_root == V1


def test_pendent_family_g0(G0):
    fam = {(kind, u): sorted(vs) for kind, u, _, vs in pendent_family(decompose(G0))}
    assert fam[("full", V2)] == [V2]
    assert fam[("full", V3)] == [V3]
    assert fam[("cut", V4)] == [V1]
    # subtree of v4 minus the v5 branch
    assert fam[("cut", V5)] == [V4]
    assert fam[("full", V4)] == [V4, V5]


def test_potential_edges_fixtures(G0, G1):
    assert potential_edges(decompose(G0)) == {(V1, V5)}
    assert potential_edges(decompose(G1)) == {(V1, V5), (V1, V6), (V4, V6)}


def test_potential_edge_tie_branch(G0):
    # (v1, v5) ties on the first entry, and depth(v5) sits exactly on the
    # bound |C| + depth(v1) - 1; a strict reading of the tie test drops it
    view = decompose(G0)
    thr = G0.n - view.size[V4]
    assert view.size[V1] == thr
    assert view.depth[V5] == len(view.cycle) + view.depth[V1] - 1
    assert (V1, V5) in potential_edges(view)
    assert (V1, V5) in potential_edges_bruteforce(G0)


def test_child_check_fixtures(G0, G1):
    v0 = decompose(G0)
    assert child_check(v0, V1, V5, 1, rank_pendent_family(v0))
    v1 = decompose(G1)
    r1 = rank_pendent_family(v1)
    assert child_check(v1, V1, V6, 1, r1)
    assert not child_check(v1, V1, V5, 1, r1)


def test_child_check_rejects_bad_pairs(G1):
    view = decompose(G1)
    ranking = rank_pendent_family(view)
    with pytest.raises(GraphError):
        child_check(view, V1, V4, 1, ranking)
    with pytest.raises(GraphError):
        child_check(view, V2, V5, 1, ranking)
    with pytest.raises(GraphError):
        child_check(view, V1, V6, 4, ranking)


def test_cycle_order_of_g1_child(G1):
    h = G1.add_edges(V1, V6, 1)
    view = biblock_view(h, first=[V1, V2, V3])
    a, b = view.cycle_codes()
    assert a[:2] == (3, 3)
    assert b[:2] == (2, 4)
    assert b < a


def test_parent_of_fixtures(G0, G1):
    p, _ = parent_of(G0.add_edges(V1, V5, 1))
    assert isomorphic(p, G0)
    p, _ = parent_of(G1.add_edges(V1, V6, 1))
    assert isomorphic(p, G1)
    p, _ = parent_of(G1.add_edges(V1, V5, 1))
    assert not isomorphic(p, G1)
    branch = ChemicalGraph(T, [C] * 6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (0, 3, 1), (3, 4, 1), (3, 5, 1)], 3)
    assert isomorphic(p, branch)


def test_g0_has_exactly_one_child(G0):
    kids = list(generate_children(decompose(G0)))
    assert [xyq for _, xyq in kids] == [(V1, V5, 1)]
    truth = enumerate_all(ShapeClass.BIBLOCK_2AUG, {C: 5}, 3, T)
    with_parent = [h for h in truth if isomorphic(parent_of(h)[0], G0)]
    assert len(with_parent) == 1


def test_potential_edges_match_bruteforce_random():
    rng = random.Random(99)
    for _ in range(300):
        g = random_monocyclic(rng, rng.randint(3, 12))
        view = decompose(g)
        if view.big_root is None:
            assert potential_edges(view) == set()
            continue
        assert potential_edges(view) == potential_edges_bruteforce(g)


@given(monocyclics(max_n=10))
def test_children_are_potential_and_round_trip(g):
    view = decompose(g)
    epot = potential_edges(view)
    for h, (x, y, q) in generate_children(view):
        assert (x, y) in epot
        assert classify(h) is ShapeClass.BIBLOCK_2AUG
        assert isomorphic(parent_of(h)[0], g)


@given(biblocks(max_n=10))
def test_parent_is_monocyclic_and_label_free(h):
    p, (u, u2) = parent_of(h)
    assert classify(p) is ShapeClass.MONOCYCLIC
    assert h.mult(u, u2) and not p.mult(u, u2)
    q, _ = parent_of(shuffled(h, random.Random(h.n)))
    assert isomorphic(p, q)


def test_biblock_view_rejects_monocyclic(G0):
    with pytest.raises(GraphError):
        biblock_view(G0)
