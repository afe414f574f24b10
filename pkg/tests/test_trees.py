import random

import pytest
from hypothesis import given, strategies as st

from chemenum.graph import DEFAULT_COLORS as T, ChemicalGraph, GraphError
from chemenum.oracle import isomorphic, rooted_isomorphic
from chemenum.trees import (
    RootedTree, canonicalize, centroid, centroid_tree, copy_flags, graph_signature, is_canonical,
    lca_gua, lex_compare, radix_sort, rank_signatures, rank_trees, signature, signature_text,
    subtree_signatures, tree_from_graph, tree_to_graph, unrooted_tree_key,
)

from conftest import C, N, O, ref_tree
from helpers import random_tree, shuffled, trees


def test_ref_tree_canonical_form():
    t = ref_tree()
    assert signature_text(t.signature(), T) == ("C0C1N2N1O2C1N2", "1,2,1,1,2,1")
    canon = canonicalize(t)
    assert signature_text(canon.signature(), T) == ("C0C1N2C1N2N1O2", "2,1,1,2,1,1")
    assert signature(t) == canon.signature()
    assert is_canonical(canon) and not is_canonical(t)


def test_ref_tree_left_heavy_but_not_canonical():
    t = ref_tree()
    tau2 = t.reordered([(1, 5, 3), (2,), (), (4,), (), (6,), ()])
    assert signature_text(tau2.signature(), T) == ("C0C1N2C1N2N1O2", "1,2,2,1,1,1")
    assert tau2.delta() == canonicalize(t).delta()
    assert tau2.mults() < canonicalize(t).mults()


def test_ref_tree_first_subtree():
    canon = canonicalize(ref_tree())
    sigs, _ = subtree_signatures(canon)
    first = canon.children[canon.root][0]
    assert signature_text(sigs[first], T) == ("C0N1", "1")


def test_prefix_case_needs_concatenation_order():
    # root C with a leaf C child and a C-N child: a plain descending sort puts
    # the longer branch first, yet the leaf-first concatenation is larger
    g = ChemicalGraph(T, [C, C, C, N], [(0, 1, 1), (0, 2, 1), (2, 3, 1)], 3)
    sig = graph_signature(g, 0)
    assert signature_text(sig, T)[0] == "C0C1C1N2"
    brute = max(
        (RootedTree((C, C, C, N), (-1, 0, 0, 2), (0, 1, 1, 1), (order, (), (3,), ()), 0, (0, 1, 2, 3)).signature()
         for order in [(1, 2), (2, 1)]))
    assert sig == brute


def _all_orderings(t):
    import itertools
    per = [list(itertools.permutations(ch)) for ch in t.children]
    for combo in itertools.product(*per):
        yield t.reordered(combo)


@given(trees(max_n=7))
def test_signature_is_max_over_orderings(g):
    t = tree_from_graph(g, 0)
    best = max(o.signature() for o in _all_orderings(t))
    assert signature(t) == best


@given(trees(max_n=9), st.randoms(use_true_random=False))
def test_signature_invariant_under_relabel(g, rng):
    h = shuffled(g, rng)
    perm = [v for v in range(h.n)]
    root_h = next(v for v in perm if rooted_isomorphic(g, 0, h, v))
    assert graph_signature(g, 0) == graph_signature(h, root_h)


@given(trees(max_n=9))
def test_canonicalize_idempotent(g):
    c = canonicalize(tree_from_graph(g, 0))
    assert c.preorder == tuple(range(c.n))
    again = canonicalize(c)
    assert again.signature() == c.signature()
    assert tree_to_graph(c, T).n == g.n


def test_tree_from_graph_rejects(G0):
    with pytest.raises(GraphError):
        tree_from_graph(G0, 0)
    with pytest.raises(GraphError):
        tree_from_graph(G0, 0, [0, 4])
    with pytest.raises(GraphError):
        tree_from_graph(G0, 9)


@given(st.lists(st.lists(st.integers(-3, 5), max_size=6), max_size=30))
def test_radix_sort_matches_sorted(seqs):
    order = radix_sort(seqs)
    assert [tuple(seqs[i]) for i in order] == sorted(map(tuple, seqs))


@given(st.lists(trees(max_n=6), min_size=1, max_size=6))
def test_radix_and_builtin_ranks_agree(gs):
    fam = [tree_from_graph(g, 0) for g in gs]
    assert rank_trees(fam, "radix") == rank_trees(fam, "builtin")
    ranks, roots = rank_trees(fam)
    assert sorted(ranks.values()) == list(range(1, len(ranks) + 1))
    for a, ra in zip(fam, roots):
        for b, rb in zip(fam, roots):
            assert (ra == rb) == (signature(a) == signature(b))
            assert (ra < rb) == (signature(a) < signature(b))


def test_rank_signatures_unknown_sorter():
    with pytest.raises(ValueError):
        rank_signatures([], "quick")


def test_lex_compare():
    assert lex_compare((1, 2), (1, 2, 0)) == -1
    assert lex_compare((2,), (1, 9)) == 1
    assert lex_compare([], ()) == 0


def test_centroid_examples():
    path4 = ChemicalGraph(T, [C] * 4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)], 3)
    assert centroid(path4) == (1, 2)
    star = ChemicalGraph(T, [C] * 4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)], 3)
    assert centroid(star) == (0,)
    with pytest.raises(GraphError):
        centroid(ChemicalGraph(T, [C] * 3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], 3))


@given(trees(max_n=10))
def test_centroid_tree_root_halves(g):
    t = centroid_tree(g)
    assert all(2 * t.size[c] <= g.n for c in t.children[t.root])
    assert is_canonical(t)


def test_unrooted_key_is_complete_invariant():
    rng = random.Random(31)
    pool = [random_tree(rng, rng.randint(1, 7), (N, C), 2) for _ in range(150)]
    for a in pool[:60]:
        assert unrooted_tree_key(shuffled(a, rng)) == unrooted_tree_key(a)
        for b in pool[60:90]:
            assert (unrooted_tree_key(a) == unrooted_tree_key(b)) == isomorphic(a, b)


def test_lca_gua():
    t = canonicalize(ref_tree())
    # vertices in DFS order: 0 root, 1 C, 2 N, 3 C, 4 N, 5 N, 6 O
    assert lca_gua(t, 2, 4) == (0, 1, 3)
    assert lca_gua(t, 0, 4) == (0, 3, 3)
    assert lca_gua(t, 4, 0) == (0, 3, 3)
    with pytest.raises(ValueError):
        lca_gua(t, 2, 2)


def test_copy_flags():
    star = ChemicalGraph(T, [C] * 4, [(0, 1, 1), (0, 2, 1), (0, 3, 2)], 3)
    t = canonicalize(tree_from_graph(star, 0))
    # children: the double-bonded leaf first, then two equal single-bonded leaves
    assert copy_flags(t) == (0, 0, 0, 1)
