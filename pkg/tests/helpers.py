"""Random graph builders shared by the test modules."""
import random

from hypothesis import strategies as st

from chemenum.graph import DEFAULT_COLORS, ChemicalGraph, GraphError

T = DEFAULT_COLORS


def random_tree(rng: random.Random, n: int, colors=(0, 1, 2), d: int = 3) -> ChemicalGraph:
    """Random multi-tree grown leaf by leaf, respecting valences."""
    while True:
        g = ChemicalGraph(T, [rng.choice(colors)], [], d)
        ok = True
        for _ in range(1, n):
            open_ = [u for u in range(g.n) if g.res(u) > 0]
            if not open_:
                ok = False
                break
            u = rng.choice(open_)
            c = rng.choice(colors)
            q = rng.randint(1, min(d, g.res(u), T.valence(c)))
            g = g.add_leaf(u, c, q)
        if ok:
            return g


def random_monocyclic(rng: random.Random, n: int, colors=(0, 1, 2), d: int = 3,
                      min_cycle: int = 3) -> ChemicalGraph:
    while True:
        t = random_tree(rng, n, colors, d)
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if not t.mult(u, v) and t.res(u) and t.res(v)]
        rng.shuffle(pairs)
        for u, v in pairs:
            from chemenum.graph import simple_path
            if len(simple_path(t, u, v)) >= min_cycle:
                return t.add_edges(u, v, 1)


def random_biblock(rng: random.Random, n: int, colors=(0, 1, 2), d: int = 3) -> ChemicalGraph:
    from chemenum.graph import ShapeClass, classify
    while True:
        g = random_monocyclic(rng, n, colors, d)
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if not g.mult(u, v) and g.res(u) and g.res(v)]
        rng.shuffle(pairs)
        for u, v in pairs:
            h = g.add_edges(u, v, 1)
            if classify(h) is ShapeClass.BIBLOCK_2AUG:
                return h


def shuffled(g: ChemicalGraph, rng: random.Random) -> ChemicalGraph:
    order = list(range(g.n))
    rng.shuffle(order)
    return g.relabel(order)


@st.composite
def trees(draw, min_n=1, max_n=9, colors=(0, 1, 2), d=3):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_n, max_n))
    return random_tree(random.Random(seed), n, colors, d)


@st.composite
def monocyclics(draw, min_n=3, max_n=10, colors=(0, 1, 2), d=3):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_n, max_n))
    return random_monocyclic(random.Random(seed), n, colors, d)


@st.composite
def biblocks(draw, min_n=5, max_n=10, colors=(0, 1, 2), d=3):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_n, max_n))
    return random_biblock(random.Random(seed), n, colors, d)


@st.composite
def connected_graphs(draw, max_n=8, d=3):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    n = draw(st.integers(1, max_n))
    g = random_tree(rng, n, (0, 1, 2), d)
    for _ in range(draw(st.integers(0, 3))):
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)
                 if not g.mult(u, v) and g.res(u) and g.res(v)]
        if not pairs:
            break
        u, v = rng.choice(pairs)
        g = g.add_edges(u, v, 1)
    return g


__all__ = ["GraphError", "random_tree", "random_monocyclic", "random_biblock", "shuffled",
           "trees", "monocyclics", "biblocks", "connected_graphs"]
