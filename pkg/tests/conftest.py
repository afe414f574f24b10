import pytest
from hypothesis import settings

from chemenum.graph import DEFAULT_COLORS, ChemicalGraph
from chemenum.trees import RootedTree

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

T = DEFAULT_COLORS
C, N, O = T.id("C"), T.id("N"), T.id("O")


def g0() -> ChemicalGraph:
    # v1..v5 -> 0..4: triangle v1v2v3, tail v1-v4-v5
    return ChemicalGraph(T, [C] * 5, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (0, 3, 1), (3, 4, 1)], 3)


def g1() -> ChemicalGraph:
    # triangle v1v2v3, tail v1-v4-v5-v6
    return ChemicalGraph(T, [C] * 6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (0, 3, 1), (3, 4, 1), (4, 5, 1)], 3)


def bond_sample() -> ChemicalGraph:
    # stand-in: one C-C single bond, one C=C double bond, plus N and O, d=2
    return ChemicalGraph(T, [C, C, C, N, O], [(0, 1, 2), (1, 2, 1), (2, 3, 1), (2, 4, 1)], 2)


def ref_tree() -> RootedTree:
    """Rooted multi-tree of the ordered-tree illustration, children deliberately
    listed in a non-canonical order (tau_1 style)."""
    colors = (C, C, N, N, O, C, N)
    parent = (-1, 0, 1, 0, 3, 0, 5)
    mul = (0, 1, 2, 1, 1, 2, 1)
    children = ((1, 3, 5), (2,), (), (4,), (), (6,), ())
    return RootedTree(colors, parent, mul, children, 0, tuple(range(7)))


@pytest.fixture
def G0():
    return g0()


@pytest.fixture
def G1():
    return g1()


# --------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run

_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "_criterion", None)
    if marker is None:
        return
    num, title = marker
    entry = _CRITERIA.setdefault(num, [title, True, False])
    if report.when == "call" or report.failed:
        entry[2] = True
        if report.failed:
            entry[1] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        report._criterion = m.args


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok, ran = _CRITERIA[num]
        status = "PASS" if ok and ran else ("FAIL" if ran else "NOT RUN")
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {title}")
