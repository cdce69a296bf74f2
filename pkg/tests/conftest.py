import itertools

import pytest

from lexbridge.graph import KnowledgeGraph
from lexbridge.synthetic import make_setup


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def path_graph():
    return KnowledgeGraph.from_edges([("0", "1"), ("1", "2")])


@pytest.fixture
def two_cliques():
    a = [f"a{i}" for i in range(5)]
    b = [f"b{i}" for i in range(5)]
    edges = list(itertools.combinations(a, 2)) + list(itertools.combinations(b, 2)) + [("a0", "b0")]
    return KnowledgeGraph.from_edges(edges), a, b


@pytest.fixture(scope="session")
def synthetic():
    return make_setup(n_words=1500, dim=50, n_hidden=300, noise=0.01, seed=0)


# acceptance gate bookkeeping: one line per criterion in the terminal summary
ACCEPTANCE = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        detail = dict(report.user_properties).get("detail", "")
        if report.outcome == "skipped" and isinstance(report.longrepr, tuple):
            detail = report.longrepr[2]
        ACCEPTANCE[crit] = (status, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0])):
        status, detail = ACCEPTANCE[crit]
        terminalreporter.write_line(f"[{status}] criterion {crit}" + (f": {detail}" if detail else ""))
