import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from configmc.corpus import CorpusSpec, generate_corpus
from configmc.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_multigraph(rng, n, m, loops=True, multi=True):
    """Random edge list on ``n`` vertices obeying the loop/multi flags."""
    edges, seen = [], set()
    while len(edges) < m:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u == v and not loops:
            continue
        p = (min(u, v), max(u, v))
        if not multi and p in seen:
            continue
        seen.add(p)
        edges.append(p)
    return Graph(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_corpus():
    """A handful of modest simple graphs from different families."""
    out = []
    for fam, nr in [("erdos-like", (60, 90)), ("power-law", (80, 120)), ("star-heavy", (40, 60)),
                    ("dense", (20, 30))]:
        out += [g for _, g, _ in generate_corpus(CorpusSpec(fam, n_range=nr, count=2, seed=5))]
    return out


# acceptance summary ---------------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """``criterion(n, name, ok, detail)`` records one acceptance verdict."""

    def record(number, name, ok, detail=""):
        _ACCEPTANCE[number] = (name, bool(ok), detail)
        line = f"CRITERION {number:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        name, ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"CRITERION {number:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}")
