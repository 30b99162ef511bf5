import json
import os

import networkx as nx
import pytest

from configmc.corpus import CorpusSpec, UnrealizableSpecError, generate_corpus, read_corpus, write_corpus


def test_power_law_exercises_both_branches():
    c = generate_corpus(CorpusSpec("power-law", n_range=(2000, 2000), count=12, seed=1))
    flags = {a["kmax_sq_above_2m_over_3"] for _, _, a in c}
    assert flags == {True, False}


def test_dense_has_high_omega():
    c = generate_corpus(CorpusSpec("dense", n_range=(60, 60), count=5, seed=2))
    assert any(a["omega"] > 0.25 for _, _, a in c)


@pytest.mark.parametrize("family", ["power-law", "erdos-like", "star-heavy", "dense"])
def test_outputs_are_simple_and_graphical(family):
    for _, g, a in generate_corpus(CorpusSpec(family, n_range=(50, 80), count=4, seed=3)):
        assert g.num_loops() == 0 and g.max_multiplicity() <= 1
        assert nx.is_graphical(g.degrees.tolist())
        assert a["m"] == g.m and a["kmax_sq"] == int(g.degrees.max()) ** 2


def test_m_range_respected():
    c = generate_corpus(CorpusSpec("erdos-like", n_range=(200, 400), m_range=(500, 900), count=5, seed=4))
    assert all(500 <= g.m <= 900 for _, g, _ in c)


def test_deterministic_directory(tmp_path):
    spec = CorpusSpec("star-heavy", n_range=(40, 60), count=3, seed=9, randomize_mult=5)
    a, b = tmp_path / "a", tmp_path / "b"
    write_corpus(spec, a)
    write_corpus(spec, b)
    assert sorted(os.listdir(a)) == sorted(os.listdir(b))
    for f in os.listdir(a):
        assert (a / f).read_bytes() == (b / f).read_bytes()
    index = json.loads((a / "index.json").read_text())
    assert len(index["graphs"]) == 3
    loaded = read_corpus(a)
    assert list(loaded) == [g["name"] for g in index["graphs"]]


def test_unrealizable():
    with pytest.raises(UnrealizableSpecError):
        generate_corpus(CorpusSpec("erdos-like", n_range=(10, 10), m_range=(10**6, 10**7), count=1))
    with pytest.raises(ValueError):
        CorpusSpec("lattice")
