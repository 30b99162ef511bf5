"""Synthetic corpus: degree sequences first, then a deterministic realization.

Each family draws a graphical degree sequence and realizes it with the
Havel-Hakimi greedy construction, which gives a highly structured,
strongly non-random starting graph.  ``randomize_mult`` optionally runs
the simple-graph swap chain for that many multiples of ``m``.
"""

import json
import os
from dataclasses import asdict, dataclass, field

import networkx as nx
import numpy as np

from .exceptions import ConfigModelError
from .graph import SIMPLE, Graph, degree_stats, write_edge_list
from .mcmc import ChainState
from .rng import make_rng

FAMILIES = ("power-law", "erdos-like", "star-heavy", "dense")
_MAX_TRIES = 200


class UnrealizableSpecError(ConfigModelError):
    """No graphical degree sequence exists for the requested corpus parameters."""


@dataclass
class CorpusSpec:
    family: str
    n_range: tuple = (200, 400)
    m_range: tuple = (0, 10**9)
    count: int = 10
    seed: int = 0
    params: dict = field(default_factory=dict)
    randomize_mult: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown corpus family {self.family!r}; expected one of {FAMILIES}")
        lo, hi = self.n_range
        if lo < 2 or hi < lo:
            raise UnrealizableSpecError(f"bad n range {self.n_range}")


def _power_law(rng, n, params):
    gamma = params.get("gamma") or rng.uniform(*params.get("gamma_range", (2.1, 3.2)))
    kmin = params.get("kmin", 1)
    kmax = min(params.get("kmax", n - 1), n - 1)
    ks = np.arange(kmin, kmax + 1)
    p = ks.astype(float) ** -gamma
    return rng.choice(ks, size=n, p=p / p.sum())


def _erdos_like(rng, n, params):
    c = params.get("mean_degree") or rng.uniform(*params.get("mean_range", (3.0, 12.0)))
    return np.minimum(rng.poisson(c, size=n), n - 1)


def _star_heavy(rng, n, params):
    hubs = params.get("hubs") or int(rng.integers(1, 4))
    frac = params.get("hub_fraction", (0.3, 0.7))
    k = rng.integers(1, 3, size=n)
    k[:hubs] = (rng.uniform(*frac, size=hubs) * (n - 1)).astype(np.int64)
    return k


def _dense(rng, n, params):
    p = params.get("p") or rng.uniform(*params.get("p_range", (0.3, 0.7)))
    return rng.binomial(n - 1, p, size=n)


_SAMPLERS = {"power-law": _power_law, "erdos-like": _erdos_like,
             "star-heavy": _star_heavy, "dense": _dense}


def havel_hakimi(degrees):
    """Deterministic simple-graph realization of a graphical sequence."""
    h = nx.havel_hakimi_graph([int(k) for k in degrees])
    edges = sorted((min(u, v), max(u, v)) for u, v in h.edges())
    return Graph(len(degrees), edges)


def graphical_sequence(spec, rng):
    sampler = _SAMPLERS[spec.family]
    lo, hi = spec.n_range
    mlo, mhi = spec.m_range
    for _ in range(_MAX_TRIES):
        n = int(rng.integers(lo, hi + 1))
        k = np.asarray(sampler(rng, n, spec.params), dtype=np.int64)
        if k.sum() % 2:
            k[int(rng.integers(n))] += 1 if k.max() < n - 1 else -1
        k = np.clip(k, 0, n - 1)
        m = int(k.sum()) // 2
        if k.sum() % 2 or not mlo <= m <= mhi or m < 2:
            continue
        if nx.is_graphical(k.tolist()):
            return k
    raise UnrealizableSpecError(
        f"no graphical {spec.family} sequence with n in {spec.n_range} and m in {spec.m_range} "
        f"after {_MAX_TRIES} draws")


def annotate(g):
    """Decision-tree inputs for a corpus graph."""
    st = degree_stats(g, SIMPLE)
    return {**st.as_dict(), "kmax_sq": st.kmax**2, "two_m_over_3": 2 * g.m / 3,
            "kmax_sq_above_2m_over_3": 3 * st.kmax**2 > 2 * g.m, "omega_above_quarter": st.omega > 0.25}


def generate_corpus(spec):
    """List of ``(name, Graph, annotation)`` triples, deterministic in ``spec.seed``."""
    out = []
    for i in range(spec.count):
        rng = make_rng(spec.seed, i)
        g = havel_hakimi(graphical_sequence(spec, rng))
        if spec.randomize_mult:
            st = ChainState(g, SIMPLE, rng=make_rng(spec.seed, i, 1))
            st.advance(spec.randomize_mult * g.m)
            g = st.g
            g.invalidate_table()
        out.append((f"{spec.family}-{i:03d}", g, annotate(g)))
    return out


def write_corpus(spec, outdir):
    """Write edge lists plus ``index.json``; returns the index dict."""
    os.makedirs(outdir, exist_ok=True)
    items = generate_corpus(spec)
    index = {"spec": asdict(spec), "graphs": []}
    for name, g, ann in items:
        fn = f"{name}.edges"
        write_edge_list(g, os.path.join(outdir, fn))
        index["graphs"].append({"name": name, "file": fn, **ann})
    with open(os.path.join(outdir, "index.json"), "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return index


def read_corpus(corpus_dir):
    """``{name: Graph}`` for every edge list in a corpus directory, sorted by name."""
    from .graph import read_edge_list

    names = sorted(f for f in os.listdir(corpus_dir) if f.endswith(".edges"))
    return {f[: -len(".edges")]: read_edge_list(os.path.join(corpus_dir, f)) for f in names}
