"""Acceptance suite: one test per top-level criterion, each printing a verdict line."""

import json
import time

import numpy as np
import pytest
from scipy.stats import chisquare

from configmc import _kernels as K
from configmc.assortativity import assortativity_oracle, init_tracker
from configmc.cli import main
from configmc.convergence import compare_diagnostics, states_after, validate_detector
from configmc.corpus import CorpusSpec, generate_corpus
from configmc.enumeration import enumerate_graphs
from configmc.gap import decide_gap, estimate_gap, gap_m_over_2_7, gap_m_over_3
from configmc.graph import Graph, GraphSpace, degree_stats, write_edge_list
from configmc.mcmc import ChainState
from configmc.rng import make_rng

from conftest import random_multigraph

SIMPLE = GraphSpace.from_names("simple")


# 1 ---------------------------------------------------------------------------

def test_01_assortativity_exactness(criterion):
    t0 = time.perf_counter()
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    cliques = Graph(5, [(0, 1), (2, 3), (3, 4), (2, 4)])
    errs = [abs(init_tracker(star).r + 1), abs(assortativity_oracle(star) + 1),
            abs(init_tracker(cliques).r - 1), abs(assortativity_oracle(cliques) - 1)]
    dt = time.perf_counter() - t0
    ok = max(errs) < 1e-12 and dt < 1.0
    criterion(1, "assortativity exactness", ok, f"max error {max(errs):.1e}, {dt:.3f}s")
    assert ok


# 2 ---------------------------------------------------------------------------

def _batch_oracle(snapshots, k, n, m):
    """Direct adjacency-matrix evaluation of r for a batch of edge arrays."""
    B = snapshots.shape[0]
    b = np.repeat(np.arange(B), m)
    u = snapshots[:, :, 0].ravel()
    v = snapshots[:, :, 1].ravel()
    A = np.bincount(b * n * n + u * n + v, minlength=B * n * n).reshape(B, n, n).astype(float)
    A = A + A.transpose(0, 2, 1)  # a loop lands twice on the diagonal
    kk = np.outer(k, k)
    two_m = 2.0 * m
    num = np.einsum("bij,ij->b", A - kk / two_m, kk)
    den = ((np.diag(k) - kk / two_m) * kk).sum()
    return num / den


def _audit(g, space, seed, n_accept, chunk=20_000):
    st = ChainState(g.copy(), space, rng=make_rng(seed))
    ustream = make_rng(seed, 99)
    edges = [list(e) for e in g.edges.tolist()]
    k = g.degrees.astype(float)
    n, m = g.n, g.m
    worst, accepted, lo, hi = 0.0, 0, 1.0, -1.0
    while accepted < n_accept:
        U = ustream.random((chunk, 4))
        sl, reasons = st._kernel(chunk, record_every=1, uniforms=U, log_reasons=True)
        r_tracker = st.tracker.r_from_sl(sl)
        snaps, rs = [], []
        for t in np.flatnonzero(reasons == K.OK):
            i, j = K.edge_indices(U[t, 0], U[t, 1], m)
            a, b = edges[i]
            c, d = edges[j]
            if U[t, 2] < 0.5:
                a, b = b, a
            edges[i] = [a, c]
            edges[j] = [b, d]
            snaps.append([e[:] for e in edges])
            rs.append(r_tracker[t])
            accepted += 1
        if snaps:
            orc = _batch_oracle(np.array(snaps, dtype=np.int64), k, n, m)
            worst = max(worst, float(np.abs(np.array(rs) - orc).max()))
            lo, hi = min(lo, min(rs)), max(hi, max(rs))
    replay = sorted(tuple(sorted(e)) for e in edges)
    assert replay == sorted(tuple(sorted(e)) for e in st.g.edges.tolist())
    return worst, lo, hi, accepted, st


@pytest.mark.slow
def test_02_incremental_update_fidelity(criterion):
    worst, lo, hi, loops_made, multi_made, fewest = 0.0, 1.0, -1.0, 0, 0, 10**9
    for space in GraphSpace.all():
        for gi in range(5):
            rng = make_rng(200 + gi)
            n = 12 + 2 * gi
            g = random_multigraph(rng, n, 2 * n + 5 * gi, loops=space.allow_loops, multi=space.allow_multi)
            w, a, b, acc, st = _audit(g, space, seed=gi, n_accept=100_000)
            worst, lo, hi, fewest = max(worst, w), min(lo, a), max(hi, b), min(fewest, acc)
            loops_made += st.g.num_loops() > 0
            multi_made += st.g.max_multiplicity() > 1
            assert st.g.in_space(space)
    ok = worst < 1e-9 and lo >= -1 - 1e-9 and hi <= 1 + 1e-9 and fewest >= 100_000
    criterion(2, "incremental-update fidelity", ok,
              f"8 spaces x 5 graphs, >= {fewest} accepted swaps each, max |r - oracle| = {worst:.2e}, "
              f"r in [{lo:.3f}, {hi:.3f}], final graphs with loops {loops_made}, with multi-edges {multi_made}")
    assert ok


# 3 ---------------------------------------------------------------------------

def _occupancy(degrees, space, steps, seed):
    graphs = enumerate_graphs(degrees, space)
    index = {eg.edges: i for i, eg in enumerate(graphs)}
    st = ChainState(graphs[0].graph(len(degrees)), space, rng=make_rng(seed))
    counts = np.zeros(len(graphs))
    for _ in range(steps):
        st._kernel(1)
        counts[index[st.g.canonical()]] += 1
    w = np.array([eg.weight(space) for eg in graphs], dtype=float)
    return counts, w / w.sum()


@pytest.mark.slow
def test_03_uniformity_oracle(criterion):
    cases = [((1, 1, 1, 1), GraphSpace.from_names("simple", "stub"), 3),
             ((2, 2), GraphSpace.from_names("loopy-multigraph", "vertex"), 2),
             ((2, 2), GraphSpace.from_names("loopy-multigraph", "stub"), 2)]
    details, ok = [], True
    for degrees, space, nstates in cases:
        counts, p = _occupancy(degrees, space, 1_000_000, seed=3)
        pv = chisquare(counts, counts.sum() * p).pvalue
        ok &= len(counts) == nstates and pv > 0.001
        details.append(f"{space.name}{degrees}: p={pv:.3f} freq={np.round(counts / counts.sum(), 4).tolist()}")
    criterion(3, "uniformity oracle", ok, "; ".join(details))
    assert ok


# 4 ---------------------------------------------------------------------------

def _gnp(n, rho, seed):
    rng = make_rng(seed)
    iu = np.triu_indices(n, 1)
    keep = rng.random(iu[0].size) < rho
    return Graph(n, np.column_stack([iu[0][keep], iu[1][keep]]))


def test_04_rejection_rate_law(criterion):
    ok, details = True, []
    for rho in (0.2, 0.5):
        g = _gnp(300, rho, seed=int(rho * 10))
        st = ChainState(g, SIMPLE, rng=make_rng(4))
        st.advance(100_000)
        emp = st.rejection_rate()
        omega = 2 * rho - rho**2
        ok &= abs(emp - omega) <= 0.03
        details.append(f"rho={rho}: rejection {emp:.4f} vs 2rho-rho^2 {omega:.4f} "
                       f"(measured omega {degree_stats(g, SIMPLE).omega:.4f})")
    criterion(4, "rejection-rate law", ok, "; ".join(details))
    assert ok


# 5 ---------------------------------------------------------------------------

def test_05_vertex_stub_equivalence(criterion):
    g = _gnp(60, 0.3, seed=5)
    a = ChainState(g.copy(), SIMPLE, rng=make_rng(5))
    b = ChainState(g.copy(), GraphSpace.from_names("simple", "vertex"), rng=make_rng(5))
    _, ra = a._kernel(100_000, log_reasons=True)
    _, rb = b._kernel(100_000, log_reasons=True)
    same = np.array_equal(ra == K.OK, rb == K.OK)
    ok = same and np.array_equal(a.g.edges, b.g.edges) and not np.any(rb == K.VERTEX_REJECTION)
    criterion(5, "vertex/stub equivalence on simple graphs", ok,
              f"1e5 shared-stream steps, {int((ra == K.OK).sum())} accepted by both, "
              f"decisions identical={same}")
    assert ok


# 6 ---------------------------------------------------------------------------

class WhiteNoise:
    def __init__(self, rng):
        self.rng = rng

    def series(self, eta, T):
        return self.rng.standard_normal(T)


class AR1:
    """Stationary AR(1) observed every ``eta`` steps (exact thinned transition)."""

    def __init__(self, phi, rng):
        self.phi, self.rng = phi, rng
        self.x = rng.standard_normal()

    def series(self, eta, T):
        a = self.phi**eta
        sd = np.sqrt(1 - a * a)
        z = self.rng.standard_normal(T)
        out = np.empty(T)
        for t in range(T):
            self.x = a * self.x + sd * z[t]
            out[t] = self.x
        return out


def test_06_gap_estimator_calibration(criterion):
    wn = [estimate_gap(None, None, sources=[WhiteNoise(make_rng(r, k)) for k in range(100)]).eta0
          for r in range(100)]
    wn_frac = float(np.mean(np.array(wn) == 1))
    ar = [estimate_gap(None, None, sources=[AR1(0.9, make_rng(1000 + r, k)) for k in range(100)]).eta0
          for r in range(10)]
    ok_wn = wn_frac >= 0.95
    ok_ar = all(15 <= e <= 45 for e in ar)
    ok = ok_wn and ok_ar
    criterion(6, "gap-estimator calibration", ok,
              f"white noise eta0=1 in {wn_frac:.0%} of 100 runs; AR(1) phi=0.9 eta0 over 10 seeds = "
              f"{sorted(set(ar))} (target [15, 45])")
    assert ok


# 7 ---------------------------------------------------------------------------

def _star_plus(kmax, m):
    edges = [(0, v) for v in range(1, kmax + 1)]
    v = kmax + 1
    while len(edges) < m:
        edges.append((v, v + 1))
        v += 2
    return Graph(v + 1, edges)


def test_07_decision_tree(criterion):
    t0 = time.perf_counter()
    sparse = random_multigraph(make_rng(1), 342, 3000, loops=False, multi=False)      # omega ~ 0.1
    dense_big = random_multigraph(make_rng(2), 70, 1200, loops=False, multi=False)    # omega > 0.25
    dense_small = random_multigraph(make_rng(3), 30, 200, loops=False, multi=False)   # m < 1000
    low_kmax = random_multigraph(make_rng(5), 300, 2700)                               # kmax^2 <= 2m/3
    high_kmax = _star_plus(6, 18)                                                      # kmax^2 = 2m
    S = GraphSpace.from_names
    table = [
        (sparse, S("simple"), "scaling-law", 1300),
        (sparse, S("loopy", "vertex"), "scaling-law", 1300),
        (dense_big, S("simple"), "run-algorithm-1", None),
        (dense_big, S("loopy", "vertex"), "run-algorithm-1", None),
        (dense_small, S("simple", "vertex"), "scaling-law", gap_m_over_3(200)),
        (low_kmax, S("multigraph"), "scaling-law", gap_m_over_3(2700)),
        (high_kmax, S("loopy-multigraph"), "scaling-law", gap_m_over_3(18)),
        (low_kmax, S("multigraph", "vertex"), "scaling-law", 1100),
        (low_kmax, S("loopy-multigraph", "vertex"), "scaling-law", gap_m_over_2_7(2700)),
        (high_kmax, S("loopy-multigraph", "vertex"), "run-algorithm-1", None),
        (high_kmax, S("multigraph", "vertex"), "run-algorithm-1", None),
    ]
    bad = []
    for g, space, kind, eta0 in table:
        d = decide_gap(g, space)
        if (d.kind, d.eta0) != (kind, eta0):
            bad.append((space.name, d.kind, d.eta0, kind, eta0))
    formulas = gap_m_over_3(3000) == 1300 and gap_m_over_2_7(2700) == 1100
    dt = time.perf_counter() - t0
    ok = not bad and formulas and dt < 1.0
    criterion(7, "decision-tree conformance", ok, f"{len(table)} branch cases, mismatches {bad}, {dt:.3f}s")
    assert ok


# 8 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_08_detector_validation(criterion):
    spec = CorpusSpec("power-law", n_range=(1500, 3000), m_range=(2000, 5000), count=5, seed=8)
    corpus = generate_corpus(spec)
    runs_pass, runs_early_fail, n_runs, lines = 0, 0, 0, []
    for gi, (name, g, _) in enumerate(corpus):
        eta0 = decide_gap(g, SIMPLE).eta0
        # 500 independent chains of 1000m swaps each; pooling a few long
        # chains gives autocorrelated draws that inflate KS rejections
        ref = states_after(g, SIMPLE, 1000 * g.m, 500, seed=gi, path=(3,))
        for seed in range(4):
            v = validate_detector(g, SIMPLE, eta0, n_states=500, seed=1000 * gi + seed,
                                  fractions=(1 / 8,), reference=ref)
            n_runs += 1
            runs_pass += v.ks_detection.p >= 0.05
            runs_early_fail += v.ks_early[1 / 8].p < 0.05
        lines.append(f"{name}(m={g.m}, eta0={eta0})")
    ok = runs_pass >= 0.9 * n_runs and runs_early_fail >= 0.9 * n_runs
    criterion(8, "detector validation (desk-scale replication)", ok,
              f"{n_runs} runs on {', '.join(lines)}: detection vs 500 independent 1000m runs passes KS in {runs_pass}/{n_runs}, "
              f"m/8 vs 1000m fails KS in {runs_early_fail}/{n_runs}")
    assert ok


# 9 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_09_diagnostic_comparison(criterion):
    corpus = {}
    for fam, count, nr in [("erdos-like", 10, (150, 300)), ("power-law", 10, (400, 900))]:
        spec = CorpusSpec(fam, n_range=nr, m_range=(500, 1500), count=count, seed=9)
        corpus.update({name: g for name, g, _ in generate_corpus(spec)})
    space = GraphSpace.from_names("loopy-multigraph", "stub")
    tab = compare_diagnostics(corpus, space, "matched-window", n_states=500, ref_chains=10, seed=9)
    s = tab.summary
    ks, gw = s["ks-window"], s["geweke"]
    ok = (ks["graphs"] == 20 and ks["false_alarm_rate"] <= 0.15
          and gw["mean_steps"] >= ks["mean_steps"])
    criterion(9, "diagnostic comparison (desk-scale replication)", ok,
              f"20 graphs, matched windows: ks-window false alarms {ks['false_alarm_rate']:.0%}, "
              f"mean steps ks-window {ks['mean_steps']:.0f} vs geweke {gw['mean_steps']:.0f} "
              f"(geweke false alarms {gw['false_alarm_rate']:.0%}, "
              f"gelman-rubin {s['gelman-rubin']['false_alarm_rate']:.0%}, {s['gelman-rubin']['mean_steps']:.0f} steps)")
    assert ok


# 10 --------------------------------------------------------------------------

def _tree(d):
    return {str(p.relative_to(d)): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def test_10_determinism(criterion, tmp_path, capsys):
    g = random_multigraph(make_rng(10), 60, 150, loops=False, multi=False)
    hub = _star_plus(6, 18)
    gp, hp = tmp_path / "g.edges", tmp_path / "hub.edges"
    write_edge_list(g, gp)
    write_edge_list(hub, hp)
    commands = {
        "sample": ["sample", str(gp), "--samples", "3", "--seed", "42"],
        "gap-estimate": ["gap", str(hp), "--space", "loopy-multigraph", "--labeling", "vertex",
                         "--chains", "10", "--burn-in-mult", "20", "--seed", "42"],
        "converge": ["converge", str(gp), "--gap", "fixed:25", "--seed", "42"],
        "enumerate": ["enumerate", "3", "2", "2", "1", "--space", "multigraph"],
        "corpus": ["corpus", "--family", "power-law", "--n-min", "50", "--n-max", "60", "--count", "2",
                   "--seed", "42", "--randomize-mult", "3"],
    }
    identical = {}
    for name, argv in commands.items():
        outs = []
        for rep in range(2):
            d = tmp_path / f"{name}-{rep}"
            assert main(argv + ["--out", str(d)]) == 0
            outs.append(_tree(d))
        identical[name] = outs[0] == outs[1] and len(outs[0]) > 0
    corp = tmp_path / "corpus-0"
    outs = []
    for rep in range(2):
        d = tmp_path / f"bench-{rep}"
        assert main(["benchmark", str(corp), "--space", "loopy-multigraph", "--gap", "fixed:20",
                     "--states", "8", "--ref-chains", "2", "--burn-in-mult", "10", "--seed", "42",
                     "--out", str(d)]) == 0
        outs.append(_tree(d))
    identical["benchmark"] = outs[0] == outs[1]
    capsys.readouterr()
    ok = all(identical.values())
    criterion(10, "determinism", ok, ", ".join(f"{k}={'identical' if v else 'DIFFERENT'}"
                                                for k, v in identical.items()))
    assert ok
