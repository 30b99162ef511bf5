"""Choose a sampling gap, then detect when the chain has forgotten its start.

The scaling-law decision tree gives a gap from m, density and kmax.  For a
dense graph the tree defers to the autocorrelation search, which we also
run directly here on a small graph.  The KS sliding-window detector then
compares consecutive lists of 30 thinned r values and stops when they look
alike.
"""

from configmc import ChainState, GraphSpace, decide_gap, detect_convergence, estimate_gap
from configmc.corpus import CorpusSpec, generate_corpus
from configmc.rng import make_rng

space = GraphSpace.from_names("simple", "stub")
(name, g, ann), = generate_corpus(CorpusSpec("dense", n_range=(40, 40), count=1, seed=3))
print(f"{name}: m={g.m} omega={ann['omega']:.3f}")

decision = decide_gap(g, space)
print(f"decision tree: {decision.rule} -> eta0 = {decision.eta0}")

est = estimate_gap(g, space, D=20, burn_in_mult=50, seed=3)
print(f"autocorrelation search: eta per T = {est.eta_by_T}, eta0 = {est.eta0}")
for T, curve in est.f_curve.items():
    print(f"    T={T} probes " + " ".join(f"{e}:{f:.3f}" for e, f in curve))

chain = ChainState(g, space, rng=make_rng(3))
report = detect_convergence(chain, est.eta0)
print(f"converged after {report.converged_at} proposals "
      f"({report.windows_tested} windows, D={report.ks_stat:.3f}, p={report.ks_p:.3f})")
