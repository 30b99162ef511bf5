"""Compare the KS-window detector with Geweke and Gelman-Rubin.

Each method is run on many independent chains started from the same
Havel-Hakimi graph.  We record the step at which each declares
convergence and test the r values reached there against a long-run
reference ensemble.  A false alarm is a method stopping at states the KS
test can still tell apart from the reference.  This is a cut-down run;
the acceptance suite does the full-sized version.
"""

from configmc import GraphSpace
from configmc.convergence import compare_diagnostics
from configmc.corpus import CorpusSpec, generate_corpus

space = GraphSpace.from_names("loopy-multigraph", "stub")
corpus = {name: g for name, g, _ in
          generate_corpus(CorpusSpec("erdos-like", n_range=(100, 150), count=3, seed=4))}

for mode in ("matched-window", "half-m"):
    table = compare_diagnostics(corpus, space, mode, n_states=60, ref_chains=4, burn_in_mult=200, seed=4)
    print(f"window mode: {mode}")
    for method, row in table.summary.items():
        if "mean_steps" not in row:
            print(f"    {method:<14} {row.get('status', '')}")
            continue
        print(f"    {method:<14} mean steps {row['mean_steps']:>9.0f}  "
              f"false alarms {row['false_alarm_rate']:.0%}  mean KS D {row['mean_ks_distance']:.3f}")
