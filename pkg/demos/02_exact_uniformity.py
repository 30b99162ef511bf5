"""The chains sample the right distribution on graphs small enough to list.

For a handful of tiny degree sequences we enumerate every graph with its
stationary weight, then run each chain for a while and compare visit
frequencies.  Stub-labeled spaces weigh a multigraph by the number of stub
matchings behind it; vertex-labeled spaces are uniform.
"""

import numpy as np

from configmc import ChainState, GraphSpace
from configmc.enumeration import enumerate_graphs
from configmc.rng import make_rng

STEPS = 200_000

for degrees, kind, labeling in [((1, 1, 1, 1), "simple", "stub"),
                                ((2, 2), "loopy-multigraph", "stub"),
                                ((2, 2), "loopy-multigraph", "vertex"),
                                ((3, 2, 2, 1), "multigraph", "vertex")]:
    space = GraphSpace.from_names(kind, labeling)
    graphs = enumerate_graphs(degrees, space)
    index = {eg.edges: i for i, eg in enumerate(graphs)}
    target = np.array([eg.weight(space) for eg in graphs], dtype=float)
    target /= target.sum()

    chain = ChainState(graphs[0].graph(len(degrees)), space, rng=make_rng(2))
    visits = np.zeros(len(graphs))
    for _ in range(STEPS):
        chain.advance(1)
        visits[index[chain.g.canonical()]] += 1

    print(f"{space.name} {degrees}: {len(graphs)} graphs")
    for eg, p, q in zip(graphs, target, visits / STEPS):
        print(f"    {str(eg.edges):<40} target {p:.4f}  observed {q:.4f}")
