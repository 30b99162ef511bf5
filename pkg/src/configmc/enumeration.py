"""Brute-force enumeration of small configuration models.

Every perfect matching of the ``2m`` stubs is generated once and grouped
by the multigraph it produces.  The number of matchings behind a graph is
its stationary weight in a stub-labeled space; in a vertex-labeled space
every graph has weight 1.
"""

from collections import Counter
from dataclasses import dataclass
from math import factorial, prod

from .exceptions import EnumerationRefusedError
from .graph import Graph

MAX_MATCHINGS = 10**7


@dataclass(frozen=True)
class EnumeratedGraph:
    edges: tuple  # sorted (u, v) pairs with u <= v
    stub_weight: int
    vertex_weight: int = 1

    def weight(self, space):
        return self.vertex_weight if space.vertex_labeled else self.stub_weight

    def graph(self, n):
        return Graph(n, list(self.edges))


def double_factorial_odd(m):
    """``(2m - 1)!!``, the number of perfect matchings of ``2m`` stubs."""
    out = 1
    for k in range(1, 2 * m, 2):
        out *= k
    return out


def stub_matching_count(edges, degrees):
    """Matchings realising a multigraph: ``prod k! / (prod w! * prod 2^loops)``."""
    c = Counter((min(u, v), max(u, v)) for u, v in edges)
    num = prod(factorial(int(k)) for k in degrees)
    den = 1
    for (u, v), w in c.items():
        den *= factorial(w)
        if u == v:
            den *= 2**w
    return num // den


def _matchings(stubs):
    if not stubs:
        yield ()
        return
    first = stubs[0]
    for k in range(1, len(stubs)):
        rest = stubs[1:k] + stubs[k + 1:]
        pair = (first, stubs[k]) if first <= stubs[k] else (stubs[k], first)
        for tail in _matchings(rest):
            yield (pair,) + tail


def enumerate_graphs(degrees, space, max_matchings=MAX_MATCHINGS):
    """All graphs with this degree sequence in ``space``, with their weights.

    Returns a list of :class:`EnumeratedGraph` sorted by edge tuple.  Raises
    :class:`EnumerationRefusedError` when the degree sum is odd or the
    matching count exceeds ``max_matchings``.
    """
    degrees = [int(k) for k in degrees]
    if any(k < 0 for k in degrees):
        raise EnumerationRefusedError("negative degree")
    total = sum(degrees)
    if total % 2:
        raise EnumerationRefusedError(f"degree sum {total} is odd: no graph exists")
    m = total // 2
    count = double_factorial_odd(m)
    if count > max_matchings:
        raise EnumerationRefusedError(
            f"{count} stub matchings for m = {m} exceeds the bound {max_matchings}")
    stubs = tuple(v for v, k in enumerate(degrees) for _ in range(k))
    groups = Counter()
    for matching in _matchings(stubs):
        groups[tuple(sorted(matching))] += 1
    out = []
    for edges, w in sorted(groups.items()):
        loops = any(u == v for u, v in edges)
        multi = len(set(edges)) < len(edges)
        if (loops and not space.allow_loops) or (multi and not space.allow_multi):
            continue
        out.append(EnumeratedGraph(edges, w))
    return out


def stationary_distribution(degrees, space, max_matchings=MAX_MATCHINGS):
    """``({edges: index}, probabilities)`` of the chain's target distribution."""
    graphs = enumerate_graphs(degrees, space, max_matchings)
    w = [g.weight(space) for g in graphs]
    tot = sum(w)
    return {g.edges: i for i, g in enumerate(graphs)}, [x / tot for x in w]
