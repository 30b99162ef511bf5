"""Degree assortativity: initial value, O(1) swap update, and a direct oracle.

The tracker keeps ``Sl = 2 * sum over edges of k_x * k_y`` as an exact
integer, so the running coefficient ``r = (S1*Sl - S2**2) / den`` never
accumulates floating-point drift no matter how many swaps are applied.
"""

import numpy as np

from .exceptions import AssortativityUndefinedError
from .graph import degree_moments

# numerators below this bound are formed exactly in int64
_INT64_SAFE = 2**62


class AssortativityTracker:
    __slots__ = ("S1", "S2", "S3", "den", "m", "Sl", "r")

    def __init__(self, S1, S2, S3, den, m, Sl):
        if den <= 0:
            raise AssortativityUndefinedError(
                "degree assortativity is undefined for a regular degree sequence "
                f"(S1*S3 - S2^2 = {den})")
        self.S1, self.S2, self.S3, self.den, self.m = S1, S2, S3, den, m
        self.set_sl(Sl)

    def set_sl(self, Sl):
        self.Sl = int(Sl)
        self.r = (self.S1 * self.Sl - self.S2 * self.S2) / self.den

    def r_from_sl(self, sl):
        """Vectorised ``r`` for an array of ``Sl`` values."""
        sl = np.asarray(sl, dtype=np.int64)
        if sl.size == 0:
            return np.empty(0)
        top = max(abs(int(sl.max())), abs(int(sl.min())))
        if self.S1 * top < _INT64_SAFE and self.S2 * self.S2 < _INT64_SAFE:
            num = self.S1 * sl - np.int64(self.S2 * self.S2)
            return num / float(self.den)
        return np.array([(self.S1 * int(s) - self.S2 * self.S2) / self.den for s in sl.tolist()])

    def copy(self):
        return AssortativityTracker(self.S1, self.S2, self.S3, self.den, self.m, self.Sl)

    def __repr__(self):
        return f"AssortativityTracker(r={self.r:.6g}, Sl={self.Sl}, den={self.den})"


def edge_degree_sum(g):
    """``Sl`` recomputed from scratch over the edge array."""
    k = g.degrees
    if g.m == 0:
        return 0
    e = g.edges
    return 2 * int(np.dot(k[e[:, 0]], k[e[:, 1]]))


def init_tracker(g, stats=None):
    if stats is None:
        S1, S2, S3 = degree_moments(g)
        den = S1 * S3 - S2 * S2
    else:
        S1, S2, S3, den = stats.S1, stats.S2, stats.S3, stats.den
    return AssortativityTracker(S1, S2, S3, den, g.m, edge_degree_sum(g))


def delta_r(tracker, kx, ky, kw, kz):
    """Change in ``r`` for ``{(x,y),(w,z)} -> {(x,w),(y,z)}``; updates tracker."""
    num = kx * kw + ky * kz - kx * ky - kw * kz
    tracker.set_sl(tracker.Sl + 2 * num)
    return num * 4 * tracker.m / tracker.den


def assortativity_oracle(g):
    """Degree assortativity by direct summation over the adjacency matrix.

    O(n^2); meant for tests.  A self-loop contributes 2 to ``A[u, u]``.
    """
    n = g.n
    A = np.zeros((n, n))
    for u, v in g.edges.tolist():
        if u == v:
            A[u, u] += 2
        else:
            A[u, v] += 1
            A[v, u] += 1
    k = g.degrees.astype(float)
    two_m = 2.0 * g.m
    kk = np.outer(k, k)
    num = ((A - kk / two_m) * kk).sum()
    den = ((np.diag(k) - kk / two_m) * kk).sum()
    if abs(den) <= 1e-10 * (k**3).sum():
        raise AssortativityUndefinedError("degree assortativity is undefined for a regular degree sequence")
    return num / den
