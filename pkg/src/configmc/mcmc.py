"""Double-edge-swap Markov chains for the eight graph spaces.

Two implementations share one proposal stream (four uniforms per step):

* :func:`step_stub` / :func:`step_vertex` take one step in pure Python and
  report a :class:`StepOutcome`; they are the readable reference.
* :meth:`ChainState.advance`, :meth:`ChainState.series` and friends run
  the compiled kernel in :mod:`configmc._kernels` for many steps at once.

Given the same seed both produce the same trajectory.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .assortativity import AssortativityTracker, delta_r, edge_degree_sum
from .exceptions import AssortativityUndefinedError, CannotSwapError
from .graph import apply_swap, degree_moments, edge_pair_from_uniforms, swap_endpoints
from .rng import make_rng

REASONS = ("ok", "would-create-loop", "would-create-multi-edge",
           "vertex-labeled-rejection", "degenerate-choice")

BURN_IN_MULT = 1000
_CHUNK = 1 << 16


class LoopyConnectivityWarning(UserWarning):
    """Loopy graph space: a few degree sequences are not swap-connected."""


_warned_loopy = False


def _warn_loopy_once():
    global _warned_loopy
    if not _warned_loopy:
        _warned_loopy = True
        warnings.warn(
            "loopy graph space (self-loops, no multi-edges): for rare degree sequences "
            "double-edge swaps do not connect the space and the chain cannot reach every "
            "graph; this is not checked", LoopyConnectivityWarning, stacklevel=3)


@dataclass(frozen=True)
class StepOutcome:
    accepted: bool
    r_after: float
    reason: str = "ok"


class ChainState:
    """A graph, its assortativity tracker and a private random stream.

    The chain owns ``g``: pass a copy if the original is still needed.
    ``tracker`` is None when the degree sequence is regular, in which case
    the chain still runs but no assortativity can be reported.
    """

    def __init__(self, g, space, rng=None, seed=0):
        self.g = g
        self.space = space
        self.rng = rng if rng is not None else make_rng(seed)
        S1, S2, S3 = degree_moments(g)
        den = S1 * S3 - S2 * S2
        self.sl = edge_degree_sum(g)
        self.tracker = AssortativityTracker(S1, S2, S3, den, g.m, self.sl) if den > 0 else None
        self.swaps_done = 0
        self.counts = np.zeros(K.N_REASONS, dtype=np.int64)
        if space.allow_loops and not space.allow_multi:
            _warn_loopy_once()

    @property
    def r(self):
        if self.tracker is None:
            raise AssortativityUndefinedError("degree assortativity undefined for a regular degree sequence")
        return self.tracker.r

    @property
    def needs_table(self):
        return self.space.vertex_labeled or not self.space.allow_multi

    def copy(self, rng=None):
        c = ChainState.__new__(ChainState)
        c.g = self.g.copy()
        c.space = self.space
        c.rng = rng if rng is not None else make_rng(0)
        c.sl = self.sl
        c.tracker = self.tracker.copy() if self.tracker is not None else None
        c.swaps_done = self.swaps_done
        c.counts = self.counts.copy()
        return c

    def rejection_rate(self):
        total = self.counts.sum()
        return float(1.0 - self.counts[K.OK] / total) if total else 0.0

    def _sync_sl(self, sl):
        self.sl = int(sl)
        if self.tracker is not None:
            self.tracker.set_sl(self.sl)

    def _kernel(self, nsteps, record_every=0, uniforms=None, log_reasons=False):
        """Run ``nsteps`` kernel steps, returning recorded Sl values."""
        g = self.g
        if g.m < 2:
            raise CannotSwapError(f"need at least 2 edges to swap, graph has {g.m}")
        nsteps = int(nsteps)
        nrec_total = nsteps // record_every if record_every else 0
        out = np.empty(nrec_total, dtype=np.int64)
        reasons = np.empty(nsteps if log_reasons else 0, dtype=np.int8)
        use_table = self.needs_table
        if use_table:
            keys, vals, shift = g.table()
        else:
            keys = np.full(16, K.EMPTY, dtype=np.int64)
            vals = np.zeros(16, dtype=np.int64)
            shift = 60
        sp = self.space
        every = record_every if record_every else nsteps + 1
        sl, phase, pos, done = self.sl, 0, 0, 0
        while done < nsteps:
            c = min(_CHUNK, nsteps - done)
            u = uniforms[done:done + c] if uniforms is not None else self.rng.random((c, 4))
            sl, phase, nrec = K.run_chain(
                g.edges, g.degrees, g.n, keys, vals, shift, use_table,
                sp.allow_loops, sp.allow_multi, sp.vertex_labeled, u, sl,
                every, phase, out[pos:], self.counts,
                reasons[done:done + c] if log_reasons else reasons)
            pos += nrec
            done += c
        if not use_table:
            g.invalidate_table()
        self._sync_sl(sl)
        self.swaps_done += nsteps
        return (out, reasons) if log_reasons else out

    def advance(self, nsteps):
        if nsteps > 0:
            self._kernel(nsteps)

    def series(self, eta, T):
        """``T`` assortativity values, one after every ``eta`` steps."""
        if eta < 1 or T < 1:
            raise ValueError("eta and T must be positive")
        if self.tracker is None:
            raise AssortativityUndefinedError("degree assortativity undefined for a regular degree sequence")
        return self.tracker.r_from_sl(self._kernel(eta * T, record_every=eta))

    def trace(self, nsteps):
        """Assortativity after each of the next ``nsteps`` steps."""
        return self.series(1, nsteps)

    def step(self):
        return step_vertex(self) if self.space.vertex_labeled else step_stub(self)


# reference single-step implementations ------------------------------------

def _space_exit(g, space, x, y, w, z):
    """Reason string if (x,w), (y,z) would leave ``space``, else None."""
    if not space.allow_loops and (x == w or y == z):
        return REASONS[K.WOULD_CREATE_LOOP]
    if not space.allow_multi:
        old = [_pair(x, y), _pair(w, z)]
        new = [_pair(x, w), _pair(y, z)]
        if new[0] == new[1]:
            return REASONS[K.WOULD_CREATE_MULTI]
        for p in new:
            # multiplicity after the two chosen edges are lifted out
            if g.mult(*p) - old.count(p) >= 1:
                return REASONS[K.WOULD_CREATE_MULTI]
    return None


def _pair(u, v):
    return (u, v) if u <= v else (v, u)


def vertex_acceptance_weights(g, u, v, x, y):
    """Weights ``(A, B)`` for the vertex-labeled move (u,v),(x,y) -> (u,x),(v,y).

    The move is accepted with probability ``min(1, B / A)``.  Returns None
    for the two-vertex and one-vertex configurations that are always
    resampled (a loop paired with an edge at the same vertex, or two loops
    at one vertex).
    """
    w = g.mult
    distinct = len({u, v, x, y})
    if distinct == 4:
        return w(u, v) * w(x, y), (w(u, x) + 1) * (w(v, y) + 1)
    if distinct == 3:
        if u == v or x == y:
            return 2 * w(u, v) * w(x, y), (w(u, x) + 1) * (w(v, y) + 1)
        return w(u, v) * w(x, y), 2 * (w(u, x) + 1) * (w(v, y) + 1)
    if distinct == 2:
        loops = (u == v) + (x == y)
        if loops == 1:
            return None
        if loops == 2:
            wux = w(u, x)
            return 2 * w(u, u) * w(x, x), 0.5 * (wux + 2) * (wux + 1)
        wuv = w(u, v)
        return 0.5 * wuv * (wuv - 1), 2 * (w(u, u) + 1) * (w(v, v) + 1)
    return None


def _take_step(state, vertex):
    g = state.g
    if g.m < 2:
        raise CannotSwapError(f"need at least 2 edges to swap, graph has {g.m}")
    u0, u1, u2, u3 = state.rng.random(4)
    i, j = edge_pair_from_uniforms(g.m, u0, u1)
    orientation = 1 if u2 < 0.5 else 0
    x, y, w, z = swap_endpoints(g, i, j, orientation)
    reason = _space_exit(g, state.space, x, y, w, z)
    if reason is None and vertex:
        weights = vertex_acceptance_weights(g, x, y, w, z)
        if weights is None:
            reason = REASONS[K.DEGENERATE]
        elif not u3 < weights[1] / weights[0]:
            reason = REASONS[K.VERTEX_REJECTION]
    state.swaps_done += 1
    state.counts[REASONS.index(reason or "ok")] += 1
    if reason is not None:
        return StepOutcome(False, state.tracker.r if state.tracker else float("nan"), reason)
    rec = apply_swap(g, i, j, orientation)
    if state.tracker is not None:
        delta_r(state.tracker, *rec.degrees)
        state.sl = state.tracker.Sl
        return StepOutcome(True, state.tracker.r)
    kx, ky, kw, kz = rec.degrees
    state.sl += 2 * (kx * kw + ky * kz - kx * ky - kw * kz)
    return StepOutcome(True, float("nan"))


def step_stub(state):
    """One stub-labeled step: propose, resample if the space would be left."""
    return _take_step(state, vertex=False)


def step_vertex(state):
    """One vertex-labeled step with the multiplicity-based acceptance test."""
    return _take_step(state, vertex=True)


def burn_in(state, mult=BURN_IN_MULT):
    """Advance ``mult * m`` proposal steps and return the state."""
    state.advance(mult * state.g.m)
    return state


def chain_series(state, eta, T):
    return state.series(eta, T)
