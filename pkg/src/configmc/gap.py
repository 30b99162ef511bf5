"""Sampling-gap selection: autocorrelation test, gap search, scaling laws."""

import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .exceptions import DegenerateSeriesError, EstimationFailedError
from .graph import degree_stats
from .mcmc import BURN_IN_MULT, ChainState, burn_in
from .rng import make_rng

DEFAULT_T_VALUES = (200, 250)
DEFAULT_CHAINS = 100
DEFAULT_ALPHA_C = 0.05
ETA_CEILING_MULT = 100


@dataclass
class AutocorrResult:
    R: np.ndarray
    bound: float
    f: float
    Q: float


def normal_quantile(alpha_c):
    """Two-sided critical value, e.g. 1.96 for ``alpha_c = 0.05``."""
    return NormalDist().inv_cdf(1.0 - alpha_c / 2.0)


def autocorrelation(series, alpha_c=DEFAULT_ALPHA_C):
    """Sample autocorrelations ``R_h`` for ``0 < h < T`` and the exceedance fraction.

    ``C_h = (1/T) * sum_{t<T-h} (x_t - mean)(x_{t+h} - mean)`` and
    ``R_h = C_h / C_0``.  ``f`` is the fraction of lags with
    ``|R_h| > Q / sqrt(T)``.
    """
    x = np.asarray(series, dtype=float)
    T = x.size
    if T < 2:
        raise ValueError("autocorrelation needs at least two values")
    d = x - x.mean()
    c0 = np.dot(d, d) / T
    if c0 == 0.0 or np.ptp(x) == 0.0:
        raise DegenerateSeriesError("constant series has no autocorrelation")
    c = np.correlate(d, d, mode="full")[T:] / T
    R = c / c0
    Q = normal_quantile(alpha_c)
    bound = Q / math.sqrt(T)
    f = float(np.count_nonzero(np.abs(R) > bound)) / (T - 1)
    return AutocorrResult(R=R, bound=bound, f=f, Q=Q)


def search_gap(sources, T, alpha_c=DEFAULT_ALPHA_C, strict_linear=False, max_eta=10**6):
    """Smallest gap whose chain-averaged exceedance fraction is <= ``alpha_c``.

    ``sources`` are objects with ``series(eta, T)`` returning the next ``T``
    values spaced ``eta`` apart (a :class:`~configmc.mcmc.ChainState`, or
    any synthetic stand-in).  Each probe draws fresh segments from every
    source.  The default schedule doubles ``eta`` until the test passes and
    then bisects the bracket; ``strict_linear`` scans 1, 2, 3, ... instead.

    Returns ``(eta0, curve)`` with ``curve`` the list of probed
    ``(eta, f_eta)`` pairs in probe order.
    """
    curve = []

    def f_at(eta):
        total = 0.0
        for s in sources:
            try:
                total += autocorrelation(s.series(eta, T), alpha_c).f
            except DegenerateSeriesError as exc:
                raise EstimationFailedError(
                    f"constant assortativity series at gap {eta}; graph too small to estimate",
                    {"T": T, "eta": eta, "curve": curve}) from exc
        f = total / len(sources)
        curve.append((eta, f))
        return f

    def fail(eta):
        raise EstimationFailedError(
            f"f_eta still above {alpha_c} at the gap ceiling {max_eta}",
            {"T": T, "eta": eta, "curve": curve})

    if strict_linear:
        eta = 1
        while f_at(eta) > alpha_c:
            eta += 1
            if eta > max_eta:
                fail(eta)
        return eta, curve

    lo, eta = 0, 1
    while f_at(eta) > alpha_c:
        if eta >= max_eta:
            fail(eta)
        lo, eta = eta, min(2 * eta, max_eta)
    hi = eta
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if f_at(mid) <= alpha_c:
            hi = mid
        else:
            lo = mid
    return hi, curve


@dataclass
class GapEstimate:
    eta0: int
    eta_by_T: dict
    f_curve: dict
    params: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "kind": "algorithm-1",
            "eta0": self.eta0,
            "eta_by_T": {str(t): e for t, e in self.eta_by_T.items()},
            "f_curve": {str(t): [[e, f] for e, f in c] for t, c in self.f_curve.items()},
            "params": self.params,
        }


def _burned_chains(g0, space, D, seed, burn_in_mult):
    chains = []
    for k in range(D):
        st = ChainState(g0.copy(), space, rng=make_rng(seed, k))
        burn_in(st, burn_in_mult)
        chains.append(st)
    return chains


def estimate_gap_for_T(g0, space, T, D=DEFAULT_CHAINS, alpha_c=DEFAULT_ALPHA_C, *, seed=0,
                       burn_in_mult=BURN_IN_MULT, strict_linear=False, max_eta=None,
                       sources=None):
    """Gap for a single list size ``T`` after a burn-in of each of ``D`` chains.

    ``sources`` replaces the chains (used to inject synthetic series).
    """
    if sources is None:
        sources = _burned_chains(g0, space, D, seed, burn_in_mult)
    if max_eta is None:
        max_eta = ETA_CEILING_MULT * g0.m if g0 is not None else 10**6
    eta0, _ = search_gap(sources, T, alpha_c, strict_linear, max_eta)
    return eta0


def estimate_gap(g0, space, D=DEFAULT_CHAINS, alpha_c=DEFAULT_ALPHA_C, *, T_values=DEFAULT_T_VALUES,
                 seed=0, burn_in_mult=BURN_IN_MULT, strict_linear=False, max_eta=None,
                 sources=None):
    """Average of the per-``T`` gaps, rounded up.

    The same ``D`` burned-in chains serve every ``T``; each probe continues
    them rather than burning in again.
    """
    if sources is None:
        sources = _burned_chains(g0, space, D, seed, burn_in_mult)
    if max_eta is None:
        max_eta = ETA_CEILING_MULT * g0.m if g0 is not None else 10**6
    eta_by_T, curves = {}, {}
    for T in T_values:
        eta_by_T[T], curves[T] = search_gap(sources, T, alpha_c, strict_linear, max_eta)
    eta0 = math.ceil(sum(eta_by_T.values()) / len(eta_by_T))
    params = {"T_values": list(T_values), "D": len(sources), "alpha_c": alpha_c,
              "Q": normal_quantile(alpha_c), "burn_in_mult": burn_in_mult,
              "schedule": "linear" if strict_linear else "doubling+bisection",
              "seed": seed}
    return GapEstimate(eta0=eta0, eta_by_T=eta_by_T, f_curve=curves, params=params)


# scaling-law decision tree -------------------------------------------------

def gap_m_over_3(m):
    """``ceil(m/3 + 300)`` in exact integer arithmetic."""
    return -(-m // 3) + 300


def gap_m_over_2_7(m):
    """``ceil(m/2.7 + 100)`` = ``ceil(10m/27) + 100``."""
    return -(-10 * m // 27) + 100


@dataclass
class HeuristicDecision:
    kind: str  # "scaling-law" or "run-algorithm-1"
    eta0: "int | None"
    rule: str
    inputs: dict

    def as_dict(self):
        return {"kind": self.kind, "eta0": self.eta0, "rule": self.rule, "inputs": self.inputs}


def decide_gap(g, space):
    """Pick the sampling gap from the graph's size, density and maximum degree."""
    stats = degree_stats(g, space)
    m = g.m
    kmax_sq = stats.kmax**2
    inputs = {"m": m, "omega": stats.omega, "kmax_sq": kmax_sq, "two_m_over_3": 2 * m / 3,
              "space": space.name}
    if not space.allow_multi:
        if stats.omega <= 0.25:
            return HeuristicDecision("scaling-law", gap_m_over_3(m),
                                     "no multi-edges, omega <= 0.25: eta0 = ceil(m/3 + 300)", inputs)
        if m < 1000:
            return HeuristicDecision(
                "scaling-law", gap_m_over_3(m),
                "no multi-edges, omega > 0.25 but m < 1000: small-graph reading, "
                "eta0 = ceil(m/3 + 300)", inputs)
        return HeuristicDecision("run-algorithm-1", None,
                                 "no multi-edges, omega > 0.25 and m >= 1000: estimate the gap", inputs)
    if not space.vertex_labeled:
        return HeuristicDecision("scaling-law", gap_m_over_3(m),
                                 "multi-edges, stub-labeled: eta0 = ceil(m/3 + 300)", inputs)
    if 3 * kmax_sq <= 2 * m:
        return HeuristicDecision("scaling-law", gap_m_over_2_7(m),
                                 "multi-edges, vertex-labeled, kmax^2 <= 2m/3: eta0 = ceil(m/2.7 + 100)",
                                 inputs)
    return HeuristicDecision("run-algorithm-1", None,
                             "multi-edges, vertex-labeled, kmax^2 > 2m/3: estimate the gap", inputs)


def resolve_gap(g, space, policy="auto", **estimate_kwargs):
    """Resolve a gap policy to ``(eta0, report_dict)``.

    ``policy`` is ``"auto"`` (decision tree, estimating when it says so),
    ``"estimate"`` (always estimate) or ``"fixed:<n>"``.
    """
    if isinstance(policy, int):
        policy = f"fixed:{policy}"
    if policy.startswith("fixed:"):
        eta0 = int(policy.split(":", 1)[1])
        if eta0 < 1:
            raise ValueError("fixed gap must be a positive integer")
        return eta0, {"kind": "fixed", "eta0": eta0, "rule": "user-fixed"}
    if policy == "auto":
        decision = decide_gap(g, space)
        if decision.kind == "scaling-law":
            return decision.eta0, decision.as_dict()
        est = estimate_gap(g, space, **estimate_kwargs)
        return est.eta0, {**decision.as_dict(), "eta0": est.eta0, "estimate": est.as_dict()}
    if policy == "estimate":
        est = estimate_gap(g, space, **estimate_kwargs)
        return est.eta0, est.as_dict()
    raise ValueError(f"unknown gap policy {policy!r}")
