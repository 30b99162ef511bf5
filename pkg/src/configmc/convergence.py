"""Convergence detection for the double-edge-swap chain.

The main detector compares two contiguous windows of assortativity values
with a two-sample Kolmogorov-Smirnov test and slides forward until the
windows look alike.  Geweke and Gelman-Rubin diagnostics are provided for
the comparison harness in :func:`compare_diagnostics`.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import kolmogorov

from .exceptions import ConfigModelError, DegenerateSeriesError, NonconvergenceTimeoutError
from .mcmc import BURN_IN_MULT, ChainState, burn_in
from .rng import make_rng

LIST_LEN = 30
ALPHA = 0.05
GEWEKE_Z = 1.96
GR_CUTOFF = 1.1
METHODS = ("ks-window", "geweke", "gelman-rubin")
NOT_IMPLEMENTED = "not implemented (non-goal)"


# two-sample KS test --------------------------------------------------------

@dataclass(frozen=True)
class KSResult:
    D: float
    p: float

    def __iter__(self):
        return iter((self.D, self.p))


def ks_statistic(a, b):
    """Supremum distance between the two empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("KS test needs two non-empty samples")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_pvalue(D, na, nb):
    """Asymptotic Kolmogorov p-value with the small-sample correction."""
    ne = na * nb / (na + nb)
    s = math.sqrt(ne)
    return float(kolmogorov((s + 0.12 + 0.11 / s) * D))


def ks_two_sample(a, b, exact=False, n_perm=10_000, rng=None):
    """Two-sample KS test returning ``(D, p)``.

    With ``exact=True`` the p-value is estimated from ``n_perm`` random
    relabelings of the pooled sample instead of the asymptotic series.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    D = ks_statistic(a, b)
    if not exact:
        return KSResult(D, ks_pvalue(D, a.size, b.size))
    rng = rng if rng is not None else make_rng(0)
    pooled = np.concatenate([a, b])
    na = a.size
    hits = 0
    for _ in range(n_perm):
        perm = rng.permutation(pooled)
        if ks_statistic(perm[:na], perm[na:]) >= D - 1e-12:
            hits += 1
    return KSResult(D, (hits + 1) / (n_perm + 1))


# sliding-window detector ---------------------------------------------------

@dataclass
class ConvergenceReport:
    converged_at: int
    windows_tested: int
    ks_stat: float
    ks_p: float
    eta0_used: int
    history: list = field(default_factory=list)
    start_step: int = 0
    list_len: int = LIST_LEN
    alpha: float = ALPHA
    trace: list = field(default_factory=list)

    def as_dict(self, with_trace=False):
        d = asdict(self)
        if not with_trace:
            d.pop("trace")
        return d


def detect_convergence(state, eta0, list_len=LIST_LEN, alpha=ALPHA, *, max_windows=None,
                       exact=False, keep_trace=False):
    """Advance ``state`` until two adjacent windows pass a KS test.

    Windows ``L1`` and ``L2`` hold ``list_len`` assortativity values spaced
    ``eta0`` steps apart, ``L2`` starting ``eta0`` steps after ``L1`` ends.
    While the test rejects at ``alpha``, ``L2`` becomes ``L1`` and a fresh
    ``L2`` is drawn.  On return the chain sits at the end of the accepted
    ``L2``; from there every further ``eta0`` steps is a fresh draw.

    ``max_windows`` bounds the number of tests; past it
    :class:`NonconvergenceTimeoutError` carries the partial report.
    ``keep_trace`` stores every sampled ``(step, r)`` pair in the report.
    """
    if eta0 < 1:
        raise ValueError("eta0 must be >= 1")
    start = state.swaps_done
    trace = []

    def draw():
        s0 = state.swaps_done
        vals = state.series(eta0, list_len)
        if keep_trace:
            trace.extend((s0 + eta0 * (t + 1), float(v)) for t, v in enumerate(vals))
        return vals

    L1 = draw()
    L2 = draw()
    history = []
    perm_rng = make_rng(0, 1) if exact else None
    while True:
        D, p = ks_two_sample(L1, L2, exact=exact, rng=perm_rng)
        history.append((D, p))
        report = ConvergenceReport(state.swaps_done, len(history), D, p, eta0, history,
                                   start, list_len, alpha, trace)
        if p > alpha:
            return report
        if max_windows is not None and len(history) >= max_windows:
            raise NonconvergenceTimeoutError(
                f"no convergence after {len(history)} windows ({state.swaps_done} steps)", report)
        L1, L2 = L2, draw()


# rival diagnostics ---------------------------------------------------------

@dataclass
class DiagnosticVerdict:
    method: str
    converged_at: int
    statistic: object
    windows: int = 0
    timed_out: bool = False


def batch_means_variance(x):
    """Variance of the mean of ``x`` from ``floor(sqrt(n))`` batch means."""
    x = np.asarray(x, dtype=float)
    nb = int(math.isqrt(x.size))
    size = x.size // nb
    if nb < 2:
        raise DegenerateSeriesError("segment too short for batch means")
    means = x[x.size - nb * size:].reshape(nb, size).mean(axis=1)
    return float(np.var(means, ddof=1)) / nb


def geweke(series, first=0.10, last=0.50):
    """Geweke z-score comparing the start and end of a series.

    The variance of each segment mean comes from batch means, which
    estimates the spectral density at zero divided by the segment length.
    """
    x = np.asarray(series, dtype=float)
    if x.size < 20:
        raise ValueError("geweke needs a series of length >= 20")
    if not (0 < first < 1 and 0 < last < 1 and first + last <= 1):
        raise ValueError("segment fractions must be in (0, 1) and not overlap")
    a = x[: int(first * x.size)]
    b = x[x.size - int(last * x.size):]
    va = batch_means_variance(a)
    vb = batch_means_variance(b)
    if va <= 0.0 or vb <= 0.0:
        raise DegenerateSeriesError("zero-variance segment in geweke diagnostic")
    return float((a.mean() - b.mean()) / math.sqrt(va + vb))


def gelman_rubin(chains):
    """Potential scale reduction factor ``R-hat`` for equal-length chains."""
    x = np.asarray(chains, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 2:
        raise ValueError("gelman_rubin needs >= 2 chains of length >= 2")
    n = x.shape[1]
    W = float(np.mean(np.var(x, axis=1, ddof=1)))
    if W <= 0.0:
        raise DegenerateSeriesError("zero within-chain variance")
    B = n * float(np.var(x.mean(axis=1), ddof=1))
    V = (n - 1) / n * W + B / n
    return math.sqrt(V / W)


def geweke_detector(state, window, max_windows=None):
    """Trace ``window`` steps at a time until ``|z| < 1.96``."""
    k = 0
    while True:
        k += 1
        try:
            z = geweke(state.trace(window))
        except DegenerateSeriesError:
            z = math.nan
        if abs(z) < GEWEKE_Z:
            return DiagnosticVerdict("geweke", state.swaps_done, z, k)
        if max_windows is not None and k >= max_windows:
            return DiagnosticVerdict("geweke", state.swaps_done, z, k, timed_out=True)


def gelman_rubin_detector(state, window, max_windows=None):
    """Compare consecutive ``window``-step traces until ``R-hat < 1.1``."""
    prev = state.trace(window)
    k = 0
    while True:
        k += 1
        cur = state.trace(window)
        try:
            rhat = gelman_rubin([prev, cur])
        except DegenerateSeriesError:
            rhat = math.nan
        if rhat < GR_CUTOFF:
            return DiagnosticVerdict("gelman-rubin", state.swaps_done, rhat, k)
        if max_windows is not None and k >= max_windows:
            return DiagnosticVerdict("gelman-rubin", state.swaps_done, rhat, k, timed_out=True)
        prev = cur


def ks_detector(state, eta0, max_windows=None, alpha=ALPHA):
    try:
        rep = detect_convergence(state, eta0, alpha=alpha, max_windows=max_windows)
        return DiagnosticVerdict("ks-window", rep.converged_at, (rep.ks_stat, rep.ks_p),
                                 rep.windows_tested)
    except NonconvergenceTimeoutError as exc:
        rep = exc.report
        return DiagnosticVerdict("ks-window", rep.converged_at, (rep.ks_stat, rep.ks_p),
                                 rep.windows_tested, timed_out=True)


def rival_window(m, eta0, mode):
    """Trace length per rival-diagnostic window for a benchmark mode."""
    if mode == "half-m":
        return max(20, m // 2)
    if mode == "matched-window":
        return (LIST_LEN - 1) * eta0 + 1
    raise ValueError(f"unknown benchmark mode {mode!r}")


# reference distributions ---------------------------------------------------

def reference_states(g, space, eta0, n_states=500, n_chains=10, seed=0,
                     burn_in_mult=BURN_IN_MULT, path=()):
    """Assortativity of ``n_states`` well-mixed states.

    ``n_chains`` chains are each burned in for ``burn_in_mult * m`` steps
    and then sampled every ``eta0`` steps.
    """
    per = -(-n_states // n_chains)
    out = []
    for c in range(n_chains):
        st = ChainState(g.copy(), space, rng=make_rng(seed, *path, c))
        burn_in(st, burn_in_mult)
        out.append(st.series(eta0, per))
    return np.concatenate(out)[:n_states]


def states_after(g, space, nsteps, n_states=500, seed=0, path=()):
    """Assortativity of ``n_states`` independent chains after ``nsteps`` steps each."""
    out = np.empty(n_states)
    for c in range(n_states):
        st = ChainState(g.copy(), space, rng=make_rng(seed, *path, c))
        st.advance(nsteps)
        out[c] = st.r
    return out


@dataclass
class ValidationResult:
    eta0: int
    m: int
    reference: np.ndarray
    at_detection: np.ndarray
    detection_steps: np.ndarray
    early: dict
    ks_detection: KSResult
    ks_early: dict

    def summary(self):
        return {
            "eta0": self.eta0, "m": self.m,
            "mean_detection_steps": float(self.detection_steps.mean()),
            "ks_detection": asdict(self.ks_detection),
            "ks_early": {k: asdict(v) for k, v in self.ks_early.items()},
        }


def validate_detector(g, space, eta0, n_states=500, ref_chains=10, seed=0,
                      fractions=(1 / 8, 1 / 4, 1 / 2), burn_in_mult=BURN_IN_MULT, alpha=ALPHA,
                      reference=None):
    """States at detected convergence and after short runs versus a reference.

    Every chain starts from ``g``.  Returns KS results of the detection-time
    distribution and of each ``fraction * m`` early distribution against
    the well-mixed reference.  ``reference`` supplies precomputed reference
    values (e.g. from :func:`states_after` with ``1000 * m`` steps, which
    are independent but costly); by default ``ref_chains`` chains are pooled.
    """
    if reference is None:
        ref = reference_states(g, space, eta0, n_states, ref_chains, seed, burn_in_mult, path=(0,))
    else:
        ref = np.asarray(reference, dtype=float)
    at = np.empty(n_states)
    steps = np.empty(n_states, dtype=np.int64)
    for c in range(n_states):
        st = ChainState(g.copy(), space, rng=make_rng(seed, 1, c))
        rep = detect_convergence(st, eta0, alpha=alpha)
        at[c] = st.r
        steps[c] = rep.converged_at
    early, ks_early = {}, {}
    for i, frac in enumerate(fractions):
        nsteps = max(1, int(round(frac * g.m)))
        vals = states_after(g, space, nsteps, n_states, seed, path=(2, i))
        early[frac] = vals
        ks_early[frac] = ks_two_sample(vals, ref)
    return ValidationResult(eta0, g.m, ref, at, steps, early, ks_two_sample(at, ref), ks_early)


# benchmark harness ---------------------------------------------------------

@dataclass
class BenchmarkRow:
    graph: str
    method: str
    mode: str
    m: int
    eta0: int
    window: int
    mean_steps: float
    ks_distance: float
    ks_p: float
    false_alarm: bool
    timeouts: int
    error: str = ""


def _run_method(method, g, space, eta0, window, n_states, seed, path, max_windows):
    vals = np.empty(n_states)
    steps = np.empty(n_states)
    timeouts = 0
    for c in range(n_states):
        st = ChainState(g.copy(), space, rng=make_rng(seed, *path, c))
        if method == "ks-window":
            v = ks_detector(st, eta0, max_windows)
        elif method == "geweke":
            v = geweke_detector(st, window, max_windows)
        else:
            v = gelman_rubin_detector(st, window, max_windows)
        timeouts += v.timed_out
        vals[c] = st.r
        steps[c] = v.converged_at
    return vals, steps, timeouts


def benchmark_graph(name, g, space, mode, eta0, *, n_states=500, ref_chains=10, seed=0,
                    index=0, alpha=ALPHA, max_windows=200, burn_in_mult=BURN_IN_MULT,
                    methods=METHODS):
    """Benchmark rows for one graph, one per method."""
    window = rival_window(g.m, eta0, mode)
    rows = []
    try:
        ref = reference_states(g, space, eta0, n_states, ref_chains, seed, burn_in_mult,
                               path=(index, 0))
    except ConfigModelError as exc:
        return [BenchmarkRow(name, meth, mode, g.m, eta0, window, math.nan, math.nan, math.nan,
                             False, 0, f"{type(exc).__name__}: {exc}") for meth in methods]
    for k, meth in enumerate(methods):
        try:
            vals, steps, timeouts = _run_method(meth, g, space, eta0, window, n_states, seed,
                                                (index, 1 + METHODS.index(meth)), max_windows)
            D, p = ks_two_sample(vals, ref)
            rows.append(BenchmarkRow(name, meth, mode, g.m, eta0, window, float(steps.mean()),
                                     D, p, bool(p < alpha), timeouts))
        except ConfigModelError as exc:
            rows.append(BenchmarkRow(name, meth, mode, g.m, eta0, window, math.nan, math.nan,
                                     math.nan, False, 0, f"{type(exc).__name__}: {exc}"))
    return rows


@dataclass
class BenchmarkTable:
    rows: list
    summary: dict

    def as_dict(self):
        return {"rows": [asdict(r) for r in self.rows], "summary": self.summary}


def summarize(rows, methods=METHODS):
    summary = {}
    for meth in methods:
        ok = [r for r in rows if r.method == meth and not r.error]
        summary[meth] = {
            "graphs": len(ok),
            "errors": sum(1 for r in rows if r.method == meth and r.error),
            "false_alarm_rate": (sum(r.false_alarm for r in ok) / len(ok)) if ok else None,
            "mean_steps": float(np.mean([r.mean_steps for r in ok])) if ok else None,
            "mean_ks_distance": float(np.mean([r.ks_distance for r in ok])) if ok else None,
        }
    summary["raftery-lewis"] = {"status": NOT_IMPLEMENTED}
    return summary


def _bench_task(args):
    name, g, space, mode, eta0, kw = args
    return benchmark_graph(name, g, space, mode, eta0, **kw)


def compare_diagnostics(corpus, space, mode, eta0s=None, *, workers=1, **kwargs):
    """Run every diagnostic on every graph and tabulate accuracy and efficiency.

    ``corpus`` maps graph names to graphs (or is a sequence of graphs).
    ``eta0s`` maps names to gaps; missing gaps come from the decision tree.
    Graphs are independent, so ``workers > 1`` spreads them over processes.
    """
    from .gap import resolve_gap

    if not isinstance(corpus, dict):
        corpus = {f"g{i:03d}": g for i, g in enumerate(corpus)}
    eta0s = dict(eta0s or {})
    tasks = []
    for i, (name, g) in enumerate(corpus.items()):
        if name not in eta0s:
            eta0s[name], _ = resolve_gap(g, space, "auto", seed=kwargs.get("seed", 0))
        tasks.append((name, g, space, mode, eta0s[name], {**kwargs, "index": i}))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_bench_task, tasks))
    else:
        results = [_bench_task(t) for t in tasks]
    rows = [r for rs in results for r in rs]
    return BenchmarkTable(rows, summarize(rows, kwargs.get("methods", METHODS)))
