"""``configmc`` command line.

Every option can also be set through an environment variable named
``CONFIGMC_<OPTION>`` (upper case, dashes as underscores), e.g.
``CONFIGMC_SEED=7`` or ``CONFIGMC_SPACE=loopy``.  Explicit flags win.

Exit codes: 0 success, 2 input or space error, 3 nonconvergence timeout,
4 degenerate statistics.  On failure a JSON error object is printed to
stderr (and written to ``error.json`` when ``--out`` is given).
"""

import argparse
import csv
import hashlib
import json
import os
import sys

from . import __version__
from .convergence import METHODS, compare_diagnostics, detect_convergence
from .corpus import FAMILIES, CorpusSpec, UnrealizableSpecError, read_corpus, write_corpus
from .enumeration import MAX_MATCHINGS, enumerate_graphs
from .exceptions import (
    AssortativityUndefinedError,
    CannotSwapError,
    DegenerateSeriesError,
    DensityUndefinedError,
    EnumerationRefusedError,
    EstimationFailedError,
    NonconvergenceTimeoutError,
    ParseError,
    SpaceViolationError,
)
from .gap import resolve_gap
from .graph import GraphSpace, degree_stats, parse_edge_list, render_edge_list
from .mcmc import BURN_IN_MULT, ChainState
from .rng import make_rng

ENV_PREFIX = "CONFIGMC_"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TIMEOUT = 3
EXIT_DEGENERATE = 4

_EXIT_CODES = [
    (NonconvergenceTimeoutError, EXIT_TIMEOUT),
    (AssortativityUndefinedError, EXIT_DEGENERATE),
    (DegenerateSeriesError, EXIT_DEGENERATE),
    (EstimationFailedError, EXIT_DEGENERATE),
    (ParseError, EXIT_INPUT),
    (SpaceViolationError, EXIT_INPUT),
    (CannotSwapError, EXIT_INPUT),
    (DensityUndefinedError, EXIT_INPUT),
    (EnumerationRefusedError, EXIT_INPUT),
    (UnrealizableSpecError, EXIT_INPUT),
    (OSError, EXIT_INPUT),
    (ValueError, EXIT_INPUT),
]


def _env(name, default):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def _env_flag(name):
    return _env(name, "").strip().lower() in ("1", "true", "yes", "on")


def _add(p, flag, **kw):
    name = flag.lstrip("-")
    if kw.get("action") == "store_true":
        kw["default"] = _env_flag(name)
    elif "default" in kw and kw.get("action") != "append":
        kw["default"] = _env(name, kw["default"])
    p.add_argument(flag, **kw)


def _space_opts(p):
    _add(p, "--space", default="simple",
         choices=["simple", "loopy", "multigraph", "loopy-multigraph"])
    _add(p, "--labeling", default="stub", choices=["stub", "vertex"])


def _common(p):
    _space_opts(p)
    _add(p, "--seed", type=int, default="0", help="master seed (unsigned 64-bit)")
    _add(p, "--out", default=None, help="output directory (stdout if omitted)")


def _chain_opts(p):
    _add(p, "--gap", default="auto", help="auto | estimate | fixed:<n>")
    _add(p, "--burn-in-mult", type=int, default=str(BURN_IN_MULT),
         help="burn-in per gap-estimation chain, in multiples of m")
    _add(p, "--alpha", type=float, default="0.05", help="KS significance level")
    _add(p, "--strict-linear-gap", action="store_true", help="scan eta = 1, 2, 3, ... when estimating")
    _add(p, "--exact-ks", action="store_true", help="permutation p-values in the detector")
    _add(p, "--max-windows", type=int, default=None, help="give up after this many KS windows")
    _add(p, "--chains", type=int, default="100", help="chains used to estimate the gap")
    _add(p, "--relabel", action="store_true", help="accept arbitrary vertex tokens")


def build_parser():
    ap = argparse.ArgumentParser(prog="configmc", description="Uniform sampling from configuration models "
                                 "by double-edge swaps, with automatic convergence detection.")
    ap.add_argument("--version", action="version", version=f"configmc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="detect convergence, then emit samples spaced by the gap")
    p.add_argument("input")
    _common(p)
    _chain_opts(p)
    _add(p, "--samples", type=int, default="1")

    p = sub.add_parser("gap", help="report the sampling gap and how it was chosen")
    p.add_argument("input")
    _common(p)
    _chain_opts(p)

    p = sub.add_parser("converge", help="run the sliding-window KS detector")
    p.add_argument("input")
    _common(p)
    _chain_opts(p)

    p = sub.add_parser("benchmark", help="compare convergence diagnostics over a corpus directory")
    p.add_argument("corpus")
    _common(p)
    _chain_opts(p)
    _add(p, "--mode", default="matched-window", choices=["half-m", "matched-window"])
    _add(p, "--states", type=int, default="500", help="independent chains per method")
    _add(p, "--ref-chains", type=int, default="10", help="chains behind the reference distribution")
    _add(p, "--workers", type=int, default="1")
    _add(p, "--methods", default=",".join(METHODS))

    p = sub.add_parser("enumerate", help="list every graph of a small degree sequence with its weight")
    p.add_argument("degrees", type=int, nargs="*")
    _space_opts(p)
    _add(p, "--max-matchings", type=int, default=str(MAX_MATCHINGS))
    _add(p, "--out", default=None)

    p = sub.add_parser("corpus", help="generate a synthetic corpus of edge lists")
    _add(p, "--family", default="power-law", choices=list(FAMILIES))
    _add(p, "--n-min", type=int, default="200")
    _add(p, "--n-max", type=int, default="400")
    _add(p, "--m-min", type=int, default="0")
    _add(p, "--m-max", type=int, default=str(10**9))
    _add(p, "--count", type=int, default="10")
    _add(p, "--seed", type=int, default="0")
    _add(p, "--randomize-mult", type=int, default="0")
    _add(p, "--param", action="append", default=None, metavar="KEY=VALUE",
         help="family parameter, e.g. gamma=2.5 (repeatable)")
    _add(p, "--out", default=None)
    return ap


# helpers --------------------------------------------------------------------

def _space(args):
    return GraphSpace.from_names(args.space, args.labeling)


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _emit(args, filename, obj):
    text = _dumps(obj)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, filename), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_trace(path, trace):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "r"])
        for step, r in trace:
            w.writerow([step, repr(float(r))])


def _load(args):
    with open(args.input, "rb") as fh:
        raw = fh.read()
    g = parse_edge_list(raw.decode("utf-8"), space=_space(args), relabel=args.relabel)
    return g, hashlib.sha256(raw).hexdigest()


def _gap_kwargs(args):
    return {"seed": args.seed, "burn_in_mult": args.burn_in_mult, "D": args.chains,
            "strict_linear": args.strict_linear_gap}


def _run_config(args, digest):
    return {"input": args.input, "input_sha256": digest, "space": _space(args).name,
            "seed": args.seed, "gap": args.gap, "alpha": args.alpha,
            "burn_in_mult": args.burn_in_mult, "strict_linear_gap": args.strict_linear_gap,
            "exact_ks": args.exact_ks, "max_windows": args.max_windows, "version": __version__}


def _graph_info(g, space):
    # den near zero makes r numerically fragile, so it is always reported
    return degree_stats(g, space).as_dict()


def _detect(args, g, space, eta0):
    state = ChainState(g, space, rng=make_rng(args.seed))
    report = detect_convergence(state, eta0, alpha=args.alpha, max_windows=args.max_windows,
                                exact=args.exact_ks, keep_trace=True)
    return state, report


# subcommands ------------------------------------------------------------------

def cmd_gap(args):
    g, digest = _load(args)
    eta0, prov = resolve_gap(g, _space(args), args.gap, **_gap_kwargs(args))
    _emit(args, "gap.json", {"config": _run_config(args, digest), "graph": _graph_info(g, _space(args)),
                             "eta0": eta0, "gap": prov})
    return EXIT_OK


def cmd_converge(args):
    g, digest = _load(args)
    space = _space(args)
    eta0, prov = resolve_gap(g, space, args.gap, **_gap_kwargs(args))
    try:
        _, report = _detect(args, g, space, eta0)
    except NonconvergenceTimeoutError as exc:
        if args.out:
            _write_trace_file(args, exc.report.trace)
        raise
    out = {"config": _run_config(args, digest), "graph": _graph_info(g, space), "eta0": eta0,
           "gap": prov, "convergence": report.as_dict()}
    _emit(args, "convergence.json", out)
    if args.out:
        _write_trace_file(args, report.trace)
    return EXIT_OK


def _write_trace_file(args, trace):
    os.makedirs(args.out, exist_ok=True)
    _write_trace(os.path.join(args.out, "trace.csv"), trace)


def cmd_sample(args):
    if args.samples < 0:
        raise ValueError("--samples must be >= 0")
    g, digest = _load(args)
    space = _space(args)
    eta0, prov = resolve_gap(g, space, args.gap, **_gap_kwargs(args))
    state, report = _detect(args, g, space, eta0)
    files = []
    if args.out:
        os.makedirs(os.path.join(args.out, "samples"), exist_ok=True)
        _write_trace_file(args, report.trace)
    texts = []
    for i in range(args.samples):
        if i:
            state.advance(eta0)
        text = render_edge_list(state.g)
        name = f"samples/sample_{i:05d}.edges"
        files.append({"file": name, "step": state.swaps_done, "r": state.r})
        if args.out:
            with open(os.path.join(args.out, name), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            texts.append(text)
    manifest = {"config": _run_config(args, digest), "graph": _graph_info(g, space),
                "eta0": eta0, "gap": prov,
                "convergence": report.as_dict(), "samples": files,
                "replay": "run the chain seeded with config.seed from the input graph for "
                          "samples[i].step proposal steps"}
    _emit(args, "manifest.json", manifest)
    return EXIT_OK


def cmd_benchmark(args):
    space = _space(args)
    corpus = read_corpus(args.corpus) if os.path.isdir(args.corpus) else None
    if corpus is None:
        raise OSError(f"corpus directory {args.corpus!r} not found")
    methods = tuple(m for m in args.methods.split(",") if m)
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods {sorted(unknown)}")
    eta0s, prov = {}, {}
    for name, g in corpus.items():
        eta0s[name], prov[name] = resolve_gap(g, space, args.gap, **_gap_kwargs(args))
    table = compare_diagnostics(corpus, space, args.mode, eta0s, workers=args.workers,
                                n_states=args.states, ref_chains=args.ref_chains, seed=args.seed,
                                alpha=args.alpha, max_windows=args.max_windows or 200,
                                burn_in_mult=args.burn_in_mult, methods=methods)
    out = table.as_dict()
    out["config"] = {"corpus": args.corpus, "space": space.name, "mode": args.mode, "seed": args.seed,
                     "states": args.states, "ref_chains": args.ref_chains, "alpha": args.alpha}
    out["gap"] = prov
    _emit(args, "benchmark.json", out)
    if args.out:
        fields = list(out["rows"][0]) if out["rows"] else ["graph", "method"]
        with open(os.path.join(args.out, "benchmark.csv"), "w", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
            w.writeheader()
            w.writerows(out["rows"])
    return EXIT_OK


def cmd_enumerate(args):
    space = _space(args)
    graphs = enumerate_graphs(args.degrees, space, args.max_matchings)
    out = {"degrees": args.degrees, "space": space.name, "count": len(graphs),
           "graphs": [{"edges": [list(e) for e in eg.edges], "stub_weight": eg.stub_weight,
                       "vertex_weight": eg.vertex_weight, "weight": eg.weight(space)}
                      for eg in graphs]}
    _emit(args, "enumeration.json", out)
    return EXIT_OK


def _parse_params(items):
    params = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            params[key] = json.loads(val)
        except json.JSONDecodeError:
            params[key] = val
    return params


def cmd_corpus(args):
    spec = CorpusSpec(args.family, (args.n_min, args.n_max), (args.m_min, args.m_max), args.count,
                      args.seed, _parse_params(args.param), args.randomize_mult)
    if args.out is None:
        raise ValueError("corpus needs --out")
    index = write_corpus(spec, args.out)
    sys.stdout.write(_dumps({"written": len(index["graphs"]), "out": args.out}))
    return EXIT_OK


COMMANDS = {"sample": cmd_sample, "gap": cmd_gap, "converge": cmd_converge,
            "benchmark": cmd_benchmark, "enumerate": cmd_enumerate, "corpus": cmd_corpus}


def exit_code_for(exc):
    for cls, code in _EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return None


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - mapped to the exit-code contract
        code = exit_code_for(exc)
        if code is None:
            raise
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        report = getattr(exc, "report", None)
        if report is not None and hasattr(report, "as_dict"):
            err["report"] = report.as_dict()
        diag = getattr(exc, "diagnostics", None)
        if diag:
            err["diagnostics"] = diag
        text = _dumps(err)
        sys.stderr.write(text)
        out = getattr(args, "out", None)
        if out:
            os.makedirs(out, exist_ok=True)
            with open(os.path.join(out, "error.json"), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        return code


if __name__ == "__main__":
    sys.exit(main())
