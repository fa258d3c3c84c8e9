"""Command-line interface.

Exit codes: 0 success, 1 a verification failed, 2 usage or precondition error.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
import time

from . import io
from .exceptions import SparsifyError
from .generators import generate
from .model import curvature_with_source, verify_k_submodular, verify_monotone
from .peaks_curvature import approx_peaks
from .peaks_exact import PeakEstimates, exact_peaks, peaks_bounded_arity
from .polyhedron import SumBound, counterexample_instance, extreme_points
from .ratio import RatioInstance, fptas
from .sampler import SparsifierWeights, run_trials, sample, verify_sparsifier

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

BENCH_COLUMNS = ("epsilon", "delta", "method", "mean_nnz", "failure_rate", "wall_time")

BENCH_HELP = """\
Writes one CSV row per (epsilon, delta, method) grid point with columns
  epsilon       target relative error
  delta         target failure probability
  method        peak engine used for the sampling probabilities
  mean_nnz      mean number of retained components over the trials
  failure_rate  fraction of trials whose weights fail the exhaustive check
  wall_time     seconds spent on peaks plus all trials for the grid point
Trial t of every grid point is seeded with (seed, t), so rows are reproducible.
"""


class UsageError(Exception):
    pass


def _open_unit(name):
    def parse(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not 0 < v < 1:
            raise argparse.ArgumentTypeError(f"{name} must lie in (0, 1), got {v:g}")
        return v
    return parse


def _grid(name):
    single = _open_unit(name)

    def parse(text):
        vals = [single(t) for t in text.split(",") if t.strip()]
        if not vals:
            raise argparse.ArgumentTypeError(f"empty {name} grid")
        return vals
    return parse


def _emit(payload, path):
    if path:
        io.write_json(path, payload)
    else:
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")


def _compute_peaks(inst, args) -> PeakEstimates:
    method = args.method
    if method == "exact":
        return exact_peaks(inst, force=args.force)
    if method == "curvature":
        return approx_peaks(inst, args.fptas_epsilon)
    if method == "bounded-arity":
        if inst.k != 1:
            raise UsageError(f"bounded-arity requires k=1 (instance has k={inst.k})")
        return peaks_bounded_arity(inst, minimizer=args.minimizer, force=args.force)
    raise UsageError(f"unknown method {method!r}")


def _load_peaks(inst, args) -> PeakEstimates:
    if getattr(args, "peaks", None):
        peaks = PeakEstimates.from_dict(io.read_json(args.peaks))
        if len(peaks) != len(inst):
            raise UsageError(f"peak file has {len(peaks)} values for {len(inst)} components")
        return peaks
    return _compute_peaks(inst, args)


def cmd_verify(args) -> int:
    inst = io.load_instance(args.input)
    problems, report = [], []
    for i, f in enumerate(inst):
        entry = {"component": i, "kind": f.kind}
        mv = verify_monotone(f, force=args.force)
        if mv is not None:
            problems.append(f"component {i} is not monotone: witness A={list(mv.A)}, "
                            f"e={mv.element}, label={mv.label}, drop={mv.drop:g}")
        sv = verify_k_submodular(f, force=args.force)
        if sv is not None:
            word = "submodular" if inst.k == 1 else f"{inst.k}-submodular"
            problems.append(f"component {i} is not {word}: witness A={list(sv.A)}, "
                            f"B={list(sv.B)}, excess={sv.excess:g}")
        entry["monotone"] = mv is None
        entry["k_submodular"] = sv is None
        if mv is None:
            c, source = curvature_with_source(f)
            entry["curvature"] = c
            entry["curvature_source"] = source
        report.append(entry)
    _emit({"ok": not problems, "components": report, "problems": problems}, args.output)
    for p in problems:
        print(p, file=sys.stderr)
    return EXIT_OK if not problems else EXIT_FAILED


def cmd_peaks(args) -> int:
    inst = io.load_instance(args.input)
    _emit(_compute_peaks(inst, args).to_dict(), args.output)
    return EXIT_OK


def cmd_sparsify(args) -> int:
    inst = io.load_instance(args.input)
    peaks = _load_peaks(inst, args)
    if args.trials > 1:
        summary = run_trials(inst, peaks, args.epsilon, args.delta, args.trials, seed=args.seed,
                             check=not args.no_check)
        best = summary.best
        best.meta = {"trials": args.trials, "trial_nnz": summary.nnz.tolist()}
    else:
        best = sample(inst, peaks, args.epsilon, args.delta, seed=args.seed)
    _emit(best.to_dict(), args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    inst = io.load_instance(args.input)
    sp = SparsifierWeights.from_dict(io.read_json(args.sparsifier), N=len(inst))
    if sp.w.size != len(inst):
        raise UsageError(f"sparsifier has {sp.w.size} weights for {len(inst)} components")
    eps = args.epsilon if args.epsilon is not None else sp.epsilon
    res = verify_sparsifier(inst, sp.w, eps, force=args.force)
    _emit({
        "is_sparsifier": res.is_sparsifier,
        "epsilon": eps,
        "worst_ratio": res.worst_ratio,
        "min_ratio": res.min_ratio,
        "max_ratio": res.max_ratio,
        "witness": list(res.witness) if res.witness is not None else None,
        "definition_holds": res.definition_holds,
        "nnz": sp.nnz,
    }, args.output)
    if not res.is_sparsifier:
        print(f"not a {eps:g}-sparsifier: F'/F = {res.worst_ratio:.6g} at A={list(res.witness)}",
              file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_fptas(args) -> int:
    inst = RatioInstance.from_dict(io.read_json(args.input))
    res = fptas(inst, args.epsilon)
    _emit({"I": list(res.indices), "rho": res.value, "iterations": res.iterations,
           "iteration_bound": inst.iteration_bound(args.epsilon),
           "lower": res.lower, "upper": res.upper}, args.output)
    return EXIT_OK


def _counterexample_report(inst, bound, peaks) -> str:
    out = _io.StringIO()
    left = sorted({f.u for f in inst})
    right = sorted({f.v for f in inst})
    out.write(f"instance: directed cut of the complete bipartite digraph, "
              f"{len(left)} + {len(right)} vertices, {len(inst)} arcs\n")
    out.write(f"  sources {left}, sinks {right}\n")
    out.write("per-edge peak contributions:\n")
    for f, p in zip(inst, peaks.values):
        out.write(f"  p({f.u}->{f.v}) = {p:.6g}\n")
    Bn = bound.B * bound.n
    out.write(f"sum p_e = {bound.sum_p:.6g}\n")
    out.write(f"B = {bound.B}, n = {bound.n}, Bn = {Bn}\n")
    rel = "<=" if bound.holds else ">"
    verdict = "holds" if bound.holds else "violated"
    out.write(f"bound sum p_e <= B*n {verdict}: {bound.sum_p:.6g} {rel} {Bn}\n")
    return out.getvalue()


def cmd_counterexample(args) -> int:
    start = time.perf_counter()
    inst = counterexample_instance()
    if args.method == "bounded-arity":
        peaks = peaks_bounded_arity(inst)
    else:
        peaks = exact_peaks(inst)
    B = max(len(extreme_points(f)) for f in inst)
    total = float(peaks.values.sum())
    bound = SumBound(total, B, inst.n, total <= B * inst.n + 1e-9)
    report = _counterexample_report(inst, bound, peaks)
    elapsed = time.perf_counter() - start
    sys.stdout.write(report)
    sys.stdout.write(f"peak engine: {peaks.method}, {elapsed:.2f} s\n")
    if args.output:
        io.write_json(args.output, {"sum_p": total, "B": B, "n": inst.n, "Bn": B * inst.n,
                                    "violated": not bound.holds,
                                    "peaks": peaks.values.tolist(), "method": peaks.method})
    return EXIT_OK


def _bench_instance(args):
    if args.input:
        return io.load_instance(args.input)
    params = {"n": args.n, "components": args.components}
    if args.family == "digraph-cut":
        params = {"n": args.n, "arcs": args.components}
    return generate(args.family, seed=args.instance_seed, **params)


def cmd_bench(args) -> int:
    inst = _bench_instance(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in ("exact", "curvature", "bounded-arity")]
    if bad or not methods:
        raise UsageError(f"invalid method grid {args.methods!r}")
    rows = []
    for method in methods:
        t0 = time.perf_counter()
        ns = argparse.Namespace(method=method, force=args.force, fptas_epsilon=args.fptas_epsilon,
                                minimizer="auto")
        peaks = _compute_peaks(inst, ns)
        peak_time = time.perf_counter() - t0
        for eps in args.epsilons:
            for delta in args.deltas:
                t1 = time.perf_counter()
                s = run_trials(inst, peaks, eps, delta, args.trials, seed=args.seed)
                rows.append({"epsilon": eps, "delta": delta, "method": method,
                             "mean_nnz": s.mean_nnz, "failure_rate": s.failure_rate,
                             "wall_time": round(peak_time + time.perf_counter() - t1, 6)})
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_generate(args) -> int:
    params = {"n": args.n, "components": args.components}
    if args.family == "digraph-cut":
        params = {"n": args.n, "arcs": args.components}
    if args.family == "k-label-coverage":
        params["k"] = args.k
    inst = generate(args.family, seed=args.seed, **params)
    _emit(io.instance_to_dict(inst), args.output)
    return EXIT_OK


FAMILIES = ("weighted-coverage", "k-label-coverage", "local-coverage", "skewed-coverage", "digraph-cut",
            "bipartite-cut")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ksparsify",
                                     description="Sparsify decomposable monotone k-submodular functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_input=True):
        p.add_argument("--input", required=need_input, metavar="PATH")
        p.add_argument("--output", metavar="PATH", help="write JSON here instead of stdout")
        p.add_argument("--force", action="store_true", help="override enumeration size guards")

    def engine(p):
        p.add_argument("--method", choices=("exact", "curvature", "bounded-arity"), default="exact")
        p.add_argument("--fptas-epsilon", type=_open_unit("--fptas-epsilon"), default=0.5)
        p.add_argument("--minimizer", choices=("auto", "brute-force", "min-cut"), default="auto",
                       help="inner minimiser of the bounded-arity engine")

    p = sub.add_parser("verify", help="check monotonicity, k-submodularity and curvature of each component")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("peaks", help="compute peak contributions")
    common(p)
    engine(p)
    p.set_defaults(func=cmd_peaks)

    p = sub.add_parser("sparsify", help="sample a reweighted subset of components")
    common(p)
    engine(p)
    p.add_argument("--peaks", metavar="PATH", help="precomputed peak file")
    p.add_argument("--epsilon", type=_open_unit("--epsilon"), required=True)
    p.add_argument("--delta", type=_open_unit("--delta"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1, help="keep the smallest sample that passes the check")
    p.add_argument("--no-check", action="store_true", help="with --trials, keep the smallest sample unchecked")
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("check", help="exhaustively verify a sparsifier file")
    common(p)
    p.add_argument("--sparsifier", required=True, metavar="PATH")
    p.add_argument("--epsilon", type=_open_unit("--epsilon"), default=None,
                   help="defaults to the epsilon stored in the sparsifier file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fptas", help="approximately maximise (A + x(I)) / (B + y(I))")
    common(p)
    p.add_argument("--epsilon", type=_open_unit("--epsilon"), default=0.01)
    p.set_defaults(func=cmd_fptas)

    p = sub.add_parser("counterexample", help="report the peak-sum bound on the bipartite cut instance")
    p.add_argument("--method", choices=("exact", "bounded-arity"), default="bounded-arity")
    p.add_argument("--output", metavar="PATH", help="also write the numbers as JSON")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("bench", help="sweep epsilon, delta and engine, emitting CSV",
                       description=BENCH_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p, need_input=False)
    p.add_argument("--family", choices=FAMILIES, default="weighted-coverage",
                   help="generated instance family when --input is absent")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--components", type=int, default=30)
    p.add_argument("--instance-seed", type=int, default=0)
    p.add_argument("--epsilons", type=_grid("epsilon"), default=[0.2, 0.4, 0.6])
    p.add_argument("--deltas", type=_grid("delta"), default=[0.2])
    p.add_argument("--methods", default="exact", help="comma-separated engines")
    p.add_argument("--fptas-epsilon", type=_open_unit("--fptas-epsilon"), default=0.5)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write a generated instance")
    p.add_argument("--family", choices=FAMILIES, default="weighted-coverage")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--components", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", metavar="PATH")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "trials", 1) < 1:
        print("error: --trials must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, SparsifyError, ValueError, KeyError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
