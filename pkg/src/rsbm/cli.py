"""Command-line interface.

Subcommands: ``generate``, ``recover``, ``experiment``, ``verify``,
``formulas`` and ``spectrum``. Exit status is 0 on success, 1 on runtime
failures (sampling, convergence, work budgets) and 2 on invalid input.
JSON goes to stdout; a ``timings`` object, when present, is the only part
of the output that is not reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings

from . import __version__
from .exceptions import (
    BudgetError,
    ConvergenceError,
    RSBMError,
    SamplingError,
    ValidationError,
)
from .experiment import ExperimentConfig, run_experiment
from .graphgen import DEFAULT_LIFT_REJECTS, DEFAULT_MAX_REJECTS, sample_lift, sample_rsbm
from .io import read_edge_list, read_labels, write_edge_list, write_labels
from .model import RsbmParams, check_thresholds, predicted_saw_eigenvalue1, z_sequence
from .recovery import spectral_recover
from .rigidity import (
    MAX_EXPANSION_VERTICES,
    MAX_PARTITION_VERTICES,
    edge_expansion_check,
    enumerate_regular_partitions,
    min_bisection_bruteforce,
    rsbm_membership,
)
from .saw import saw_recover, tangle_audit
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, top_eigenpairs

JSON_SCHEMA = "rsbm-json/1"


def _dump(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def _error_payload(exc):
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConvergenceError):
        err["best_residual"] = exc.best_residual
        err["iterations"] = exc.iterations
    if isinstance(exc, SamplingError):
        err["attempts"] = exc.attempts
    if isinstance(exc, BudgetError):
        err["estimated_cost"] = exc.estimated_cost
        err["budget"] = exc.budget
    return {"schema_version": JSON_SCHEMA, "error": err}


# -- generate ---------------------------------------------------------------


def cmd_generate(args):
    params = RsbmParams(args.n, args.d1, args.d2)
    if args.sampler == "permutation":
        inst = sample_lift(params, args.seed, args.max_rejects or DEFAULT_LIFT_REJECTS)
    else:
        inst = sample_rsbm(params, args.seed, args.max_rejects or DEFAULT_MAX_REJECTS, args.method)
    write_edge_list(args.out, inst)
    if args.labels:
        write_labels(args.labels, inst.labels)
    print(
        f"wrote {inst.graph.num_edges} edges on {inst.graph.num_vertices} vertices "
        f"(n={params.n} d1={params.d1} d2={params.d2} seed={inst.seed} sampler={inst.sampler}) to {args.out}"
    )
    return 0


# -- recover ----------------------------------------------------------------


def _load(args):
    graph, header = read_edge_list(args.graph)
    planted = read_labels(args.labels, graph.num_vertices) if getattr(args, "labels", None) else None
    return graph, header, planted


def cmd_recover(args):
    graph, header, planted = _load(args)
    method = {"adjacency": "spectral_adjacency", "saw": "spectral_saw", "majority": "majority_only"}[args.method]
    init = read_labels(args.init, graph.num_vertices) if args.init else None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = spectral_recover(
            graph,
            method=method,
            l=args.l,
            planted=planted,
            params=header.params,
            tolerance=args.tolerance,
            max_iter=args.max_iter,
            max_rounds=args.max_rounds,
            seed=args.seed,
            balanced=args.balanced,
            init_labels=init,
        )
    out = {"schema_version": JSON_SCHEMA, **result.to_dict()}
    if caught:
        out["warnings"] = [str(w.message) for w in caught]
    labels_out = args.labels_out
    if labels_out is None and planted is None:
        labels_out = args.graph + ".recovered"
    if labels_out:
        write_labels(labels_out, result.final_labels)
        out["labels_output"] = labels_out
    out["timings"] = result.timings
    _dump(out)
    return 0


# -- experiment -------------------------------------------------------------


def cmd_experiment(args):
    config = ExperimentConfig.load(args.config)
    t0 = time.perf_counter()
    record = run_experiment(config, jobs=args.jobs)
    csv_path = args.csv or config.outputs.get("csv")
    json_path = args.json or config.outputs.get("json")
    record.write(csv_path, json_path)
    if not csv_path:
        sys.stdout.write(record.to_csv())
    agg = record.aggregate()
    print(
        f"{agg['trials']} trials, success rate {agg['success_rate']:.3f}, "
        f"{agg['failed_trials']} failed, {time.perf_counter() - t0:.1f}s",
        file=sys.stderr,
    )
    return 0


# -- verify -----------------------------------------------------------------


def _verify_target(args):
    if args.graph:
        graph, header, planted = _load(args)
        params = header.params
    else:
        if args.n is None or args.d1 is None or args.d2 is None:
            raise ValidationError("verify needs --graph or --n/--d1/--d2 to sample an instance")
        params = RsbmParams(args.n, args.d1, args.d2)
        inst = sample_rsbm(params, args.seed)
        graph, planted = inst.graph, inst.labels
    d1 = args.d1 if args.d1 is not None else (params.d1 if params else None)
    d2 = args.d2 if args.d2 is not None else (params.d2 if params else None)
    return graph, planted, d1, d2


def cmd_verify(args):
    graph, planted, d1, d2 = _verify_target(args)
    out = {"schema_version": JSON_SCHEMA, "check": args.check, "num_vertices": graph.num_vertices}
    try:
        if args.check == "uniqueness":
            if d1 is None:
                raise ValidationError("uniqueness needs d1 (header or --d1)")
            out.update(enumerate_regular_partitions(graph, d1=d1, planted=planted).to_dict())
        elif args.check == "minbisect":
            out.update(min_bisection_bruteforce(graph, planted=planted).to_dict())
        elif args.check == "membership":
            if d1 is None or d2 is None:
                raise ValidationError("membership needs d1 and d2 (header or flags)")
            out.update(rsbm_membership(graph, d1, d2).to_dict())
        elif args.check == "tanglefree":
            out.update(tangle_audit(graph, args.l).to_dict())
        elif args.check == "expansion":
            out.update(edge_expansion_check(graph, seed=args.seed or 0).to_dict())
    except BudgetError as exc:
        payload = _error_payload(exc)
        limit = MAX_EXPANSION_VERTICES if args.check == "expansion" else MAX_PARTITION_VERTICES
        payload["error"]["suggested_max_vertices"] = limit
        _dump(payload)
        return 1
    _dump(out)
    return 0


# -- formulas / spectrum ------------------------------------------------------


def cmd_formulas(args):
    q = check_thresholds(args.d1, args.d2)
    out = q.to_dict()
    out["z"] = z_sequence(args.d1, args.d2, args.l)
    out["l"] = args.l
    out["lambda1_saw"] = predicted_saw_eigenvalue1(args.d1, args.d2, args.l)
    if args.json:
        _dump({"schema_version": JSON_SCHEMA, **out})
        return 0
    rows = [
        ("d1, d2", f"{q.d1}, {q.d2}"),
        ("spectral_condition", f"{str(q.spectral_condition).lower()}  ((d1-d2)^2 = {(q.d1 - q.d2) ** 2} vs 4(d1+d2-1) = {4 * (q.d1 + q.d2 - 1)})"),
        ("majority_condition", f"{str(q.majority_condition).lower()}  (d1 > d2 + 4)"),
        ("alpha", "n/a" if q.alpha is None else f"{q.alpha:.6f}"),
        ("beta", "n/a" if q.beta is None else f"{q.beta:.6f}"),
        ("A_const", "n/a" if q.A_const is None else f"{q.A_const:.6f}"),
        ("B_const", "n/a" if q.B_const is None else f"{q.B_const:.6f}"),
        (f"z_1..z_{args.l}", str(out["z"])),
        (f"lambda1_saw({args.l})", str(out["lambda1_saw"])),
        ("tv_rate1", f"{q.tv_rate1:.6g}"),
        ("tv_rate2", f"{q.tv_rate2:.6g}"),
    ]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k.ljust(width)}  {v}")
    return 0


def cmd_spectrum(args):
    graph, _ = read_edge_list(args.graph)
    if args.saw_l:
        spec = saw_recover(graph, args.saw_l, max_iter=args.max_iter, seed=args.seed)
        out = {"operator": "saw", **spec.to_dict()}
    else:
        t0 = time.perf_counter()
        summary = top_eigenpairs(graph, args.k, tolerance=args.tolerance, max_iter=args.max_iter, seed=args.seed)
        out = {"operator": "adjacency", **summary.to_dict(), "timings": {"seconds": time.perf_counter() - t0}}
    _dump({"schema_version": JSON_SCHEMA, **out})
    return 0


# -- parser -------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="rsbm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample an RSBM instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sampler", choices=["configuration", "permutation"], default="configuration")
    p.add_argument("--method", choices=["auto", "rejection", "pairing"], default="auto")
    p.add_argument("--max-rejects", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--labels")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("recover", help="recover the partition of a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", help="planted labels, for error reporting")
    p.add_argument("--method", choices=["adjacency", "saw", "majority"], default="adjacency")
    p.add_argument("--l", type=int)
    p.add_argument("--init", help="starting labels for --method majority")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--balanced", action="store_true")
    p.add_argument("--labels-out")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("experiment", help="run a batch experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--csv")
    p.add_argument("--json")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="exhaustive certificates on small graphs")
    p.add_argument("check", choices=["uniqueness", "minbisect", "membership", "tanglefree", "expansion"])
    p.add_argument("--graph")
    p.add_argument("--labels")
    p.add_argument("--n", type=int)
    p.add_argument("--d1", type=int)
    p.add_argument("--d2", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--l", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("formulas", help="closed-form thresholds, roots and rates")
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--l", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_formulas)

    p = sub.add_parser("spectrum", help="leading eigenpairs of a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--saw-l", type=int)
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.command in ("recover", "verify", "spectrum"):
            _dump(_error_payload(exc))
        return 2
    except (RSBMError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.command in ("recover", "verify", "spectrum"):
            _dump(_error_payload(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
