"""Command-line front end: ``medoid-lp <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from . import certificates, experiment, report, theory
from .kmedoids import (Clustering, ClusteringError, EnumerationTooLarge, brute_force_kmedoids,
                       build_relaxation, solve_relaxation)
from .lp import LPError, NumericalFailure, export_lp_text, read_solution_csv
from .model import (LayoutError, RadialLaw, dissimilarities, matrix_from_csv, matrix_to_csv,
                    pointset_from_csv, pointset_to_csv, separated_balls)

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json_default(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=_json_default) + "\n"


def _load_w(args):
    if bool(args.points) == bool(args.matrix):
        raise UsageError("give exactly one of --points or --matrix")
    if args.points:
        ps = pointset_from_csv(_read(args.points))
        return dissimilarities(ps, args.metric).w, ps
    return matrix_from_csv(_read(args.matrix)).w, None


def _add_input(p):
    p.add_argument("--points", help="point CSV (header dim,ball,x0,...)")
    p.add_argument("--matrix", help="dissimilarity matrix CSV")
    p.add_argument("--metric", default="sq", help="sq, euclidean or power-p (points only)")


def _int_list(text: str) -> list:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


# -- subcommands -------------------------------------------------------------

def cmd_solve(args) -> int:
    w, _ = _load_w(args)
    rr = solve_relaxation(w, args.k, method=args.method)
    _write(args.output, _dump(rr.to_dict()))
    if args.z_csv:
        _write(args.z_csv, matrix_to_csv(rr.z))
    return EXIT_OK


def cmd_exact(args) -> int:
    w, _ = _load_w(args)
    _write(args.output, _dump(brute_force_kmedoids(w, args.k).to_dict()))
    return EXIT_OK


def cmd_certify(args) -> int:
    w, ps = _load_w(args)
    if args.medoids:
        c = Clustering.from_medoids(w, _int_list(args.medoids))
    elif args.labels:
        c = Clustering.from_labels(w, _int_list(args.labels))
    elif ps is not None:
        c = Clustering.from_labels(w, ps.ball_of)
    else:
        raise UsageError("certify needs --medoids, --labels or a point CSV with ball labels")
    kinds = args.kinds.split(",") if args.kinds else list(certificates.CHECKS)
    unknown = set(kinds) - set(certificates.CHECKS)
    if unknown:
        raise UsageError(f"unknown certificate kinds {sorted(unknown)}")
    reps = certificates.check_all(w, c, kinds)
    out = {"clustering": c.to_dict(), "certificates": {k: r.to_dict() for k, r in reps.items()}}
    _write(args.output, _dump(out))
    return EXIT_OK


def cmd_sample(args) -> int:
    ps = separated_balls(args.n, args.k, args.d, args.R, RadialLaw.from_case(args.case),
                         args.seed, trial=args.trial, layout=args.layout)
    _write(args.output, pointset_to_csv(ps))
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = experiment.ExperimentConfig.full() if args.full_grid else experiment.ExperimentConfig()
    if args.config:
        cfg = experiment.parse_config(_read(args.config), base=cfg)
    over = {}
    for name in ("n", "k", "d", "case"):
        val = getattr(args, f"grid_{name}")
        if val:
            over[name] = tuple(_int_list(val))
    if args.grid_R:
        over["R"] = tuple(_float_list(args.grid_R))
    if args.trials is not None:
        over["trials"] = args.trials
    if args.seed is not None:
        over["base_seed"] = args.seed
    if args.certificates:
        over["certificates"] = tuple(args.certificates.split(","))
    if args.metric:
        over["metric"] = args.metric
    if args.lp_method:
        over["lp_method"] = args.lp_method
    if args.out:
        over["output_dir"] = args.out
    cfg = replace(cfg, **over)
    cfg.validate()

    def progress(res):
        if args.verbose:
            print(f"case={res.case} d={res.d} k={res.k} n={res.n} R={res.R:g} "
                  f"failed_ball={res.failed_ball}/{res.trials}", file=sys.stderr)

    results = experiment.run_experiment(cfg, workers=args.workers, progress=progress)
    summary = experiment.summarize(results)
    if cfg.output_dir:
        report.emit_report(results, cfg.output_dir, formats=tuple(args.formats.split(",")),
                           summary=summary)
    else:
        sys.stdout.write(report.to_csv(results))
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_theorem_check(args) -> int:
    Rs = _float_list(args.R) if args.R else None
    if args.epsilon:
        Rs = [theory.BASE_SEPARATION + e for e in _float_list(args.epsilon)]
    if not Rs or not args.n or not args.k:
        raise UsageError("theorem-check needs --R (or --epsilon), --n and --k")
    ns = [int(float(v)) for v in args.n.split(",")]
    ks = _int_list(args.k)
    queries = [theory.GuaranteeQuery(R=R, n=n, k=k, d=args.d) for R in Rs for n in ns for k in ks]
    reports = [theory.check_guarantee(q) for q in queries]
    if len(reports) == 1 and not args.table:
        _write(args.output, _dump(reports[0].to_dict()))
        return EXIT_OK
    cols = ["R", "n", "k", "d", "dimension", "separation", "inner_radius", "concentration",
            "satisfied"]
    lines = ["\t".join(cols)]
    for r in reports:
        q = r.query
        lines.append("\t".join([repr(q.R), str(q.n), str(q.k), str(q.d)]
                               + [repr(r.slacks[c]) for c in cols[4:8]]
                               + [str(r.satisfied).lower()]))
    _write(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_export_lp(args) -> int:
    w, _ = _load_w(args)
    lp = build_relaxation(w, args.k)
    if args.solution:
        # cross-validation: check an externally computed vector against the program
        x = read_solution_csv(_read(args.solution), lp.names)
        res = lp.residuals(x)
        worst = max(res.values())
        obj = lp.objective(x)
        ours = solve_relaxation(w, args.k, method=args.method)
        out = {
            "objective": obj,
            "row_violation": res["rows"],
            "bound_violation": res["bounds"],
            "feasible": worst <= 1e-7,
            "reference_objective": ours.objective,
            "objective_gap": obj - ours.objective,
        }
        _write(args.output, _dump(out))
        return EXIT_OK
    _write(args.output, export_lp_text(lp))
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="medoid-lp", description="k-medoids LP relaxation toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("solve", help="solve the LP relaxation")
    _add_input(s)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--method", choices=["simplex", "highs"])
    s.add_argument("--z-csv", help="also write the z matrix as CSV")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("exact", help="exact optimum by enumeration")
    _add_input(s)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("certify", help="run recovery certificates on a clustering")
    _add_input(s)
    s.add_argument("--medoids", help="comma-separated medoid indices")
    s.add_argument("--labels", help="comma-separated group label per point")
    s.add_argument("--kinds", help="subset of prop1,cor2,cor3,cor4")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("sample", help="sample a separated-balls point set")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--R", type=float, required=True)
    s.add_argument("--case", type=int, choices=[1, 2], default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trial", type=int, default=0)
    s.add_argument("--layout", choices=["auto", "simplex", "line"], default="auto")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("experiment", help="Monte Carlo recovery grid")
    s.add_argument("--config", help="key=value config file")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--grid-default-paper", action="store_true",
                   help="scaled-down grid (the default)")
    g.add_argument("--full-grid", action="store_true", help="the full grid (slow)")
    for name in ("n", "k", "R", "d", "case"):
        s.add_argument(f"--grid-{name}", dest=f"grid_{name}", help=f"comma-separated {name} values")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--certificates", help="comma-separated certificate kinds to run")
    s.add_argument("--metric")
    s.add_argument("--lp-method", choices=["simplex", "highs"])
    s.add_argument("--workers", type=int, help="worker processes (default from MEDOID_LP_THREADS)")
    s.add_argument("--out", help="output directory (CSV to stdout when omitted)")
    s.add_argument("--formats", default="csv,json,svg")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("theorem-check", help="evaluate the recovery guarantee")
    s.add_argument("--R", help="comma-separated separations")
    s.add_argument("--epsilon", help="comma-separated offsets added to 3.75")
    s.add_argument("--n", help="comma-separated n")
    s.add_argument("--k", help="comma-separated k")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--table", action="store_true", help="tab-separated slack table")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_theorem_check)

    s = sub.add_parser("export-lp", help="write the LP relaxation in LP text format")
    _add_input(s)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--solution", help="name,value CSV to cross-check instead of exporting")
    s.add_argument("--method", choices=["simplex", "highs"])
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_export_lp)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NumericalFailure, RuntimeError) as exc:
        print(f"medoid-lp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, ValueError, LPError, ClusteringError, EnumerationTooLarge,
            LayoutError, OSError) as exc:
        print(f"medoid-lp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
