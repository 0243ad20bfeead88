"""``shrinkreg`` command line: fit, cv, simulate, risk-curve."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import List, Optional, Sequence

from . import __version__
from .asymptotics import LocalAlternative, risk_curve
from .crossval import CvConfig, EstimatorSpec, repeated_cv
from .errors import DataError, ShrinkRegError
from .estimators import ShrinkageContext, estimate
from .io import AnalysisSpec, nuisance_restriction
from .regression import LeastSquares
from .simulation import DEFAULT_GRID, SimConfig, rmse_sweep
from .tables import RmseTable

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
FORMATS = ("table", "json", "csv")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _names(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=FORMATS, default="table")
    p.add_argument("--out", help="write the report here instead of stdout")


def _data_args(p: argparse.ArgumentParser):
    p.add_argument("--data", required=True,
                   help="bundled data set (prostate, state, galapagos) or a CSV path")
    p.add_argument("--response")
    p.add_argument("--full", type=_names, help="comma-separated full-model covariates")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shrinkreg",
                     description="Shrinkage and pretest estimation for linear regression.")
    parser.add_argument("--version", action="version", version=f"shrinkreg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="coefficients of UR, R, S, S+ and PT for one sub-model")
    _data_args(p)
    p.add_argument("--sub", type=_names, required=True,
                   help="comma-separated sub-model covariates")
    p.add_argument("--alpha", type=float, default=0.05)
    _common(p)

    p = sub.add_parser("cv", help="repeated K-fold prediction error")
    _data_args(p)
    p.add_argument("--sub", action="append", default=[], required=True,
                   help="sub-model as cols or LABEL=cols; repeat for several")
    p.add_argument("--k", type=_ints, default=[10], help="fold counts, e.g. 5,10")
    p.add_argument("--reps", type=int, default=5000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    _common(p)

    p = sub.add_parser("simulate", help="Monte Carlo relative MSE over a delta grid")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--p1", type=int, default=4)
    p.add_argument("--p2", type=int, default=6)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta-grid", type=_floats, default=list(DEFAULT_GRID))
    _common(p)

    p = sub.add_parser("risk-curve", help="asymptotic relative risk over a noncentrality grid")
    p.add_argument("--p1", type=int, default=4)
    p.add_argument("--p2", type=int, default=6)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--delta-grid", type=_floats,
                   default=[2.5 * i for i in range(21)])
    _common(p)
    return parser


def _envelope(command: str, config: dict, results, seed=None) -> dict:
    return {"command": command, "config": config, "results": results,
            "seed": seed, "version": __version__}


def _parse_subs(raw: Sequence[str]):
    labels, subs = [], []
    for item in raw:
        label, sep, cols = item.partition("=")
        if not sep:
            label, cols = None, item
        subs.append(tuple(_names(cols)))
        labels.append(label)
    if all(lbl is None for lbl in labels):
        labels = None
    else:
        labels = [lbl or "+".join(s) for lbl, s in zip(labels, subs)]
    return subs, labels


def _rmse_output(table: RmseTable, fmt: str, command: str, config: dict) -> str:
    if fmt == "json":
        return json.dumps(_envelope(command, config, list(table.rows()), table.seed), indent=2)
    if fmt == "csv":
        return table.to_csv()
    return table.format() + "\n"


def cmd_fit(args) -> str:
    spec = AnalysisSpec(args.data, args.response, args.full, (tuple(args.sub),))
    data = spec.load()
    restriction = nuisance_restriction(data, args.sub)
    ctx = ShrinkageContext.from_data(data, restriction, LeastSquares(data))
    kinds = ["UR", "R"] + (["S", "S+"] if restriction.p2 >= 3 else []) + ["PT"]
    fits = {k: estimate(k, ctx, args.alpha) for k in kinds}
    names = data.column_names
    if args.format == "json":
        results = [{"estimator": k, "coefficients": dict(zip(names, map(float, f.beta)))}
                   for k, f in fits.items()]
        config = {"data": args.data, "response": spec.response, "full": list(spec.full),
                  "sub": list(args.sub), "alpha": args.alpha,
                  "psi": ctx.psi, "s2": ctx.unrestricted.s2, "p2": restriction.p2}
        return json.dumps(_envelope("fit", config, results), indent=2)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["term", *kinds])
        for j, name in enumerate(names):
            w.writerow([name, *(repr(float(fits[k].beta[j])) for k in kinds)])
        return buf.getvalue()
    width = max(len(n) for n in names) + 2
    lines = [f"{'term':<{width}}" + "".join(f"{k:>11}" for k in kinds)]
    for j, name in enumerate(names):
        lines.append(f"{name:<{width}}" + "".join(f"{fits[k].beta[j]:>11.4f}" for k in kinds))
    lines.append(f"\npsi = {ctx.psi:.4f} on {restriction.p2} df, s2 = {ctx.unrestricted.s2:.4f}")
    return "\n".join(lines) + "\n"


def cv_estimators(spec: AnalysisSpec, data) -> List[EstimatorSpec]:
    """UR, then R, S+ and PT for every sub-model (one restriction object each)."""
    restrictions = [nuisance_restriction(data, sub) for sub in spec.subs]
    single = len(spec.subs) == 1 and spec.sub_labels[0] == "sub"
    out = [EstimatorSpec("UR")]
    for kind in ("R", "S+", "PT"):
        for r, label in zip(restrictions, spec.sub_labels):
            if kind == "S+" and r.p2 < 3:
                continue
            out.append(EstimatorSpec(kind, r, kind if single else f"{kind}({label})"))
    return out


def cmd_cv(args) -> str:
    subs, labels = _parse_subs(args.sub)
    spec = AnalysisSpec(args.data, args.response, args.full, subs,
                        tuple(labels) if labels else None)
    data = spec.load()
    specs = cv_estimators(spec, data)
    reports = [repeated_cv(data, CvConfig(k, args.reps, args.alpha, args.seed, specs))
               for k in args.k]
    config = {"data": args.data, "response": spec.response, "full": list(spec.full),
              "subs": {lbl: list(s) for lbl, s in zip(spec.sub_labels, spec.subs)},
              "k": args.k, "reps": args.reps, "alpha": args.alpha}
    if args.format == "json":
        results = [r for rep in reports for r in rep.to_dict()["results"]]
        return json.dumps(_envelope("cv", config, results, args.seed), indent=2)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["estimator", "k", "raw_mean", "raw_se", "raw_sd",
                    "corrected_mean", "corrected_se", "corrected_sd"])
        for rep in reports:
            for e in rep.entries:
                w.writerow([e.estimator, rep.k, e.raw.mean, e.raw.se, e.raw.sd,
                            e.corrected.mean, e.corrected.se, e.corrected.sd])
        return buf.getvalue()
    width = max(len(s.label) for s in specs) + 2
    head = f"{'':<{width}}" + "".join(f"{'raw K=' + str(r.k):>18}" for r in reports) \
        + "".join(f"{'corrected K=' + str(r.k):>18}" for r in reports)
    lines = [head]
    for s in specs:
        cells = [f"{r[s.label].raw.mean:.3f} ({r[s.label].raw.sd:.3f})" for r in reports]
        cells += [f"{r[s.label].corrected.mean:.3f} ({r[s.label].corrected.sd:.3f})"
                  for r in reports]
        lines.append(f"{s.label:<{width}}" + "".join(f"{c:>18}" for c in cells))
    lines.append(f"\nmean (sd across {args.reps} repetitions); se of the mean = sd/sqrt(reps)")
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> str:
    cfg = SimConfig(n=args.n, p1=args.p1, p2=args.p2, delta_grid=tuple(args.delta_grid),
                    replications=args.reps, alpha=args.alpha, seed=args.seed)
    table = rmse_sweep(cfg)
    config = {"n": cfg.n, "p1": cfg.p1, "p2": cfg.p2, "reps": cfg.replications,
              "alpha": cfg.alpha, "delta_grid": list(cfg.delta_grid)}
    return _rmse_output(table, args.format, "simulate", config)


def cmd_risk_curve(args) -> str:
    alt = LocalAlternative.nuisance_subset(args.p1, args.p2)
    kinds = ["R", "S", "S+", "PT"] if args.p2 >= 3 else ["R", "PT"]
    table = risk_curve(alt, kinds, args.delta_grid, args.alpha)
    config = {"p1": args.p1, "p2": args.p2, "alpha": args.alpha,
              "delta_grid": list(args.delta_grid)}
    return _rmse_output(table, args.format, "risk-curve", config)


COMMANDS = {"fit": cmd_fit, "cv": cmd_cv, "simulate": cmd_simulate,
            "risk-curve": cmd_risk_curve}


def _fail(code: int, message: str, fmt: Optional[str]) -> int:
    if fmt == "json":
        kind = "usage" if code == EXIT_USAGE else "data"
        print(json.dumps({"error": {"type": kind, "message": message.strip()}}), file=sys.stderr)
    else:
        print(message.rstrip(), file=sys.stderr)
    return code


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt = "json" if "--format" in argv and "json" in argv else None
    try:
        args = build_parser().parse_args(argv)
    except UsageError as err:
        return _fail(EXIT_USAGE, str(err), fmt)
    except SystemExit as err:  # --help / --version
        return int(err.code or 0)
    try:
        text = COMMANDS[args.command](args)
    except (DataError, OSError) as err:
        return _fail(EXIT_DATA, f"shrinkreg {args.command}: {err}", args.format)
    except (ShrinkRegError, ValueError) as err:
        return _fail(EXIT_USAGE, f"shrinkreg {args.command}: {err}", args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
