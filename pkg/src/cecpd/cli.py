"""Command-line front end.

Subcommands
-----------
detect     read a CSV series, run multiple change-point detection, write
           a report (JSON or CSV) and optionally an SVG plot
nile       the same pipeline on the embedded Nile annual-flow series
simulate   generate one of the benchmark scenarios (or a custom spec) as CSV
benchmark  regenerate the benchmark suites, score detections against the
           known truth, print a table (stderr) plus a machine-readable
           summary (stdout)

Exit codes: 0 success, 1 I/O failure, 2 input parse failure, 3 invalid
configuration.  An empty detection list is success, not an error.
Commentary always goes to stderr so stdout stays pipeable.
"""

import argparse
import json
import os
import sys

from .dataio import _report_to_dict, build_report, nile, read_csv, write_report
from .detector import DetectorConfig, detect_multiple
from .plot import render_svg
from .simulate import (
    MULTIVARIATE_CASES,
    UNIVARIATE_CASES,
    SimulationSpec,
    gen_multivariate_case,
    gen_univariate_case,
    simulate,
)

__all__ = ["main"]

EXIT_IO = 1
EXIT_PARSE = 2
EXIT_CONFIG = 3


class _CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # bad usage is a configuration problem, same exit code as bad knobs
    def error(self, message):
        raise _CliError(EXIT_CONFIG, "%s: error: %s" % (self.prog, message))


def _add_config_flags(p):
    p.add_argument("--k", type=int, default=None, help="neighbor order (default 3)")
    p.add_argument(
        "--threshold", type=float, default=None, help="detection gate in nats (default 0.13)"
    )
    p.add_argument(
        "--min-seg",
        type=int,
        default=None,
        dest="min_seg",
        help="minimum observations each side of a split (default 10)",
    )
    p.add_argument("--seed", type=int, default=None, help="seed (env CECPD_SEED as fallback)")
    p.add_argument("--max-depth", type=int, default=None, dest="max_depth")
    p.add_argument(
        "--config", default=None, help="JSON file of config keys; flags take precedence"
    )


def _add_output_flags(p):
    p.add_argument("--output", default=None, help="report path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument(
        "--plot",
        action="store_true",
        help="also write an SVG plot next to the report",
    )


def build_parser():
    parser = _Parser(prog="cecpd", description="copula-entropy change-point detection")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("detect", help="detect change points in a CSV series")
    p.add_argument("--input", required=True, help="CSV file, rows=time, columns=variables")
    p.add_argument("--header", action="store_true", help="skip the first CSV row")
    p.add_argument("--delimiter", default=",")
    p.add_argument(
        "--label-column", type=int, default=None, dest="label_column",
        help="0-based column holding axis labels (e.g. years)",
    )
    _add_config_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("nile", help="detect on the embedded Nile series")
    _add_config_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("simulate", help="generate a benchmark scenario as CSV")
    p.add_argument(
        "--case",
        default=None,
        choices=sorted(
            ["uni-%s" % c for c in UNIVARIATE_CASES]
            + ["multi-%s" % c for c in MULTIVARIATE_CASES]
        ),
    )
    p.add_argument("--spec", default=None, help="JSON SimulationSpec file (alternative to --case)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", default=None, help="CSV path (default: stdout)")

    p = sub.add_parser("benchmark", help="regenerate suites and score detections")
    p.add_argument("--suite", choices=["uni", "multi", "nile", "all"], default="all")
    _add_config_flags(p)
    p.add_argument("--output", default=None, help="write the JSON summary here too")

    return parser


def _env_seed():
    raw = os.environ.get("CECPD_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise _CliError(EXIT_CONFIG, "CECPD_SEED must be an integer, got %r" % raw) from None


def _load_config_file(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise _CliError(EXIT_IO, "cannot read config file: %s" % exc) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_PARSE, "config file %s: %s" % (path, exc)) from None
    if not isinstance(doc, dict):
        raise _CliError(EXIT_CONFIG, "config file %s: expected a JSON object" % path)
    allowed = {"k", "threshold", "min_seg", "seed", "max_depth"}
    unknown = set(doc) - allowed
    if unknown:
        raise _CliError(
            EXIT_CONFIG,
            "config file %s: unknown keys %s" % (path, ", ".join(sorted(unknown))),
        )
    return doc


def _merge_config(args):
    """Flags beat the config file, which beats CECPD_SEED, then defaults."""
    merged = dict(_load_config_file(getattr(args, "config", None)))
    for key in ("k", "threshold", "min_seg", "seed", "max_depth"):
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if merged.get("seed") is None:
        env = _env_seed()
        if env is not None:
            merged["seed"] = env
    merged = {k: v for k, v in merged.items() if v is not None}
    try:
        return DetectorConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise _CliError(EXIT_CONFIG, "invalid configuration: %s" % exc) from None


def _write_text(path, text):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise _CliError(EXIT_IO, "cannot write %s: %s" % (path, exc)) from None


def _emit_report(series, segmentation, args):
    report = build_report(series, segmentation)
    if args.output:
        try:
            write_report(report, args.output, format=args.format)
        except OSError as exc:
            raise _CliError(EXIT_IO, "cannot write report: %s" % exc) from None
    else:
        if args.format == "json":
            print(json.dumps(_report_to_dict(report), indent=2, sort_keys=True))
        else:
            print("index,label,statistic,depth")
            for index, label, statistic, depth in report.points:
                print(
                    "%d,%s,%s,%d"
                    % (
                        index + 1,
                        "" if label is None else label,
                        repr(float(statistic)),
                        depth,
                    )
                )
    if args.plot:
        base = args.output or args.subcommand
        stem = base[: -len(".json")] if base.endswith((".json", ".csv")) else base
        svg_path = stem + ".svg"
        _write_text(svg_path, render_svg(series, segmentation))
        print("plot written to %s" % svg_path, file=sys.stderr)
    return report


def cmd_detect(args):
    cfg = _merge_config(args)
    try:
        series = read_csv(
            args.input,
            header=args.header,
            delimiter=args.delimiter,
            label_column=args.label_column,
        )
    except OSError as exc:
        raise _CliError(EXIT_IO, "cannot read %s: %s" % (args.input, exc)) from None
    except ValueError as exc:
        raise _CliError(EXIT_PARSE, str(exc)) from None
    segmentation = detect_multiple(series, cfg)
    _emit_report(series, segmentation, args)
    return 0


def cmd_nile(args):
    cfg = _merge_config(args)
    series = nile()
    segmentation = detect_multiple(series, cfg)
    _emit_report(series, segmentation, args)
    return 0


def cmd_simulate(args):
    if (args.case is None) == (args.spec is None):
        raise _CliError(EXIT_CONFIG, "simulate needs exactly one of --case or --spec")
    if args.case is not None:
        seed = args.seed if args.seed is not None else (_env_seed() or 0)
        kind, _, case = args.case.partition("-")
        if kind == "uni":
            series, truth = gen_univariate_case(case, seed=seed)
        else:
            series, truth = gen_multivariate_case(case, seed=seed)
    else:
        try:
            with open(args.spec) as fh:
                text = fh.read()
        except OSError as exc:
            raise _CliError(EXIT_IO, "cannot read spec file: %s" % exc) from None
        try:
            spec = SimulationSpec.from_json(text)
        except (json.JSONDecodeError, KeyError) as exc:
            raise _CliError(EXIT_PARSE, "spec file %s: %s" % (args.spec, exc)) from None
        except ValueError as exc:
            raise _CliError(EXIT_CONFIG, "spec file %s: %s" % (args.spec, exc)) from None
        if args.seed is not None:
            spec = SimulationSpec(segments=spec.segments, seed=args.seed, name=spec.name)
        series, truth = simulate(spec)
    # repr of the built-in float round-trips exactly; numpy scalars do not
    lines = [",".join(repr(float(v)) for v in row) for row in series.values]
    text = "\n".join(lines) + "\n"
    if args.output:
        _write_text(args.output, text)
    else:
        sys.stdout.write(text)
    print("true change points: %s" % truth, file=sys.stderr)
    return 0


def _score(detected, truth, tol):
    hits = {}
    for t in truth:
        best = None
        for d in detected:
            if abs(d - t) <= tol and (best is None or abs(d - t) < abs(best - t)):
                best = d
        if best is not None:
            hits[t] = best
    spurious = [d for d in detected if d not in hits.values()]
    return hits, spurious


def _benchmark_rows(suite, seed):
    rows = []
    if suite in ("uni", "all"):
        for case in ("mean", "mean-var", "var"):
            series, truth = gen_univariate_case(case, seed=seed)
            rows.append(("uni-%s" % case, series, truth, 0.13, 2))
    if suite in ("multi", "all"):
        for case in ("mean", "mean-var", "var", "copula"):
            series, truth = gen_multivariate_case(case, seed=seed)
            threshold = 0.05 if case == "var" else 0.13
            tol = 5 if case == "var" else 2
            rows.append(("multi-%s" % case, series, truth, threshold, tol))
    if suite in ("nile", "all"):
        series = nile()
        rows.append(("nile", series, [28], 0.13, 2))
    return rows


def cmd_benchmark(args):
    cfg = _merge_config(args)
    # unless the user pinned min_seg, simulated rows get 30 (stable at
    # their 50-point segment scale) while nile keeps the default 10 (its
    # change sits 28 rows in, out of reach of 30-per-side splits)
    pinned = args.min_seg is not None or args.config
    seed = cfg.seed
    results = []
    for name, series, truth, threshold, tol in _benchmark_rows(args.suite, seed):
        min_seg = cfg.min_seg if pinned else (10 if name == "nile" else 30)
        threshold = cfg.threshold if args.threshold is not None else threshold
        run_cfg = DetectorConfig(
            k=cfg.k, threshold=threshold, min_seg=min_seg, seed=seed,
            max_depth=cfg.max_depth,
        )
        segmentation = detect_multiple(series, run_cfg)
        detected = [p.index + 1 for p in segmentation.points]  # 1-based
        hits, spurious = _score(detected, truth, tol)
        status = "hit %d/%d" % (len(hits), len(truth))
        if spurious:
            status += " spurious %d" % len(spurious)
        # progress rows are commentary; stdout carries only the JSON summary
        print(
            "%-14s threshold=%-5g detected=%s truth=%s %s"
            % (name, threshold, detected, truth, status),
            file=sys.stderr,
        )
        results.append(
            {
                "case": name,
                "threshold": threshold,
                "min_seg": min_seg,
                "detected": detected,
                "truth": list(truth),
                "tolerance": tol,
                "hits": len(hits),
                "spurious": len(spurious),
            }
        )
    summary = json.dumps(
        {"suite": args.suite, "seed": seed, "results": results},
        sort_keys=True,
    )
    print(summary)
    if args.output:
        _write_text(args.output, summary + "\n")
    return 0


_COMMANDS = {
    "detect": cmd_detect,
    "nile": cmd_nile,
    "simulate": cmd_simulate,
    "benchmark": cmd_benchmark,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.subcommand](args)
    except _CliError as exc:
        print("cecpd: %s" % exc, file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
