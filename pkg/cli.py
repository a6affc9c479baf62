"""
Command-line entry point.

    python cli.py pack --alg bap --input ex.cbp
    python cli.py ratio --alg bap ff --random 200 --denominator oracle --format csv
    python cli.py suite --log-level INFO
"""
import argparse
import json
import logging
import sys

import pandas as pd

import harness
import report_tables
from offline_oracle import DEFAULT_BUDGET_MS
from online_algorithms import ALGORITHMS, COLOR_RULES, INDEX_RULES, TieBreak
from packing_core import (
    ColorfulPackingError,
    PackingValidationError,
    ParameterError,
    load_instance,
    parse_size,
    save_instance,
    serialize_instance,
)

LOG = logging.getLogger("cli")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


# =========================
# Parser
# =========================
def _common_flags():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tiebreak", choices=INDEX_RULES + COLOR_RULES, default=None,
                        help="index rule (min-index|max-index) or color rule (min-color)")
    common.add_argument("--color-tiebreak", choices=COLOR_RULES, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget-ms", type=int, default=DEFAULT_BUDGET_MS)
    common.add_argument("--format", choices=report_tables.FORMATS, default="json")
    common.add_argument("-o", "--output", default=None, help="write here instead of stdout")
    common.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return common


def build_parser():
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="cli.py", description="Colorful bin packing workbench")
    parser.add_argument("--version", action="version", version=harness.__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    pack = sub.add_parser("pack", parents=[common], help="run one online algorithm")
    pack.add_argument("--alg", choices=sorted(ALGORITHMS), required=True)
    pack.add_argument("--input", required=True)
    pack.add_argument("--trace", action="store_true", help="table/csv: print the trace, not the bins")

    bounds = sub.add_parser("bounds", parents=[common], help="LB0, LB1 and the LB1 witness")
    bounds.add_argument("--input", required=True)

    opt = sub.add_parser("opt", parents=[common], help="exact offline OPT with certificate")
    opt.add_argument("--input", required=True)

    gen = sub.add_parser("gen", parents=[common], help="write a generated family instance")
    _family_flags(gen)
    gen.add_argument("--certificate", default=None, help="also write the OPT certificate as JSON")

    duel = sub.add_parser("duel", parents=[common], help="run an adaptive adversary")
    duel.add_argument("--alg", choices=sorted(ALGORITHMS), required=True)
    duel.add_argument("--adversary", choices=["lb2", "zero3"], required=True)
    duel.add_argument("--N", type=int, default=None)
    duel.add_argument("--M", type=int, default=None)
    duel.add_argument("--phases", type=int, default=harness.ZERO3_DEFAULT_PHASES)

    ratio = sub.add_parser("ratio", parents=[common], help="labelled competitive ratios")
    ratio.add_argument("--alg", nargs="+", choices=sorted(ALGORITHMS), required=True)
    ratio.add_argument("--denominator", choices=harness.DENOMINATORS, default="oracle")
    ratio.add_argument("--input", nargs="*", default=[])
    ratio.add_argument("--family", choices=harness.FAMILIES, default=None)
    ratio.add_argument("--M", type=int, default=None)
    ratio.add_argument("--N", type=int, default=None)
    ratio.add_argument("--eps", type=parse_size, default=None)
    ratio.add_argument("--random", type=int, default=0, metavar="COUNT")
    ratio.add_argument("--n-min", type=int, default=1)
    ratio.add_argument("--n-max", type=int, default=14)
    ratio.add_argument("--colors", type=int, default=3)
    ratio.add_argument("--sizes", choices=["zero", "rational", "mixed"], default="rational")
    ratio.add_argument("--max-denominator", type=int, default=10)
    ratio.add_argument("--workers", type=int, default=1)

    suite = sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    suite.add_argument("--scale", type=float, default=1.0,
                       help="multiply the random-instance counts")
    suite.add_argument("--only", nargs="*", default=None, metavar="NUMBER")
    return parser


def _family_flags(parser):
    parser.add_argument("--family", choices=harness.FAMILIES, required=True)
    parser.add_argument("--M", type=int, default=None)
    parser.add_argument("--N", type=int, default=None)
    parser.add_argument("--eps", type=parse_size, default=None)


def _tiebreak(args):
    return TieBreak.parse(args.tiebreak, args.color_tiebreak)


def _spec(args, algorithms=(), source="", **params):
    return harness.ExperimentSpec(
        command=args.command,
        algorithms=tuple(algorithms),
        source=source,
        params=tuple(sorted((k, v) for k, v in params.items() if v is not None)),
        tiebreak=_tiebreak(args),
        budget_ms=args.budget_ms,
        output_format=args.format,
        seed=args.seed,
    )


def _emit(args, text):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, spec, payload):
    _emit(args, json.dumps({**harness.report_header(spec), **payload}, indent=2) + "\n")


def _emit_frame(args, spec, df, **extra):
    _emit(args, report_tables.render(df, args.format, {**harness.report_header(spec), **extra}))


# =========================
# Subcommands
# =========================
def run_pack(args):
    spec = _spec(args, [args.alg], f"file:{args.input}")
    instance = load_instance(args.input)
    summary, packing, trace = harness.cmd_pack(args.alg, instance, spec.tiebreak)
    if args.format == "json":
        summary["trace"] = [step.to_dict() for step in trace]
        _emit_json(args, spec, summary)
    elif args.trace:
        _emit_frame(args, spec, report_tables.trace_frame(trace, instance))
    else:
        _emit_frame(args, spec, report_tables.packing_frame(packing), bins=packing.bin_count)
    return EXIT_OK


def run_bounds(args):
    spec = _spec(args, source=f"file:{args.input}")
    report = harness.cmd_bounds(load_instance(args.input))
    if args.format == "json":
        _emit_json(args, spec, report)
    else:
        row = {**report, "witness": json.dumps(report["witness"])}
        _emit_frame(args, spec, pd.DataFrame([row]))
    return EXIT_OK


def run_opt(args):
    spec = _spec(args, source=f"file:{args.input}")
    result = harness.cmd_opt(load_instance(args.input), args.budget_ms)
    if args.format == "json":
        _emit_json(args, spec, result.to_dict())
    else:
        _emit_frame(args, spec, report_tables.packing_frame(result.certificate),
                    bins=result.bins, exact=result.exact)
    return EXIT_OK


def run_gen(args):
    family = harness.build_family(args.family, args.M, args.N, args.eps)
    if args.output:
        save_instance(family.instance, args.output)
        LOG.info("wrote %d items to %s", len(family.instance), args.output)
    else:
        sys.stdout.write(serialize_instance(family.instance))
    if args.certificate:
        spec = _spec(args, source=f"family:{args.family}", M=args.M, N=args.N,
                     eps=None if args.eps is None else str(args.eps))
        payload = {
            **harness.report_header(spec),
            "claim": family.claim,
            "bins": family.certificate.bin_count,
            "certificate": family.certificate.as_index_lists(),
        }
        with open(args.certificate, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
    return EXIT_OK


def run_duel(args):
    spec = _spec(args, [args.alg], f"adversary:{args.adversary}", N=args.N, M=args.M,
                 phases=args.phases if args.adversary == "zero3" else None)
    transcript = harness.cmd_duel(args.alg, args.adversary, spec.tiebreak, args.N, args.M, args.phases)
    if args.format == "json":
        payload = transcript.to_dict()
        payload["ratio_claim"] = "at-least"
        payload["denominator_kind"] = "certificate-upper"
        _emit_json(args, spec, payload)
    else:
        _emit_frame(args, spec, report_tables.lemma_frame(transcript.lemma_checks))
    return EXIT_OK if transcript.passed else EXIT_FAILURE


def _ratio_sources(args):
    sources = [harness.RatioSource(f"file:{path}", load_instance(path)) for path in args.input]
    if args.family:
        family = harness.build_family(args.family, args.M, args.N, args.eps)
        sources.append(harness.RatioSource(f"family:{args.family}", family.instance, family.certificate))
    if args.random:
        params = harness.RandomInstanceParams(args.n_min, args.n_max, args.colors, args.sizes,
                                              args.max_denominator)
        for number, instance in enumerate(harness.random_instances(args.seed, args.random, params)):
            sources.append(harness.RatioSource(f"random:{args.seed}:{number}", instance))
    if not sources:
        raise ParameterError("ratio needs --input, --family or --random")
    return sources


def run_ratio(args):
    source = ",".join(filter(None, [
        "file" if args.input else "",
        f"family:{args.family}" if args.family else "",
        f"random:{args.random}" if args.random else "",
    ]))
    spec = _spec(
        args, args.alg, source, denominator=args.denominator, M=args.M, N=args.N,
        n_min=args.n_min if args.random else None, n_max=args.n_max if args.random else None,
        colors=args.colors if args.random else None, sizes=args.sizes if args.random else None,
        max_denominator=args.max_denominator if args.random else None,
    )
    report = harness.cmd_ratio(spec, _ratio_sources(args), args.denominator, args.workers)
    df = report_tables.ratio_frame(report.rows)
    _emit_frame(args, spec, df, summary=report_tables.ratio_summary(df))
    return EXIT_OK if df["checks_passed"].all() else EXIT_FAILURE


def run_suite(args):
    spec = _spec(args, source="suite", scale=args.scale)
    results = harness.cmd_suite(args.seed, args.budget_ms, args.scale, spec.tiebreak, args.only)
    _emit_frame(args, spec, report_tables.suite_frame(results))
    return harness.suite_exit_code(results)


COMMANDS = {
    "pack": run_pack,
    "bounds": run_bounds,
    "opt": run_opt,
    "gen": run_gen,
    "duel": run_duel,
    "ratio": run_ratio,
    "suite": run_suite,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except PackingValidationError as exc:
        LOG.error("invalid packing produced: %s", exc)
        return EXIT_FAILURE
    except (ColorfulPackingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
