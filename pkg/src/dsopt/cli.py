"""Command-line harness for the two-phase pipeline.

Subcommands: ``profile`` (instrumented run -> profile file), ``plan``
(profile -> replacement plan, thresholds as flags), ``optimize`` (plan ->
optimized run report), ``compare`` (two reports -> byte ratios),
``histogram`` (profile -> size-class table), and ``ir-rewrite`` (graph
dump + plan -> rewritten dump). All outputs are deterministic for
identical inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import (
    EngineError,
    PolicyConfig,
    build_plan,
    plan_parse,
    plan_serialize,
)
from .fixtures import builtin_fixture, fixture_names
from .ir import IrError, apply_plan, dump, parse_graph
from .pipeline import profile_file_provenance, run_instrumented, run_with_plan
from .profiles import ProfileError, parse
from .reports import (
    ReportError,
    RunReport,
    compare,
    histogram,
    histogram_to_json_dict,
    render_histogram_text,
)
from .workload import WorkloadError, WorkloadSpec

_TOOL_ERRORS = (
    EngineError,
    IrError,
    ProfileError,
    ReportError,
    WorkloadError,
    OSError,
    KeyError,
    ValueError,
)


def _load_spec(spec_arg: str) -> WorkloadSpec:
    path = Path(spec_arg)
    if path.exists():
        return WorkloadSpec.from_json(path.read_text(encoding="utf-8"))
    if spec_arg in fixture_names():
        return builtin_fixture(spec_arg)
    raise WorkloadError(
        f"no such spec file or built-in fixture: {spec_arg!r} "
        f"(built-ins: {', '.join(fixture_names())})"
    )


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _cmd_profile(args: argparse.Namespace) -> int:
    spec = _load_spec(args.spec)
    scale = spec.default_profile_scale if args.scale is None else args.scale
    document, report = run_instrumented(spec, scale)
    _write(args.out, document)
    if args.report:
        _write(args.report, report.to_json())
    print(f"profiled {spec.name} at scale {scale}: {len(report.sites)} sites -> {args.out}")
    return 0


def _policy_from_args(args: argparse.Namespace) -> PolicyConfig:
    return PolicyConfig(
        fixed_size_share=args.fixed_size_share,
        entry_access_ratio_max=args.entry_access_ratio,
        fixed_entry_access_limit=args.fixed_entry_access_limit,
        economic_min_size=args.economic_min_size,
        economic_min_size_share=args.economic_min_size_share,
        economic_size_cap=args.economic_size_cap,
        exclude=tuple(args.exclude or ()),
    )


def _cmd_plan(args: argparse.Namespace) -> int:
    document = Path(args.profile).read_text(encoding="utf-8")
    store = parse(document)
    cfg = _policy_from_args(args)
    plan = build_plan(store, cfg, provenance=profile_file_provenance(args.profile, document))
    _write(args.out, plan_serialize(plan))
    replaced = len(plan.replaced_sites())
    print(f"planned {len(plan.decisions)} sites ({replaced} replaced) -> {args.out}")
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    spec = _load_spec(args.spec)
    plan = plan_parse(Path(args.plan).read_text(encoding="utf-8"))
    report = run_with_plan(spec, plan, scale=args.scale)
    _write(args.report, report.to_json())
    print(report.render_text())
    print(f"\nreport written to {args.report}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    baseline = RunReport.from_json(Path(args.baseline).read_text(encoding="utf-8"))
    optimized = RunReport.from_json(Path(args.optimized).read_text(encoding="utf-8"))
    result = compare(baseline, optimized)
    print(result.render_text())
    if args.out:
        _write(args.out, result.to_json())
    return 0


def _cmd_histogram(args: argparse.Namespace) -> int:
    rows = histogram(Path(args.profile).read_text(encoding="utf-8"))
    document = json.dumps(histogram_to_json_dict(rows), indent=2, sort_keys=True)
    if args.json:
        print(document)
    else:
        print(render_histogram_text(rows))
    if args.out:
        _write(args.out, document)
    return 0


def _cmd_ir_rewrite(args: argparse.Namespace) -> int:
    graph = parse_graph(Path(args.graph).read_text(encoding="utf-8"))
    plan = plan_parse(Path(args.plan).read_text(encoding="utf-8"))
    rewritten = dump(apply_plan(graph, plan))
    print(rewritten)
    if args.out:
        _write(args.out, rewritten + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsopt",
        description="Profile-guided collection specialization harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="run the instrumented pass and write a profile")
    p.add_argument("--spec", required=True, help="workload spec file or built-in fixture name")
    p.add_argument("--scale", type=float, default=None,
                   help="workload scale (defaults to the spec's profiling scale)")
    p.add_argument("--out", required=True, help="profile output path (.dsprof.json)")
    p.add_argument("--report", help="optionally write the baseline run report JSON")
    p.set_defaults(func=_cmd_profile)

    defaults = PolicyConfig()
    p = sub.add_parser("plan", help="build a replacement plan from a profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--fixed-size-share", type=float, default=defaults.fixed_size_share)
    p.add_argument("--entry-access-ratio", type=float,
                   default=defaults.entry_access_ratio_max)
    p.add_argument("--fixed-entry-access-limit", type=int,
                   default=defaults.fixed_entry_access_limit)
    p.add_argument("--economic-min-size", type=int, default=defaults.economic_min_size)
    p.add_argument("--economic-min-size-share", type=float,
                   default=defaults.economic_min_size_share)
    p.add_argument("--economic-size-cap", type=int, default=defaults.economic_size_cap)
    p.add_argument("--exclude", action="append", metavar="CTX",
                   help="exclude an allocation site (repeatable)")
    p.add_argument("--out", required=True, help="plan output path (.dsplan.json)")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("optimize", help="run the workload through a replacement plan")
    p.add_argument("--spec", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--report", required=True, help="run report output path")
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("compare", help="compare a baseline report with an optimized one")
    p.add_argument("--baseline", required=True)
    p.add_argument("--optimized", required=True)
    p.add_argument("--out", help="optionally write the comparison JSON")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("histogram", help="size-class histogram of a profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--json", action="store_true", help="print JSON instead of the text table")
    p.add_argument("--out", help="optionally write the JSON document")
    p.set_defaults(func=_cmd_histogram)

    p = sub.add_parser("ir-rewrite", help="apply a plan to a graph dump")
    p.add_argument("--graph", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--out", help="optionally write the rewritten dump")
    p.set_defaults(func=_cmd_ir_rewrite)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _TOOL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
