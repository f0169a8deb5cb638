"""Command-line entry point: scan / prove / vendor subcommands.

Exit codes: 0 success (and all scores >= --fail-under when given),
1 policy failure (score below threshold, proof mismatch), 2 usage or
argument error, 3 internal error.

Reports go to stdout or --out; diagnostics go to stderr.  Set
QAI_NO_COLOR=1 to disable ANSI color in text output.
"""

from __future__ import annotations

import argparse
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from .report import (
    build_scan_report,
    emit_json,
    emit_markdown,
    emit_sarif,
    render_witness,
)
from .rules import RuleFileError, load_builtin_rules, load_rule_file
from .scanning import ScanOptions, scan_tree
from .scorecard import build_scorecard
from .solver import builtin_obligations, run_obligations, solve_any
from .vendoring import (
    DEFAULT_MIN_SHARED_FILES,
    build_chain_report,
    carry_findings,
    detect_vendoring,
    fingerprint_tree,
)

EXIT_OK = 0
EXIT_POLICY = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _use_color(stream) -> bool:
    if os.environ.get("QAI_NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _colored(text: str, code: str, enable: bool) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if enable else text


def _timestamp(args) -> str:
    if args.timestamp:
        return args.timestamp
    env = os.environ.get("QUANTSCAN_TIMESTAMP")
    if env:
        return env
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_output(data: bytes, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _load_rules(parser: argparse.ArgumentParser, rules_path: str | None):
    ruleset = load_builtin_rules()
    if rules_path:
        try:
            ruleset = load_rule_file(rules_path, ruleset)
        except FileNotFoundError:
            parser.error(f"rule file not found: {rules_path}")
        except RuleFileError as exc:
            parser.error(f"{rules_path}: {exc}")
    return ruleset


def _attach_verdicts(findings, ruleset):
    from dataclasses import replace

    cache = {}
    obligations = {ob.id: ob for ob in builtin_obligations()}
    out = []
    for finding in findings:
        rule = ruleset.get(finding.rule_id)
        obligation = obligations.get(rule.obligation) if rule and rule.obligation else None
        if obligation is None:
            out.append(finding)
            continue
        if obligation.id not in cache:
            cache[obligation.id] = solve_any(obligation.formula)
        out.append(replace(finding, verdict=cache[obligation.id]))
    return out


def _cmd_scan(parser, args) -> int:
    options = ScanOptions(
        include_test_paths=args.include_tests,
        guard_window=args.guard_window,
    )
    ruleset = _load_rules(parser, args.rules)
    names = [Path(root).name for root in args.roots]
    if len(set(names)) != len(names):
        parser.error("scan roots must have distinct directory names")
    for root in args.roots:
        if not Path(root).is_dir():
            parser.error(f"scan root is not a directory: {root}")
    results = []
    for root, name in zip(args.roots, names):
        result = scan_tree(root, ruleset, options, workers=args.jobs)
        if not args.no_verify:
            result.findings = _attach_verdicts(result.findings, ruleset)
        results.append((name, result))
    proof_table = None if args.no_verify else run_obligations()
    report = build_scan_report(
        timestamp=_timestamp(args),
        options=options,
        ruleset=ruleset,
        results=results,
        proof_table=proof_table,
    )
    scorecard = build_scorecard(
        [(name, result.findings) for name, result in results]
    )
    if args.format == "json":
        _write_output(emit_json(report), args.out)
    elif args.format == "sarif":
        _write_output(emit_sarif(report), args.out)
    else:
        _write_output(
            emit_markdown(scorecard, proof_table).encode("utf-8"), args.out
        )
    if args.fail_under is not None:
        if any(row.score < args.fail_under for row in scorecard.rows):
            return EXIT_POLICY
    return EXIT_OK


def _cmd_prove(parser, args) -> int:
    table = run_obligations()
    if args.format == "json":
        import json

        from .report import _proof_table_json

        payload = json.dumps(_proof_table_json(table), indent=2, sort_keys=True)
        _write_output((payload + "\n").encode("utf-8"), args.out)
    else:
        color = _use_color(sys.stdout) and args.out is None
        widths = (24, 36, 34, 6)
        header = (
            f"{'ID':<{widths[0]}} {'PATTERN':<{widths[1]}} "
            f"{'CONSTRAINT':<{widths[2]}} {'RESULT':<{widths[3]}} WITNESS"
        )
        lines = [header, "-" * len(header)]
        for row in table.rows:
            status = _colored(
                row.status, "32" if row.status == "SAT" else "33", color
            )
            mark = "" if row.matches else "  [MISMATCH]"
            lines.append(
                f"{row.id:<{widths[0]}} {row.note:<{widths[1]}} "
                f"{row.formula_text:<{widths[2]}} {status:<{widths[3]}} "
                f"{render_witness(row.witness)}{mark}"
            )
        ok = sum(1 for row in table.rows if row.matches)
        lines.append(f"{ok}/{len(table.rows)} proofs match expected results")
        _write_output(("\n".join(lines) + "\n").encode("utf-8"), args.out)
    return EXIT_OK if table.all_match else EXIT_POLICY


def _cmd_vendor(parser, args) -> int:
    for root in (args.root_a, args.root_b):
        if not Path(root).is_dir():
            parser.error(f"vendor root is not a directory: {root}")
    direction = None
    if args.vendor_direction:
        parts = args.vendor_direction.split(":")
        if len(parts) != 2 or not all(parts):
            parser.error("--vendor-direction must look like SOURCE:TARGET")
        direction = (parts[0], parts[1])
    options = ScanOptions()
    prints_a = fingerprint_tree(args.root_a, options)
    prints_b = fingerprint_tree(args.root_b, options)
    try:
        edges = detect_vendoring(
            prints_a, prints_b, args.min_shared_files, direction=direction
        )
    except ValueError as exc:
        parser.error(str(exc))
    ruleset = load_builtin_rules()
    prints = {prints_a.root: (args.root_a, prints_a), prints_b.root: (args.root_b, prints_b)}
    scans = {}
    for edge in edges:
        source_path, source_prints = prints[edge.source_root]
        _, target_prints = prints[edge.target_root]
        if edge.source_root not in scans:
            scans[edge.source_root] = scan_tree(source_path, ruleset, options)
        edge.carried_findings = carry_findings(
            edge, scans[edge.source_root].findings, source_prints, target_prints
        )
    chains = build_chain_report(edges)
    if args.format == "json":
        import json

        from .report import _propagation_json

        payload = json.dumps(_propagation_json(chains), indent=2, sort_keys=True)
        _write_output((payload + "\n").encode("utf-8"), args.out)
    else:
        lines = []
        for edge in edges:
            lines.append(
                f"edge: {edge.source_root} -> {edge.target_root} "
                f"({edge.shared_files} shared files, {edge.shared_bytes} bytes, "
                f"target prefix: {edge.common_target_prefix or '.'})"
            )
            lines.append(f"  carried findings: {len(edge.carried_findings)}")
            for finding in edge.carried_findings:
                lines.append(
                    f"    {finding.rule_id} {finding.severity.name} "
                    f"{finding.path}:{finding.line}"
                )
        for chain in chains.render_chains():
            lines.append(f"chain: {chain}")
        for warning in chains.warnings:
            lines.append(f"warning: {warning}")
        if not edges:
            lines.append("no vendoring detected")
        _write_output(("\n".join(lines) + "\n").encode("utf-8"), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantscan",
        description="Security scanner for quantum-framework source trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="scan one or more source trees")
    scan.add_argument("roots", nargs="+", metavar="ROOT")
    scan.add_argument("--rules", help="YAML rule file merged over the builtins")
    scan.add_argument(
        "--format", choices=["json", "sarif", "markdown"], default="json"
    )
    scan.add_argument("--out", help="write the report here instead of stdout")
    scan.add_argument("--fail-under", type=int, default=None, metavar="N")
    scan.add_argument(
        "--include-tests",
        action="store_true",
        help="do not suppress findings under test/benchmark/doc paths",
    )
    scan.add_argument(
        "--no-verify",
        action="store_true",
        help="skip satisfiability verification of findings",
    )
    scan.add_argument("--guard-window", type=int, default=12, metavar="LINES")
    scan.add_argument("--jobs", type=int, default=1, metavar="N")
    scan.add_argument("--timestamp", help="fixed report timestamp (for reproducible output)")

    prove = sub.add_parser("prove", help="run the proof-obligation registry")
    prove.add_argument("--format", choices=["text", "json"], default="text")
    prove.add_argument("--out", help="write the table here instead of stdout")

    vendor = sub.add_parser("vendor", help="detect vendored code between two trees")
    vendor.add_argument("root_a", metavar="ROOT_A")
    vendor.add_argument("root_b", metavar="ROOT_B")
    vendor.add_argument(
        "--min-shared-files",
        type=int,
        default=DEFAULT_MIN_SHARED_FILES,
        metavar="N",
    )
    vendor.add_argument(
        "--vendor-direction",
        metavar="SOURCE:TARGET",
        help="override the nesting-depth direction heuristic",
    )
    vendor.add_argument("--format", choices=["text", "json"], default="text")
    vendor.add_argument("--out", help="write the output here instead of stdout")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"scan": _cmd_scan, "prove": _cmd_prove, "vendor": _cmd_vendor}
    try:
        return handlers[args.command](parser, args)
    except SystemExit:
        raise
    except BrokenPipeError:
        return EXIT_OK
    except Exception as exc:  # noqa: BLE001 - exit-code contract
        print(f"quantscan: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
