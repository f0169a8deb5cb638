"""Report assembly and the JSON / SARIF / markdown serializers.

All three emitters are byte-deterministic for a fixed report (timestamps
are injected by the caller, never read from the clock here).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__
from .rules import RuleSet, Severity
from .scanning import Finding, ScanOptions, ScanResult
from .scorecard import FrameworkScore, Scorecard, score_findings
from .solver import ProofTable
from .vendoring import ChainReport

TOOL_NAME = "quantscan"
SCHEMA_VERSION = 1

# SARIF has no CRITICAL level; encode it as level=error plus a
# security-severity property on the rule (conventional CVSS bands)
_SARIF_LEVEL = {
    Severity.CRITICAL: "error",
    Severity.HIGH: "error",
    Severity.MEDIUM: "warning",
}
_SECURITY_SEVERITY = {
    Severity.CRITICAL: "9.8",
    Severity.HIGH: "7.5",
    Severity.MEDIUM: "5.0",
}


@dataclass
class FrameworkReport:
    name: str
    result: ScanResult
    score: FrameworkScore


@dataclass
class ScanReport:
    timestamp: str
    options: ScanOptions
    ruleset: RuleSet
    frameworks: list[FrameworkReport]
    proof_table: ProofTable | None = None
    propagation: ChainReport | None = None

    @property
    def scorecard_rows(self) -> list[FrameworkScore]:
        return [fw.score for fw in self.frameworks]


def build_scan_report(
    timestamp: str,
    options: ScanOptions,
    ruleset: RuleSet,
    results: list[tuple[str, ScanResult]],
    proof_table: ProofTable | None = None,
    propagation: ChainReport | None = None,
) -> ScanReport:
    frameworks = [
        FrameworkReport(name=name, result=result, score=score_findings(name, result.findings))
        for name, result in results
    ]
    return ScanReport(
        timestamp=timestamp,
        options=options,
        ruleset=ruleset,
        frameworks=frameworks,
        proof_table=proof_table,
        propagation=propagation,
    )


def _witness_json(witness):
    if isinstance(witness, tuple):
        return {"attacker_controls_string": witness[0], "qasm_sanitized": witness[1]}
    return witness


def _finding_json(finding: Finding) -> dict:
    verdict = None
    if finding.verdict is not None:
        verdict = {
            "status": finding.verdict.status,
            "witness": _witness_json(finding.verdict.witness),
        }
    return {
        "rule_id": finding.rule_id,
        "cwe": finding.cwe,
        "severity": finding.severity.name,
        "path": finding.path,
        "line": finding.line,
        "snippet": finding.snippet,
        "guard": finding.guard,
        "mitigated": finding.mitigated,
        "suppressed_by_filter": finding.suppressed_by_filter,
        "vendored_from": finding.vendored_from,
        "verdict": verdict,
    }


def _proof_table_json(table: ProofTable) -> list[dict]:
    return [
        {
            "id": row.id,
            "pattern": row.note,
            "constraint": row.formula_text,
            "status": row.status,
            "witness": _witness_json(row.witness),
            "expected_status": row.expected_status,
            "expected_witness": _witness_json(row.expected_witness),
            "match": row.matches,
        }
        for row in table.rows
    ]


def _propagation_json(chains: ChainReport) -> dict:
    return {
        "edges": [
            {
                "source_root": edge.source_root,
                "target_root": edge.target_root,
                "shared_files": edge.shared_files,
                "shared_bytes": edge.shared_bytes,
                "common_target_prefix": edge.common_target_prefix,
                "carried_findings": [_finding_json(f) for f in edge.carried_findings],
            }
            for edge in chains.edges
        ],
        "chains": chains.render_chains(),
        "warnings": chains.warnings,
    }


def report_to_dict(report: ScanReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": TOOL_NAME, "version": __version__},
        "timestamp": report.timestamp,
        "options": {
            "include_test_paths": report.options.include_test_paths,
            "guard_window": report.options.guard_window,
            "follow_symlinks": report.options.follow_symlinks,
            "max_file_bytes": report.options.max_file_bytes,
        },
        "frameworks": [
            {
                "name": fw.name,
                "root": fw.result.root,
                "files_scanned": fw.result.files_scanned,
                "skips": fw.result.skips,
                "findings": [_finding_json(f) for f in fw.result.findings],
                "score": {
                    "crit": fw.score.crit,
                    "high": fw.score.high,
                    "med": fw.score.med,
                    "score": fw.score.score,
                    "grade": fw.score.grade.value,
                },
            }
            for fw in report.frameworks
        ],
        "proof_table": (
            _proof_table_json(report.proof_table) if report.proof_table else None
        ),
        "propagation": (
            _propagation_json(report.propagation) if report.propagation else None
        ),
    }


def emit_json(report: ScanReport) -> bytes:
    payload = json.dumps(report_to_dict(report), indent=2, sort_keys=True)
    return (payload + "\n").encode("utf-8")


def emit_sarif(report: ScanReport) -> bytes:
    """SARIF 2.1.0, one run; every finding appears exactly once.

    Mitigated and filter-suppressed findings carry SARIF suppression
    objects so downstream viewers can hide them without losing them.
    """
    driver_rules = []
    rule_index = {}
    for rule in report.ruleset:
        rule_index[rule.id] = len(driver_rules)
        driver_rules.append(
            {
                "id": rule.id,
                "shortDescription": {"text": rule.description or rule.id},
                "properties": {
                    "cwe": f"CWE-{rule.cwe}",
                    "security-severity": _SECURITY_SEVERITY[rule.severity],
                },
            }
        )
    results = []
    for fw in report.frameworks:
        for finding in fw.result.findings:
            entry = {
                "ruleId": finding.rule_id,
                "level": _SARIF_LEVEL[finding.severity],
                "message": {"text": f"{finding.rule_id}: {finding.snippet}"},
                "locations": [
                    {
                        "physicalLocation": {
                            "artifactLocation": {"uri": f"{fw.name}/{finding.path}"},
                            "region": {"startLine": finding.line},
                        }
                    }
                ],
            }
            if finding.rule_id in rule_index:
                entry["ruleIndex"] = rule_index[finding.rule_id]
            suppressions = []
            if finding.suppressed_by_filter is not None:
                suppressions.append(
                    {
                        "kind": "inSource",
                        "justification": f"production-code filter: {finding.suppressed_by_filter}",
                    }
                )
            if finding.mitigated:
                suppressions.append(
                    {"kind": "inSource", "justification": "hard guard above sink"}
                )
            if suppressions:
                entry["suppressions"] = suppressions
            results.append(entry)
    sarif = {
        "$schema": "https://raw.githubusercontent.com/oasis-tcs/sarif-spec/master/Schemata/sarif-schema-2.1.0.json",
        "version": "2.1.0",
        "runs": [
            {
                "tool": {
                    "driver": {
                        "name": TOOL_NAME,
                        "version": __version__,
                        "informationUri": "https://example.invalid/quantscan",
                        "rules": driver_rules,
                    }
                },
                "results": results,
            }
        ],
    }
    payload = json.dumps(sarif, indent=2, sort_keys=True)
    return (payload + "\n").encode("utf-8")


def _pretty_constraint(text: str) -> str:
    return (
        text.replace(">=", "≥").replace("<=", "≤").replace("==", "=").replace("&&", "∧")
    )


def render_witness(witness) -> str:
    if witness is None:
        return "—"
    if isinstance(witness, tuple):
        return f"attacker={witness[0]}, sanitized={witness[1]}"
    return str(witness)


def emit_markdown(scorecard: Scorecard, proof_table: ProofTable | None = None) -> str:
    lines = [
        "| Framework | CRIT | HIGH | MED | Score | Grade |",
        "| --- | ---: | ---: | ---: | ---: | --- |",
    ]
    for row in scorecard.rows:
        lines.append(
            f"| {row.name} | {row.crit} | {row.high} | {row.med} "
            f"| {row.score}/100 | {row.grade.value} |"
        )
    if scorecard.rows:
        lines.append(
            f"| **Total** | {scorecard.total_crit} | {scorecard.total_high} "
            f"| {scorecard.total_med} |  |  |"
        )
    if proof_table is not None:
        lines.append("")
        lines.append("| ID | Pattern | Constraint | Result | Witness |")
        lines.append("| --- | --- | --- | --- | --- |")
        for row in proof_table.rows:
            lines.append(
                f"| {row.id} | {row.note} | {_pretty_constraint(row.formula_text)} "
                f"| {row.status} | {render_witness(row.witness)} |"
            )
    return "\n".join(lines) + "\n"
