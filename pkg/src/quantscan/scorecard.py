"""Deduction scoring and letter grading of per-tree finding counts."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .rules import Severity
from .scanning import Finding


class Grade(enum.Enum):
    SECURE = "Secure"
    REVIEW_REQUIRED = "Review Required"
    CRITICAL_EXPOSURE = "Critical Exposure"
    BROKEN = "Broken"


@dataclass(frozen=True)
class FrameworkScore:
    name: str
    crit: int
    high: int
    med: int
    score: int
    grade: Grade


@dataclass(frozen=True)
class Scorecard:
    rows: tuple[FrameworkScore, ...]
    total_crit: int
    total_high: int
    total_med: int


def compute_score(crit: int, high: int, med: int) -> tuple[int, Grade]:
    """100-point baseline minus 20/8/3 per CRITICAL/HIGH/MEDIUM, floor 0."""
    if min(crit, high, med) < 0:
        raise ValueError("finding counts must be non-negative")
    score = max(0, 100 - 20 * crit - 8 * high - 3 * med)
    if score >= 85:
        grade = Grade.SECURE
    elif score >= 60:
        grade = Grade.REVIEW_REQUIRED
    elif score >= 30:
        grade = Grade.CRITICAL_EXPOSURE
    else:
        grade = Grade.BROKEN
    return score, grade


def count_scored(findings: list[Finding]) -> tuple[int, int, int]:
    """Unmitigated, unsuppressed counts by severity, deduplicated.

    Dedup key is (rule, path, line) so a finding carried from a vendored
    source never double-counts one the target scan already produced.
    """
    seen = set()
    crit = high = med = 0
    for finding in findings:
        if not finding.scored:
            continue
        key = (finding.rule_id, finding.path, finding.line)
        if key in seen:
            continue
        seen.add(key)
        if finding.severity is Severity.CRITICAL:
            crit += 1
        elif finding.severity is Severity.HIGH:
            high += 1
        else:
            med += 1
    return crit, high, med


def score_findings(name: str, findings: list[Finding]) -> FrameworkScore:
    crit, high, med = count_scored(findings)
    score, grade = compute_score(crit, high, med)
    return FrameworkScore(name=name, crit=crit, high=high, med=med, score=score, grade=grade)


def build_scorecard(entries: list[tuple[str, list[Finding]]]) -> Scorecard:
    """Score each named tree; rows sorted by score ascending then name."""
    names = [name for name, _ in entries]
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise ValueError(f"duplicate framework names: {', '.join(dupes)}")
    rows = [score_findings(name, findings) for name, findings in entries]
    rows.sort(key=lambda row: (row.score, row.name))
    return Scorecard(
        rows=tuple(rows),
        total_crit=sum(row.crit for row in rows),
        total_high=sum(row.high for row in rows),
        total_med=sum(row.med for row in rows),
    )
