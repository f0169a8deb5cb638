"""Source tree walking, rule matching, guard detection, and filters."""

from __future__ import annotations

import enum
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path, PurePosixPath

from .rules import Rule, RuleSet, Scope, Severity, check_predicate

_FILTER_SEGMENTS = {
    "test",
    "tests",
    "testing",
    "benchmark",
    "benchmarks",
    "examples",
    "docs",
}

_CPP_EXTENSIONS = {".hpp", ".cpp", ".cc", ".h", ".cu"}

_HARD_STOP = re.compile(r"\b(?:raise|throw)\b|\bsys\.exit\s*\(|\babort\s*\(")
_WARN_ONLY = re.compile(r"\bwarn\w*\s*(?:\.|\()|\bwarnings\.|std::cerr|std::cout")
_IDENT = re.compile(r"[A-Za-z_]\w*")
_DEFINITION_LINE = re.compile(r"^def\s")

# guard conditions: identifier compared against an integer constant or an
# ALL_CAPS limit name (the MAX_QUBITS idiom)
_CMP_IDENT_CONST = re.compile(
    r"([A-Za-z_]\w*)\s*(?:>=|<=|==|>|<)\s*(?:\d|[A-Z][A-Z_0-9]*\b)"
)
_CMP_CONST_IDENT = re.compile(
    r"(?:\d+|[A-Z][A-Z_0-9]*)\s*(?:>=|<=|==|>|<)\s*([A-Za-z_]\w*)"
)


class LanguageKind(enum.Enum):
    CPP = "cpp"
    PYTHON = "python"
    QASM = "qasm"
    OTHER = "other"


@dataclass(frozen=True)
class Finding:
    rule_id: str
    cwe: int
    severity: Severity
    path: str
    line: int
    snippet: str
    guard: str = "unguarded"  # unguarded | hard_guard | warning_only
    mitigated: bool = False
    suppressed_by_filter: str | None = None
    vendored_from: str | None = None
    verdict: object = None

    @property
    def scored(self) -> bool:
        return not self.mitigated and self.suppressed_by_filter is None

    def sort_key(self):
        return (self.path, self.line, self.rule_id)


@dataclass(frozen=True)
class ScanOptions:
    include_test_paths: bool = False
    guard_window: int = 12
    follow_symlinks: bool = False
    max_file_bytes: int = 4 * 1024 * 1024

    def __post_init__(self):
        if self.guard_window < 1:
            raise ValueError("guard_window must be >= 1")


@dataclass
class ScanResult:
    root: str
    findings: list[Finding] = field(default_factory=list)
    files_scanned: int = 0
    skips: list[dict] = field(default_factory=list)


def classify_file(path, contents) -> LanguageKind:
    """Map a file to its scanner language; undecodable content is Other."""
    if isinstance(contents, bytes):
        try:
            contents = contents.decode("utf-8")
        except UnicodeDecodeError:
            return LanguageKind.OTHER
    suffix = Path(path).suffix.lower()
    if suffix in _CPP_EXTENSIONS:
        return LanguageKind.CPP
    if suffix == ".py":
        return LanguageKind.PYTHON
    if suffix == ".qasm":
        return LanguageKind.QASM
    if suffix == "":
        head = contents[:256]
        if head.startswith("#!") and "python" in head.splitlines()[0]:
            return LanguageKind.PYTHON
        if head.lstrip().startswith("OPENQASM"):
            return LanguageKind.QASM
    return LanguageKind.OTHER


def _rule_applies(rule: Rule, kind: LanguageKind) -> bool:
    if rule.scope is Scope.ANY:
        return kind is not LanguageKind.OTHER
    return rule.scope.value == kind.value


def _is_comment_line(line: str, kind: LanguageKind) -> bool:
    stripped = line.lstrip()
    if not stripped:
        return False
    if kind is LanguageKind.PYTHON:
        return stripped.startswith("#")
    # C++ and OpenQASM share //-style comments
    return stripped.startswith(("//", "/*", "*"))


def scan_file(path, contents: str, ruleset: RuleSet, options: ScanOptions) -> list[Finding]:
    """Match every applicable rule against each non-comment line.

    Returns at most one finding per (rule, line); output is sorted by
    (line, rule id).  Oversized files yield no findings (the tree walker
    records the skip).
    """
    if len(contents.encode("utf-8", errors="replace")) > options.max_file_bytes:
        return []
    kind = classify_file(path, contents)
    rules = [rule for rule in ruleset if _rule_applies(rule, kind)]
    if not rules:
        return []
    findings: list[Finding] = []
    for lineno, line in enumerate(contents.splitlines(), start=1):
        if _is_comment_line(line, kind):
            continue
        for rule in rules:
            match = rule.regex.search(line)
            if match is None:
                continue
            if not all(
                check_predicate(name, line, match) for name in rule.predicates
            ):
                continue
            findings.append(
                Finding(
                    rule_id=rule.id,
                    cwe=rule.cwe,
                    severity=rule.severity,
                    path=str(PurePosixPath(path)),
                    line=lineno,
                    snippet=line.strip(),
                )
            )
    findings.sort(key=lambda f: (f.line, f.rule_id))
    return findings


def _indent(line: str) -> int:
    return len(line) - len(line.lstrip())


def _guard_condition_idents(line: str) -> set[str]:
    if re.search(r"^\s*(?:}\s*)?(?:else\s+)?if\b", line) is None:
        return set()
    found = set(_CMP_IDENT_CONST.findall(line))
    found.update(_CMP_CONST_IDENT.findall(line))
    return found


def _classify_guard_body(body: str) -> str | None:
    if _HARD_STOP.search(body):
        return "hard_guard"
    if _WARN_ONLY.search(body):
        return "warning_only"
    return None


def _python_guard(lines: list[str], guard_idx: int, sink_idx: int) -> str | None:
    guard_line = lines[guard_idx]
    guard_indent = _indent(guard_line)
    parts = []
    after_colon = guard_line.split(":", 1)
    if len(after_colon) == 2 and after_colon[1].strip():
        parts.append(after_colon[1])
    for j in range(guard_idx + 1, sink_idx):
        line = lines[j]
        if line.strip() and _indent(line) <= guard_indent:
            break
        parts.append(line)
    return _classify_guard_body("\n".join(parts))


def _cpp_guard(lines: list[str], guard_idx: int, sink_idx: int) -> str | None:
    stop = min(sink_idx, guard_idx + 4)
    body = "\n".join(lines[guard_idx:stop])
    return _classify_guard_body(body)


def detect_guard(contents: str, finding: Finding, options: ScanOptions) -> str:
    """Look above the finding for a range guard on a sink identifier.

    A conditional that raises/throws on the guard path counts as a hard
    guard (mitigation); one that only warns does not.  The guard must test
    an identifier that appears on the matched line.
    """
    kind = classify_file(finding.path, contents)
    lines = contents.splitlines()
    sink_idx = finding.line - 1
    if sink_idx < 0 or sink_idx >= len(lines):
        return "unguarded"
    sink_idents = set(_IDENT.findall(lines[sink_idx]))
    low = max(0, sink_idx - options.guard_window)

    if kind is LanguageKind.PYTHON:
        sink_indent = _indent(lines[sink_idx])
        for i in range(sink_idx - 1, low - 1, -1):
            line = lines[i]
            if line.strip() and _indent(line) < sink_indent:
                break  # left the contiguous indentation scope
            tested = _guard_condition_idents(line)
            if tested & sink_idents:
                status = _python_guard(lines, i, sink_idx)
                if status is not None:
                    return status
        return "unguarded"

    # C++ scope heuristic: stop once we cross the opening brace of the
    # enclosing block
    balance = 0
    for i in range(sink_idx - 1, low - 1, -1):
        line = lines[i]
        tested = _guard_condition_idents(line)
        if tested & sink_idents:
            status = _cpp_guard(lines, i, sink_idx)
            if status is not None:
                return status
        balance += line.count("}") - line.count("{")
        if balance < 0:
            break
    return "unguarded"


def apply_production_filters(
    findings: list[Finding],
    options: ScanOptions,
    ruleset: RuleSet | None = None,
) -> list[Finding]:
    """Mark test-path and definition-line findings as filter-suppressed.

    Suppressed findings stay in the result (and in JSON output) but are
    excluded from score arithmetic.  Rules that intentionally match
    function-definition lines (the API-definition rule) are exempt from
    the definition-line filter.
    """
    out = []
    for finding in findings:
        suppression = None
        if not options.include_test_paths:
            parts = PurePosixPath(finding.path).parts
            if any(part.lower() in _FILTER_SEGMENTS for part in parts):
                suppression = "test-path"
        if suppression is None and _DEFINITION_LINE.match(finding.snippet):
            rule = ruleset.get(finding.rule_id) if ruleset is not None else None
            is_definition_rule = (
                rule.is_definition_rule if rule is not None else False
            )
            if not is_definition_rule:
                suppression = "definition-line"
        if suppression is not None:
            finding = replace(finding, suppressed_by_filter=suppression)
        out.append(finding)
    return out


def _scan_one(root: Path, rel: str, ruleset: RuleSet, options: ScanOptions):
    full = root / rel
    try:
        raw = full.read_bytes()
    except OSError as exc:
        return [], {"path": rel, "reason": f"unreadable: {exc.strerror or exc}"}
    if len(raw) > options.max_file_bytes:
        return [], {"path": rel, "reason": "file exceeds max_file_bytes"}
    try:
        contents = raw.decode("utf-8")
    except UnicodeDecodeError:
        return [], None  # binary; classified Other, nothing to scan
    findings = scan_file(rel, contents, ruleset, options)
    annotated = []
    for finding in findings:
        status = detect_guard(contents, finding, options)
        annotated.append(
            replace(finding, guard=status, mitigated=status == "hard_guard")
        )
    return annotated, None


def iter_source_files(root, options: ScanOptions) -> list[str]:
    """Tree-relative paths of all regular files under root, sorted."""
    root = Path(root)
    rels = []
    for dirpath, dirnames, filenames in os.walk(
        root, followlinks=options.follow_symlinks
    ):
        dirnames.sort()
        for name in sorted(filenames):
            full = Path(dirpath) / name
            if not options.follow_symlinks and full.is_symlink():
                continue
            rels.append(full.relative_to(root).as_posix())
    rels.sort()
    return rels


def scan_tree(root, ruleset: RuleSet, options: ScanOptions, workers: int = 1) -> ScanResult:
    """Scan every classifiable file under root.

    Output ordering is canonical -- sorted by (path, line, rule id) -- so
    results are identical regardless of worker count.
    """
    root = Path(root)
    if not root.is_dir():
        raise NotADirectoryError(f"scan root is not a readable directory: {root}")
    rels = iter_source_files(root, options)
    findings: list[Finding] = []
    skips: list[dict] = []

    def handle(rel):
        return _scan_one(root, rel, ruleset, options)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(handle, rels))
    else:
        results = [handle(rel) for rel in rels]
    for file_findings, skip in results:
        findings.extend(file_findings)
        if skip is not None:
            skips.append(skip)
    findings = apply_production_filters(findings, options, ruleset)
    findings.sort(key=Finding.sort_key)
    skips.sort(key=lambda s: s["path"])
    return ScanResult(
        root=str(root),
        findings=findings,
        files_scanned=len(rels) - len(skips),
        skips=skips,
    )
