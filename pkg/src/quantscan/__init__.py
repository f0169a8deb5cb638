"""quantscan: security scanning for quantum-framework source trees.

Pattern-based detection of the four vulnerability classes endemic to
quantum simulation code (unchecked 2**n allocations, integer-overflow
index/shift chains, unsafe deserialization, QASM injection), backed by an
exact bitvector witness solver, vendored-code propagation analysis, and a
deduction scorecard.
"""

__version__ = "0.1.0"

from .rules import Rule, RuleSet, Scope, Severity, load_builtin_rules, load_rule_file
from .scanning import (
    Finding,
    LanguageKind,
    ScanOptions,
    ScanResult,
    classify_file,
    scan_file,
    scan_tree,
)
from .scorecard import Grade, Scorecard, build_scorecard, compute_score
from .solver import (
    BooleanFormula,
    ConstraintFormula,
    Verdict,
    parse_formula,
    run_obligations,
    simulate_doubling_index,
    solve,
    solve_boolean,
)
from .vendoring import (
    build_chain_report,
    carry_findings,
    detect_vendoring,
    fingerprint_tree,
)

__all__ = [
    "__version__",
    "Rule",
    "RuleSet",
    "Scope",
    "Severity",
    "load_builtin_rules",
    "load_rule_file",
    "Finding",
    "LanguageKind",
    "ScanOptions",
    "ScanResult",
    "classify_file",
    "scan_file",
    "scan_tree",
    "Grade",
    "Scorecard",
    "build_scorecard",
    "compute_score",
    "BooleanFormula",
    "ConstraintFormula",
    "Verdict",
    "parse_formula",
    "run_obligations",
    "simulate_doubling_index",
    "solve",
    "solve_boolean",
    "build_chain_report",
    "carry_findings",
    "detect_vendoring",
    "fingerprint_tree",
]
