"""Detection rule model and the built-in rule library.

Rules are line-oriented regular expressions plus a small closed set of
context predicates.  There is deliberately no AST parsing: every pattern
the scanner targets is recognizable on a single source line with bounded
context, and keeping the matcher line-based keeps scans fast and
order-independent.

User rule files are YAML: a list of mappings, one per rule.  A file rule
whose id collides with a built-in replaces it.  See ``load_rule_file``.
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass

import yaml

#: Context predicates a rule may reference.  This set is closed: rule files
#: naming anything else are rejected at parse time.
PREDICATE_NAMES = frozenset(
    {
        "arg_not_string_literal",
        "no_weights_only_flag",
        "no_safe_loader",
        "callsite_not_definition",
    }
)

_STRING_LITERAL = re.compile(
    r"""^\s*[rbuRBUfF]{0,2}("(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')\s*$"""
)


class Severity(enum.Enum):
    """Finding severity with its scorecard deduction weight."""

    CRITICAL = 20
    HIGH = 8
    MEDIUM = 3

    @property
    def weight(self) -> int:
        return self.value


class Scope(enum.Enum):
    """Language scope of a rule."""

    CPP = "cpp"
    PYTHON = "python"
    QASM = "qasm"
    ANY = "any"


@dataclass(frozen=True)
class Rule:
    id: str
    cwe: int
    severity: Severity
    scope: Scope
    pattern: str
    predicates: tuple[str, ...] = ()
    obligation: str | None = None
    description: str = ""

    @property
    def regex(self) -> re.Pattern[str]:
        return _compile(self.pattern)

    @property
    def is_definition_rule(self) -> bool:
        """True for rules that intentionally match function-definition lines.

        Such rules are exempt from the definition-line production filter.
        """
        return r"def\s" in self.pattern


@functools.lru_cache(maxsize=None)
def _compile(pattern: str) -> re.Pattern[str]:
    return re.compile(pattern)


class RuleSet:
    """Immutable, id-keyed rule collection with deterministic iteration."""

    def __init__(self, rules: list[Rule], provenance: str = "builtin"):
        by_id: dict[str, Rule] = {}
        for rule in rules:
            if rule.id in by_id:
                raise ValueError(f"duplicate rule id {rule.id!r}")
            by_id[rule.id] = rule
        self._rules = dict(sorted(by_id.items()))
        self.provenance = provenance

    def __iter__(self):
        return iter(self._rules.values())

    def __len__(self) -> int:
        return len(self._rules)

    def __contains__(self, rule_id: str) -> bool:
        return rule_id in self._rules

    def get(self, rule_id: str) -> Rule | None:
        return self._rules.get(rule_id)

    def merged(self, rules: list[Rule], provenance: str) -> "RuleSet":
        by_id = dict(self._rules)
        for rule in rules:
            by_id[rule.id] = rule
        return RuleSet(list(by_id.values()), provenance=provenance)


# The built-in library.  IDs follow the QAI-* convention used in the
# detection reports; severities are fixed per rule.
_BUILTIN = [
    Rule(
        id="QAI-001",
        cwe=125,
        severity=Severity.CRITICAL,
        scope=Scope.CPP,
        pattern=r"BITS\s*\[\s*[^\]]*[A-Za-z_][^\]]*\]",
        obligation="QAI-001",
        description="Fixed 64-entry lookup table indexed by an unchecked qubit count",
    ),
    Rule(
        id="QAI-002",
        cwe=190,
        severity=Severity.CRITICAL,
        scope=Scope.CPP,
        pattern=r"<<\s*\(\s*\w+\s*\*\s*2\s*\)|<<\s*\(\s*2\s*\*\s*\w+\s*\)",
        obligation="QAI-002",
        description="Shift amount derived from twice the qubit count (UB at n=32)",
    ),
    Rule(
        id="QAI-003",
        cwe=190,
        severity=Severity.CRITICAL,
        scope=Scope.CPP,
        pattern=r"set_num_qubits\s*\(\s*2\s*\*\s*\w+|set_num_qubits\s*\(\s*\w+\s*\*\s*2",
        obligation="QAI-003",
        description="Qubit count doubled before dispatch to the base allocator (overflow-to-OOB chain)",
    ),
    Rule(
        id="QAI-004",
        cwe=190,
        severity=Severity.HIGH,
        scope=Scope.CPP,
        pattern=r"<<\s*\(\s*\w+\s*\+\s*1\s*\)",
        obligation="QAI-004",
        description="Shift by qubit count plus one (UB at n=63)",
    ),
    Rule(
        id="QAI-005",
        cwe=190,
        severity=Severity.HIGH,
        scope=Scope.CPP,
        pattern=r"1ULL\s*<<\s*\(?\s*[A-Za-z_]\w*\b\s*(?!\s*[*+])",
        obligation="QAI-005",
        description="Direct 1ULL << n shift, including variable-length array bounds",
    ),
    Rule(
        id="QAI-DS-001",
        cwe=502,
        severity=Severity.CRITICAL,
        scope=Scope.PYTHON,
        pattern=r"\bpickle\.loads?\s*\(",
        obligation="QAI-DS-001",
        description="pickle deserialization of untrusted data (arbitrary code execution)",
    ),
    Rule(
        id="QAI-DS-002",
        cwe=502,
        severity=Severity.CRITICAL,
        scope=Scope.PYTHON,
        pattern=r"\bdill\.loads?\s*\(",
        description="dill deserialization (pickle-backed, arbitrary code execution)",
    ),
    Rule(
        id="QAI-DS-003",
        cwe=502,
        severity=Severity.CRITICAL,
        scope=Scope.PYTHON,
        pattern=r"\bjoblib\.load\s*\(",
        description="joblib deserialization (pickle-backed, arbitrary code execution)",
    ),
    Rule(
        id="QAI-DS-004",
        cwe=502,
        severity=Severity.HIGH,
        scope=Scope.PYTHON,
        pattern=r"\btorch\.load\s*\(",
        predicates=("no_weights_only_flag",),
        description="torch.load without weights_only=True",
    ),
    Rule(
        id="QAI-DS-005",
        cwe=502,
        severity=Severity.HIGH,
        scope=Scope.PYTHON,
        pattern=r"\byaml\.load\s*\(",
        predicates=("no_safe_loader",),
        description="yaml.load without a safe loader",
    ),
    Rule(
        id="QAI-DS-006",
        cwe=94,
        severity=Severity.HIGH,
        scope=Scope.PYTHON,
        pattern=r"(?<![\w.])eval\s*\(",
        description="eval() on data that may originate outside the process",
    ),
    Rule(
        id="QAI-PY-001",
        cwe=400,
        severity=Severity.HIGH,
        scope=Scope.PYTHON,
        pattern=r"(?:np|numpy)\.zeros\s*\(\s*2\s*\*\*|\]\s*\*\s*\(\s*2\s*\*\*",
        obligation="QAI-PY-001",
        description="Zero-filled buffer of size 2**n with unchecked n",
    ),
    Rule(
        id="QAI-PY-002",
        cwe=400,
        severity=Severity.HIGH,
        scope=Scope.PYTHON,
        pattern=r"\brange\s*\(\s*2\s*\*\*",
        obligation="QAI-PY-002",
        description="Loop over range(2**n) with unchecked n",
    ),
    Rule(
        id="QAI-PY-003",
        cwe=400,
        severity=Severity.HIGH,
        scope=Scope.PYTHON,
        pattern=r"2\s*\*\*\s*\(\s*2\s*\*\s*\w+|2\s*\*\*\s*\(\s*\w+\s*\*\s*2",
        obligation="QAI-PY-003",
        description="Doubled exponent 2**(2*n) (density-matrix sizing)",
    ),
    Rule(
        id="QAI-PY-004",
        cwe=400,
        severity=Severity.HIGH,
        scope=Scope.PYTHON,
        pattern=r"\.zeros\s*\(.*[\(\[]\s*2\s*\*\*",
        obligation="QAI-PY-004",
        description="2**n inside an allocation shape tuple or list",
    ),
    Rule(
        id="QAI-PY-005",
        cwe=400,
        severity=Severity.MEDIUM,
        scope=Scope.PYTHON,
        pattern=r"^\s*\w+\s*=\s*2\s*\*\*\s*[A-Za-z_][\w.]*\s*(?:#.*)?$",
        description="Exponential expression bound to a variable without an adjacent allocation",
    ),
    Rule(
        id="QAI-QA-001",
        cwe=77,
        severity=Severity.CRITICAL,
        scope=Scope.PYTHON,
        pattern=r"\bfrom_qasm_str\s*\(|\bqasm2\.loads\s*\(",
        predicates=("arg_not_string_literal",),
        obligation="QAI-QA-001",
        description="QASM string sink with a non-literal argument",
    ),
    Rule(
        id="QAI-QA-002",
        cwe=22,
        severity=Severity.CRITICAL,
        scope=Scope.PYTHON,
        pattern=r"\bfrom_qasm_file\s*\(|\bqasm2\.load\s*\(",
        predicates=("arg_not_string_literal",),
        description="QASM file sink with a non-literal path",
    ),
    Rule(
        id="QAI-QA-003",
        cwe=77,
        severity=Severity.HIGH,
        scope=Scope.PYTHON,
        pattern=r"^\s*def\s+from_qasm_(?:str|file)\s*\(",
        description="Public QASM entry point accepting arbitrary strings without sanitization",
    ),
]


def load_builtin_rules() -> RuleSet:
    """Return the built-in rule library.

    Raises ``ValueError`` if any rule references an obligation id missing
    from the verifier registry (referential integrity check).
    """
    ruleset = RuleSet(list(_BUILTIN), provenance="builtin")
    from .solver import builtin_obligations  # local import, no cycle at module load

    known = {ob.id for ob in builtin_obligations()}
    for rule in ruleset:
        if rule.obligation is not None and rule.obligation not in known:
            raise ValueError(
                f"rule {rule.id} references unknown obligation {rule.obligation!r}"
            )
    return ruleset


class RuleFileError(Exception):
    """Raised for malformed rule files; carries a 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _node_line(node) -> int:
    return node.start_mark.line + 1


def _parse_rule_node(node) -> Rule:
    if not isinstance(node, yaml.MappingNode):
        raise RuleFileError("rule entry must be a mapping", _node_line(node))
    fields = {}
    lines = {}
    for key_node, value_node in node.value:
        key = key_node.value
        fields[key] = yaml.safe_load(yaml.serialize(value_node))
        lines[key] = _node_line(value_node)
    line = _node_line(node)

    def need(key, typ):
        if key not in fields:
            raise RuleFileError(f"missing required field {key!r}", line)
        if not isinstance(fields[key], typ):
            raise RuleFileError(f"field {key!r} has wrong type", lines[key])
        return fields[key]

    rule_id = need("id", str)
    cwe = need("cwe", int)
    severity_name = need("severity", str)
    try:
        severity = Severity[severity_name]
    except KeyError:
        raise RuleFileError(f"unknown severity {severity_name!r}", lines["severity"])
    scope_name = need("scope", str)
    try:
        scope = Scope(scope_name)
    except ValueError:
        raise RuleFileError(f"unknown scope {scope_name!r}", lines["scope"])
    pattern = need("pattern", str)
    try:
        re.compile(pattern)
    except re.error as exc:
        raise RuleFileError(f"pattern does not compile: {exc}", lines["pattern"])
    predicates = fields.get("predicates", [])
    if not isinstance(predicates, list):
        raise RuleFileError("field 'predicates' must be a list", lines["predicates"])
    for name in predicates:
        if name not in PREDICATE_NAMES:
            raise RuleFileError(
                f"unknown context predicate {name!r}", lines["predicates"]
            )
    obligation = fields.get("obligation")
    if obligation is not None and not isinstance(obligation, str):
        raise RuleFileError("field 'obligation' must be a string", lines["obligation"])
    description = fields.get("description", "")
    if not isinstance(description, str):
        raise RuleFileError("field 'description' must be a string", lines["description"])
    return Rule(
        id=rule_id,
        cwe=cwe,
        severity=severity,
        scope=scope,
        pattern=pattern,
        predicates=tuple(predicates),
        obligation=obligation,
        description=description,
    )


def load_rule_file(path, base: RuleSet) -> RuleSet:
    """Merge the YAML rule file at ``path`` over ``base``.

    A file rule whose id already exists replaces the base rule.  Malformed
    files raise :class:`RuleFileError` with the offending line number.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if not text.strip():
        return base
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        line = getattr(getattr(exc, "problem_mark", None), "line", 0) + 1
        raise RuleFileError(f"invalid YAML: {exc}", line)
    if root is None:
        return base
    if not isinstance(root, yaml.SequenceNode):
        raise RuleFileError("rule file must be a YAML list of rules", _node_line(root))
    parsed: list[Rule] = []
    seen: dict[str, int] = {}
    for item in root.value:
        rule = _parse_rule_node(item)
        if rule.id in seen:
            raise RuleFileError(
                f"duplicate rule id {rule.id!r} (first defined at line {seen[rule.id]})",
                _node_line(item),
            )
        seen[rule.id] = _node_line(item)
        parsed.append(rule)
    return base.merged(parsed, provenance=str(path))


def dump_rule_file(ruleset: RuleSet) -> str:
    """Serialize a rule set to the YAML rule-file format (round-trips)."""
    records = []
    for rule in ruleset:
        record = {
            "id": rule.id,
            "cwe": rule.cwe,
            "severity": rule.severity.name,
            "scope": rule.scope.value,
            "pattern": rule.pattern,
            "predicates": list(rule.predicates),
            "description": rule.description,
        }
        if rule.obligation is not None:
            record["obligation"] = rule.obligation
        records.append(record)
    return yaml.safe_dump(records, sort_keys=False, width=100)


def check_predicate(name: str, line: str, match: re.Match[str]) -> bool:
    """Evaluate a context predicate; True keeps the finding."""
    if name == "arg_not_string_literal":
        return _arg_not_string_literal(line, match)
    if name == "no_weights_only_flag":
        return not re.search(r"weights_only\s*=\s*True", line)
    if name == "no_safe_loader":
        return "SafeLoader" not in line and "safe_load" not in line
    if name == "callsite_not_definition":
        return re.match(r"\s*def\s", line) is None
    raise ValueError(f"unknown predicate {name!r}")


def _arg_not_string_literal(line: str, match: re.Match[str]) -> bool:
    open_paren = line.find("(", match.start())
    if open_paren == -1:
        return True
    depth = 0
    quote: str | None = None
    end = None
    first_comma = None
    for i in range(open_paren, len(line)):
        ch = line[i]
        if quote is not None:
            if ch == quote and line[i - 1] != "\\":
                quote = None
            continue
        if ch in "\"'":
            quote = ch
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                end = i
                break
        elif ch == "," and depth == 1 and first_comma is None:
            first_comma = i
    if end is None:
        # call continues on following lines; cannot be a bare literal
        return True
    stop = first_comma if first_comma is not None else end
    arg = line[open_paren + 1 : stop]
    return _STRING_LITERAL.match(arg) is None
