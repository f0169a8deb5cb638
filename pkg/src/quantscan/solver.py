"""Exact satisfiability over a single unsigned 64-bit variable.

Formulas are conjunctions of comparisons between affine terms in one
variable ``n`` (a qubit count), evaluated with wraparound arithmetic
modulo 2**64.  ``solve`` returns SAT with the *minimal* witness or UNSAT,
exactly over the full domain: a vectorized sweep covers the low window
where real witnesses live, and an interval walk over the linear pieces of
each wrapped term covers the rest.

A two-variable boolean model (attacker_controls_string AND NOT
qasm_sanitized) backs the injection-reachability obligations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from . import kernels

WORD = 1 << 64
_SWEEP_WINDOW = 1 << 16

_CMP_OPS = ("<", "<=", ">=", ">", "==")


class FormulaError(ValueError):
    """Parse failure; carries a 0-based column offset."""

    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


@dataclass(frozen=True)
class Term:
    """(coeff * n + const) mod 2**64."""

    coeff: int = 0
    const: int = 0

    def evaluate(self, n: int) -> int:
        return (self.coeff * n + self.const) % WORD

    def __str__(self) -> str:
        if self.coeff == 0:
            return str(self.const)
        head = "n" if self.coeff == 1 else f"{self.coeff}*n"
        return head if self.const == 0 else f"{head} + {self.const}"


@dataclass(frozen=True)
class Predicate:
    lhs: Term
    op: str
    rhs: Term

    def holds(self, n: int) -> bool:
        left, right = self.lhs.evaluate(n), self.rhs.evaluate(n)
        if self.op == "<":
            return left < right
        if self.op == "<=":
            return left <= right
        if self.op == ">=":
            return left >= right
        if self.op == ">":
            return left > right
        return left == right

    def __str__(self) -> str:
        return f"{self.lhs} {self.op} {self.rhs}"


@dataclass(frozen=True)
class ConstraintFormula:
    conjuncts: tuple[Predicate, ...]

    def holds(self, n: int) -> bool:
        return all(pred.holds(n) for pred in self.conjuncts)

    @property
    def text(self) -> str:
        return " && ".join(str(pred) for pred in self.conjuncts)


@dataclass(frozen=True)
class BooleanFormula:
    """attacker_controls_string AND NOT qasm_sanitized, variables optionally fixed."""

    attacker: Optional[bool] = None
    sanitized: Optional[bool] = None

    @property
    def text(self) -> str:
        parts = ["attacker_controls_string && !qasm_sanitized"]
        if self.attacker is not None:
            parts.append(f"attacker_controls_string={self.attacker}")
        if self.sanitized is not None:
            parts.append(f"qasm_sanitized={self.sanitized}")
        return "; ".join(parts)


@dataclass(frozen=True)
class Verdict:
    status: str  # "SAT" | "UNSAT"
    witness: Union[int, tuple[bool, bool], None] = None


_TOKEN = re.compile(r"\s*(\d+|[A-Za-z_]\w*|<=|>=|==|&&|[<>*+=])")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            if text[pos:].strip():
                raise FormulaError(f"unexpected character {text[pos]!r}", pos)
            break
        tokens.append((match.group(1), match.start(1)))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0
        self.length = len(text)

    def peek(self) -> Optional[str]:
        if self.index < len(self.tokens):
            return self.tokens[self.index][0]
        return None

    def column(self) -> int:
        if self.index < len(self.tokens):
            return self.tokens[self.index][1]
        return self.length

    def take(self) -> str:
        token = self.peek()
        if token is None:
            raise FormulaError("unexpected end of formula", self.length)
        self.index += 1
        return token

    def term(self) -> Term:
        column = self.column()
        token = self.take()
        if token.isdigit():
            value = int(token)
            if self.peek() == "*":
                self.take()
                self._variable()
                return Term(coeff=value)
            if self.peek() == "+":
                self.take()
                self._variable()
                return Term(coeff=1, const=value)
            return Term(const=value)
        if token.isidentifier():
            if token != "n":
                raise FormulaError(f"unknown variable {token!r}", column)
            if self.peek() == "*":
                self.take()
                return Term(coeff=self._constant())
            if self.peek() == "+":
                self.take()
                return Term(coeff=1, const=self._constant())
            return Term(coeff=1)
        raise FormulaError(f"expected term, got {token!r}", column)

    def _variable(self) -> None:
        column = self.column()
        token = self.take()
        if not token.isidentifier():
            raise FormulaError(f"expected variable, got {token!r}", column)
        if token != "n":
            raise FormulaError(f"unknown variable {token!r}", column)

    def _constant(self) -> int:
        column = self.column()
        token = self.take()
        if not token.isdigit():
            raise FormulaError(f"expected constant, got {token!r}", column)
        return int(token)

    def predicate(self) -> Predicate:
        lhs = self.term()
        column = self.column()
        op = self.take()
        if op == "=":
            op = "=="
        if op not in _CMP_OPS:
            raise FormulaError(f"expected comparison, got {op!r}", column)
        rhs = self.term()
        return Predicate(lhs, op, rhs)

    def formula(self) -> ConstraintFormula:
        conjuncts = [self.predicate()]
        while self.peek() is not None:
            column = self.column()
            token = self.take()
            if token != "&&":
                raise FormulaError(f"expected '&&', got {token!r}", column)
            conjuncts.append(self.predicate())
        return ConstraintFormula(tuple(conjuncts))


def parse_formula(text: str) -> ConstraintFormula:
    """Parse ``pred (&& pred)*`` with affine terms over the variable n."""
    return _Parser(text).formula()


def _encode(formula: ConstraintFormula):
    count = len(formula.conjuncts)
    lc = np.empty(count, dtype=np.uint64)
    lb = np.empty(count, dtype=np.uint64)
    rc = np.empty(count, dtype=np.uint64)
    rb = np.empty(count, dtype=np.uint64)
    ops = np.empty(count, dtype=np.int64)
    for j, pred in enumerate(formula.conjuncts):
        lc[j] = pred.lhs.coeff % WORD
        lb[j] = pred.lhs.const % WORD
        rc[j] = pred.rhs.coeff % WORD
        rb[j] = pred.rhs.const % WORD
        ops[j] = kernels.opcode(pred.op)
    return lc, lb, rc, rb, ops


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _min_linear_sat(k: int, c: int, op: str, lo: int, hi: int) -> Optional[int]:
    """Minimal n in [lo, hi] with k*n OP c over plain integers, or None."""
    if k == 0:
        holds = {
            "<": 0 < c,
            "<=": 0 <= c,
            ">=": 0 >= c,
            ">": 0 > c,
            "==": 0 == c,
        }[op]
        return lo if holds else None
    if k < 0:
        flip = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "=="}
        return _min_linear_sat(-k, -c, flip[op], lo, hi)
    if op == "<":
        bound = (c - 1) // k
        return lo if lo <= min(hi, bound) else None
    if op == "<=":
        bound = c // k
        return lo if lo <= min(hi, bound) else None
    if op == ">":
        start = max(lo, c // k + 1)
        return start if start <= hi else None
    if op == ">=":
        start = max(lo, _ceil_div(c, k))
        return start if start <= hi else None
    if c % k != 0:
        return None
    root = c // k
    return root if lo <= root <= hi else None


def _next_sat(pred: Predicate, x: int) -> Optional[int]:
    """Smallest n >= x satisfying ``pred`` under wrapping semantics, or None."""
    lc, lb = pred.lhs.coeff % WORD, pred.lhs.const % WORD
    rc, rb = pred.rhs.coeff % WORD, pred.rhs.const % WORD
    while x < WORD:
        wrap_l = (lc * x + lb) // WORD
        wrap_r = (rc * x + rb) // WORD
        end = WORD - 1
        if lc:
            end = min(end, _ceil_div((wrap_l + 1) * WORD - lb, lc) - 1)
        if rc:
            end = min(end, _ceil_div((wrap_r + 1) * WORD - rb, rc) - 1)
        # within [x, end] both sides are plain linear: compare the difference
        k = lc - rc
        c = (rb - wrap_r * WORD) - (lb - wrap_l * WORD)
        hit = _min_linear_sat(k, c, pred.op, x, end)
        if hit is not None:
            return hit
        x = end + 1
    return None


def solve(formula: ConstraintFormula) -> Verdict:
    """Decide the formula over [0, 2**64); SAT carries the minimal witness."""
    offset = kernels.first_sat(*_encode(formula), 0, _SWEEP_WINDOW)
    if offset >= 0:
        return Verdict("SAT", offset)
    x = _SWEEP_WINDOW
    while True:
        advanced = False
        for pred in formula.conjuncts:
            bound = _next_sat(pred, x)
            if bound is None:
                return Verdict("UNSAT")
            if bound > x:
                x = bound
                advanced = True
        if not advanced:
            return Verdict("SAT", x)


def solve_boolean(formula: BooleanFormula) -> Verdict:
    """Decide attacker AND NOT sanitized under the fixed assignments."""
    attacker_values = [formula.attacker] if formula.attacker is not None else [True, False]
    sanitized_values = [formula.sanitized] if formula.sanitized is not None else [True, False]
    for attacker in attacker_values:
        for sanitized in sanitized_values:
            if attacker and not sanitized:
                return Verdict("SAT", (attacker, sanitized))
    return Verdict("UNSAT")


def solve_any(formula: Union[ConstraintFormula, BooleanFormula]) -> Verdict:
    if isinstance(formula, BooleanFormula):
        return solve_boolean(formula)
    return solve(formula)


@dataclass(frozen=True)
class Obligation:
    id: str
    formula: Union[ConstraintFormula, BooleanFormula]
    expected: Verdict
    note: str


def _bv(oid: str, text: str, witness: int, note: str) -> Obligation:
    return Obligation(oid, parse_formula(text), Verdict("SAT", witness), note)


def builtin_obligations() -> list[Obligation]:
    """The 13-row obligation registry, ordered by id.

    The two QAI-DS rows are registry-only reconstructions of the
    deserialization reachability argument; they have no bitvector content
    and mirror the QASM boolean model.
    """
    return [
        _bv("QAI-001", "n >= 64", 64, "BITS[num_qubits]"),
        _bv("QAI-002", "2*n >= 64", 32, "1ULL << (num_qubits * 2)"),
        _bv("QAI-003", "n < 64 && 2*n >= 64", 32, "set_num_qubits(2 * num_qubits)"),
        _bv("QAI-004", "n + 1 >= 64", 63, "1ULL << (num_qubits + 1)"),
        _bv("QAI-005", "n >= 64", 64, "1ULL << num_qubits"),
        Obligation(
            "QAI-DS-001",
            BooleanFormula(attacker=True, sanitized=False),
            Verdict("SAT", (True, False)),
            "pickle.load(untrusted file)",
        ),
        Obligation(
            "QAI-DS-001-MITIGATED",
            BooleanFormula(attacker=True, sanitized=True),
            Verdict("UNSAT"),
            "pickle.load behind an integrity check",
        ),
        _bv("QAI-PY-001", "n >= 40", 40, "np.zeros(2**n)"),
        _bv("QAI-PY-002", "n >= 30", 30, "range(2**n)"),
        _bv("QAI-PY-003", "n < 64 && 2*n >= 64", 32, "2**(2*n) density matrix"),
        _bv("QAI-PY-004", "n >= 30", 30, "shape=(2**n, ...)"),
        Obligation(
            "QAI-QA-001",
            BooleanFormula(attacker=True, sanitized=False),
            Verdict("SAT", (True, False)),
            "from_qasm_str(non-literal)",
        ),
        Obligation(
            "QAI-QA-001-MITIGATED",
            BooleanFormula(attacker=True, sanitized=True),
            Verdict("UNSAT"),
            "from_qasm_str behind an allowlist validator",
        ),
    ]


@dataclass(frozen=True)
class ProofRow:
    id: str
    note: str
    formula_text: str
    status: str
    witness: Union[int, tuple[bool, bool], None]
    expected_status: str
    expected_witness: Union[int, tuple[bool, bool], None]
    matches: bool


@dataclass(frozen=True)
class ProofTable:
    rows: tuple[ProofRow, ...]

    @property
    def all_match(self) -> bool:
        return all(row.matches for row in self.rows)


def run_obligations(registry: Optional[list[Obligation]] = None) -> ProofTable:
    """Solve every obligation and compare against its expected verdict."""
    if registry is None:
        registry = builtin_obligations()
    rows = []
    for obligation in sorted(registry, key=lambda ob: ob.id):
        verdict = solve_any(obligation.formula)
        rows.append(
            ProofRow(
                id=obligation.id,
                note=obligation.note,
                formula_text=obligation.formula.text,
                status=verdict.status,
                witness=verdict.witness,
                expected_status=obligation.expected.status,
                expected_witness=obligation.expected.witness,
                matches=verdict == obligation.expected,
            )
        )
    return ProofTable(tuple(rows))


class DoublingProbe(NamedTuple):
    index: int
    oob: bool


def simulate_doubling_index(n: int) -> DoublingProbe:
    """Model the doubled-qubit-count table lookup against a 64-entry table."""
    if n < 0:
        raise ValueError("qubit count must be non-negative")
    index = (2 * n) % WORD
    return DoublingProbe(index=index, oob=index >= 64)
