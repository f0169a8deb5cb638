import pytest

from quantscan.scanning import (
    Finding,
    LanguageKind,
    ScanOptions,
    apply_production_filters,
    classify_file,
    detect_guard,
    scan_file,
    scan_tree,
)
from conftest import CORPUS


class TestClassifyFile:
    @pytest.mark.parametrize(
        ("name", "kind"),
        [
            ("a.hpp", LanguageKind.CPP),
            ("a.cpp", LanguageKind.CPP),
            ("a.cc", LanguageKind.CPP),
            ("a.h", LanguageKind.CPP),
            ("a.cu", LanguageKind.CPP),
            ("a.py", LanguageKind.PYTHON),
            ("a.qasm", LanguageKind.QASM),
            ("a.rs", LanguageKind.OTHER),
            ("Makefile", LanguageKind.OTHER),
        ],
    )
    def test_by_extension(self, name, kind):
        assert classify_file(name, "int x;") is kind

    def test_extensionless_shebang(self):
        assert classify_file("tool", "#!/usr/bin/env python3\n") is LanguageKind.PYTHON

    def test_extensionless_openqasm(self):
        assert classify_file("circ", "OPENQASM 2.0;\n") is LanguageKind.QASM

    def test_binary_is_other(self):
        assert classify_file("blob.py", b"\xff\xfe\x00\x01") is LanguageKind.OTHER


class TestScanFile:
    def test_one_finding_per_rule_and_line(self, ruleset, options):
        contents = "wf = np.zeros(2**n)\nfor i in range(2**n):\n"
        found = scan_file("sim.py", contents, ruleset, options)
        assert [(f.rule_id, f.line) for f in found] == [
            ("QAI-PY-001", 1),
            ("QAI-PY-002", 2),
        ]

    def test_scope_respected(self, ruleset, options):
        # a C++ idiom inside a Python file must not fire C++ rules
        assert scan_file("a.py", "x = BITS[num_qubits];\n", ruleset, options) == []

    def test_comment_lines_skipped(self, ruleset, options):
        py = "# wf = np.zeros(2**n)\n"
        cpp = "// data_size_ = BITS[num_qubits];\n"
        assert scan_file("a.py", py, ruleset, options) == []
        assert scan_file("a.hpp", cpp, ruleset, options) == []

    def test_oversized_file_yields_nothing(self, ruleset):
        options = ScanOptions(max_file_bytes=8)
        assert scan_file("a.py", "x = eval(data)\n", ruleset, options) == []

    def test_snippet_and_metadata(self, ruleset, options):
        found = scan_file("a.py", "  obj = pickle.load(fh)\n", ruleset, options)
        (finding,) = found
        assert finding.rule_id == "QAI-DS-001"
        assert finding.cwe == 502
        assert finding.snippet == "obj = pickle.load(fh)"
        assert finding.line == 1


def _guard_status(path, contents, line, window=12):
    from quantscan.rules import Severity

    finding = Finding(
        rule_id="X",
        cwe=0,
        severity=Severity.HIGH,
        path=path,
        line=line,
        snippet="",
    )
    return detect_guard(contents, finding, ScanOptions(guard_window=window))


class TestGuardDetection:
    def test_python_hard_guard(self):
        src = (
            "def alloc(n):\n"
            "    if n > 50:\n"
            "        raise ValueError('too many qubits')\n"
            "    return np.zeros(2**n)\n"
        )
        assert _guard_status("a.py", src, 4) == "hard_guard"

    def test_python_warning_only(self):
        src = (
            "def alloc(n):\n"
            "    if n > 16:\n"
            "        warnings.warn('slow')\n"
            "    return np.zeros(2**n)\n"
        )
        assert _guard_status("a.py", src, 4) == "warning_only"

    def test_guard_must_bind_sink_identifier(self):
        src = (
            "def alloc(n, m):\n"
            "    if m > 50:\n"
            "        raise ValueError('bad m')\n"
            "    return np.zeros(2**n)\n"
        )
        assert _guard_status("a.py", src, 4) == "unguarded"

    def test_guard_outside_window_ignored(self):
        filler = "    x = 1\n" * 12
        src = (
            "def alloc(n):\n"
            "    if n > 50:\n"
            "        raise ValueError('too many qubits')\n"
            + filler
            + "    return np.zeros(2**n)\n"
        )
        assert _guard_status("a.py", src, 16, window=4) == "unguarded"

    def test_python_scope_boundary(self):
        # the guard lives in a different (less indented ends earlier) scope
        src = (
            "def check(n):\n"
            "    if n > 50:\n"
            "        raise ValueError('no')\n"
            "def alloc(n):\n"
            "    return np.zeros(2**n)\n"
        )
        assert _guard_status("a.py", src, 5) == "unguarded"

    def test_cpp_hard_guard_multiline_throw(self):
        src = (
            "void set(size_t n) {\n"
            "  if (n >= 64)\n"
            "    throw std::invalid_argument(\n"
            "        \"n >= 64 not supported\");\n"
            "  size_ = BITS[n];\n"
            "}\n"
        )
        assert _guard_status("a.hpp", src, 5) == "hard_guard"

    def test_cpp_warning_only(self):
        src = (
            "void set(size_t n) {\n"
            "  if (n > 30) {\n"
            "    std::cerr << \"large n\" << std::endl;\n"
            "  }\n"
            "  size_ = BITS[n];\n"
            "}\n"
        )
        assert _guard_status("a.hpp", src, 5) == "warning_only"

    def test_cpp_brace_scope_stops_search(self):
        src = (
            "void check(size_t n) {\n"
            "  if (n >= 64) throw std::runtime_error(\"no\");\n"
            "}\n"
            "void set(size_t n) {\n"
            "  size_ = BITS[n];\n"
            "}\n"
        )
        assert _guard_status("a.hpp", src, 5) == "unguarded"

    def test_all_caps_limit_name_counts_as_constant(self):
        src = (
            "def alloc(n):\n"
            "    if n > MAX_QUBITS:\n"
            "        raise ValueError('too many qubits')\n"
            "    return np.zeros(2**n)\n"
        )
        assert _guard_status("a.py", src, 4) == "hard_guard"


def _finding(rule_id="QAI-PY-001", path="pkg/sim.py", snippet="x = np.zeros(2**n)"):
    from quantscan.rules import Severity

    return Finding(
        rule_id=rule_id,
        cwe=400,
        severity=Severity.HIGH,
        path=path,
        line=1,
        snippet=snippet,
    )


class TestProductionFilters:
    @pytest.mark.parametrize(
        "path",
        [
            "tests/test_sim.py",
            "pkg/test/x.py",
            "pkg/testing/x.py",
            "benchmarks/bench.py",
            "benchmark/bench.py",
            "examples/demo.py",
            "docs/snippet.py",
        ],
    )
    def test_test_path_segments(self, path, options, ruleset):
        (out,) = apply_production_filters([_finding(path=path)], options, ruleset)
        assert out.suppressed_by_filter == "test-path"
        assert not out.scored

    def test_segment_must_match_whole_component(self, options, ruleset):
        (out,) = apply_production_filters(
            [_finding(path="contest/latest.py")], options, ruleset
        )
        assert out.suppressed_by_filter is None

    def test_include_tests_disables_path_filter(self, ruleset):
        options = ScanOptions(include_test_paths=True)
        (out,) = apply_production_filters(
            [_finding(path="tests/test_sim.py")], options, ruleset
        )
        assert out.suppressed_by_filter is None
        assert out.scored

    def test_definition_line_suppressed(self, options, ruleset):
        f = _finding(
            rule_id="QAI-QA-001",
            snippet="def load(qasm): return from_qasm_str(qasm)",
        )
        (out,) = apply_production_filters([f], options, ruleset)
        assert out.suppressed_by_filter == "definition-line"

    def test_definition_rule_exempt(self, options, ruleset):
        f = _finding(rule_id="QAI-QA-003", snippet="def from_qasm_str(qasm_str):")
        (out,) = apply_production_filters([f], options, ruleset)
        assert out.suppressed_by_filter is None


class TestScanTree:
    def test_missing_root_raises(self, ruleset, options, tmp_path):
        with pytest.raises(NotADirectoryError):
            scan_tree(tmp_path / "nope", ruleset, options)

    def test_corpus_matches_frozen_expectations(self, ruleset, options, expected):
        for tree, data in expected.items():
            result = scan_tree(CORPUS / tree, ruleset, options)
            got = [
                {
                    "rule_id": f.rule_id,
                    "path": f.path,
                    "line": f.line,
                    "guard": f.guard,
                    "mitigated": f.mitigated,
                    "suppressed_by_filter": f.suppressed_by_filter,
                }
                for f in result.findings
            ]
            assert got == data["findings"], f"finding mismatch in {tree}"

    def test_worker_count_does_not_change_output(self, ruleset, options):
        one = scan_tree(CORPUS / "aer-mini", ruleset, options, workers=1)
        many = scan_tree(CORPUS / "aer-mini", ruleset, options, workers=8)
        assert one.findings == many.findings
        assert one.skips == many.skips

    def test_canonical_ordering(self, ruleset, options):
        result = scan_tree(CORPUS / "qasm-mini", ruleset, options)
        keys = [f.sort_key() for f in result.findings]
        assert keys == sorted(keys)

    def test_symlinks_skipped_by_default(self, ruleset, options, tmp_path):
        real = tmp_path / "real.py"
        real.write_text("x = eval(data)\n", encoding="utf-8")
        (tmp_path / "alias.py").symlink_to(real)
        result = scan_tree(tmp_path, ruleset, options)
        assert [f.path for f in result.findings] == ["real.py"]

    def test_oversized_file_recorded_as_skip(self, ruleset, tmp_path):
        options = ScanOptions(max_file_bytes=16)
        (tmp_path / "big.py").write_text("x = eval(d)\n" * 10, encoding="utf-8")
        result = scan_tree(tmp_path, ruleset, options)
        assert result.findings == []
        assert result.skips == [{"path": "big.py", "reason": "file exceeds max_file_bytes"}]

    def test_guard_window_validation(self):
        with pytest.raises(ValueError):
            ScanOptions(guard_window=0)


class TestMonotonicity:
    def test_adding_a_rule_never_removes_findings(self, ruleset, options):
        from quantscan.rules import Rule, Scope, Severity

        extra = Rule(
            id="LOCAL-ANY",
            cwe=710,
            severity=Severity.MEDIUM,
            scope=Scope.ANY,
            pattern=r"TODO",
        )
        bigger = ruleset.merged([extra], provenance="test")
        base = scan_tree(CORPUS / "cirq-mini", ruleset, options)
        extended = scan_tree(CORPUS / "cirq-mini", bigger, options)
        base_keys = {f.sort_key() for f in base.findings}
        extended_keys = {f.sort_key() for f in extended.findings}
        assert base_keys <= extended_keys

    def test_include_tests_never_reduces_scored_count(self, ruleset):
        strict = scan_tree(CORPUS / "qasm-mini", ruleset, ScanOptions())
        loose = scan_tree(
            CORPUS / "qasm-mini", ruleset, ScanOptions(include_test_paths=True)
        )
        assert sum(f.scored for f in loose.findings) >= sum(
            f.scored for f in strict.findings
        )

    def test_empty_directory(self, ruleset, options, tmp_path):
        result = scan_tree(tmp_path, ruleset, options)
        assert result.findings == []
        assert result.files_scanned == 0
