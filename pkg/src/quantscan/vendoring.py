"""Vendored-tree detection and cross-tree finding propagation.

Trees are fingerprinted file-by-file with a SHA-256 digest of normalized
content (LF endings, trailing whitespace stripped, blank lines dropped).
A tree that contains enough of another tree's files, byte-for-byte after
normalization, is treated as having vendored it; findings from the source
tree are then carried to the matching paths in the target.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path, PurePosixPath

from .scanning import Finding, LanguageKind, ScanOptions, classify_file, iter_source_files

DEFAULT_MIN_SHARED_FILES = 10


@dataclass(frozen=True)
class Fingerprint:
    rel_path: str
    normalized_hash: str  # SHA-256 hex digest
    size_bytes: int


@dataclass
class TreePrints:
    root: str
    fingerprints: list[Fingerprint]
    skips: list[dict] = field(default_factory=list)

    @property
    def by_hash(self) -> dict[str, list[str]]:
        index: dict[str, list[str]] = {}
        for fp in self.fingerprints:
            index.setdefault(fp.normalized_hash, []).append(fp.rel_path)
        for paths in index.values():
            paths.sort()
        return index


@dataclass
class PropagationEdge:
    source_root: str
    target_root: str
    shared_files: int
    shared_bytes: int
    common_target_prefix: str
    carried_findings: list[Finding] = field(default_factory=list)


@dataclass
class ChainReport:
    edges: list[PropagationEdge]
    chains: list[list[str]]
    warnings: list[str] = field(default_factory=list)

    def render_chains(self) -> list[str]:
        return [" → ".join(chain) for chain in self.chains]


def normalize_content(raw: bytes) -> bytes | None:
    """Canonical form hashed for clone comparison; None for non-text."""
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        return None
    lines = [line.rstrip() for line in text.replace("\r\n", "\n").replace("\r", "\n").split("\n")]
    kept = [line for line in lines if line]
    return ("\n".join(kept)).encode("utf-8")


def fingerprint_tree(root, options: ScanOptions | None = None) -> TreePrints:
    """One fingerprint per classifiable source file under root."""
    options = options or ScanOptions()
    root = Path(root)
    if not root.is_dir():
        raise NotADirectoryError(f"fingerprint root is not a readable directory: {root}")
    prints: list[Fingerprint] = []
    skips: list[dict] = []
    for rel in iter_source_files(root, options):
        full = root / rel
        try:
            raw = full.read_bytes()
        except OSError as exc:
            skips.append({"path": rel, "reason": f"unreadable: {exc.strerror or exc}"})
            continue
        if classify_file(rel, raw) is LanguageKind.OTHER:
            continue
        normalized = normalize_content(raw)
        if normalized is None:
            continue
        prints.append(
            Fingerprint(
                rel_path=rel,
                normalized_hash=hashlib.sha256(normalized).hexdigest(),
                size_bytes=len(raw),
            )
        )
    return TreePrints(root=root.name or str(root), fingerprints=prints, skips=skips)


def _shared(fp_a: TreePrints, fp_b: TreePrints):
    hashes_b = fp_b.by_hash
    shared = [fp for fp in fp_a.fingerprints if fp.normalized_hash in hashes_b]
    return shared, hashes_b


def _avg_depth(paths: list[str]) -> float:
    if not paths:
        return 0.0
    return sum(len(PurePosixPath(p).parts) for p in paths) / len(paths)


def _common_prefix(paths: list[str]) -> str:
    if not paths:
        return ""
    split = [PurePosixPath(p).parts[:-1] for p in paths]
    prefix = split[0]
    for parts in split[1:]:
        i = 0
        while i < min(len(prefix), len(parts)) and prefix[i] == parts[i]:
            i += 1
        prefix = prefix[:i]
    return "/".join(prefix)


def detect_vendoring(
    fp_a: TreePrints,
    fp_b: TreePrints,
    min_shared_files: int = DEFAULT_MIN_SHARED_FILES,
    direction: tuple[str, str] | None = None,
) -> list[PropagationEdge]:
    """Edges between two fingerprinted trees sharing enough file content.

    Direction defaults to the nesting-depth heuristic: the tree holding
    the shared files under the deeper prefix is the vendor-er (target).
    Ties produce both directions.  ``direction`` = (source_root,
    target_root) overrides the heuristic.
    """
    shared_a, hashes_b = _shared(fp_a, fp_b)
    if len(shared_a) < min_shared_files:
        return []
    paths_a = [fp.rel_path for fp in shared_a]
    paths_b = sorted({p for fp in shared_a for p in hashes_b[fp.normalized_hash]})
    shared_bytes = sum(fp.size_bytes for fp in shared_a)

    def edge(source: TreePrints, target: TreePrints, target_paths: list[str]):
        return PropagationEdge(
            source_root=source.root,
            target_root=target.root,
            shared_files=len(shared_a),
            shared_bytes=shared_bytes,
            common_target_prefix=_common_prefix(target_paths),
        )

    if direction is not None:
        if direction == (fp_a.root, fp_b.root):
            return [edge(fp_a, fp_b, paths_b)]
        if direction == (fp_b.root, fp_a.root):
            return [edge(fp_b, fp_a, paths_a)]
        raise ValueError(
            f"direction {direction} does not name the two roots "
            f"({fp_a.root!r}, {fp_b.root!r})"
        )

    depth_a, depth_b = _avg_depth(paths_a), _avg_depth(paths_b)
    if depth_b > depth_a:
        return [edge(fp_a, fp_b, paths_b)]
    if depth_a > depth_b:
        return [edge(fp_b, fp_a, paths_a)]
    return [edge(fp_a, fp_b, paths_b), edge(fp_b, fp_a, paths_a)]


def carry_findings(
    edge: PropagationEdge,
    source_findings: list[Finding],
    source_prints: TreePrints,
    target_prints: TreePrints,
) -> list[Finding]:
    """Re-path source findings onto the target's matching files.

    Each carried finding keeps its severity and mitigation status and is
    tagged with the tree it was vendored from.  A source file matching
    several identical target files maps to the first path in sorted order.
    """
    source_hashes = {fp.rel_path: fp.normalized_hash for fp in source_prints.fingerprints}
    target_by_hash = target_prints.by_hash
    carried = []
    for finding in source_findings:
        digest = source_hashes.get(finding.path)
        if digest is None:
            continue
        targets = target_by_hash.get(digest)
        if not targets:
            continue
        carried.append(
            replace(
                finding,
                path=targets[0],
                vendored_from=edge.source_root,
            )
        )
    carried.sort(key=Finding.sort_key)
    return carried


def build_chain_report(edges: list[PropagationEdge]) -> ChainReport:
    """Assemble maximal simple propagation paths over the edges."""
    warnings: list[str] = []
    adjacency: dict[str, list[str]] = {}
    incoming: set[str] = set()
    pairs = set()
    for edge in edges:
        adjacency.setdefault(edge.source_root, []).append(edge.target_root)
        incoming.add(edge.target_root)
        pairs.add((edge.source_root, edge.target_root))
    for source, target in sorted(pairs):
        if (target, source) in pairs and source < target:
            warnings.append(
                f"cycle between {source} and {target}: no chain built through it"
            )
    for targets in adjacency.values():
        targets.sort()

    chains: list[list[str]] = []

    def extend(path: list[str]):
        tail = path[-1]
        extended = False
        for nxt in adjacency.get(tail, []):
            if nxt in path:
                continue  # cycle guard
            extended = True
            extend(path + [nxt])
        if not extended and len(path) > 1:
            chains.append(path)

    roots = [node for node in sorted(adjacency) if node not in incoming]
    if not roots and adjacency:
        # pure cycle: every node has an incoming edge; report no chains
        roots = []
    for node in roots:
        extend([node])
    chains.sort()
    return ChainReport(edges=list(edges), chains=chains, warnings=warnings)
