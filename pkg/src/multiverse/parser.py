"""Parse an annotated analysis script into a validated BobaSpec.

Surface syntax:

* Block markers are comment lines ``# --- (NAME)`` for a normal block and
  ``# --- (NAME) label`` for one version of decision block ``NAME``.
* The config block is marked ``# --- (BOBA_CONFIG)`` and contains one JSON
  object (keys: ``decisions``, ``constraints``, ``graph``, ``dataset``,
  ``shuffle_column``, ``language``, ``before_execute``, ``after_execute``,
  ``sensitivity``, ``output_dir``).
* Placeholders are used as ``{{name}}`` and may be defined inline as
  ``{{name = v1, v2, ...}}`` (commas split at the top nesting level) or
  ahead of time in the config ``decisions`` list.
* Graph edges are strings ``"A->B"``; a node may pin a decision block
  version with ``"NAME:label"``.

Marker and config lines never reach the output scripts; everything else is
kept byte for byte.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .condexpr import parse_constraint_expr, referenced_decisions
from .errors import SpecError
from .model import BlockVersion, BobaSpec, Config, Constraint, Decision, TemplateSegment

CONFIG_BLOCK = "BOBA_CONFIG"
IMPLICIT_BLOCK = "_start"

_MARKER_RE = re.compile(r"^\s*#\s*---\s*\(\s*([A-Za-z_]\w*)\s*\)\s*(\S*)\s*$")
_PLACEHOLDER_RE = re.compile(r"\{\{(.*?)\}\}", re.DOTALL)
_INLINE_DEF_RE = re.compile(r"^([A-Za-z_]\w*)\s*=\s*(.+)$", re.DOTALL)

LANGUAGE_BY_EXT = {".py": "python", ".r": "r"}


def split_top_level(text: str) -> list[str]:
    """Split on commas that are outside quotes and brackets."""
    parts, depth, quote, buf = [], 0, None, []
    for ch in text:
        if quote:
            buf.append(ch)
            if ch == quote:
                quote = None
            continue
        if ch in "\"'":
            quote = ch
            buf.append(ch)
        elif ch in "([{":
            depth += 1
            buf.append(ch)
        elif ch in ")]}":
            depth -= 1
            buf.append(ch)
        elif ch == "," and depth == 0:
            parts.append("".join(buf).strip())
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf).strip())
    return parts


@dataclass
class _RawVersion:
    block: str
    label: str | None
    start_line: int
    lines: list[tuple[int, str]] = field(default_factory=list)  # (lineno, text+newline)


def _collect_blocks(source: str) -> list[_RawVersion]:
    """Split the script into block versions, dropping marker/config lines."""
    versions: list[_RawVersion] = []
    current: _RawVersion | None = None
    in_config = False
    config_lines: list[tuple[int, str]] = []

    for lineno, line in enumerate(source.splitlines(keepends=True), start=1):
        m = _MARKER_RE.match(line)
        if m:
            name, label = m.group(1), m.group(2) or None
            in_config = name == CONFIG_BLOCK
            if in_config:
                current = None
                continue
            current = _RawVersion(block=name, label=label, start_line=lineno)
            versions.append(current)
            continue
        if in_config:
            config_lines.append((lineno, line))
            continue
        if current is None:
            current = _RawVersion(block=IMPLICIT_BLOCK, label=None, start_line=lineno)
            versions.append(current)
        current.lines.append((lineno, line))

    # stash config lines on the list for the caller
    versions_config = [v for v in versions]
    versions_config.append(_RawVersion(block=CONFIG_BLOCK, label=None, start_line=0, lines=config_lines))
    return versions_config


def _scan_segments(raw: _RawVersion):
    """Turn raw lines into literal/placeholder segments.

    Returns (segments, inline defs as {name: (options, line)}, uses as
    [(name, line)]).
    """
    text = "".join(t for _, t in raw.lines)
    base_line = raw.lines[0][0] if raw.lines else raw.start_line
    segments: list[TemplateSegment] = []
    defs: dict[str, tuple[list[str], int]] = {}
    uses: list[tuple[str, int]] = []
    pos = 0
    for m in _PLACEHOLDER_RE.finditer(text):
        line = base_line + text.count("\n", 0, m.start())
        if m.start() > pos:
            lit = text[pos : m.start()]
            segments.append(
                TemplateSegment("text", lit, lit, base_line + text.count("\n", 0, pos))
            )
        inner = m.group(1).strip()
        d = _INLINE_DEF_RE.match(inner)
        if d:
            name = d.group(1)
            options = split_top_level(d.group(2))
            if name in defs:
                raise SpecError(f"duplicate decision name {name!r}", line)
            defs[name] = (options, line)
        else:
            if not re.fullmatch(r"[A-Za-z_]\w*", inner):
                raise SpecError(f"malformed placeholder {{{{{inner}}}}}", line)
            name = inner
        uses.append((name, line))
        segments.append(TemplateSegment("placeholder", name, m.group(0), line))
        pos = m.end()
    if pos < len(text):
        lit = text[pos:]
        segments.append(
            TemplateSegment("text", lit, lit, base_line + text.count("\n", 0, pos))
        )
    return segments, defs, uses


def _option_text(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, (int, float)):
        return repr(value)
    return json.dumps(value)


def _parse_config(config_lines: list[tuple[int, str]]) -> tuple[dict, int]:
    text = "".join(t for _, t in config_lines)
    first_line = config_lines[0][0] if config_lines else 1
    if not text.strip():
        return {}, first_line
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"malformed config JSON: {e.msg}", first_line + e.lineno - 1)
    if not isinstance(obj, dict):
        raise SpecError("config must be a JSON object", first_line)
    return obj, first_line


def _parse_graph(raw_graph, blocks, config_line) -> list[tuple[str, str]]:
    edges = []
    for item in raw_graph:
        if not isinstance(item, str) or "->" not in item:
            raise SpecError(f"graph edge must look like 'A->B', got {item!r}", config_line)
        a, b = (s.strip() for s in item.split("->", 1))
        edges.append((a, b))

    def check_node(tok: str):
        name, _, label = tok.partition(":")
        if name not in blocks:
            raise SpecError(f"unknown block name {name!r} in graph", config_line)
        if label:
            labels = [v.label for v in blocks[name]]
            if label not in labels:
                raise SpecError(
                    f"unknown version {label!r} of block {name!r} in graph", config_line
                )

    adj: dict[str, list[str]] = {}
    indeg: dict[str, int] = {}
    for a, b in edges:
        check_node(a)
        check_node(b)
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, [])
        indeg[b] = indeg.get(b, 0) + 1
        indeg.setdefault(a, 0)

    # cycle check (Kahn)
    queue = [n for n in adj if indeg[n] == 0]
    seen = 0
    deg = dict(indeg)
    while queue:
        n = queue.pop()
        seen += 1
        for m in adj[n]:
            deg[m] -= 1
            if deg[m] == 0:
                queue.append(m)
    if seen != len(adj):
        raise SpecError("cyclic graph", config_line)

    sources = [n for n in adj if indeg[n] == 0]
    # pinned versions of one decision block count as a single source block
    source_blocks = {s.partition(":")[0] for s in sources}
    if len(source_blocks) != 1:
        raise SpecError(
            f"graph must have a unique source block, found {sorted(sources)}", config_line
        )
    return edges


def parse_spec(source: str, filename: str) -> BobaSpec:
    """Parse annotated script text into a validated BobaSpec."""
    raw_versions = _collect_blocks(source)
    config_raw = raw_versions.pop()
    assert config_raw.block == CONFIG_BLOCK
    cfg_obj, cfg_line = _parse_config(config_raw.lines)

    ext = "." + filename.rsplit(".", 1)[-1].lower() if "." in filename else ""
    language = cfg_obj.get("language") or LANGUAGE_BY_EXT.get(ext)
    if language is None:
        raise SpecError(
            f"cannot infer script language from {filename!r}; set 'language' in the config"
        )
    config = Config(
        script_language=language.lower(),
        output_dir=cfg_obj.get("output_dir"),
        dataset_file=cfg_obj.get("dataset"),
        shuffle_column=cfg_obj.get("shuffle_column"),
        sensitivity_method=cfg_obj.get("sensitivity", "ks"),
        before_execute=cfg_obj.get("before_execute"),
        after_execute=cfg_obj.get("after_execute"),
    )
    if config.sensitivity_method not in ("ks", "f"):
        raise SpecError(
            f"sensitivity method must be 'ks' or 'f', got {config.sensitivity_method!r}",
            cfg_line,
        )

    # Assemble blocks, keeping declaration order.
    blocks: dict[str, list[BlockVersion]] = {}
    inline_defs: dict[str, tuple[list[str], int]] = {}
    uses: list[tuple[str, int]] = []
    for raw in raw_versions:
        segments, defs, vuses = _scan_segments(raw)
        for name, (options, line) in defs.items():
            if name in inline_defs:
                raise SpecError(f"duplicate decision name {name!r}", line)
            inline_defs[name] = (options, line)
        uses.extend(vuses)
        versions = blocks.setdefault(raw.block, [])
        if raw.label is None:
            if versions:
                raise SpecError(
                    f"block {raw.block!r} declared more than once", raw.start_line
                )
        else:
            if any(v.label is None for v in versions):
                raise SpecError(
                    f"block {raw.block!r} mixes plain and versioned markers",
                    raw.start_line,
                )
            if raw.label in [v.label for v in versions]:
                raise SpecError(
                    f"duplicate version {raw.label!r} of block {raw.block!r}",
                    raw.start_line,
                )
        versions.append(BlockVersion(raw.label, segments))

    version_starts = {
        (raw.block, raw.label): raw.start_line for raw in raw_versions
    }

    # Decisions: config-declared placeholders, inline placeholders, decision blocks.
    decisions: list[Decision] = []
    names: set[str] = set()
    warnings: list[str] = []

    def add_decision(d: Decision):
        if d.name in names:
            raise SpecError(f"duplicate decision name {d.name!r}", d.declared_at)
        names.add(d.name)
        decisions.append(d)

    # Temporal order is by the source line where a decision first appears.
    first_use: dict[str, int] = {}
    for name, line in uses:
        first_use.setdefault(name, line)

    for entry in cfg_obj.get("decisions", []):
        if not isinstance(entry, dict) or "var" not in entry or "options" not in entry:
            raise SpecError(
                "config decision entries need 'var' and 'options'", cfg_line
            )
        options = [_option_text(v) for v in entry["options"]]
        add_decision(
            Decision(entry["var"], "placeholder", options, cfg_line,
                     first_use.get(entry["var"], 10**9))
        )
        if entry["var"] not in first_use:
            warnings.append(f"decision {entry['var']!r} is declared but never used")

    for name, (options, line) in inline_defs.items():
        add_decision(Decision(name, "placeholder", options, line, first_use[name]))

    block_first_seen = {raw.block: raw.start_line for raw in reversed(raw_versions)}
    for bname, versions in blocks.items():
        labels = [v.label for v in versions if v.label is not None]
        if not labels:
            continue
        if len(labels) < 2:
            raise SpecError(
                f"decision block {bname!r} has only one version",
                version_starts[(bname, labels[0])],
            )
        add_decision(
            Decision(bname, "block", labels, block_first_seen[bname],
                     block_first_seen[bname])
        )

    # Validate placeholder uses and option cardinality.
    for name, line in uses:
        if name not in names:
            raise SpecError(f"undefined placeholder {name!r}", line)
    for d in decisions:
        if len(d.options) < 2:
            raise SpecError(
                f"decision {d.name!r} needs at least 2 options", d.declared_at
            )
        if len(set(d.options)) != len(d.options):
            raise SpecError(
                f"decision {d.name!r} has duplicate options", d.declared_at
            )

    # Constraints.
    constraints: list[Constraint] = []
    for entry in cfg_obj.get("constraints", []):
        if not isinstance(entry, dict):
            raise SpecError(f"constraint must be an object, got {entry!r}", cfg_line)
        if "link" in entry:
            members = entry["link"]
            if not isinstance(members, list) or len(members) < 2:
                raise SpecError("link constraint needs at least 2 decisions", cfg_line)
            for m in members:
                if m not in names:
                    raise SpecError(f"link references unknown decision {m!r}", cfg_line)
            card = {len(next(d for d in decisions if d.name == m).options) for m in members}
            if len(card) != 1:
                raise SpecError(
                    f"linked decisions {members} must have equal option counts", cfg_line
                )
            constraints.append(Constraint("link", members=list(members), line=cfg_line))
            continue
        if "decision" not in entry or "condition" not in entry:
            raise SpecError(
                "procedural constraint needs 'decision' and 'condition'", cfg_line
            )
        target = entry["decision"]
        if target not in names:
            raise SpecError(f"constraint targets unknown decision {target!r}", cfg_line)
        option = entry.get("option")
        if option is not None:
            option = _option_text(option)
            d = next(d for d in decisions if d.name == target)
            if option not in d.options:
                raise SpecError(
                    f"constraint targets unknown option {option!r} of {target!r}",
                    cfg_line,
                )
        condition = parse_constraint_expr(str(entry["condition"]))
        for ref in referenced_decisions(condition):
            if ref not in names:
                raise SpecError(
                    f"constraint condition references unknown decision {ref!r}", cfg_line
                )
        constraints.append(
            Constraint("procedural", decision=target, option=option,
                       condition=condition, line=cfg_line)
        )

    graph = None
    if cfg_obj.get("graph"):
        graph = _parse_graph(cfg_obj["graph"], blocks, cfg_line)

    spec = BobaSpec(
        blocks=blocks,
        decisions=decisions,
        constraints=constraints,
        graph=graph,
        config=config,
        filename=filename,
    )
    spec.warnings = warnings  # type: ignore[attr-defined]
    return spec


def version_source(version: BlockVersion) -> str:
    """Re-serialize one block version from its segments (byte-preserving)."""
    return "".join(seg.raw for seg in version.segments)
