"""Decision-graph structure: temporal order and procedural dependencies.

Shared by the compiler (which persists it as ``overview.json``) and the
stats engine (which decorates it with sensitivity scores).
"""

from __future__ import annotations

from . import condexpr
from .model import BobaSpec


def _blocks_using(spec: BobaSpec, placeholder: str) -> list[tuple[str, str | None]]:
    """(block, version label) pairs whose segments use the placeholder."""
    out = []
    for bname, versions in spec.blocks.items():
        for v in versions:
            if any(s.kind == "placeholder" and s.text == placeholder for s in v.segments):
                out.append((bname, v.label))
    return out


def _graph_descendants(graph: list[tuple[str, str]]) -> dict[str, set[str]]:
    """Descendant block names per node token (``A`` or ``A:label``)."""
    adj: dict[str, list[str]] = {}
    for a, b in graph:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, [])

    desc: dict[str, set[str]] = {}

    def walk(node: str) -> set[str]:
        if node in desc:
            return desc[node]
        acc: set[str] = set()
        for child in adj.get(node, []):
            acc.add(child.partition(":")[0])
            acc |= walk(child)
        desc[node] = acc
        return acc

    for node in list(adj):
        walk(node)
    return desc


def dependency_edges(spec: BobaSpec) -> list[tuple[str, str]]:
    """Edges A -> B meaning decision B only exists given a choice of A."""
    edges: list[tuple[str, str]] = []

    def add(a: str, b: str):
        if a != b and (a, b) not in edges:
            edges.append((a, b))

    # 1. B's constraint condition references A.
    for c in spec.constraints:
        if c.kind == "procedural" and c.condition is not None:
            for ref in sorted(condexpr.referenced_decisions(c.condition)):
                add(ref, c.decision)

    block_decisions = {d.name: d for d in spec.decisions if d.kind == "block"}

    # 2. A placeholder used only inside some versions of a decision block.
    for d in spec.decisions:
        if d.kind != "placeholder":
            continue
        used_in = _blocks_using(spec, d.name)
        for bname, dec in block_decisions.items():
            labels_using = {lab for (bn, lab) in used_in if bn == bname and lab is not None}
            only_here = all(bn == bname for bn, _ in used_in)
            if labels_using and only_here and labels_using != set(dec.options):
                add(bname, d.name)

    # 3. B's block descends from a version-pinned graph node of A.
    if spec.graph:
        desc = _graph_descendants(spec.graph)
        for node, below in desc.items():
            name, _, label = node.partition(":")
            if not label or name not in block_decisions:
                continue
            for d in spec.decisions:
                if d.kind == "block":
                    if d.name in below:
                        add(name, d.name)
                else:
                    if any(bn in below for bn, _ in _blocks_using(spec, d.name)):
                        add(name, d.name)
    return edges


def temporal_edges(spec: BobaSpec) -> list[tuple[str, str]]:
    """Chain decisions in the order they are first used in the script."""
    ordered = sorted(spec.decisions, key=lambda d: (d.first_use, d.name))
    return [(a.name, b.name) for a, b in zip(ordered, ordered[1:])]


def decision_graph_structure(spec: BobaSpec) -> dict:
    return {
        "decisions": [
            {"name": d.name, "kind": d.kind, "options": d.options}
            for d in spec.decisions
        ],
        "temporal_edges": [list(e) for e in temporal_edges(spec)],
        "dependency_edges": [list(e) for e in dependency_edges(spec)],
    }
