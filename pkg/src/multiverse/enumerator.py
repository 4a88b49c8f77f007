"""Enumerate the constraint-compatible universes of a BobaSpec.

Evaluation order: code-graph paths first, then versions of decision blocks on
the path, then placeholder decisions active on that path, then constraint
filtering. A placeholder that only occurs inside an unchosen block version is
inactive and never multiplies the space.

Procedural constraints come in two flavors:

* attached to an option: when the condition is false, assignments containing
  that option are removed;
* attached to a whole decision: when the condition is false, the decision is
  deactivated in that universe (a deactivated block decision drops out of the
  block path). Universes that end up with identical active assignments and
  paths are collapsed into one.
"""

from __future__ import annotations

import builtins
import itertools
from dataclasses import dataclass

from . import condexpr
from .errors import EmptyMultiverseError, SpecError
from .model import BobaSpec, Universe
from .parser import IMPLICIT_BLOCK

PathNode = tuple[str, str | None]  # (block name, pinned version label or None)


def _node(token: str) -> PathNode:
    name, _, label = token.partition(":")
    return (name, label or None)


def enumerate_paths(
    graph: list[tuple[str, str]] | None, blocks: dict[str, list]
) -> list[list[PathNode]]:
    """All maximal source-to-sink paths, in edge declaration order.

    Without a graph there is a single path visiting every block in file
    order. The implicit leading block, when present but not named in the
    graph, is prepended to every path.
    """
    if not graph:
        return [[(name, None) for name in blocks]]

    adj: dict[str, list[str]] = {}
    indeg: dict[str, int] = {}
    for a, b in graph:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, [])
        indeg[b] = indeg.get(b, 0) + 1
        indeg.setdefault(a, 0)
    sources = [n for n in adj if indeg[n] == 0]
    if len({s.partition(":")[0] for s in sources}) != 1:
        raise SpecError(f"graph must have a unique source block, found {sorted(sources)}")

    paths: list[list[PathNode]] = []

    def walk(node: str, acc: list[str]):
        acc = acc + [node]
        if not adj[node]:
            paths.append([_node(t) for t in acc])
            return
        for child in adj[node]:
            walk(child, acc)

    for source in sources:
        walk(source, [])

    graph_names = {_node(t)[0] for t in adj}
    if IMPLICIT_BLOCK in blocks and IMPLICIT_BLOCK not in graph_names:
        paths = [[(IMPLICIT_BLOCK, None)] + p for p in paths]
    return paths


def _active_placeholders(spec: BobaSpec, block_path: list[PathNode]) -> list[str]:
    """Placeholder decisions with at least one use in the chosen versions."""
    chosen = set(block_path)
    active = []
    for d in spec.decisions:
        if d.kind != "placeholder":
            continue
        for bname, versions in spec.blocks.items():
            for v in versions:
                if (bname, v.label) not in chosen:
                    continue
                if any(s.kind == "placeholder" and s.text == d.name for s in v.segments):
                    active.append(d.name)
                    break
            else:
                continue
            break
    return active


@dataclass
class _Candidate:
    path_idx: int
    assignment: dict[str, tuple[int, str]]
    block_path: list[PathNode]


def _apply_constraints(spec: BobaSpec, cand: _Candidate) -> bool:
    """Filter/deactivate in place; returns False when the universe is excluded."""
    decision_cs = [c for c in spec.constraints
                   if c.kind == "procedural" and c.option is None]
    option_cs = [c for c in spec.constraints
                 if c.kind == "procedural" and c.option is not None]
    links = [c for c in spec.constraints if c.kind == "link"]

    # Deactivation can cascade (a deactivated decision becomes absent in
    # other conditions; a dropped block takes its placeholders with it), so
    # iterate to a fixpoint.
    changed = True
    while changed:
        changed = False
        for c in decision_cs:
            if c.decision in cand.assignment and not condexpr.evaluate(
                c.condition, cand.assignment
            ):
                del cand.assignment[c.decision]
                if spec.decision(c.decision).kind == "block":
                    cand.block_path = [
                        n for n in cand.block_path if n[0] != c.decision
                    ]
                    active = set(_active_placeholders(spec, cand.block_path))
                    for name in list(cand.assignment):
                        if (
                            spec.decision(name).kind == "placeholder"
                            and name not in active
                        ):
                            del cand.assignment[name]
                changed = True

    for c in option_cs:
        if c.decision in cand.assignment and cand.assignment[c.decision][1] == c.option:
            if not condexpr.evaluate(c.condition, cand.assignment):
                return False

    for c in links:
        idxs = {cand.assignment[m][0] for m in c.members if m in cand.assignment}
        if len(idxs) > 1:
            return False
    return True


def enumerate(spec: BobaSpec) -> list[Universe]:  # noqa: A001 - spec'd name
    """All compatible universes, deterministically ordered and 1-indexed."""
    paths = enumerate_paths(spec.graph, spec.blocks)
    block_decisions = {d.name: d for d in spec.decisions if d.kind == "block"}
    placeholder_decisions = {d.name: d for d in spec.decisions if d.kind == "placeholder"}

    candidates: list[_Candidate] = []
    for pidx, path in builtins.enumerate(paths):
        free = []  # (name, options) of unpinned decision blocks on the path
        pinned: dict[str, str] = {}
        for bname, label in path:
            if bname in block_decisions:
                if label is not None:
                    pinned[bname] = label
                else:
                    free.append((bname, block_decisions[bname].options))

        for combo in itertools.product(*(range(len(opts)) for _, opts in free)):
            version_choice = dict(pinned)
            assignment: dict[str, tuple[int, str]] = {}
            for (bname, opts), idx in zip(free, combo):
                version_choice[bname] = opts[idx]
                assignment[bname] = (idx, opts[idx])
            for bname, label in pinned.items():
                assignment[bname] = (block_decisions[bname].options.index(label), label)

            block_path = [
                (bname, version_choice.get(bname)) for bname, _ in path
            ]
            active = _active_placeholders(spec, block_path)
            option_lists = [placeholder_decisions[n].options for n in active]
            for p_combo in itertools.product(*(range(len(o)) for o in option_lists)):
                a = dict(assignment)
                for name, opts, idx in zip(active, option_lists, p_combo):
                    a[name] = (idx, opts[idx])
                candidates.append(_Candidate(pidx, a, list(block_path)))

    kept: list[_Candidate] = []
    seen: set = set()
    for cand in candidates:
        if not _apply_constraints(spec, cand):
            continue
        key = (
            cand.path_idx,
            tuple(cand.block_path),
            tuple(sorted(cand.assignment.items())),
        )
        if key in seen:
            continue
        seen.add(key)
        kept.append(cand)

    if not kept:
        raise EmptyMultiverseError(
            "empty multiverse: all decision combinations were excluded by constraints"
        )

    order = spec.decision_names()

    def sort_key(c: _Candidate):
        return (c.path_idx, [c.assignment.get(n, (-1, ""))[0] for n in order])

    kept.sort(key=sort_key)
    return [
        Universe(uid=i + 1, assignment=c.assignment, block_path=c.block_path)
        for i, c in builtins.enumerate(kept)
    ]


def constraint_warnings(spec: BobaSpec, universes: list[Universe]) -> list[str]:
    """Flag procedural constraints whose condition can never see its target."""
    warnings = []
    for c in spec.constraints:
        if c.kind != "procedural" or c.condition is None:
            continue
        refs = condexpr.referenced_decisions(c.condition)
        together = any(
            c.decision in u.assignment and refs <= set(u.assignment) for u in universes
        )
        if not together:
            warnings.append(
                f"constraint on {c.decision!r} references decisions that are never "
                f"active together with it"
            )
    return warnings


@dataclass
class SummaryTable:
    """One row per universe: its id and the option each decision took."""

    columns: list[str]  # "uid" + decision names
    rows: list[list[str]]


def build_summary(spec: BobaSpec, universes: list[Universe]) -> SummaryTable:
    if not universes:
        raise EmptyMultiverseError("cannot summarize an empty universe list")
    names = spec.decision_names()
    rows = [
        [str(u.uid)] + [u.assignment[n][1] if n in u.assignment else "" for n in names]
        for u in universes
    ]
    return SummaryTable(columns=["uid"] + names, rows=rows)
