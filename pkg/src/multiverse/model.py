"""Core data model for a parsed multiverse specification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .condexpr import Expr


@dataclass
class TemplateSegment:
    """One piece of a block version: literal source text or a placeholder use.

    ``raw`` keeps the original token bytes (e.g. an inline placeholder
    definition) so that re-serializing the segments reproduces the source.
    """

    kind: str  # "text" | "placeholder"
    text: str  # literal text, or the placeholder identifier
    raw: str
    line: int


@dataclass
class BlockVersion:
    label: Optional[str]  # None for a normal block
    segments: list[TemplateSegment] = field(default_factory=list)


@dataclass
class Decision:
    name: str
    kind: str  # "placeholder" | "block"
    options: list[str]
    declared_at: int  # source line
    first_use: int  # ordinal of first use in the script, for temporal order


@dataclass
class Constraint:
    kind: str  # "procedural" | "link"
    decision: Optional[str] = None  # procedural: target decision
    option: Optional[str] = None  # procedural: target option, or None
    condition: Optional[Expr] = None  # procedural only
    members: list[str] = field(default_factory=list)  # link only
    line: int = 0


@dataclass
class Config:
    script_language: Optional[str] = None
    output_dir: Optional[str] = None
    dataset_file: Optional[str] = None
    shuffle_column: Optional[str] = None
    sensitivity_method: str = "ks"
    before_execute: Optional[str] = None
    after_execute: Optional[str] = None


@dataclass
class BobaSpec:
    """A validated multiverse specification.

    ``blocks`` preserves declaration order; ``graph`` edges reference block
    names or pinned versions written as ``name:label``.
    """

    blocks: dict[str, list[BlockVersion]]
    decisions: list[Decision]
    constraints: list[Constraint]
    graph: Optional[list[tuple[str, str]]]
    config: Config
    filename: str = ""

    @property
    def segments(self) -> list[TemplateSegment]:
        out = []
        for versions in self.blocks.values():
            for v in versions:
                out.extend(v.segments)
        return out

    def decision(self, name: str) -> Decision:
        for d in self.decisions:
            if d.name == name:
                return d
        raise KeyError(name)

    def decision_names(self) -> list[str]:
        return [d.name for d in self.decisions]


@dataclass
class Universe:
    """One analytic path: which option every active decision took."""

    uid: int
    # decision name -> (option index, option value); only active decisions
    assignment: dict[str, tuple[int, str]]
    block_path: list[tuple[str, Optional[str]]]  # (block, version label)
