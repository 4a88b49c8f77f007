"""Materialize universes as standalone script files.

Substitution is purely textual: option values are inserted verbatim, literal
source text passes through byte for byte, and marker/config lines are gone
because the parser never put them in segments.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .enumerator import SummaryTable, build_summary
from .errors import RunError, SpecError
from .model import BobaSpec, Universe
from .statsgraph import decision_graph_structure


def synthesize(spec: BobaSpec, universe: Universe) -> str:
    """Script text for one universe: blocks along its path, one version each."""
    parts: list[str] = []
    for bname, label in universe.block_path:
        versions = spec.blocks[bname]
        version = next((v for v in versions if v.label == label), None)
        if version is None:
            raise RunError(
                f"universe {universe.uid}: block {bname!r} has no version {label!r}"
            )
        for seg in version.segments:
            if seg.kind == "text":
                parts.append(seg.text)
            else:
                if seg.text not in universe.assignment:
                    raise RunError(
                        f"unresolved placeholder {seg.text!r} in universe "
                        f"{universe.uid}"
                    )
                parts.append(universe.assignment[seg.text][1])
    return "".join(parts)


@dataclass
class Manifest:
    out_dir: str
    language: str
    extension: str
    uids: list[int]
    script_paths: dict[int, str]  # uid -> path relative to out_dir
    dataset_file: str | None
    shuffle_column: str | None
    before_execute: str | None
    after_execute: str | None

    def to_json(self) -> dict:
        return {
            "language": self.language,
            "extension": self.extension,
            "uids": self.uids,
            "scripts": {str(k): v for k, v in self.script_paths.items()},
            "dataset": self.dataset_file,
            "shuffle_column": self.shuffle_column,
            "before_execute": self.before_execute,
            "after_execute": self.after_execute,
        }

    @classmethod
    def from_json(cls, out_dir: str, obj: dict) -> "Manifest":
        return cls(
            out_dir=out_dir,
            language=obj["language"],
            extension=obj["extension"],
            uids=list(obj["uids"]),
            script_paths={int(k): v for k, v in obj["scripts"].items()},
            dataset_file=obj.get("dataset"),
            shuffle_column=obj.get("shuffle_column"),
            before_execute=obj.get("before_execute"),
            after_execute=obj.get("after_execute"),
        )


def load_manifest(out_dir: str) -> Manifest:
    path = os.path.join(out_dir, "manifest.json")
    if not os.path.exists(path):
        raise RunError(f"no manifest.json in {out_dir!r}; run compile first")
    with open(path, encoding="utf-8") as f:
        return Manifest.from_json(out_dir, json.load(f))


def write_summary_csv(table: SummaryTable, path: str) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(table.columns)
        w.writerows(table.rows)


def write_universes(
    spec: BobaSpec,
    universes: list[Universe],
    out_dir: str,
    force: bool = False,
) -> Manifest:
    """Write ``code/universe_<id>.<ext>``, ``summary.csv`` and ``overview.json``.

    Refuses a non-empty ``out_dir`` unless ``force`` is set.
    """
    if os.path.isdir(out_dir) and os.listdir(out_dir) and not force:
        raise RunError(
            f"output directory {out_dir!r} is not empty (use force to overwrite)"
        )
    code_dir = os.path.join(out_dir, "code")
    os.makedirs(code_dir, exist_ok=True)

    ext = spec.filename.rsplit(".", 1)[-1] if "." in spec.filename else "txt"
    width = len(str(max(u.uid for u in universes)))
    script_paths: dict[int, str] = {}
    for u in universes:
        name = f"universe_{u.uid:0{width}d}.{ext}"
        rel = os.path.join("code", name)
        with open(os.path.join(out_dir, rel), "w", encoding="utf-8", newline="") as f:
            f.write(synthesize(spec, u))
        script_paths[u.uid] = rel

    write_summary_csv(build_summary(spec, universes), os.path.join(out_dir, "summary.csv"))

    overview = decision_graph_structure(spec)
    overview["sensitivity_method"] = spec.config.sensitivity_method
    with open(os.path.join(out_dir, "overview.json"), "w", encoding="utf-8") as f:
        json.dump(overview, f, indent=2)
        f.write("\n")

    manifest = Manifest(
        out_dir=out_dir,
        language=spec.config.script_language or "",
        extension=ext,
        uids=[u.uid for u in universes],
        script_paths=script_paths,
        dataset_file=spec.config.dataset_file,
        shuffle_column=spec.config.shuffle_column,
        before_execute=spec.config.before_execute,
        after_execute=spec.config.after_execute,
    )
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest.to_json(), f, indent=2)
        f.write("\n")
    return manifest
