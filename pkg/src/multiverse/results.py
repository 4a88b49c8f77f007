"""Typed access to the artifacts a run leaves behind in the output dir."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import Optional

from .errors import RunError


@dataclass
class UniverseResult:
    uid: int
    estimate: Optional[float]
    p_value: Optional[float] = None
    fit: Optional[float] = None
    status: str = "ok"
    draws: list[float] = field(default_factory=list)
    observed: list[float] = field(default_factory=list)
    predictions: list[float] = field(default_factory=list)
    lpd: list[float] = field(default_factory=list)
    log_path: Optional[str] = None


def _opt_float(text: str) -> Optional[float]:
    text = text.strip()
    return float(text) if text else None


def _read_column(path: str, column: str) -> list[float]:
    if not os.path.exists(path):
        return []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        return [float(row[column]) for row in reader]


def load_results(out_dir: str, sidecars: bool = True) -> list[UniverseResult]:
    """Parse ``results.csv`` plus (optionally) the per-universe sidecars."""
    path = os.path.join(out_dir, "results.csv")
    if not os.path.exists(path):
        raise RunError(f"no results.csv in {out_dir!r}; run and merge first")
    results = []
    with open(path, encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            uid = int(row["uid"])
            r = UniverseResult(
                uid=uid,
                estimate=_opt_float(row["estimate"]),
                p_value=_opt_float(row.get("p", "")),
                fit=_opt_float(row.get("fit", "")),
                status=row.get("status", "ok"),
                log_path=os.path.join(out_dir, "logs", f"universe_{uid}.log"),
            )
            if sidecars:
                out = os.path.join(out_dir, "output")
                r.draws = _read_column(os.path.join(out, f"draws_{uid}.csv"), "draw")
                r.lpd = _read_column(os.path.join(out, f"lpd_{uid}.csv"), "lpd")
                pred = os.path.join(out, f"pred_{uid}.csv")
                r.observed = _read_column(pred, "observed")
                r.predictions = _read_column(pred, "predicted")
            results.append(r)
    return results


def load_null(out_dir: str) -> dict[int, list[float]]:
    """Null estimates from ``null.csv``, grouped per universe."""
    path = os.path.join(out_dir, "null.csv")
    if not os.path.exists(path):
        raise RunError(f"no null.csv in {out_dir!r}; run with null shuffles first")
    by_uid: dict[int, list[float]] = {}
    with open(path, encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            by_uid.setdefault(int(row["uid"]), []).append(float(row["estimate"]))
    return by_uid


def load_summary(out_dir: str) -> tuple[list[str], dict[int, dict[str, str]]]:
    """Decision columns of ``summary.csv``: names and per-uid assignments."""
    path = os.path.join(out_dir, "summary.csv")
    if not os.path.exists(path):
        raise RunError(f"no summary.csv in {out_dir!r}; compile first")
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        names = [c for c in reader.fieldnames or [] if c != "uid"]
        rows = {int(row["uid"]): {n: row[n] for n in names} for row in reader}
    return names, rows
