"""Execute universe scripts in parallel with fault isolation.

Contract with universe scripts:

* the dataset path arrives in the env var ``BOBA_DATA_FILE`` (the original
  file for observed runs, a shuffled copy for null runs) and the universe id
  in ``BOBA_UNIVERSE_ID``;
* each script writes ``output/estimate_<uid>.csv`` with header
  ``uid,estimate,p,fit`` (``p`` and ``fit`` may be empty), plus optional
  sidecars ``draws_<uid>.csv`` (column ``draw``), ``pred_<uid>.csv``
  (columns ``observed,predicted``) and ``lpd_<uid>.csv`` (column ``lpd``),
  all relative to its working directory.

A failing or timed-out universe never affects the others; merge keeps a row
for it with empty metric cells.
"""

from __future__ import annotations

import contextlib
import csv
import io
import json
import math
import os
import shutil
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import RunError
from .synthesizer import Manifest

INTERPRETERS = {"python": None, "r": "Rscript"}  # None -> current interpreter


@dataclass
class RunReport:
    attempted: int = 0
    succeeded: int = 0
    failed: int = 0
    wall_time: float = 0.0
    statuses: dict[int, str] = field(default_factory=dict)  # uid -> ok|failed|timeout


def interpreter_command(language: str) -> list[str]:
    if language not in INTERPRETERS:
        raise RunError(f"unsupported script language {language!r}")
    exe = INTERPRETERS[language]
    if exe is None:
        return [sys.executable]
    found = shutil.which(exe)
    if found is None:
        raise RunError(f"interpreter {exe!r} for language {language!r} not on PATH")
    return [found]


@contextlib.contextmanager
def _run_lock(out_dir: str):
    path = os.path.join(out_dir, ".lock")
    try:
        fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise RunError(
            f"another run is in progress in {out_dir!r} (stale? remove .lock)"
        ) from None
    try:
        os.close(fd)
        yield
    finally:
        with contextlib.suppress(FileNotFoundError):
            os.remove(path)


def _run_hook(command: str | None, cwd: str):
    if command:
        subprocess.run(command, shell=True, cwd=cwd, check=True)


def _execute(
    manifest: Manifest,
    workdir: str,
    parallelism: int,
    timeout: float | None,
    data_file: str | None,
    skip_existing: bool = False,
) -> RunReport:
    cmd = interpreter_command(manifest.language)
    os.makedirs(os.path.join(workdir, "output"), exist_ok=True)
    logs_dir = os.path.join(workdir, "logs")
    os.makedirs(logs_dir, exist_ok=True)

    env = dict(os.environ)
    if data_file is not None:
        env["BOBA_DATA_FILE"] = os.path.abspath(data_file)

    def run_one(uid: int) -> tuple[int, str]:
        out_csv = os.path.join(workdir, "output", f"estimate_{uid}.csv")
        if skip_existing and os.path.exists(out_csv):
            return uid, "ok"
        script = os.path.abspath(os.path.join(manifest.out_dir, manifest.script_paths[uid]))
        log_path = os.path.join(logs_dir, f"universe_{uid}.log")
        uenv = dict(env)
        uenv["BOBA_UNIVERSE_ID"] = str(uid)
        with open(log_path, "w", encoding="utf-8") as log:
            try:
                proc = subprocess.run(
                    cmd + [script],
                    cwd=workdir,
                    stdout=log,
                    stderr=subprocess.STDOUT,
                    timeout=timeout,
                    env=uenv,
                )
            except subprocess.TimeoutExpired:
                return uid, "timeout"
        return uid, ("ok" if proc.returncode == 0 else "failed")

    report = RunReport(attempted=len(manifest.uids))
    start = time.monotonic()
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        for uid, status in pool.map(run_one, manifest.uids):
            report.statuses[uid] = status
            if status == "ok":
                report.succeeded += 1
            else:
                report.failed += 1
    report.wall_time = time.monotonic() - start

    with open(os.path.join(workdir, "run_status.json"), "w", encoding="utf-8") as f:
        json.dump({str(k): v for k, v in report.statuses.items()}, f, indent=2)
    return report


def run(
    manifest: Manifest,
    parallelism: int | None = None,
    timeout: float | None = None,
    skip_existing: bool = False,
) -> RunReport:
    """Run every universe script as a child process, at most ``parallelism``
    at a time. Nonzero exits are recorded, not fatal."""
    parallelism = parallelism or os.cpu_count() or 1
    out_dir = manifest.out_dir
    data_file = manifest.dataset_file
    if data_file and not os.path.isabs(data_file):
        data_file = os.path.join(out_dir, data_file)
    with _run_lock(out_dir):
        _run_hook(manifest.before_execute, out_dir)
        report = _execute(
            manifest, out_dir, parallelism, timeout, data_file,
            skip_existing=skip_existing,
        )
        _run_hook(manifest.after_execute, out_dir)
    return report


def _read_estimate_csv(path: str) -> dict[str, str]:
    """Raw column text from one per-universe output file."""
    with open(path, encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if len(rows) < 2:
        raise ValueError("expected a header and one data row")
    header = [h.strip() for h in rows[0]]
    if header[:2] != ["uid", "estimate"]:
        raise ValueError(f"unexpected header {header!r}")
    data = dict(zip(header, rows[1]))
    est = float(data.get("estimate", ""))
    if not math.isfinite(est):
        raise ValueError(f"estimate {data['estimate']!r} is not finite")
    return data


def merge(out_dir: str, workdir: str | None = None) -> str:
    """Concatenate per-universe outputs into ``results.csv`` keyed by uid.

    Deterministic (idempotent): merging twice produces identical bytes.
    Returns the path of the merged file.
    """
    from .synthesizer import load_manifest

    manifest = load_manifest(out_dir)
    workdir = workdir or out_dir
    status_path = os.path.join(workdir, "run_status.json")
    statuses: dict[int, str] = {}
    if os.path.exists(status_path):
        with open(status_path, encoding="utf-8") as f:
            statuses = {int(k): v for k, v in json.load(f).items()}

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["uid", "estimate", "p", "fit", "status"])
    for uid in sorted(manifest.uids):
        status = statuses.get(uid, "ok")
        path = os.path.join(workdir, "output", f"estimate_{uid}.csv")
        row = {"estimate": "", "p": "", "fit": ""}
        if status == "ok":
            try:
                data = _read_estimate_csv(path)
                row.update({k: data.get(k, "") for k in ("estimate", "p", "fit")})
            except (OSError, ValueError, KeyError) as e:
                status = "failed"
                print(f"universe {uid}: bad output ({e})", file=sys.stderr)
        writer.writerow([uid, row["estimate"], row["p"], row["fit"], status])

    results_path = os.path.join(out_dir, "results.csv")
    with open(results_path, "w", encoding="utf-8", newline="") as f:
        f.write(buf.getvalue())
    return results_path


def shuffle_dataset(dataset_file: str, column: str, rng: np.random.Generator) -> str:
    """CSV text with one column's values permuted, everything else verbatim."""
    with open(dataset_file, encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise RunError(f"dataset {dataset_file!r} is empty")
    header = rows[0]
    if column not in header:
        raise RunError(f"shuffle column {column!r} not in dataset header {header}")
    ci = header.index(column)
    values = [r[ci] for r in rows[1:]]
    perm = rng.permutation(len(values))
    for r, j in zip(rows[1:], perm):
        r[ci] = values[j]
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def run_null(
    manifest: Manifest,
    dataset_file: str,
    shuffle_column: str,
    n_shuffles: int,
    seed: int | None = None,
    parallelism: int | None = None,
    timeout: float | None = None,
) -> str:
    """Permutation (null) runs: shuffle the independent-variable column
    ``n_shuffles`` times, rerun the whole multiverse on each copy, and write
    ``null.csv`` (columns ``shuffle,uid,estimate``). Returns its path."""
    if n_shuffles < 1:
        raise RunError("need at least 1 shuffle")
    parallelism = parallelism or os.cpu_count() or 1
    out_dir = manifest.out_dir
    if not os.path.isabs(dataset_file):
        dataset_file = os.path.join(out_dir, dataset_file)
    rng = np.random.default_rng(seed)

    with _run_lock(out_dir):
        _run_hook(manifest.before_execute, out_dir)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["shuffle", "uid", "estimate"])
        for i in range(1, n_shuffles + 1):
            workdir = os.path.join(out_dir, "null", f"shuffle_{i}")
            os.makedirs(workdir, exist_ok=True)
            data_path = os.path.join(workdir, "data.csv")
            with open(data_path, "w", encoding="utf-8", newline="") as f:
                f.write(shuffle_dataset(dataset_file, shuffle_column, rng))
            _execute(manifest, workdir, parallelism, timeout, data_path)
            for uid in sorted(manifest.uids):
                path = os.path.join(workdir, "output", f"estimate_{uid}.csv")
                try:
                    data = _read_estimate_csv(path)
                except (OSError, ValueError):
                    continue
                writer.writerow([i, uid, data["estimate"]])
        _run_hook(manifest.after_execute, out_dir)

    null_path = os.path.join(out_dir, "null.csv")
    with open(null_path, "w", encoding="utf-8", newline="") as f:
        f.write(buf.getvalue())
    return null_path
