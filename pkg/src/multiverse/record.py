"""Output-contract helper for Python universe scripts.

A universe script can call :func:`save` once to emit everything the merger
and the visualizer understand. The universe id comes from the
``BOBA_UNIVERSE_ID`` env var set by the runner.

    from multiverse.record import save
    save(estimate=coef, p=pval, fit=nrmse, draws=samples)
"""

from __future__ import annotations

import csv
import os
from typing import Iterable, Optional


def universe_id() -> int:
    return int(os.environ["BOBA_UNIVERSE_ID"])


def data_file() -> str:
    return os.environ["BOBA_DATA_FILE"]


def save(
    estimate: float,
    p: Optional[float] = None,
    fit: Optional[float] = None,
    draws: Optional[Iterable[float]] = None,
    observed: Optional[Iterable[float]] = None,
    predictions: Optional[Iterable[float]] = None,
    lpd: Optional[Iterable[float]] = None,
    out_dir: str = "output",
) -> None:
    uid = universe_id()
    os.makedirs(out_dir, exist_ok=True)

    with open(os.path.join(out_dir, f"estimate_{uid}.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["uid", "estimate", "p", "fit"])
        w.writerow([uid, repr(float(estimate)),
                    "" if p is None else repr(float(p)),
                    "" if fit is None else repr(float(fit))])

    if draws is not None:
        with open(os.path.join(out_dir, f"draws_{uid}.csv"), "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["draw"])
            for d in draws:
                w.writerow([repr(float(d))])

    if observed is not None or predictions is not None:
        obs = list(observed or [])
        pred = list(predictions or [])
        if len(obs) != len(pred):
            raise ValueError("observed and predictions must have equal length")
        with open(os.path.join(out_dir, f"pred_{uid}.csv"), "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["observed", "predicted"])
            for o, pr in zip(obs, pred):
                w.writerow([repr(float(o)), repr(float(pr))])

    if lpd is not None:
        with open(os.path.join(out_dir, f"lpd_{uid}.csv"), "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["lpd"])
            for v in lpd:
                w.writerow([repr(float(v))])
