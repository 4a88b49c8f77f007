"""Local HTTP server feeding the browser explorer.

Serves the artifacts of one output directory as JSON. The session is
process-scoped: once inference is entered, every exploration endpoint
answers 423 (locked) until the server restarts. Restarting resets the lock;
it is a workflow stage, not persistent state.
"""

from __future__ import annotations

import json
import math
import os
import threading
from typing import Optional

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from . import stats
from .errors import RunError
from .results import UniverseResult, load_null, load_results, load_summary

REQUIRED_ARTIFACTS = ("results.csv", "summary.csv", "overview.json")


class Session:
    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.prune_cutoff: Optional[float] = None
        self.inference_entered = False


def _clean(x):
    """JSON-safe floats (NaN/inf -> None/strings)."""
    if isinstance(x, float):
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(v) for v in x]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, (np.floating, np.integer)):
        return _clean(float(x))
    return x


def create_app(out_dir: str, ui_dir: Optional[str] = None) -> FastAPI:
    missing = [a for a in REQUIRED_ARTIFACTS if not os.path.exists(os.path.join(out_dir, a))]
    if missing:
        raise RunError(f"missing artifacts in {out_dir!r}: {', '.join(missing)}")

    results = load_results(out_dir)
    by_uid = {r.uid: r for r in results}
    decision_names, assignments = load_summary(out_dir)
    with open(os.path.join(out_dir, "overview.json"), encoding="utf-8") as f:
        overview = json.load(f)
    spec_decisions = {d["name"]: d["options"] for d in overview["decisions"]}
    default_method = overview.get("sensitivity_method", "ks")

    session = Session()
    app = FastAPI(title="multiverse explorer")
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"https?://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def estimates_ok() -> dict[int, float]:
        return {r.uid: r.estimate for r in results if r.status == "ok" and r.estimate is not None}

    def guard():
        if session.inference_entered:
            raise HTTPException(
                status_code=423,
                detail="session is in the inference stage; exploration is locked",
            )

    def sensitivities(method: str):
        if method not in ("ks", "f"):
            raise HTTPException(status_code=400, detail="method must be 'ks' or 'f'")
        return stats.sensitivity_report(
            spec_decisions, assignments, estimates_ok(), method=method
        )

    @app.get("/api/graph")
    def api_graph(method: Optional[str] = Query(default=None)):
        guard()
        sens = sensitivities(method or default_method)
        scores = {s.name: s.score for s in sens}
        finite = [s for s in scores.values() if s is not None and math.isfinite(s)]
        nodes = [
            {
                "name": d["name"],
                "kind": d["kind"],
                "options": d["options"],
                "cardinality": len(d["options"]),
                "sensitivity": scores.get(d["name"]),
            }
            for d in overview["decisions"]
        ]
        return _clean(
            {
                "nodes": nodes,
                "temporal_edges": overview["temporal_edges"],
                "dependency_edges": overview["dependency_edges"],
                "score_min": min(finite) if finite else None,
                "score_max": max(finite) if finite else None,
                "method": method or default_method,
            }
        )

    @app.get("/api/outcomes")
    def api_outcomes():
        guard()
        return _clean(
            [
                {
                    "uid": r.uid,
                    "estimate": r.estimate,
                    "p": r.p_value,
                    "fit": r.fit,
                    "status": r.status,
                }
                for r in results
            ]
        )

    def _observed_density(uids: list[int], weights=None) -> dict:
        draws = [by_uid[u].draws for u in uids if by_uid[u].draws]
        if draws:
            if weights is not None:
                weights = [w for u, w in zip(uids, weights) if by_uid[u].draws]
            curve = stats.aggregate_density(draws, weights=weights)
        else:
            ests = [by_uid[u].estimate for u in uids if by_uid[u].estimate is not None]
            if not ests:
                raise HTTPException(status_code=400, detail="no estimates to aggregate")
            curve = stats.aggregate_density([ests])
        return {
            "grid": curve.grid.tolist(),
            "values": curve.values.tolist(),
            "scale_factor": curve.scale_factor,
        }

    @app.get("/api/density")
    def api_density(source: str = Query(default="draws")):
        guard()
        if source == "draws":
            draws = [r.draws for r in results if r.draws]
            if not draws:
                raise HTTPException(
                    status_code=400,
                    detail="no universe produced draws; retry with "
                    "/api/density?source=estimates (point-estimate-only mode)",
                )
            curve = stats.aggregate_density(draws)
        elif source == "estimates":
            ests = list(estimates_ok().values())
            if not ests:
                raise HTTPException(status_code=400, detail="no estimates available")
            curve = stats.aggregate_density([ests])
        else:
            raise HTTPException(status_code=400, detail="source must be draws|estimates")
        return _clean(
            {
                "grid": curve.grid.tolist(),
                "values": curve.values.tolist(),
                "scale_factor": curve.scale_factor,
            }
        )

    @app.get("/api/curves")
    def api_curves(kind: str = Query(default="pdf")):
        guard()
        if kind not in ("pdf", "cdf"):
            raise HTTPException(status_code=400, detail="kind must be pdf|cdf")
        curves = []
        for r in results:
            if not r.draws:
                continue
            curve = stats.universe_pdf(r.draws)
            values = curve.values
            if kind == "cdf":
                dx = np.diff(curve.grid)
                cum = np.concatenate(
                    [[0.0], np.cumsum((values[1:] + values[:-1]) / 2 * dx)]
                )
                values = cum / cum[-1] if cum[-1] > 0 else cum
            curves.append(
                {"uid": r.uid, "grid": curve.grid.tolist(), "values": values.tolist()}
            )
        strip = [
            {"uid": r.uid, "estimate": r.estimate}
            for r in results
            if r.estimate is not None
        ]
        return _clean({"kind": kind, "curves": curves, "estimates": strip})

    @app.get("/api/facet")
    def api_facet(d1: str, d2: Optional[str] = Query(default=None)):
        guard()
        for d in (d1, d2):
            if d is not None and d not in spec_decisions:
                raise HTTPException(status_code=400, detail=f"unknown decision {d!r}")
        groups: dict[tuple, dict] = {}
        for uid, est in estimates_ok().items():
            a = assignments.get(uid, {})
            key = (a.get(d1, ""),) + ((a.get(d2, ""),) if d2 else ())
            g = groups.setdefault(key, {"uids": [], "estimates": []})
            g["uids"].append(uid)
            g["estimates"].append(est)
        out = []
        for key in sorted(groups):
            entry = {"key": {d1: key[0]}, **groups[key]}
            if d2:
                entry["key"][d2] = key[1]
            out.append(entry)
        return _clean({"d1": d1, "d2": d2, "groups": out})

    @app.get("/api/universe/{uid}")
    def api_universe(uid: int, k: int = Query(default=5), sample_limit: int = 200):
        guard()
        r = by_uid.get(uid)
        if r is None:
            raise HTTPException(status_code=404, detail=f"no universe {uid}")
        observed, predicted = r.observed, r.predictions
        sampled = False
        if len(observed) > sample_limit:
            observed = stats.quantile_sample(observed, sample_limit)
            predicted = stats.quantile_sample(predicted, sample_limit)
            sampled = True
        similar = (
            stats.similar_universes(uid, results, k) if r.estimate is not None else []
        )
        return _clean(
            {
                "uid": uid,
                "estimate": r.estimate,
                "p": r.p_value,
                "fit": r.fit,
                "status": r.status,
                "assignment": assignments.get(uid, {}),
                "observed": observed,
                "predicted": predicted,
                "quantile_sampled": sampled,
                "has_draws": bool(r.draws),
                "similar": similar,
            }
        )

    @app.get("/api/sensitivity")
    def api_sensitivity(method: Optional[str] = Query(default=None)):
        guard()
        sens = sensitivities(method or default_method)
        return _clean(
            [
                {
                    "name": s.name,
                    "method": s.method,
                    "score": s.score,
                    "group_sizes": s.group_sizes,
                }
                for s in sens
            ]
        )

    @app.post("/api/brush")
    def api_brush(payload: dict = Body(...)):
        guard()
        try:
            lo, hi = float(payload["lo"]), float(payload["hi"])
        except (KeyError, TypeError, ValueError):
            raise HTTPException(status_code=400, detail="body needs numeric lo and hi")
        facet = payload.get("facet") or {}
        subset = []
        for uid, est in estimates_ok().items():
            if not (lo <= est <= hi):
                continue
            a = assignments.get(uid, {})
            if all(a.get(d) == opt for d, opt in facet.items()):
                subset.append(uid)
        if not subset:
            return {"uids": [], "ratios": []}
        ratios = stats.option_ratios(subset, spec_decisions, assignments)
        return _clean(
            {
                "uids": sorted(subset),
                "ratios": [
                    {
                        "decision": x.decision,
                        "option": x.option,
                        "fraction": x.fraction,
                        "baseline": x.baseline,
                        "dominant": x.dominant,
                    }
                    for x in ratios
                ],
            }
        )

    @app.post("/api/prune")
    def api_prune(payload: dict = Body(...)):
        guard()
        try:
            cutoff = float(payload["cutoff"])
        except (KeyError, TypeError, ValueError):
            raise HTTPException(status_code=400, detail="body needs a numeric cutoff")
        if cutoff < 0:
            raise HTTPException(status_code=400, detail="cutoff must be >= 0")
        pruned = stats.prune(results, cutoff)
        with session.lock:
            session.prune_cutoff = cutoff
        return _clean(
            {
                "cutoff": cutoff,
                "kept": pruned.kept,
                "missing_fit": pruned.missing_fit,
                "empty": pruned.empty,
            }
        )

    @app.post("/api/inference")
    def api_inference(payload: dict = Body(...)):
        mode = payload.get("mode", "simple")
        weighting = payload.get("weighting", "none")
        if mode not in ("null", "simple"):
            raise HTTPException(status_code=400, detail="mode must be null|simple")
        if weighting not in ("stacking", "prune", "none"):
            raise HTTPException(
                status_code=400, detail="weighting must be stacking|prune|none"
            )
        with session.lock:
            if session.inference_entered:
                raise HTTPException(status_code=409, detail="inference already entered")
            cutoff = session.prune_cutoff
            # decide everything below before committing the lock
        observed = estimates_ok()

        included = sorted(observed)
        weights = None
        stacking_info = None
        if weighting == "prune":
            if cutoff is None:
                raise HTTPException(
                    status_code=400,
                    detail="weighting=prune requires a cutoff; POST /api/prune first",
                )
            pruned = stats.prune([by_uid[u] for u in included], cutoff)
            if pruned.empty:
                raise HTTPException(status_code=400, detail="empty multiverse after pruning")
            included = pruned.kept
        elif weighting == "stacking":
            with_lpd = [u for u in included if by_uid[u].lpd]
            if not with_lpd:
                raise HTTPException(
                    status_code=400,
                    detail="weighting=stacking requires lpd sidecars from the universes",
                )
            lengths = {len(by_uid[u].lpd) for u in with_lpd}
            if len(lengths) != 1:
                raise HTTPException(
                    status_code=400, detail="lpd sidecars differ in length across universes"
                )
            lpd = np.column_stack([by_uid[u].lpd for u in with_lpd])
            sw = stats.stacking_weights(lpd)
            included = with_lpd
            weights = sw.weights.tolist()
            stacking_info = {"weights": dict(zip(map(str, with_lpd), weights)),
                             "objective": sw.objective}

        bundle: dict = {
            "mode": mode,
            "weighting": weighting,
            "included": included,
            "observed_density": _observed_density(included, weights),
            "stacking": stacking_info,
        }
        obs_vals = np.array([observed[u] for u in included])
        bundle["observed_mean"] = float(obs_vals.mean())
        bundle["observed_spread"] = float(obs_vals.std(ddof=0))

        if mode == "null":
            try:
                null_by_uid = load_null(out_dir)
            except RunError:
                raise HTTPException(
                    status_code=400,
                    detail="no null.csv; run the multiverse with `run --null N` first",
                )
            intervals, outside, skipped = stats.null_intervals(
                null_by_uid, {u: observed[u] for u in included}
            )
            all_null = [v for vs in null_by_uid.values() for v in vs]
            null_curve = stats.aggregate_density([all_null])
            null_mean = float(np.mean(all_null))
            bundle.update(
                {
                    "null_density": {
                        "grid": null_curve.grid.tolist(),
                        "values": null_curve.values.tolist(),
                        "scale_factor": null_curve.scale_factor,
                    },
                    "null_mean": null_mean,
                    "mean_distance": abs(bundle["observed_mean"] - null_mean),
                    "spread": float(np.std(all_null + obs_vals.tolist())),
                    "intervals": [
                        {
                            "uid": it.uid,
                            "lo": it.lo,
                            "hi": it.hi,
                            "estimate": it.observed,
                            "outside": it.outside,
                        }
                        for it in intervals
                    ],
                    "outside_count": outside,
                    "skipped": skipped,
                }
            )
        else:
            bundle["null_line"] = 0.0

        with session.lock:
            if session.inference_entered:
                raise HTTPException(status_code=409, detail="inference already entered")
            session.inference_entered = True
        return _clean(bundle)

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(out_dir: str, port: int = 8080, ui_dir: Optional[str] = None) -> None:
    import uvicorn

    app = create_app(out_dir, ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=port)
