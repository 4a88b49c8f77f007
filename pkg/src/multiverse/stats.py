"""Quantitative machinery for interpreting a multiverse collectively.

Sensitivity scores per decision, aggregate outcome densities, option ratios
under brushing, cross-validated model fit (NRMSE), quantile subsampling,
per-universe null intervals, stacking weights, and fit-based pruning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import ks_2samp

from .model import BobaSpec, Universe
from .results import UniverseResult
from .statsgraph import dependency_edges, temporal_edges


# ---------------------------------------------------------------------------
# Sensitivity
# ---------------------------------------------------------------------------

def ks_sensitivity(groups: Sequence[Sequence[float]]) -> Optional[float]:
    """Median two-sample K-S statistic over all option pairs.

    Returns None when fewer than 2 groups have data.
    """
    groups = [np.asarray(g, dtype=float) for g in groups if len(g) > 0]
    if len(groups) < 2:
        return None
    stats = []
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            stats.append(ks_2samp(groups[i], groups[j]).statistic)
    return float(np.median(stats))


def f_sensitivity(groups: Sequence[Sequence[float]]) -> Optional[float]:
    """One-way ANOVA F statistic: between-group MS over within-group MS.

    Zero variance everywhere -> 0; zero within-group variance with a real
    shift -> +inf.
    """
    groups = [np.asarray(g, dtype=float) for g in groups if len(g) > 0]
    if len(groups) < 2:
        return None
    k = len(groups)
    n = sum(len(g) for g in groups)
    if n <= k:
        return None
    grand = np.concatenate(groups).mean()
    ss_between = sum(len(g) * (g.mean() - grand) ** 2 for g in groups)
    ss_within = sum(((g - g.mean()) ** 2).sum() for g in groups)
    ms_between = ss_between / (k - 1)
    ms_within = ss_within / (n - k)
    if ms_within == 0:
        return 0.0 if ms_between == 0 else math.inf
    return float(ms_between / ms_within)


@dataclass
class DecisionSensitivity:
    name: str
    method: str  # "ks" | "f"
    score: Optional[float]
    group_sizes: dict[str, int]


def sensitivity_report(
    spec_decisions: dict[str, list[str]],
    assignments: dict[int, dict[str, str]],
    estimates: dict[int, float],
    method: str = "ks",
) -> list[DecisionSensitivity]:
    """Per-decision sensitivity over universes with an estimate.

    ``spec_decisions`` maps decision name -> option list; ``assignments``
    maps uid -> {decision: option or ""}.
    """
    fn = {"ks": ks_sensitivity, "f": f_sensitivity}[method]
    out = []
    for name, options in spec_decisions.items():
        groups = {opt: [] for opt in options}
        for uid, est in estimates.items():
            opt = assignments.get(uid, {}).get(name, "")
            if opt in groups:
                groups[opt].append(est)
        score = fn(list(groups.values()))
        out.append(
            DecisionSensitivity(
                name=name,
                method=method,
                score=score,
                group_sizes={o: len(g) for o, g in groups.items()},
            )
        )
    return out


# ---------------------------------------------------------------------------
# Density aggregation
# ---------------------------------------------------------------------------

@dataclass
class DensityCurve:
    grid: np.ndarray
    values: np.ndarray
    scale_factor: float


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(sd, IQR/1.34) * n^(-1/5), with fallbacks for degenerate data."""
    n = len(values)
    sd = float(np.std(values, ddof=1)) if n > 1 else 0.0
    iqr = float(np.subtract(*np.percentile(values, [75, 25])))
    spread = min(x for x in (sd, iqr / 1.34) if x > 0) if (sd > 0 or iqr > 0) else 0.0
    if spread == 0.0:
        # all draws identical: a narrow kernel around the single value
        scale = abs(float(values[0])) if values[0] != 0 else 1.0
        return 1e-3 * scale
    return 0.9 * spread * n ** (-1 / 5)


def _kde_on_grid(values: np.ndarray, grid: np.ndarray, bw: float) -> np.ndarray:
    z = (grid[:, None] - values[None, :]) / bw
    return np.exp(-0.5 * z**2).sum(axis=1) / (len(values) * bw * math.sqrt(2 * math.pi))


def aggregate_density(
    per_universe_draws: Sequence[Sequence[float]],
    grid_size: int = 256,
    weights: Optional[Sequence[float]] = None,
    unit_dot_area: float = 1.0,
) -> DensityCurve:
    """Sum of per-universe Gaussian KDEs on a shared grid.

    The grid spans the draws padded by 3 times the largest bandwidth. The
    scale factor maps the curve's area onto the dot-plot area proxy
    (universe count times ``unit_dot_area``); ``values`` are unscaled.
    """
    draws = [np.asarray(d, dtype=float) for d in per_universe_draws if len(d) > 0]
    if not draws:
        raise ValueError(
            "no universe has sampled draws; use point-estimate-only mode instead"
        )
    if weights is None:
        w = np.ones(len(draws))
    else:
        w = np.asarray(weights, dtype=float)
        if len(w) != len(draws):
            raise ValueError("one weight per universe with draws required")

    bws = [silverman_bandwidth(d) for d in draws]
    lo = min(d.min() for d in draws) - 3 * max(bws)
    hi = max(d.max() for d in draws) + 3 * max(bws)
    grid = np.linspace(lo, hi, grid_size)
    values = np.zeros_like(grid)
    for d, bw, wi in zip(draws, bws, w):
        values += wi * _kde_on_grid(d, grid, bw)

    area = float(np.trapezoid(values, grid))
    target = len(draws) * unit_dot_area
    scale = target / area if area > 0 else 1.0
    return DensityCurve(grid=grid, values=values, scale_factor=scale)


def universe_pdf(draws: Sequence[float], grid_size: int = 256) -> DensityCurve:
    """KDE of a single universe's draws on its own grid."""
    return aggregate_density([draws], grid_size=grid_size)


# ---------------------------------------------------------------------------
# Option ratios
# ---------------------------------------------------------------------------

@dataclass
class OptionRatio:
    decision: str
    option: str
    fraction: float
    baseline: float
    dominant: bool


def option_ratios(
    subset_uids: Sequence[int],
    spec_decisions: dict[str, list[str]],
    assignments: dict[int, dict[str, str]],
) -> list[OptionRatio]:
    """Per-decision option fractions within a brushed subset of universes.

    Fractions are over universes where the decision is active; an option is
    dominant when its subset fraction exceeds its full-multiverse fraction.
    """
    subset = list(subset_uids)
    if not subset:
        raise ValueError("subset of universes must be non-empty")
    everything = list(assignments)
    out = []
    for name, options in spec_decisions.items():
        def counts(uids):
            c = {opt: 0 for opt in options}
            active = 0
            for uid in uids:
                opt = assignments.get(uid, {}).get(name, "")
                if opt in c:
                    c[opt] += 1
                    active += 1
            return c, active

        sub_c, sub_n = counts(subset)
        all_c, all_n = counts(everything)
        if sub_n == 0:
            continue  # decision inactive throughout the brushed subset
        for opt in options:
            frac = sub_c[opt] / sub_n
            base = all_c[opt] / all_n if all_n else 0.0
            out.append(OptionRatio(name, opt, frac, base, frac > base))
    return out


# ---------------------------------------------------------------------------
# Model fit
# ---------------------------------------------------------------------------

def nrmse(
    observed: Sequence[float],
    folds: Sequence[tuple[Sequence[float], Sequence[float]]],
) -> Optional[float]:
    """Cross-validated root mean squared error over the observed span.

    ``folds`` holds (y, y_hat) pairs per held-out fold. Returns None when the
    observed variable is constant (zero span).
    """
    obs = np.asarray(observed, dtype=float)
    span = float(obs.max() - obs.min())
    if span == 0:
        return None
    mses = []
    for y, yhat in folds:
        y = np.asarray(y, dtype=float)
        yhat = np.asarray(yhat, dtype=float)
        if len(y) == 0 or len(y) != len(yhat):
            raise ValueError("each fold needs matching non-empty y and y_hat")
        mses.append(float(np.mean((y - yhat) ** 2)))
    return math.sqrt(sum(mses) / len(mses)) / span


def quantile_sample(values: Sequence[float], k: int) -> list[float]:
    """min(k, n) members of the input at evenly spaced percentiles.

    Element i is the nearest-rank value at percentile (i + 0.5) / k, so every
    output is an actual member of the input.
    """
    if len(values) == 0:
        raise ValueError("values must be non-empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    v = sorted(float(x) for x in values)
    n = len(v)
    if k >= n:
        return v
    out = []
    for i in range(k):
        p = (i + 0.5) / k
        rank = math.ceil(p * n)  # nearest rank, 1-based
        out.append(v[min(max(rank, 1), n) - 1])
    return out


# ---------------------------------------------------------------------------
# Inference
# ---------------------------------------------------------------------------

@dataclass
class NullInterval:
    uid: int
    lo: float
    hi: float
    observed: float
    outside: bool


def null_intervals(
    null_by_uid: dict[int, list[float]],
    observed: dict[int, float],
) -> tuple[list[NullInterval], int, list[int]]:
    """[2.5th, 97.5th] percentile interval of each universe's null estimates.

    Returns (intervals, count outside, uids skipped for missing nulls).
    """
    intervals = []
    missing = []
    for uid in sorted(observed):
        nulls = null_by_uid.get(uid)
        if not nulls:
            missing.append(uid)
            continue
        if len(nulls) < 20:
            warnings.warn(
                f"universe {uid}: only {len(nulls)} null estimates; "
                "percentile resolution is poor",
                stacklevel=2,
            )
        lo, hi = np.percentile(nulls, [2.5, 97.5])
        est = observed[uid]
        intervals.append(
            NullInterval(uid, float(lo), float(hi), est, est < lo or est > hi)
        )
    outside = sum(1 for it in intervals if it.outside)
    return intervals, outside, missing


@dataclass
class StackingWeights:
    weights: np.ndarray
    objective: float
    iterations: int


def stacking_objective(weights: np.ndarray, lpd: np.ndarray) -> float:
    """Sum over held-out points of log sum_m w_m exp(lpd_im)."""
    shift = lpd.max(axis=1, keepdims=True)
    mix = np.log((np.exp(lpd - shift) * weights).sum(axis=1)) + shift[:, 0]
    return float(mix.sum())


def stacking_weights(
    lpd: np.ndarray,
    tol: float = 1e-8,
    max_iter: int = 10_000,
) -> StackingWeights:
    """Simplex weights maximizing held-out log predictive density.

    ``lpd`` is (held-out points x universes). Multiplicative updates from the
    uniform start; the objective is concave, so the fixed point is the global
    optimum within tolerance.
    """
    lpd = np.asarray(lpd, dtype=float)
    if lpd.ndim != 2 or lpd.size == 0:
        raise ValueError("lpd must be a non-empty 2-D array")
    if not np.all(np.isfinite(lpd)):
        raise ValueError("lpd entries must be finite")
    n, m = lpd.shape
    if m == 1:
        return StackingWeights(np.array([1.0]), stacking_objective(np.array([1.0]), lpd), 0)

    shift = lpd.max(axis=1, keepdims=True)
    p = np.exp(lpd - shift)  # (n, m), rows scaled for stability
    w = np.full(m, 1.0 / m)
    obj = stacking_objective(w, lpd)
    iters = 0
    for iters in range(1, max_iter + 1):
        resp = p * w  # (n, m)
        resp /= resp.sum(axis=1, keepdims=True)
        w = resp.mean(axis=0)
        w /= w.sum()
        new_obj = stacking_objective(w, lpd)
        if abs(new_obj - obj) <= tol * max(1.0, abs(obj)):
            obj = new_obj
            break
        obj = new_obj
    return StackingWeights(weights=w, objective=obj, iterations=iters)


# ---------------------------------------------------------------------------
# Pruning & neighborhoods
# ---------------------------------------------------------------------------

@dataclass
class PruneResult:
    kept: list[int]
    missing_fit: list[int]  # kept but without a fit metric

    @property
    def empty(self) -> bool:
        return not self.kept


def prune(results: Sequence[UniverseResult], cutoff: float) -> PruneResult:
    """Keep universes whose NRMSE is at most ``cutoff``; universes without a
    fit metric are kept and flagged."""
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    kept, missing = [], []
    for r in results:
        if r.fit is None:
            kept.append(r.uid)
            missing.append(r.uid)
        elif r.fit <= cutoff:
            kept.append(r.uid)
    return PruneResult(kept=kept, missing_fit=missing)


def similar_universes(
    uid: int, results: Sequence[UniverseResult], k: int
) -> list[int]:
    """The k universes nearest in point estimate, ties broken by uid."""
    target = next((r for r in results if r.uid == uid), None)
    if target is None or target.estimate is None:
        raise ValueError(f"universe {uid} has no estimate")
    others = [
        (abs(r.estimate - target.estimate), r.uid)
        for r in results
        if r.uid != uid and r.estimate is not None
    ]
    others.sort()
    return [u for _, u in others[:k]]


# ---------------------------------------------------------------------------
# Decision graph
# ---------------------------------------------------------------------------

@dataclass
class DecisionGraph:
    nodes: list[dict]
    temporal_edges: list[tuple[str, str]]
    dependency_edges: list[tuple[str, str]]
    score_min: Optional[float] = None
    score_max: Optional[float] = None


def build_decision_graph(
    spec: BobaSpec,
    sensitivity: Sequence[DecisionSensitivity],
) -> DecisionGraph:
    scores = {s.name: s.score for s in sensitivity}
    finite = [s for s in scores.values() if s is not None and math.isfinite(s)]
    nodes = [
        {
            "name": d.name,
            "kind": d.kind,
            "options": d.options,
            "cardinality": len(d.options),
            "sensitivity": scores.get(d.name),
        }
        for d in spec.decisions
    ]
    return DecisionGraph(
        nodes=nodes,
        temporal_edges=temporal_edges(spec),
        dependency_edges=dependency_edges(spec),
        score_min=min(finite) if finite else None,
        score_max=max(finite) if finite else None,
    )
