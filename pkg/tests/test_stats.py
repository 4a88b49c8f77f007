import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.stats import f as f_dist

from multiverse import enumerate, parse_spec
from multiverse.results import UniverseResult
from multiverse.stats import (
    aggregate_density,
    build_decision_graph,
    f_sensitivity,
    ks_sensitivity,
    nrmse,
    null_intervals,
    option_ratios,
    prune,
    quantile_sample,
    sensitivity_report,
    silverman_bandwidth,
    similar_universes,
    stacking_objective,
    stacking_weights,
    universe_pdf,
)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def edf_ks(a, b):
    """Two-sample K-S statistic straight from the empirical CDFs."""
    a, b = sorted(a), sorted(b)
    points = sorted(set(a) | set(b))

    def edf(sample, x):
        return sum(1 for v in sample if v <= x) / len(sample)

    return max(abs(edf(a, x) - edf(b, x)) for x in points)


def anova_f(groups):
    """Textbook one-way ANOVA F from sums of squares, no numpy tricks."""
    flat = [v for g in groups for v in g]
    n, k = len(flat), len(groups)
    grand = sum(flat) / n
    ssb = sum(len(g) * (sum(g) / len(g) - grand) ** 2 for g in groups)
    ssw = sum((v - sum(g) / len(g)) ** 2 for g in groups for v in g)
    return (ssb / (k - 1)) / (ssw / (n - k))


def nearest_rank(values, p):
    v = sorted(values)
    return v[max(1, math.ceil(p * len(v))) - 1]


# ---------------------------------------------------------------------------
# sensitivity
# ---------------------------------------------------------------------------

class TestKsSensitivity:
    def test_identical_groups_zero(self):
        assert ks_sensitivity([[1, 2, 3], [1, 2, 3]]) == 0.0

    def test_disjoint_supports_one(self):
        assert ks_sensitivity([[0, 0, 0], [1, 1, 1]]) == 1.0

    def test_three_group_median_example(self):
        # pairwise statistics are {1/3, 1, 1}; the median is 1
        score = ks_sensitivity([[1, 2, 3], [2, 3, 4], [10, 11, 12]])
        assert score == 1.0
        assert edf_ks([1, 2, 3], [2, 3, 4]) == pytest.approx(1 / 3)

    def test_pairwise_matches_edf_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a = rng.normal(size=rng.integers(3, 30)).tolist()
            b = rng.normal(loc=rng.normal(), size=rng.integers(3, 30)).tolist()
            assert ks_sensitivity([a, b]) == pytest.approx(edf_ks(a, b), abs=1e-12)

    def test_fewer_than_two_groups_undefined(self):
        assert ks_sensitivity([[1, 2]]) is None
        assert ks_sensitivity([[1, 2], []]) is None

    def test_even_pair_count_uses_mean_of_middle_two(self):
        groups = [[0.0], [0.25], [1.0], [1.0]]
        # 6 pairwise stats for singleton groups: {1,1,1,1,1,0}; median = 1
        assert ks_sensitivity(groups) == 1.0

    @given(
        st.lists(
            st.lists(st.floats(-50, 50), min_size=2, max_size=10),
            min_size=2,
            max_size=4,
        )
    )
    def test_bounded_and_relabel_symmetric(self, groups):
        score = ks_sensitivity(groups)
        assert 0.0 <= score <= 1.0
        assert ks_sensitivity(list(reversed(groups))) == pytest.approx(score)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(11)
        groups = [rng.normal(size=12).tolist(), rng.normal(1, 2, size=9).tolist()]
        base = ks_sensitivity(groups)
        warped = [[math.exp(v) for v in g] for g in groups]
        assert ks_sensitivity(warped) == pytest.approx(base)


class TestFSensitivity:
    def test_all_constant_is_zero(self):
        assert f_sensitivity([[5, 5, 5], [5, 5, 5]]) == 0.0

    def test_zero_within_with_shift_is_inf(self):
        assert f_sensitivity([[1, 1], [2, 2]]) == math.inf

    def test_two_group_textbook_example(self):
        groups = [[0, 0, 1, 1], [10, 10, 11, 11]]
        assert f_sensitivity(groups) == pytest.approx(anova_f(groups), rel=1e-12)

    def test_random_groups_match_textbook_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            k = rng.integers(2, 5)
            groups = [
                rng.normal(rng.normal(), 1 + rng.random(), size=rng.integers(2, 12)).tolist()
                for _ in range(k)
            ]
            assert f_sensitivity(groups) == pytest.approx(anova_f(groups), rel=1e-10)

    def test_equal_means_f_near_one(self):
        rng = np.random.default_rng(3)
        groups = [rng.normal(0, 1, size=500).tolist() for _ in range(3)]
        score = f_sensitivity(groups)
        lo = f_dist.ppf(0.0005, 2, 1497)
        hi = f_dist.ppf(0.9995, 2, 1497)
        assert lo < score < hi

    def test_affine_invariance(self):
        rng = np.random.default_rng(13)
        groups = [rng.normal(i, 1, size=20).tolist() for i in range(3)]
        base = f_sensitivity(groups)
        scaled = [[7.5 * v - 3.25 for v in g] for g in groups]
        assert f_sensitivity(scaled) == pytest.approx(base, rel=1e-9)

    def test_undefined_cases(self):
        assert f_sensitivity([[1.0]]) is None
        assert f_sensitivity([[1.0], [2.0]]) is None  # n <= k


def test_sensitivity_report_skips_inactive_assignments():
    decisions = {"d": ["a", "b"]}
    assignments = {1: {"d": "a"}, 2: {"d": "b"}, 3: {"d": ""}}
    estimates = {1: 0.0, 2: 1.0, 3: 99.0}
    (rep,) = sensitivity_report(decisions, assignments, estimates, method="ks")
    assert rep.group_sizes == {"a": 1, "b": 1}
    assert rep.score == 1.0
    (rep_f,) = sensitivity_report(decisions, assignments, estimates, method="f")
    assert rep_f.method == "f" and rep_f.score is None  # n <= k


# ---------------------------------------------------------------------------
# density aggregation
# ---------------------------------------------------------------------------

class TestDensity:
    def test_single_universe_equals_own_kde(self):
        draws = np.random.default_rng(0).normal(size=100).tolist()
        agg = aggregate_density([draws])
        own = universe_pdf(draws)
        np.testing.assert_allclose(agg.values, own.values)
        np.testing.assert_allclose(agg.grid, own.grid)

    def test_linearity_identical_draws(self):
        draws = np.random.default_rng(1).normal(size=80).tolist()
        one = aggregate_density([draws])
        two = aggregate_density([draws, draws])
        np.testing.assert_allclose(two.values, 2 * one.values, rtol=1e-12)

    def test_bimodal_for_separated_universes(self):
        rng = np.random.default_rng(2)
        a = rng.normal(0, 0.1, size=200)
        b = rng.normal(10, 0.1, size=200)
        curve = aggregate_density([a.tolist(), b.tolist()])
        mid = len(curve.grid) // 2
        peak_lo = curve.grid[np.argmax(curve.values[:mid])]
        peak_hi = curve.grid[mid + np.argmax(curve.values[mid:])]
        assert abs(peak_lo - 0.0) < 0.2 and abs(peak_hi - 10.0) < 0.2
        trough = curve.values[np.argmin(np.abs(curve.grid - 5.0))]
        assert trough < 0.01 * curve.values.max()

    def test_grid_shape_and_scale_factor(self):
        rng = np.random.default_rng(4)
        draws = [rng.normal(size=50).tolist() for _ in range(3)]
        curve = aggregate_density(draws, grid_size=256, unit_dot_area=2.0)
        assert len(curve.grid) == len(curve.values) == 256
        assert np.all(np.diff(curve.grid) > 0)
        assert np.all(curve.values >= 0) and np.all(np.isfinite(curve.values))
        area = np.trapezoid(curve.values * curve.scale_factor, curve.grid)
        assert area == pytest.approx(3 * 2.0, rel=1e-6)

    def test_grid_padding_is_three_bandwidths(self):
        draws = np.random.default_rng(6).normal(size=64)
        bw = silverman_bandwidth(draws)
        curve = aggregate_density([draws.tolist()])
        assert curve.grid[0] == pytest.approx(draws.min() - 3 * bw)
        assert curve.grid[-1] == pytest.approx(draws.max() + 3 * bw)

    def test_all_empty_draws_is_an_error(self):
        with pytest.raises(ValueError, match="point-estimate"):
            aggregate_density([[], []])

    def test_weight_length_mismatch(self):
        with pytest.raises(ValueError, match="weight"):
            aggregate_density([[1.0, 2.0]], weights=[0.5, 0.5])

    def test_weights_scale_contributions(self):
        draws = np.random.default_rng(8).normal(size=60).tolist()
        plain = aggregate_density([draws, draws])
        skew = aggregate_density([draws, draws], weights=[2.0, 0.0])
        np.testing.assert_allclose(skew.values, plain.values, rtol=1e-12)

    def test_silverman_formula(self):
        v = np.random.default_rng(9).normal(size=200)
        sd = np.std(v, ddof=1)
        iqr = np.percentile(v, 75) - np.percentile(v, 25)
        expected = 0.9 * min(sd, iqr / 1.34) * 200 ** (-0.2)
        assert silverman_bandwidth(v) == pytest.approx(expected)


# ---------------------------------------------------------------------------
# option ratios
# ---------------------------------------------------------------------------

class TestOptionRatios:
    DECISIONS = {"A": ["a1", "a2"], "B": ["b1", "b2"]}
    ASSIGN = {
        1: {"A": "a1", "B": "b1"},
        2: {"A": "a1", "B": "b2"},
        3: {"A": "a2", "B": "b1"},
        4: {"A": "a2", "B": "b2"},
    }

    def test_full_multiverse_matches_baseline(self):
        ratios = option_ratios([1, 2, 3, 4], self.DECISIONS, self.ASSIGN)
        for r in ratios:
            assert r.fraction == r.baseline == 0.5
            assert not r.dominant

    def test_brushed_half_space(self):
        ratios = {(r.decision, r.option): r for r in
                  option_ratios([1, 2], self.DECISIONS, self.ASSIGN)}
        assert ratios[("A", "a1")].fraction == 1.0
        assert ratios[("A", "a1")].dominant
        assert ratios[("A", "a2")].fraction == 0.0
        assert ratios[("B", "b1")].fraction == 0.5
        assert not ratios[("B", "b1")].dominant

    def test_never_cooccurring_option_fraction_zero(self):
        decisions = {"C": ["c1", "c2", "c3"]}
        assign = {1: {"C": "c1"}, 2: {"C": "c2"}, 3: {"C": "c3"}}
        ratios = {r.option: r for r in option_ratios([1, 2], decisions, assign)}
        assert ratios["c3"].fraction == 0.0

    def test_fractions_sum_to_one_per_decision(self):
        rng = np.random.default_rng(17)
        decisions = {"D": ["x", "y", "z"]}
        assign = {u: {"D": rng.choice(["x", "y", "z"])} for u in range(1, 31)}
        subset = list(range(1, 11))
        total = sum(r.fraction for r in option_ratios(subset, decisions, assign))
        assert total == pytest.approx(1.0)

    def test_inactive_decision_dropped(self):
        decisions = {"A": ["a1", "a2"], "P": ["p1", "p2"]}
        assign = {1: {"A": "a1", "P": ""}, 2: {"A": "a2", "P": ""}}
        ratios = option_ratios([1, 2], decisions, assign)
        assert {r.decision for r in ratios} == {"A"}

    def test_empty_subset_rejected(self):
        with pytest.raises(ValueError):
            option_ratios([], self.DECISIONS, self.ASSIGN)


# ---------------------------------------------------------------------------
# model fit
# ---------------------------------------------------------------------------

class TestNrmse:
    def test_perfect_predictions(self):
        assert nrmse([0, 1, 2], [([0, 1], [0, 1]), ([2], [2])]) == 0.0

    def test_hand_computed_half(self):
        assert nrmse([0, 1], [([0, 1], [0.5, 0.5])]) == pytest.approx(0.5)

    def test_multi_fold_mse_is_mean_of_fold_mses(self):
        folds = [([0.0], [1.0]), ([0.0, 0.0], [0.0, 0.0])]
        # fold MSEs are 1 and 0 -> mean 0.5 -> sqrt / span 2
        assert nrmse([0, 2], folds) == pytest.approx(math.sqrt(0.5) / 2)

    def test_zero_span_undefined(self):
        assert nrmse([3, 3, 3], [([3], [4])]) is None

    def test_mismatched_fold_rejected(self):
        with pytest.raises(ValueError):
            nrmse([0, 1], [([0, 1], [0.5])])

    @given(
        st.lists(st.floats(-100, 100), min_size=2, max_size=15),
        st.floats(0.1, 50),
        st.floats(-100, 100),
    )
    @settings(max_examples=60)
    def test_affine_invariance(self, y, a, b):
        # a span near float resolution collapses to zero under translation
        assume(max(y) - min(y) > 1e-3)
        yhat = [v + 1.0 for v in y]
        base = nrmse(y, [(y, yhat)])
        scaled = nrmse(
            [a * v + b for v in y], [([a * v + b for v in y], [a * v + b for v in yhat])]
        )
        assert scaled == pytest.approx(base, rel=1e-6, abs=1e-9)


class TestQuantileSample:
    def test_small_input_returned_sorted(self):
        assert quantile_sample([3, 1, 2], 5) == [1, 2, 3]

    def test_1_to_100_k4(self):
        values = list(range(1, 101))
        assert quantile_sample(values, 4) == [13, 38, 63, 88]

    def test_all_equal_input(self):
        assert quantile_sample([7.0] * 30, 4) == [7.0] * 4

    def test_matches_nearest_rank_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            values = rng.normal(size=rng.integers(5, 60)).tolist()
            k = int(rng.integers(1, 12))
            got = quantile_sample(values, k)
            if k >= len(values):
                assert got == sorted(values)
            else:
                assert got == [nearest_rank(values, (i + 0.5) / k) for i in range(k)]

    @given(
        st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50),
        st.integers(1, 20),
    )
    def test_outputs_are_members_and_sorted(self, values, k):
        out = quantile_sample(values, k)
        assert len(out) == min(k, len(values))
        assert out == sorted(out)
        pool = sorted(values)
        for v in out:
            assert v in pool

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            quantile_sample([], 3)
        with pytest.raises(ValueError):
            quantile_sample([1.0], 0)


# ---------------------------------------------------------------------------
# inference
# ---------------------------------------------------------------------------

class TestNullIntervals:
    def test_observed_at_median_inside(self):
        nulls = {1: list(range(100))}
        intervals, outside, missing = null_intervals(nulls, {1: 49.5})
        assert not intervals[0].outside and outside == 0 and missing == []

    def test_far_observed_outside(self):
        nulls = {1: [float(v) for v in range(1, 101)]}
        intervals, outside, _ = null_intervals(nulls, {1: 150.0})
        assert intervals[0].outside and outside == 1
        assert intervals[0].lo <= intervals[0].hi
        # percentile oracle: interval within the null range
        assert 1.0 <= intervals[0].lo < intervals[0].hi <= 100.0

    def test_missing_nulls_reported_not_fatal(self):
        nulls = {1: list(range(100))}
        intervals, _, missing = null_intervals(nulls, {1: 50.0, 2: 0.0})
        assert [it.uid for it in intervals] == [1]
        assert missing == [2]

    def test_few_nulls_warn(self):
        with pytest.warns(UserWarning, match="null estimates"):
            null_intervals({1: [0.0] * 5}, {1: 0.0})

    def test_no_warning_at_twenty(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            null_intervals({1: list(range(20))}, {1: 5.0})


def grid_search_objective(lpd, step=0.01):
    """Exhaustive simplex search oracle for small stacking problems."""
    m = lpd.shape[1]
    best = -math.inf
    ticks = np.arange(0.0, 1.0 + step / 2, step)
    if m == 2:
        combos = [(w, 1 - w) for w in ticks]
    elif m == 3:
        combos = [
            (w1, w2, 1 - w1 - w2)
            for w1 in ticks
            for w2 in ticks
            if w1 + w2 <= 1 + 1e-12
        ]
    else:
        raise NotImplementedError
    for w in combos:
        best = max(best, stacking_objective(np.clip(w, 0, None), lpd))
    return best


class TestStacking:
    def test_single_universe(self):
        res = stacking_weights(np.array([[-1.0], [-2.0]]))
        assert res.weights.tolist() == [1.0]

    def test_identical_columns_stay_uniform(self):
        lpd = np.tile(np.array([[-1.0], [-0.5], [-2.0]]), (1, 2))
        res = stacking_weights(lpd)
        np.testing.assert_allclose(res.weights, [0.5, 0.5], atol=1e-9)

    def test_dominant_universe_wins(self):
        rng = np.random.default_rng(31)
        base = rng.normal(-2, 0.3, size=15)
        lpd = np.column_stack([base, base + 1.0])  # column 2 better by 1 nat
        res = stacking_weights(lpd)
        assert res.weights[1] >= 0.9
        assert res.objective >= stacking_objective(np.array([1.0, 0.0]), lpd)

    def test_matches_grid_search_m2(self):
        rng = np.random.default_rng(37)
        lpd = rng.normal(-1, 1, size=(20, 2))
        res = stacking_weights(lpd)
        assert res.objective >= grid_search_objective(lpd) - 1e-4

    def test_matches_grid_search_m3(self):
        rng = np.random.default_rng(41)
        lpd = rng.normal(-1, 1, size=(12, 3))
        res = stacking_weights(lpd)
        assert res.objective >= grid_search_objective(lpd) - 1e-4

    def test_weights_on_simplex(self):
        rng = np.random.default_rng(43)
        for _ in range(20):
            lpd = rng.normal(-1, 2, size=(rng.integers(1, 25), rng.integers(2, 6)))
            res = stacking_weights(lpd)
            assert np.all(res.weights >= 0)
            assert abs(res.weights.sum() - 1.0) <= 1e-9

    def test_objective_improves_on_uniform_start(self):
        rng = np.random.default_rng(47)
        lpd = rng.normal(-1, 1, size=(18, 4))
        uniform = np.full(4, 0.25)
        res = stacking_weights(lpd)
        assert res.objective >= stacking_objective(uniform, lpd) - 1e-12

    def test_nonfinite_entries_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            stacking_weights(np.array([[0.0, math.nan]]))
        with pytest.raises(ValueError):
            stacking_weights(np.empty((0, 2)))


# ---------------------------------------------------------------------------
# pruning and neighborhoods
# ---------------------------------------------------------------------------

def make_results(fits):
    # builtins.enumerate: the multiverse.enumerate import shadows it here
    return [
        UniverseResult(uid=uid, estimate=float(uid - 1), fit=f)
        for uid, f in zip(range(1, len(fits) + 1), fits)
    ]


class TestPrune:
    def test_huge_cutoff_identity(self):
        res = prune(make_results([0.1, 0.2, 0.9]), 1e9)
        assert res.kept == [1, 2, 3] and not res.empty

    def test_spec_example(self):
        res = prune(make_results([0.1, 0.2, 0.9]), 0.5)
        assert res.kept == [1, 2]

    def test_all_above_cutoff_signals_empty(self):
        res = prune(make_results([0.6, 0.7]), 0.5)
        assert res.empty and res.kept == []

    def test_missing_fit_kept_and_flagged(self):
        res = prune(make_results([0.1, None, 0.9]), 0.5)
        assert res.kept == [1, 2] and res.missing_fit == [2]

    @given(
        st.lists(st.floats(0, 2), min_size=1, max_size=30),
        st.floats(0, 2),
        st.floats(0, 2),
    )
    def test_monotone_in_cutoff(self, fits, c1, c2):
        lo, hi = sorted((c1, c2))
        results = make_results(fits)
        assert set(prune(results, lo).kept) <= set(prune(results, hi).kept)

    def test_negative_cutoff_rejected(self):
        with pytest.raises(ValueError):
            prune([], -0.1)


class TestSimilarUniverses:
    RESULTS = [
        UniverseResult(uid=1, estimate=1.0),
        UniverseResult(uid=2, estimate=2.0),
        UniverseResult(uid=3, estimate=3.0),
        UniverseResult(uid=4, estimate=10.0),
    ]

    def test_k_zero_empty(self):
        assert similar_universes(2, self.RESULTS, 0) == []

    def test_nearest_two(self):
        assert set(similar_universes(2, self.RESULTS, 2)) == {1, 3}

    def test_ties_broken_by_uid(self):
        results = [
            UniverseResult(uid=5, estimate=0.0),
            UniverseResult(uid=3, estimate=1.0),
            UniverseResult(uid=9, estimate=1.0),
        ]
        assert similar_universes(5, results, 1) == [3]

    def test_missing_estimate_rejected(self):
        with pytest.raises(ValueError):
            similar_universes(99, self.RESULTS, 2)


# ---------------------------------------------------------------------------
# decision graph
# ---------------------------------------------------------------------------

class TestDecisionGraph:
    def test_no_constraints_pure_temporal_chain(self):
        spec = parse_spec("a = {{a = 1, 2}}\nb = {{b = 1, 2}}\n", "t.py")
        graph = build_decision_graph(spec, [])
        assert graph.temporal_edges == [("a", "b")]
        assert graph.dependency_edges == []

    def test_constraint_reference_becomes_dependency(self, steegen_spec):
        universes = enumerate(steegen_spec)
        rep = sensitivity_report(
            {d.name: d.options for d in steegen_spec.decisions},
            {u.uid: {k: v[1] for k, v in u.assignment.items()} for u in universes},
            {u.uid: float(u.uid) for u in universes},
        )
        graph = build_decision_graph(steegen_spec, rep)
        assert ("NMO", "ECL") in graph.dependency_edges
        scores = {n["name"]: n["sensitivity"] for n in graph.nodes}
        assert set(scores) == set(steegen_spec.decision_names())
        assert graph.score_min <= graph.score_max

    def test_version_descendant_dependency(self):
        src = (
            "# --- (M) bayesian\nm='b'\n# --- (M) frequentist\nm='f'\n"
            "# --- (PRIOR)\nprior = {{prior = 'flat', 'tight'}}\n"
            "# --- (FIT)\nfit(m)\n"
            "# --- (BOBA_CONFIG)\n"
            '{"graph": ["M:bayesian->PRIOR", "M:frequentist->FIT", "PRIOR->FIT"]}\n'
        )
        spec = parse_spec(src, "t.py")
        graph = build_decision_graph(spec, [])
        assert ("M", "prior") in graph.dependency_edges
