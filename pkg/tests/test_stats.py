import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lassolens.errors import (
    OrderingError,
    ParameterError,
    SelectionError,
    UndefinedStatisticError,
)
from lassolens.ingestion import CATEGORICAL, NUMERICAL
from lassolens.selection import SelectionMask, invert, select_by_predicate
from lassolens.stats import (
    default_category_ordering,
    feature_distribution,
    ks_categorical,
    ks_two_sample,
    profile_to_text,
    summarize,
)

from conftest import make_dataset


def ks_oracle(a, b) -> float:
    """Brute force: evaluate |ECDF_a - ECDF_b| at every sample point."""
    best = 0.0
    for x in list(a) + list(b):
        fa = sum(1 for v in a if v <= x) / len(a)
        fb = sum(1 for v in b if v <= x) / len(b)
        best = max(best, abs(fa - fb))
    return best


def ks_categorical_oracle(counts_a, counts_b, ordering) -> float:
    total_a = sum(counts_a.values())
    total_b = sum(counts_b.values())
    best = 0.0
    cum_a = cum_b = 0.0
    for category in ordering:
        cum_a += counts_a.get(category, 0) / total_a
        cum_b += counts_b.get(category, 0) / total_b
        best = max(best, abs(cum_a - cum_b))
    return best


samples = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=100
)


class TestKsTwoSample:
    def test_identical_samples_zero(self):
        assert ks_two_sample([3.0, 1.0, 2.0], [3.0, 1.0, 2.0]) == 0.0

    def test_disjoint_supports_one(self):
        a = [0.1, 0.5, 0.9]
        b = [2.1, 2.5, 2.9]
        assert ks_two_sample(a, b) == 1.0

    def test_hand_example_one_third(self):
        # oracle: ECDF gaps at 1,2,3,4 are 1/3, 1/3, 1/3, 0
        a, b = [1.0, 2.0, 3.0], [2.0, 3.0, 4.0]
        assert ks_oracle(a, b) == pytest.approx(1 / 3, abs=1e-15)
        assert ks_two_sample(a, b) == pytest.approx(1 / 3, abs=1e-12)

    def test_empty_sample_rejected(self):
        with pytest.raises(UndefinedStatisticError):
            ks_two_sample([], [1.0])

    @settings(max_examples=150, deadline=None)
    @given(samples, samples)
    def test_matches_oracle(self, a, b):
        assert ks_two_sample(a, b) == pytest.approx(ks_oracle(a, b), abs=1e-12)

    @settings(max_examples=80, deadline=None)
    @given(samples, samples)
    def test_symmetric(self, a, b):
        assert ks_two_sample(a, b) == ks_two_sample(b, a)

    @settings(max_examples=80, deadline=None)
    @given(samples, samples)
    def test_invariant_under_increasing_transform(self, a, b):
        def transform(values):
            return [np.arctan(v) + 2.0 * v for v in values]

        before = ks_two_sample(a, b)
        after = ks_two_sample(transform(a), transform(b))
        assert after == pytest.approx(before, abs=1e-12)


class TestKsCategorical:
    def test_identical_proportions_zero(self):
        assert ks_categorical({"x": 2, "y": 2}, {"x": 3, "y": 3}, ["x", "y"]) == 0.0

    def test_disjoint_categories_one(self):
        assert ks_categorical({"x": 5}, {"y": 7}, ["x", "y"]) == 1.0

    def test_hand_example_quarter(self):
        counts_a, counts_b = {"x": 2, "y": 2}, {"x": 1, "y": 3}
        assert ks_categorical_oracle(counts_a, counts_b, ["x", "y"]) == 0.25
        assert ks_categorical(counts_a, counts_b, ["x", "y"]) == 0.25

    def test_missing_category_in_ordering(self):
        with pytest.raises(OrderingError):
            ks_categorical({"x": 1, "y": 1}, {"x": 1}, ["x"])

    def test_zero_side_rejected(self):
        with pytest.raises(UndefinedStatisticError):
            ks_categorical({"x": 0}, {"x": 1}, ["x"])

    @settings(max_examples=100, deadline=None)
    @given(
        st.dictionaries(st.sampled_from("abcde"), st.integers(0, 50), min_size=1),
        st.dictionaries(st.sampled_from("abcde"), st.integers(0, 50), min_size=1),
    )
    def test_matches_oracle(self, counts_a, counts_b):
        if sum(counts_a.values()) == 0 or sum(counts_b.values()) == 0:
            return
        ordering = default_category_ordering(counts_a, counts_b)
        assert ks_categorical(counts_a, counts_b, ordering) == pytest.approx(
            ks_categorical_oracle(counts_a, counts_b, ordering), abs=1e-12
        )

    def test_default_ordering_by_combined_frequency(self):
        ordering = default_category_ordering({"a": 1, "b": 5}, {"a": 1, "c": 2})
        assert ordering == ["b", "a", "c"]  # 5, 2, 2 with lexicographic tie


class TestSummarize:
    def test_bank_duration_and_balance_means(self, bank):
        mask = select_by_predicate(bank, "deposit", "yes")
        profile = summarize(bank, mask)
        duration = profile.summary_for("duration")
        assert duration.selected.mean == pytest.approx(537, rel=0.01)
        assert duration.rest.mean == pytest.approx(223, rel=0.01)
        balance = profile.summary_for("balance")
        assert balance.selected.mean == pytest.approx(1804, rel=0.01)
        assert balance.rest.mean == pytest.approx(1280, rel=0.01)

    def test_singleton_rest_side(self, penguins):
        selected = np.ones(penguins.row_count, dtype=bool)
        selected[17] = False
        mask = SelectionMask(dataset_id=penguins.id, selected=selected)
        profile = summarize(penguins, mask)
        body = profile.summary_for("body_mass_g")
        row_value = penguins.column("body_mass_g").values[17]
        assert body.rest.mean == row_value
        assert body.rest.min == body.rest.max == row_value
        assert body.rest.std == 0.0

    def test_invert_swaps_sides_and_keeps_ks(self, penguins):
        mask = select_by_predicate(penguins, "species", "Chinstrap")
        forward = summarize(penguins, mask)
        backward = summarize(penguins, invert(mask))
        for f, b in zip(forward.summaries, backward.summaries):
            assert f.feature == b.feature
            if f.ks is not None:
                assert b.ks == pytest.approx(f.ks, abs=1e-12)
            if f.kind == NUMERICAL:
                assert f.selected == b.rest and f.rest == b.selected
            else:
                assert f.selected_counts == b.rest_counts
                assert f.rest_counts == b.selected_counts

    def test_ranking_is_deterministic(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        first = summarize(penguins, mask)
        second = summarize(penguins, mask)
        assert first.ranking == second.ranking
        assert first.ranking[0] == "flipper_length_mm"
        assert set(first.ranking) == {c.name for c in penguins.feature_columns()}

    def test_empty_side_rejected(self, penguins):
        mask = SelectionMask(
            dataset_id=penguins.id,
            selected=np.zeros(penguins.row_count, dtype=bool),
        )
        with pytest.raises(SelectionError):
            summarize(penguins, mask)

    def test_mask_dataset_mismatch(self, penguins):
        mask = SelectionMask(dataset_id="other", selected=np.ones(333, dtype=bool))
        with pytest.raises(SelectionError):
            summarize(penguins, mask)

    def test_insufficient_side_marked_and_ranked_last(self, tmp_path):
        dataset = make_dataset(
            tmp_path,
            "g,v,w\n"
            "a,NA,1.5\na,NA,2.5\na,NA,3.5\n"
            "b,1.25,4.5\nb,2.25,5.5\nb,3.25,6.5\n"
            + "b,4.25,7.5\n" * 8,
            {"_label": "g"},
        )
        mask = select_by_predicate(dataset, "g", "a")
        # 'v' has only missing cells on the selected side
        dataset.descriptions.per_feature.clear()
        profile = summarize(dataset, mask)
        v = profile.summary_for("v")
        assert v.ks is None
        assert v.selected.count == 0 and v.selected.missing_count == 3
        assert profile.ranking[-1] == "v"

    def test_profile_text_is_stable(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        profile = summarize(penguins, mask)
        text = profile_to_text(profile)
        assert text == profile_to_text(summarize(penguins, mask))
        assert "flipper_length_mm" in text
        assert text.startswith("rows: selected=119 rest=214")


class TestFeatureDistribution:
    def test_constant_feature_single_occupied_bin(self, tmp_path):
        dataset = make_dataset(
            tmp_path, "g,v\n" + "a,7.5\n" * 5 + "b,7.5\n" * 5, {"_label": "g"}
        )
        mask = select_by_predicate(dataset, "g", "a")
        dist = feature_distribution(dataset, mask, "v", bins=9)
        assert sum(1 for c in dist.selected_counts if c) == 1
        assert sum(1 for c in dist.rest_counts if c) == 1

    def test_conservation(self, bank):
        mask = select_by_predicate(bank, "deposit", "yes")
        for feature in ("balance", "duration", "age"):
            dist = feature_distribution(bank, mask, feature, bins=25)
            column = bank.column(feature)
            sel_nonmissing = sum(
                1 for v, m in zip(column.values, mask.selected) if m and v is not None
            )
            rest_nonmissing = sum(
                1
                for v, m in zip(column.values, mask.selected)
                if not m and v is not None
            )
            assert sum(dist.selected_counts) == sel_nonmissing
            assert sum(dist.rest_counts) == rest_nonmissing

    def test_bank_balance_histogram_shifted(self, bank):
        mask = select_by_predicate(bank, "deposit", "yes")
        dist = feature_distribution(bank, mask, "balance", bins=40)
        mids = [
            (dist.bin_edges[i] + dist.bin_edges[i + 1]) / 2
            for i in range(len(dist.bin_edges) - 1)
        ]
        sel_mean = np.average(mids, weights=dist.selected_counts)
        rest_mean = np.average(mids, weights=dist.rest_counts)
        assert sel_mean - rest_mean > 300  # consistent with the 1804 vs 1280 gap

    def test_categorical_distribution(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        dist = feature_distribution(penguins, mask, "island")
        assert dist.kind == CATEGORICAL
        by_cat = dict(zip(dist.categories, dist.selected_counts))
        assert by_cat["Biscoe"] == 119

    def test_bad_bins(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        with pytest.raises(ParameterError):
            feature_distribution(penguins, mask, "body_mass_g", bins=0)

    def test_unknown_feature(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        with pytest.raises(ParameterError):
            feature_distribution(penguins, mask, "wingspan")
