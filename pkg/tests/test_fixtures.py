import numpy as np

from lassolens.fixtures import write_all
from lassolens.ingestion import load_dataset
from lassolens.selection import select_by_predicate
from lassolens.stats import summarize


class TestShapes:
    def test_published_row_and_attribute_counts(self, penguins, bank, food,
                                                customer):
        expected = {
            penguins.name: (333, 6),
            bank.name: (11_162, 18),
            food.name: (7_499, 12),
            customer.name: (2_212, 31),
        }
        for dataset in (penguins, bank, food, customer):
            rows, attrs = expected[dataset.name]
            assert dataset.row_count == rows
            assert len(dataset.feature_columns()) == attrs

    def test_label_cardinalities(self, penguins, bank, food, customer):
        for dataset, n_classes in (
            (penguins, 3), (bank, 2), (food, 7), (customer, 4),
        ):
            label = dataset.descriptions.label
            values = {v for v in dataset.column(label).values if v is not None}
            assert len(values) == n_classes


class TestDeterminism:
    def test_regeneration_is_byte_identical(self, tmp_path, fixture_paths):
        again = write_all(tmp_path)
        for name, (data, context) in again.items():
            first_data, first_context = fixture_paths[name]
            assert data.read_bytes() == first_data.read_bytes()
            assert context.read_bytes() == first_context.read_bytes()


class TestCalibration:
    def test_customer_income_cluster2(self, customer):
        mask = select_by_predicate(customer, "cluster", "c2")
        profile = summarize(customer, mask)
        income = profile.summary_for("income")
        assert income.selected.mean == 30_000.0
        assert income.rest.mean == 60_000.0
        spent = profile.summary_for("total_spent")
        assert spent.selected.mean == 99.0
        assert spent.rest.mean == 788.0

    def test_customer_cluster1_profile(self, customer):
        mask = select_by_predicate(customer, "cluster", "c1")
        profile = summarize(customer, mask)
        assert profile.summary_for("income").selected.mean == 75_000.0
        assert profile.summary_for("income").rest.mean == 45_000.0
        assert profile.summary_for("total_spent").selected.mean == 1385.0

    def test_customer_wines_cluster0(self, customer):
        mask = select_by_predicate(customer, "cluster", "c0")
        profile = summarize(customer, mask)
        wines = profile.summary_for("wines")
        assert wines.selected.mean == 471.0
        assert wines.rest.mean == 227.0

    def test_food_clusters_have_distinct_profiles(self, food):
        mask = select_by_predicate(food, "cluster", "oils")
        profile = summarize(food, mask)
        fat = profile.summary_for("total_fat")
        assert fat.selected.mean > 3 * fat.rest.mean

    def test_values_non_negative_where_expected(self, food):
        for column in food.feature_columns():
            values = np.array(column.non_missing(), dtype=float)
            assert (values >= 0).all(), column.name
