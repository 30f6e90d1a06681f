import json
from pathlib import Path

import pytest

from lassolens.fixtures import write_all
from lassolens.ingestion import Dataset, load_dataset


@pytest.fixture(scope="session")
def fixture_paths(tmp_path_factory) -> dict:
    out = tmp_path_factory.mktemp("datasets")
    return write_all(out)


@pytest.fixture(scope="session")
def penguins(fixture_paths) -> Dataset:
    return load_dataset(*fixture_paths["penguins"])


@pytest.fixture(scope="session")
def bank(fixture_paths) -> Dataset:
    return load_dataset(*fixture_paths["bank_marketing"])


@pytest.fixture(scope="session")
def food(fixture_paths) -> Dataset:
    return load_dataset(*fixture_paths["food_nutrition"])


@pytest.fixture(scope="session")
def customer(fixture_paths) -> Dataset:
    return load_dataset(*fixture_paths["customer_analysis"])


def make_dataset(tmp_path: Path, csv_text: str, context: dict | None = None,
                 name: str = "toy") -> Dataset:
    """Write an inline CSV + context pair and load it."""
    data = tmp_path / f"{name}.csv"
    ctx = tmp_path / f"{name}.context.json"
    data.write_text(csv_text, encoding="utf-8")
    ctx.write_text(json.dumps(context or {}), encoding="utf-8")
    return load_dataset(data, ctx)
