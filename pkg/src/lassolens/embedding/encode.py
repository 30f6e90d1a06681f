"""Turn a mixed-type Dataset into the numeric matrix the projector consumes.

Numerical columns are z-scored (population std; constant columns map to 0,
missing cells to the column mean). Categorical columns are one-hot encoded
with unit weight per category, plus an explicit missing-category column when
the column has missing cells. The label column is excluded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EncodingError
from ..ingestion import NUMERICAL, Dataset

MISSING_CATEGORY = "__missing__"


@dataclass
class EncodedFeatures:
    matrix: np.ndarray  # (row_count, n_encoded) float64
    labels: list[str]  # one per encoded column, e.g. "island=Dream"
    standardized: list[int]  # indices of the z-scored (numerical) columns


def encode_features(dataset: Dataset) -> EncodedFeatures:
    columns = dataset.feature_columns()
    if not columns:
        raise EncodingError("dataset has no usable feature columns")

    blocks: list[np.ndarray] = []
    labels: list[str] = []
    standardized: list[int] = []

    for column in columns:
        if column.kind == NUMERICAL:
            raw = np.array(
                [np.nan if v is None else float(v) for v in column.values]
            )
            present = ~np.isnan(raw)
            if present.any():
                mean = raw[present].mean()
                std = raw[present].std()
                filled = np.where(present, raw, mean)
                z = (filled - mean) / std if std > 0 else np.zeros_like(filled)
            else:
                z = np.zeros_like(raw)
            standardized.append(len(labels))
            labels.append(column.name)
            blocks.append(z[:, None])
        else:
            categories = sorted({v for v in column.values if v is not None})
            has_missing = any(v is None for v in column.values)
            block = np.zeros((len(column.values), len(categories) + has_missing))
            index = {c: i for i, c in enumerate(categories)}
            for row, value in enumerate(column.values):
                if value is None:
                    block[row, len(categories)] = 1.0
                else:
                    block[row, index[value]] = 1.0
            labels.extend(f"{column.name}={c}" for c in categories)
            if has_missing:
                labels.append(f"{column.name}={MISSING_CATEGORY}")
            blocks.append(block)

    return EncodedFeatures(
        matrix=np.hstack(blocks),
        labels=labels,
        standardized=standardized,
    )
