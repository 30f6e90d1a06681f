"""Turn lasso polygons or label predicates into row-membership masks."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePolygonError, PredicateError, SelectionError
from .ingestion import CATEGORICAL, Dataset


@dataclass
class SelectionMask:
    dataset_id: str
    selected: np.ndarray  # bool, one per row
    source: dict = field(default_factory=dict)
    id: str = ""

    def __post_init__(self):
        self.selected = np.asarray(self.selected, dtype=bool)
        if not self.id:
            self.id = _mask_id(self.dataset_id, self.selected, self.source)

    @property
    def selected_count(self) -> int:
        return int(self.selected.sum())

    @property
    def rest_count(self) -> int:
        return int(self.selected.size - self.selected.sum())

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dataset_id": self.dataset_id,
            "selected": self.selected.tolist(),
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SelectionMask":
        return cls(
            dataset_id=doc["dataset_id"],
            selected=np.asarray(doc["selected"], dtype=bool),
            source=doc.get("source", {}),
            id=doc.get("id", ""),
        )


def _mask_id(dataset_id: str, selected: np.ndarray, source: dict) -> str:
    payload = dataset_id.encode() + np.packbits(selected).tobytes()
    payload += json.dumps(source, sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def points_in_polygon(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Even-odd (ray casting) containment for many points at once.

    Points exactly on a polygon edge or vertex count as inside. The ray is
    horizontal towards +x; the half-open vertical test keeps shared vertices
    from being counted twice, and self-intersecting polygons fall out of the
    even-odd rule naturally.
    """
    points = np.asarray(points, dtype=float)
    polygon = np.asarray(polygon, dtype=float)
    px = points[:, 0][:, None]
    py = points[:, 1][:, None]
    x1, y1 = polygon[:, 0][None, :], polygon[:, 1][None, :]
    x2 = np.roll(polygon[:, 0], -1)[None, :]
    y2 = np.roll(polygon[:, 1], -1)[None, :]

    straddles = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_at_y = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    crossings = (straddles & (px < x_at_y)).sum(axis=1)

    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    within_x = (px >= np.minimum(x1, x2)) & (px <= np.maximum(x1, x2))
    within_y = (py >= np.minimum(y1, y2)) & (py <= np.maximum(y1, y2))
    on_edge = ((cross == 0.0) & within_x & within_y).any(axis=1)

    return on_edge | (crossings % 2 == 1)


def select_lasso(embedding, polygon) -> SelectionMask:
    """Rows whose embedded coordinates fall inside the lasso polygon."""
    polygon = np.asarray(polygon, dtype=float)
    if polygon.ndim != 2 or polygon.shape[0] < 3 or polygon.shape[1] != 2:
        raise DegeneratePolygonError(
            f"polygon needs at least 3 (x, y) vertices, got shape {polygon.shape}"
        )
    if not embedding.complete:
        raise SelectionError("embedding is not complete; wait for the job to finish")
    inside = points_in_polygon(embedding.coords, polygon)
    return SelectionMask(
        dataset_id=embedding.dataset_id,
        selected=inside,
        source={"type": "lasso", "polygon": polygon.tolist()},
    )


def select_by_predicate(dataset: Dataset, column: str, value: str) -> SelectionMask:
    """Rows whose categorical cell equals the given token; missing never matches."""
    try:
        col = dataset.column(column)
    except KeyError:
        raise PredicateError(f"unknown column {column!r}", column=column) from None
    if col.kind != CATEGORICAL:
        raise PredicateError(
            f"predicate selection needs a categorical column, {column!r} is {col.kind}",
            column=column,
        )
    selected = np.array([v == value for v in col.values], dtype=bool)
    return SelectionMask(
        dataset_id=dataset.id,
        selected=selected,
        source={"type": "predicate", "column": column, "value": value},
    )


def invert(mask: SelectionMask) -> SelectionMask:
    return SelectionMask(
        dataset_id=mask.dataset_id,
        selected=~mask.selected,
        source={"type": "invert", "of": mask.source},
    )
