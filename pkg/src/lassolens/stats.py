"""Selected-vs-rest contrast statistics.

One summary per feature (numerical: min/max/mean/std + KS; categorical:
category counts/proportions + KS over a fixed ordering), plus a KS-descending
feature ranking. These numbers are both the statistics-strategy evidence and
the ground truth that explanation claims are checked against.

Conventions: missing cells are excluded from every statistic and reported as
missing_count; std is the population formula (divide by n); the categorical
KS ordering is descending combined frequency with lexicographic tie-break and
is recorded on each summary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    OrderingError,
    ParameterError,
    SelectionError,
    UndefinedStatisticError,
)
from .ingestion import CATEGORICAL, NUMERICAL, Dataset
from .selection import SelectionMask


def ks_two_sample(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic: sup |ECDF_a - ECDF_b|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise UndefinedStatisticError("KS needs two non-empty samples")
    a = np.sort(a)
    b = np.sort(b)
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


def ks_categorical(counts_a: dict, counts_b: dict, ordering: list[str]) -> float:
    """KS over discrete cumulative proportions under a fixed category order."""
    present = set(counts_a) | set(counts_b)
    missing = present - set(ordering)
    if missing:
        raise OrderingError(
            f"ordering is missing categories: {sorted(missing)}",
            categories=sorted(missing),
        )
    total_a = sum(counts_a.values())
    total_b = sum(counts_b.values())
    if total_a <= 0 or total_b <= 0:
        raise UndefinedStatisticError("KS needs positive counts on both sides")
    prop_a = np.array([counts_a.get(c, 0) for c in ordering], dtype=float) / total_a
    prop_b = np.array([counts_b.get(c, 0) for c in ordering], dtype=float) / total_b
    return float(np.abs(np.cumsum(prop_a) - np.cumsum(prop_b)).max())


def default_category_ordering(counts_a: dict, counts_b: dict) -> list[str]:
    """Descending combined frequency, ties broken lexicographically."""
    combined = {}
    for counts in (counts_a, counts_b):
        for category, count in counts.items():
            combined[category] = combined.get(category, 0) + count
    return sorted(combined, key=lambda c: (-combined[c], c))


@dataclass(frozen=True)
class SideStats:
    count: int
    missing_count: int
    min: float | None = None
    max: float | None = None
    mean: float | None = None
    std: float | None = None

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "missing_count": self.missing_count,
            "min": self.min,
            "max": self.max,
            "mean": self.mean,
            "std": self.std,
        }


@dataclass(frozen=True)
class NumericalSummary:
    feature: str
    selected: SideStats
    rest: SideStats
    ks: float | None  # None when one side has no usable values

    kind = NUMERICAL

    @property
    def insufficient(self) -> bool:
        return self.ks is None

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "kind": self.kind,
            "selected": self.selected.to_dict(),
            "rest": self.rest.to_dict(),
            "ks": self.ks,
            "insufficient": self.insufficient,
        }


@dataclass(frozen=True)
class CategoricalSummary:
    feature: str
    ordering: list[str]
    selected_counts: dict[str, int]
    rest_counts: dict[str, int]
    selected_missing: int
    rest_missing: int
    ks: float | None

    kind = CATEGORICAL

    @property
    def insufficient(self) -> bool:
        return self.ks is None

    def proportions(self, side: str) -> dict[str, float]:
        counts = self.selected_counts if side == "selected" else self.rest_counts
        total = sum(counts.values())
        if total == 0:
            return {c: 0.0 for c in self.ordering}
        return {c: counts.get(c, 0) / total for c in self.ordering}

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "kind": self.kind,
            "ordering": self.ordering,
            "selected_counts": self.selected_counts,
            "rest_counts": self.rest_counts,
            "selected_proportions": self.proportions("selected"),
            "rest_proportions": self.proportions("rest"),
            "selected_missing": self.selected_missing,
            "rest_missing": self.rest_missing,
            "ks": self.ks,
            "insufficient": self.insufficient,
        }


@dataclass
class ContrastProfile:
    dataset_id: str
    mask_id: str
    selected_count: int
    rest_count: int
    summaries: list = field(default_factory=list)
    ranking: list[str] = field(default_factory=list)

    def summary_for(self, feature: str):
        for s in self.summaries:
            if s.feature == feature:
                return s
        raise KeyError(feature)

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "mask_id": self.mask_id,
            "selected_count": self.selected_count,
            "rest_count": self.rest_count,
            "summaries": [s.to_dict() for s in self.summaries],
            "ranking": self.ranking,
        }


def _side_stats(values: np.ndarray, missing: int) -> SideStats:
    if values.size == 0:
        return SideStats(count=0, missing_count=missing)
    return SideStats(
        count=int(values.size),
        missing_count=missing,
        min=float(values.min()),
        max=float(values.max()),
        mean=float(values.mean()),
        std=float(values.std()),  # population std
    )


def _split_numeric(column, selected: np.ndarray):
    raw = column.values
    sel = np.array(
        [v for v, m in zip(raw, selected) if m and v is not None], dtype=float
    )
    rest = np.array(
        [v for v, m in zip(raw, selected) if not m and v is not None], dtype=float
    )
    sel_missing = sum(1 for v, m in zip(raw, selected) if m and v is None)
    rest_missing = sum(1 for v, m in zip(raw, selected) if not m and v is None)
    return sel, rest, sel_missing, rest_missing


def _count_side(column, selected: np.ndarray, want: bool):
    counts: dict[str, int] = {}
    missing = 0
    for v, m in zip(column.values, selected):
        if bool(m) != want:
            continue
        if v is None:
            missing += 1
        else:
            counts[v] = counts.get(v, 0) + 1
    return counts, missing


def summarize(dataset: Dataset, mask: SelectionMask) -> ContrastProfile:
    """Per-feature selected-vs-rest summaries plus the KS-descending ranking."""
    if mask.dataset_id != dataset.id:
        raise SelectionError(
            f"mask belongs to dataset {mask.dataset_id!r}, not {dataset.id!r}"
        )
    if mask.selected.size != dataset.row_count:
        raise SelectionError("mask length does not match dataset row count")
    if mask.selected_count == 0 or mask.rest_count == 0:
        raise SelectionError(
            "contrast needs at least one row on each side",
            selected=mask.selected_count,
            rest=mask.rest_count,
        )

    summaries = []
    for column in dataset.feature_columns():
        if column.kind == NUMERICAL:
            sel, rest, sel_miss, rest_miss = _split_numeric(column, mask.selected)
            ks = None
            if sel.size > 0 and rest.size > 0:
                ks = ks_two_sample(sel, rest)
            summaries.append(
                NumericalSummary(
                    feature=column.name,
                    selected=_side_stats(sel, sel_miss),
                    rest=_side_stats(rest, rest_miss),
                    ks=ks,
                )
            )
        else:
            sel_counts, sel_miss = _count_side(column, mask.selected, True)
            rest_counts, rest_miss = _count_side(column, mask.selected, False)
            ordering = default_category_ordering(sel_counts, rest_counts)
            full_sel = {c: sel_counts.get(c, 0) for c in ordering}
            full_rest = {c: rest_counts.get(c, 0) for c in ordering}
            ks = None
            if sum(full_sel.values()) > 0 and sum(full_rest.values()) > 0:
                ks = ks_categorical(full_sel, full_rest, ordering)
            summaries.append(
                CategoricalSummary(
                    feature=column.name,
                    ordering=ordering,
                    selected_counts=full_sel,
                    rest_counts=full_rest,
                    selected_missing=sel_miss,
                    rest_missing=rest_miss,
                    ks=ks,
                )
            )

    ranking = [
        s.feature
        for s in sorted(
            summaries,
            key=lambda s: (s.ks is None, -(s.ks or 0.0), s.feature),
        )
    ]
    return ContrastProfile(
        dataset_id=dataset.id,
        mask_id=mask.id,
        selected_count=mask.selected_count,
        rest_count=mask.rest_count,
        summaries=summaries,
        ranking=ranking,
    )


@dataclass
class PairedDistribution:
    feature: str
    kind: str
    selected_counts: list[int]
    rest_counts: list[int]
    bin_edges: list[float] | None = None  # numerical only, len = bins + 1
    categories: list[str] | None = None  # categorical only
    selected_missing: int = 0
    rest_missing: int = 0

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "kind": self.kind,
            "selected_counts": self.selected_counts,
            "rest_counts": self.rest_counts,
            "bin_edges": self.bin_edges,
            "categories": self.categories,
            "selected_missing": self.selected_missing,
            "rest_missing": self.rest_missing,
        }


def feature_distribution(
    dataset: Dataset, mask: SelectionMask, feature: str, bins: int = 20
) -> PairedDistribution:
    """Shared-bin histogram (numerical) or paired category counts (categorical)."""
    if bins < 1:
        raise ParameterError(f"bins must be >= 1, got {bins}")
    try:
        column = dataset.column(feature)
    except KeyError:
        raise ParameterError(f"unknown feature {feature!r}", feature=feature) from None

    if column.kind == NUMERICAL:
        sel, rest, sel_miss, rest_miss = _split_numeric(column, mask.selected)
        combined = np.concatenate([sel, rest])
        if combined.size == 0:
            raise UndefinedStatisticError(f"feature {feature!r} has no usable values")
        lo, hi = float(combined.min()), float(combined.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        sel_counts, edges = np.histogram(sel, bins=bins, range=(lo, hi))
        rest_counts, _ = np.histogram(rest, bins=bins, range=(lo, hi))
        return PairedDistribution(
            feature=feature,
            kind=NUMERICAL,
            selected_counts=sel_counts.tolist(),
            rest_counts=rest_counts.tolist(),
            bin_edges=edges.tolist(),
            selected_missing=sel_miss,
            rest_missing=rest_miss,
        )

    sel_counts, sel_miss = _count_side(column, mask.selected, True)
    rest_counts, rest_miss = _count_side(column, mask.selected, False)
    ordering = default_category_ordering(sel_counts, rest_counts)
    return PairedDistribution(
        feature=feature,
        kind=CATEGORICAL,
        selected_counts=[sel_counts.get(c, 0) for c in ordering],
        rest_counts=[rest_counts.get(c, 0) for c in ordering],
        categories=ordering,
        selected_missing=sel_miss,
        rest_missing=rest_miss,
    )


def _fmt(x: float | None) -> str:
    if x is None:
        return "n/a"
    return f"{x:.6g}"


def profile_to_text(profile: ContrastProfile) -> str:
    """Stable human-readable table; this exact block is the S1 prompt payload."""
    lines = [
        f"rows: selected={profile.selected_count} rest={profile.rest_count}",
        "features ranked by KS (most discriminative first): "
        + ", ".join(profile.ranking),
        "",
    ]
    for s in profile.summaries:
        if s.kind == NUMERICAL:
            lines.append(f"{s.feature} (numerical, KS={_fmt(s.ks)})")
            for label, side in (("selected", s.selected), ("rest", s.rest)):
                lines.append(
                    f"  {label}: count={side.count} missing={side.missing_count} "
                    f"min={_fmt(side.min)} max={_fmt(side.max)} "
                    f"mean={_fmt(side.mean)} std={_fmt(side.std)}"
                )
        else:
            lines.append(f"{s.feature} (categorical, KS={_fmt(s.ks)})")
            sel_prop = s.proportions("selected")
            rest_prop = s.proportions("rest")
            for label, counts, props, miss in (
                ("selected", s.selected_counts, sel_prop, s.selected_missing),
                ("rest", s.rest_counts, rest_prop, s.rest_missing),
            ):
                cells = " ".join(
                    f"{c}={counts.get(c, 0)} ({100 * props[c]:.1f}%)"
                    for c in s.ordering
                )
                lines.append(f"  {label}: {cells} missing={miss}")
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"
