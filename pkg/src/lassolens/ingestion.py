"""Load delimiter-separated tabular data plus a feature-description file.

The data file is CSV with a header row. The context file is a flat JSON
object mapping feature names to free-text descriptions, with three reserved
key forms:

    "_domain"        one-line description of the dataset's domain
    "_label"         name of the class/cluster column (excluded from the
                     embedding input, still usable for predicate selection)
    "_kind:<column>" explicit "numerical" / "categorical" override for one
                     column; wins over inference

Cells equal to "" or "NA" (case-insensitive) are missing. A numerical column
stores floats with None for missing; a categorical column stores the original
tokens with None for missing.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    ContextMismatchError,
    EmptyDatasetError,
    StructuralError,
    UndecidableKindError,
)

NUMERICAL = "numerical"
CATEGORICAL = "categorical"

MISSING_TOKENS = {"", "na"}

CANONICAL_VERSION = 1

# Share of non-missing cells that must parse as finite numbers before a
# column is even considered numerical.
_NUMERIC_SHARE = 0.95
# Integer-valued columns need more distinct values than this to count as
# numerical; low-cardinality integer codes (yes/no flags, ratings) behave
# like categories.
_MAX_CATEGORICAL_DISTINCT = 10


def _is_missing(token: str) -> bool:
    return token.strip().lower() in MISSING_TOKENS


def _parse_number(token: str) -> float | None:
    try:
        value = float(token)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    return value


@dataclass(frozen=True)
class DatasetContext:
    """Domain blurb plus per-feature descriptions from the context file."""

    domain_description: str = ""
    per_feature: dict[str, str] = field(default_factory=dict)
    label: str | None = None
    kind_overrides: dict[str, str] = field(default_factory=dict)


@dataclass
class Column:
    name: str
    kind: str  # NUMERICAL or CATEGORICAL
    values: list  # float|None for numerical, str|None for categorical

    def non_missing(self) -> list:
        return [v for v in self.values if v is not None]

    def missing_count(self) -> int:
        return sum(1 for v in self.values if v is None)


@dataclass
class Dataset:
    id: str
    name: str
    columns: list[Column]
    row_count: int
    descriptions: DatasetContext

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise KeyError(name)

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def feature_columns(self) -> list[Column]:
        """All columns except the label, in file order."""
        label = self.descriptions.label
        return [c for c in self.columns if c.name != label]


def infer_column_kind(cells: list) -> str:
    """Decide numerical vs categorical from raw cell tokens.

    Numerical iff >= 95% of non-missing cells parse as finite numbers AND
    the parsed values either exceed 10 distinct values or are not all
    integral. Everything else is categorical.
    """
    non_missing = [c for c in cells if c is not None]
    if not non_missing:
        raise UndecidableKindError("column has no non-missing cells")
    parsed = []
    for cell in non_missing:
        if isinstance(cell, (int, float)):
            value = float(cell)
            parsed.append(value if math.isfinite(value) else None)
        else:
            parsed.append(_parse_number(str(cell)))
    numbers = [v for v in parsed if v is not None]
    if len(numbers) / len(non_missing) < _NUMERIC_SHARE:
        return CATEGORICAL
    distinct = len(set(numbers))
    all_integral = all(v == int(v) for v in numbers)
    if distinct > _MAX_CATEGORICAL_DISTINCT or not all_integral:
        return NUMERICAL
    return CATEGORICAL


def _load_context(context_path: str | Path) -> DatasetContext:
    raw = json.loads(Path(context_path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise StructuralError("context file must be a JSON object of strings")
    domain = ""
    label = None
    per_feature: dict[str, str] = {}
    overrides: dict[str, str] = {}
    for key, value in raw.items():
        if not isinstance(value, str):
            raise StructuralError(f"context value for {key!r} is not text")
        if key == "_domain":
            domain = value
        elif key == "_label":
            label = value
        elif key.startswith("_kind:"):
            column = key.split(":", 1)[1]
            if value not in (NUMERICAL, CATEGORICAL):
                raise StructuralError(
                    f"kind override for {column!r} must be "
                    f"'{NUMERICAL}' or '{CATEGORICAL}', got {value!r}"
                )
            overrides[column] = value
        else:
            per_feature[key] = value
    return DatasetContext(
        domain_description=domain,
        per_feature=per_feature,
        label=label,
        kind_overrides=overrides,
    )


def _typed_column(name: str, raw: list[str], kind_override: str | None) -> Column:
    tokens: list[str | None] = [None if _is_missing(t) else t for t in raw]
    if kind_override is not None:
        kind = kind_override
        if all(t is None for t in tokens):
            raise UndecidableKindError(f"column {name!r} has no non-missing cells")
    else:
        kind = infer_column_kind(tokens)
    if kind == NUMERICAL:
        # Rare unparseable tokens (< 5% by the inference rule) degrade to
        # missing so the column invariant holds.
        values = [None if t is None else _parse_number(t) for t in tokens]
    else:
        values = tokens
    return Column(name=name, kind=kind, values=values)


def canonical_json(dataset: Dataset) -> str:
    """Stable text serialization used for hashing and the on-disk store."""
    ctx = dataset.descriptions
    doc = {
        "version": CANONICAL_VERSION,
        "name": dataset.name,
        "row_count": dataset.row_count,
        "context": {
            "domain_description": ctx.domain_description,
            "per_feature": dict(sorted(ctx.per_feature.items())),
            "label": ctx.label,
            "kind_overrides": dict(sorted(ctx.kind_overrides.items())),
        },
        "columns": [
            {"name": c.name, "kind": c.kind, "values": c.values}
            for c in dataset.columns
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def dataset_from_canonical(text: str) -> Dataset:
    doc = json.loads(text)
    if doc.get("version") != CANONICAL_VERSION:
        raise StructuralError(f"unsupported store version {doc.get('version')!r}")
    ctx = doc["context"]
    context = DatasetContext(
        domain_description=ctx["domain_description"],
        per_feature=ctx["per_feature"],
        label=ctx["label"],
        kind_overrides=ctx["kind_overrides"],
    )
    columns = [
        Column(name=c["name"], kind=c["kind"], values=c["values"])
        for c in doc["columns"]
    ]
    dataset = Dataset(
        id="",
        name=doc["name"],
        columns=columns,
        row_count=doc["row_count"],
        descriptions=context,
    )
    dataset.id = content_hash(dataset)
    return dataset


def content_hash(dataset: Dataset) -> str:
    digest = hashlib.sha256(canonical_json(dataset).encode("utf-8")).hexdigest()
    return digest[:16]


def load_dataset(data_path: str | Path, context_path: str | Path) -> Dataset:
    """Load a CSV plus its context file into a typed, immutable Dataset."""
    data_path = Path(data_path)
    context = _load_context(context_path)

    with data_path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{data_path.name}: file is empty") from None
        rows = []
        for index, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise StructuralError(
                    f"{data_path.name}: row {index} has {len(row)} cells, "
                    f"expected {len(header)}",
                    row_index=index,
                )
            rows.append(row)

    if not rows:
        raise EmptyDatasetError(f"{data_path.name}: header only, no data rows")
    if any(not name.strip() for name in header):
        raise StructuralError(f"{data_path.name}: empty column name in header")
    if len(set(header)) != len(header):
        raise StructuralError(f"{data_path.name}: duplicate column names in header")

    known = set(header)
    for key in context.per_feature:
        if key not in known:
            raise ContextMismatchError(
                f"context describes unknown column {key!r}", column=key
            )
    for key in context.kind_overrides:
        if key not in known:
            raise ContextMismatchError(
                f"kind override targets unknown column {key!r}", column=key
            )
    if context.label is not None and context.label not in known:
        raise ContextMismatchError(
            f"label {context.label!r} is not a column", column=context.label
        )

    columns = []
    for j, name in enumerate(header):
        raw = [row[j] for row in rows]
        columns.append(_typed_column(name, raw, context.kind_overrides.get(name)))

    dataset = Dataset(
        id="",
        name=data_path.stem,
        columns=columns,
        row_count=len(rows),
        descriptions=context,
    )
    dataset.id = content_hash(dataset)
    return dataset
