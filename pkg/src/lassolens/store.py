"""Directory-backed session store with content-hash layout.

Datasets live under their content hash, embeddings under (dataset hash,
params hash), masks and explanations under their own ids. Everything is
plain JSON or .npy, so a session is inspectable with standard tools. Writes
are serialized behind one lock; completed entries are immutable.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

import numpy as np

from .errors import NotFoundError
from .ingestion import Dataset, canonical_json, dataset_from_canonical
from .selection import SelectionMask
from .embedding import Embedding, EmbeddingParams


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._datasets: dict[str, Dataset] = {}
        self._masks: dict[str, SelectionMask] = {}

    # -- datasets ----------------------------------------------------------

    def add_dataset(self, dataset: Dataset) -> str:
        with self._lock:
            path = self.root / "datasets" / dataset.id
            path.mkdir(parents=True, exist_ok=True)
            canonical = path / "canonical.json"
            if not canonical.exists():
                canonical.write_text(canonical_json(dataset), encoding="utf-8")
            self._datasets[dataset.id] = dataset
        return dataset.id

    def get_dataset(self, dataset_id: str) -> Dataset:
        with self._lock:
            if dataset_id in self._datasets:
                return self._datasets[dataset_id]
            canonical = self.root / "datasets" / dataset_id / "canonical.json"
            if not canonical.exists():
                raise NotFoundError(f"unknown dataset {dataset_id!r}")
            dataset = dataset_from_canonical(canonical.read_text(encoding="utf-8"))
            self._datasets[dataset_id] = dataset
            return dataset

    def list_datasets(self) -> list[Dataset]:
        with self._lock:
            base = self.root / "datasets"
            if base.exists():
                for entry in sorted(base.iterdir()):
                    if entry.is_dir() and entry.name not in self._datasets:
                        self.get_dataset(entry.name)
            return list(self._datasets.values())

    # -- embeddings --------------------------------------------------------

    def _embedding_dir(self, dataset_id: str, params: EmbeddingParams) -> Path:
        return self.root / "embeddings" / dataset_id / params.cache_key()

    def save_embedding(self, embedding: Embedding) -> None:
        if not embedding.complete:
            return  # only finished embeddings are cached
        with self._lock:
            path = self._embedding_dir(embedding.dataset_id, embedding.params)
            path.mkdir(parents=True, exist_ok=True)
            np.save(path / "coords.npy", embedding.coords)
            meta = {
                "dataset_id": embedding.dataset_id,
                "params": embedding.params.__dict__,
                "epoch": embedding.epoch,
                "complete": embedding.complete,
            }
            (path / "meta.json").write_text(json.dumps(meta), encoding="utf-8")

    def load_embedding(
        self, dataset_id: str, params: EmbeddingParams
    ) -> Embedding | None:
        with self._lock:
            path = self._embedding_dir(dataset_id, params)
            coords_file = path / "coords.npy"
            if not coords_file.exists():
                return None
            meta = json.loads((path / "meta.json").read_text(encoding="utf-8"))
            return Embedding(
                dataset_id=dataset_id,
                params=params,
                coords=np.load(coords_file),
                epoch=meta["epoch"],
                complete=meta["complete"],
            )

    # -- masks ---------------------------------------------------------------

    def add_mask(self, mask: SelectionMask) -> str:
        with self._lock:
            path = self.root / "masks"
            path.mkdir(parents=True, exist_ok=True)
            (path / f"{mask.id}.json").write_text(
                json.dumps(mask.to_dict()), encoding="utf-8"
            )
            self._masks[mask.id] = mask
        return mask.id

    def get_mask(self, mask_id: str) -> SelectionMask:
        with self._lock:
            if mask_id in self._masks:
                return self._masks[mask_id]
            path = self.root / "masks" / f"{mask_id}.json"
            if not path.exists():
                raise NotFoundError(f"unknown selection {mask_id!r}")
            mask = SelectionMask.from_dict(
                json.loads(path.read_text(encoding="utf-8"))
            )
            self._masks[mask_id] = mask
            return mask

    # -- explanations --------------------------------------------------------

    @staticmethod
    def explanation_id(record: dict) -> str:
        payload = json.dumps(
            {
                "mask_id": record.get("mask_id"),
                "strategy": record.get("strategy"),
                "trial_index": record.get("trial_index"),
                "model": record.get("model"),
                "raw_text": record.get("raw_text"),
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    def add_explanation(self, record: dict) -> str:
        explanation_id = record.get("id") or self.explanation_id(record)
        record = dict(record, id=explanation_id)
        with self._lock:
            path = self.root / "explanations"
            path.mkdir(parents=True, exist_ok=True)
            (path / f"{explanation_id}.json").write_text(
                json.dumps(record, indent=2), encoding="utf-8"
            )
        return explanation_id

    def get_explanation(self, explanation_id: str) -> dict:
        path = self.root / "explanations" / f"{explanation_id}.json"
        if not path.exists():
            raise NotFoundError(f"unknown explanation {explanation_id!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    def explanations_for(self, mask_id: str, strategy: str) -> list[dict]:
        base = self.root / "explanations"
        if not base.exists():
            return []
        records = []
        for path in sorted(base.glob("*.json")):
            record = json.loads(path.read_text(encoding="utf-8"))
            if record.get("mask_id") == mask_id and record.get("strategy") == strategy:
                records.append(record)
        records.sort(key=lambda r: (r.get("trial_index", 0), r.get("id", "")))
        return records
