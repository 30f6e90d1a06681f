"""Explain lasso-selected clusters in 2D projections of tabular data.

Core flow: load a dataset, project it to 2D, select a subset (lasso polygon
or label predicate), compute selected-vs-rest statistics, assemble evidence
for one of three prompting strategies, obtain an explanation (live endpoint
or deterministic offline template), and validate every checkable claim in it
against the computed statistics.
"""

from .embedding import Embedding, EmbeddingParams, compute_embedding
from .evidence import (
    S1,
    S2,
    S3,
    Strategy,
    assemble_evidence,
    build_prompt,
    check_budget,
    estimate_tokens,
)
from .ingestion import Dataset, DatasetContext, load_dataset
from .llm import Explanation, LlmConfig, generate_explanation, template_explain
from .selection import SelectionMask, invert, select_by_predicate, select_lasso
from .stats import ContrastProfile, feature_distribution, ks_two_sample, summarize
from .validation import parse_explanation, trial_consistency, validate

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetContext",
    "load_dataset",
    "Embedding",
    "EmbeddingParams",
    "compute_embedding",
    "SelectionMask",
    "select_lasso",
    "select_by_predicate",
    "invert",
    "ContrastProfile",
    "ks_two_sample",
    "summarize",
    "feature_distribution",
    "Strategy",
    "S1",
    "S2",
    "S3",
    "assemble_evidence",
    "build_prompt",
    "estimate_tokens",
    "check_budget",
    "LlmConfig",
    "Explanation",
    "generate_explanation",
    "template_explain",
    "parse_explanation",
    "validate",
    "trial_consistency",
]
