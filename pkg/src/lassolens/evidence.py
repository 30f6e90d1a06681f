"""Strategy-specific evidence bundles and prompt assembly.

Three strategies feed the language model: S1 sends precomputed summary
statistics, S2 sends a seeded uniform sample of the raw rows from each side
(default 20%), S3 sends every row. Prompts concatenate a fixed instruction,
the dataset context, the evidence payload, and a task + response-format
contract; the template text is frozen and versioned so stored explanations
stay comparable.

Row tables are comma-separated with a header, columns in dataset order,
numbers at full precision, missing cells as "NA". Token cost is estimated
as ceil(characters / 4), a deliberately model-free heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SelectionError
from .ingestion import Dataset, DatasetContext
from .selection import SelectionMask
from .stats import ContrastProfile, profile_to_text, summarize

S1 = "S1"
S2 = "S2"
S3 = "S3"
STRATEGIES = (S1, S2, S3)

STRATEGY_NAMES = {
    S1: "statistics",
    S2: "subsample",
    S3: "full data",
}

PROMPT_TEMPLATE_VERSION = "1.0"

INSTRUCTION = (
    "I want you to act as a data analyst. You will compare two groups of rows "
    "from one tabular dataset: the rows a user selected and all remaining rows."
)

TASK = (
    "Task: explain how the selected points differ from the non-selected "
    "points, using only the provided attributes, without speculation. Do not "
    "mention attributes that are not listed above, and do not generalize "
    "beyond the selected points."
)

FORMAT_CONTRACT = (
    "Respond with a short summary sentence followed by 3-5 bullet points, "
    "under 200 words in total, with key terms in bold (markdown **term**)."
)

DEFAULT_TOKEN_BUDGET = 128_000


@dataclass(frozen=True)
class Strategy:
    variant: str  # S1 | S2 | S3
    fraction: float = 0.20  # S2 only
    seed: int = 0  # S2 only

    def __post_init__(self):
        if self.variant not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.variant!r}")
        if not 0.0 < self.fraction < 1.0:
            raise ParameterError(
                f"sample fraction must be in (0, 1), got {self.fraction}"
            )

    def label(self) -> str:
        return f"{self.variant} ({STRATEGY_NAMES[self.variant]})"


@dataclass(frozen=True)
class EvidenceBundle:
    strategy: Strategy
    context_text: str
    payload: str
    selected_count: int
    rest_count: int
    dataset_id: str = ""
    mask_id: str = ""


@dataclass(frozen=True)
class PromptBundle:
    instruction: str
    context: str
    evidence: str
    task_format: str
    estimated_tokens: int
    strategy: Strategy
    template_version: str = PROMPT_TEMPLATE_VERSION
    dataset_id: str = ""
    mask_id: str = ""

    def full_text(self) -> str:
        return "\n\n".join(
            [self.instruction, self.context, self.evidence, self.task_format]
        )

    def user_text(self) -> str:
        """Everything except the instruction; sent as the user message."""
        return "\n\n".join([self.context, self.evidence, self.task_format])


@dataclass(frozen=True)
class BudgetDecision:
    ok: bool
    estimated_tokens: int
    budget: int
    strategy: Strategy

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "estimated_tokens": self.estimated_tokens,
            "budget": self.budget,
            "strategy": self.strategy.variant,
        }


def _format_cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, float):
        if value == int(value) and abs(value) < 1e15:
            return str(int(value))
        return repr(value)
    return str(value)


def _row_table(dataset: Dataset, row_indices: np.ndarray) -> str:
    columns = dataset.feature_columns()
    lines = [",".join(c.name for c in columns)]
    for i in row_indices:
        lines.append(",".join(_format_cell(c.values[i]) for c in columns))
    return "\n".join(lines)


def _sample_side(indices: np.ndarray, fraction: float, rng) -> np.ndarray:
    count = max(1, round(fraction * indices.size))
    picked = rng.choice(indices, size=count, replace=False)
    return np.sort(picked)


def context_text(context: DatasetContext, feature_names: list[str]) -> str:
    lines = []
    if context.domain_description:
        lines.append(f"Dataset domain: {context.domain_description}")
    described = [n for n in feature_names if n in context.per_feature]
    if described:
        lines.append("Attribute descriptions:")
        lines.extend(f"- {n}: {context.per_feature[n]}" for n in described)
    if not lines:
        lines.append("No dataset description was provided.")
    return "\n".join(lines)


def assemble_evidence(
    dataset: Dataset,
    mask: SelectionMask,
    strategy: Strategy,
    profile: ContrastProfile | None = None,
) -> EvidenceBundle:
    """Build the strategy payload; deterministic given (dataset, mask, strategy)."""
    if mask.selected_count == 0 or mask.rest_count == 0:
        raise SelectionError(
            "evidence needs at least one selected and one non-selected row",
            selected=mask.selected_count,
            rest=mask.rest_count,
        )

    if strategy.variant == S1:
        if profile is None:
            profile = summarize(dataset, mask)
        payload = profile_to_text(profile)
    else:
        selected_idx = np.flatnonzero(mask.selected)
        rest_idx = np.flatnonzero(~mask.selected)
        if strategy.variant == S2:
            rng = np.random.Generator(np.random.PCG64(strategy.seed))
            selected_idx = _sample_side(selected_idx, strategy.fraction, rng)
            rest_idx = _sample_side(rest_idx, strategy.fraction, rng)
        payload = (
            f"Selected rows ({selected_idx.size}):\n"
            + _row_table(dataset, selected_idx)
            + f"\n\nNon-selected rows ({rest_idx.size}):\n"
            + _row_table(dataset, rest_idx)
        )

    names = [c.name for c in dataset.feature_columns()]
    return EvidenceBundle(
        strategy=strategy,
        context_text=context_text(dataset.descriptions, names),
        payload=payload,
        selected_count=mask.selected_count,
        rest_count=mask.rest_count,
        dataset_id=dataset.id,
        mask_id=mask.id,
    )


_EVIDENCE_INTRO = {
    S1: (
        "Evidence: precomputed summary statistics comparing the selected rows "
        "against the non-selected rows. KS is the Kolmogorov-Smirnov statistic "
        "in [0, 1]; larger means the attribute separates the groups more."
    ),
    S2: (
        "Evidence: a uniform random sample of the selected rows and of the "
        "non-selected rows (same sampling fraction on both sides)."
    ),
    S3: (
        "Evidence: the complete data, every selected row and every "
        "non-selected row."
    ),
}


def build_prompt(
    bundle: EvidenceBundle, context: DatasetContext | None = None
) -> PromptBundle:
    """Compose the final prompt. The context block defaults to the one cached
    on the bundle; pass a DatasetContext to re-render it explicitly."""
    if context is not None:
        ctx_block = context_text(context, list(context.per_feature))
    else:
        ctx_block = bundle.context_text
    evidence = _EVIDENCE_INTRO[bundle.strategy.variant] + "\n\n" + bundle.payload
    task_format = TASK + "\n\n" + FORMAT_CONTRACT
    sections = [INSTRUCTION, ctx_block, evidence, task_format]
    return PromptBundle(
        instruction=INSTRUCTION,
        context=ctx_block,
        evidence=evidence,
        task_format=task_format,
        estimated_tokens=estimate_tokens("\n\n".join(sections)),
        strategy=bundle.strategy,
        dataset_id=bundle.dataset_id,
        mask_id=bundle.mask_id,
    )


def estimate_tokens(text: str) -> int:
    """ceil(characters / 4); a model-free upper-level proxy for token cost."""
    return (len(text) + 3) // 4


def check_budget(prompt: PromptBundle, budget: int = DEFAULT_TOKEN_BUDGET) -> BudgetDecision:
    if budget <= 0:
        raise ParameterError(f"token budget must be positive, got {budget}")
    return BudgetDecision(
        ok=prompt.estimated_tokens <= budget,
        estimated_tokens=prompt.estimated_tokens,
        budget=budget,
        strategy=prompt.strategy,
    )
