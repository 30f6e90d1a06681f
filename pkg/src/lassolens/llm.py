"""Chat-completion client plus a deterministic offline explainer.

The live client speaks the de-facto standard chat JSON (messages array,
model field) so any local model server is a drop-in via the endpoint URL.
The template explainer generates an explanation directly from a contrast
profile; it is the offline stand-in used for tests, demos, and the mock
mode of the service, and only ever states values that the profile contains.
"""

from __future__ import annotations

import logging
import math
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import httpx

from .errors import (
    ConfigError,
    ContractViolationError,
    EmptyResponseError,
    LlmUnavailableError,
    ParameterError,
)
from .evidence import (
    PROMPT_TEMPLATE_VERSION,
    BudgetDecision,
    EvidenceBundle,
    PromptBundle,
)
from .ingestion import NUMERICAL
from .stats import ContrastProfile

logger = logging.getLogger(__name__)

MOCK_MODEL_NAME = "template-explainer"

_RETRYABLE_STATUS = {429, 500, 502, 503, 504}
_endpoint_caps: dict[str, threading.Semaphore] = {}
_caps_lock = threading.Lock()


@dataclass(frozen=True)
class LlmConfig:
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    model: str = "gpt-5-mini"
    api_key_env: str = "OPENAI_API_KEY"
    timeout_s: float = 60.0
    max_retries: int = 3
    backoff_base_s: float = 0.5
    max_concurrent: int = 4
    # Decoding settings pass through untouched where the endpoint supports them.
    temperature: float | None = None
    top_p: float | None = None

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise ParameterError(f"timeout must be > 0, got {self.timeout_s}")
        if self.max_retries < 0:
            raise ParameterError(f"max_retries must be >= 0, got {self.max_retries}")


@dataclass
class Explanation:
    raw_text: str
    model: str
    strategy: str
    trial_index: int
    template_version: str = PROMPT_TEMPLATE_VERSION
    latency_ms: float = 0.0
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )
    mask_id: str = ""

    def to_dict(self) -> dict:
        return {
            "raw_text": self.raw_text,
            "model": self.model,
            "strategy": self.strategy,
            "trial_index": self.trial_index,
            "template_version": self.template_version,
            "latency_ms": self.latency_ms,
            "created_at": self.created_at,
            "mask_id": self.mask_id,
        }


def _cap_for(endpoint: str, limit: int) -> threading.Semaphore:
    with _caps_lock:
        if endpoint not in _endpoint_caps:
            _endpoint_caps[endpoint] = threading.Semaphore(limit)
        return _endpoint_caps[endpoint]


def generate_explanation(
    prompt: PromptBundle,
    config: LlmConfig,
    trial_index: int = 0,
    budget_decision: BudgetDecision | None = None,
    transport: httpx.BaseTransport | None = None,
    sleep=time.sleep,
) -> Explanation:
    """Send one chat request and wrap the completion text.

    A passing budget decision for this prompt is mandatory; transient
    failures are retried with exponential backoff up to config.max_retries.
    """
    if budget_decision is None:
        raise ContractViolationError(
            "generate_explanation called without a budget check"
        )
    if not budget_decision.ok:
        raise ContractViolationError(
            "generate_explanation called with a failing budget check"
        )
    if budget_decision.estimated_tokens != prompt.estimated_tokens:
        raise ContractViolationError(
            "budget decision does not correspond to this prompt"
        )

    api_key = os.environ.get(config.api_key_env, "")
    headers = {"Content-Type": "application/json"}
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    body: dict = {
        "model": config.model,
        "messages": [
            {"role": "system", "content": prompt.instruction},
            {"role": "user", "content": prompt.user_text()},
        ],
    }
    if config.temperature is not None:
        body["temperature"] = config.temperature
    if config.top_p is not None:
        body["top_p"] = config.top_p

    logger.debug("llm request payload: %s", body)

    attempts = config.max_retries + 1
    cap = _cap_for(config.endpoint, config.max_concurrent)
    last_error: Exception | None = None
    with httpx.Client(transport=transport, timeout=config.timeout_s) as client:
        for attempt in range(attempts):
            if attempt > 0:
                sleep(config.backoff_base_s * 2 ** (attempt - 1))
            started = time.perf_counter()
            try:
                with cap:
                    response = client.post(config.endpoint, json=body, headers=headers)
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                last_error = exc
                continue
            if response.status_code in (401, 403):
                raise ConfigError(
                    f"endpoint rejected credentials (HTTP {response.status_code}); "
                    f"check ${config.api_key_env}"
                )
            if response.status_code in _RETRYABLE_STATUS:
                last_error = LlmUnavailableError(
                    f"HTTP {response.status_code}", attempts=attempt + 1
                )
                continue
            if response.status_code != 200:
                raise ConfigError(
                    f"endpoint returned HTTP {response.status_code}: "
                    f"{response.text[:200]}"
                )
            payload = response.json()
            try:
                text = payload["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError):
                raise EmptyResponseError(
                    "completion response had no message content"
                ) from None
            if not text or not text.strip():
                raise EmptyResponseError("completion was empty")
            latency = (time.perf_counter() - started) * 1000.0
            return Explanation(
                raw_text=text,
                model=payload.get("model", config.model),
                strategy=prompt.strategy.variant,
                trial_index=trial_index,
                latency_ms=latency,
                mask_id=prompt.mask_id,
            )

    raise LlmUnavailableError(
        f"endpoint unavailable after {attempts} attempts: {last_error}",
        attempts=attempts,
    )


def _fmt_value(x: float) -> str:
    if math.isfinite(x) and x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.6g}"


def _is_numberish(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def template_explain(
    bundle: EvidenceBundle,
    profile: ContrastProfile,
    trial_index: int = 0,
) -> Explanation:
    """Deterministic explanation built from the contrast profile.

    One summary sentence plus one bullet per top-ranked feature (up to five),
    each stating the side means or category shares straight from the profile
    with the feature name in bold. Always under 200 words.
    """
    ranked = [
        profile.summary_for(name)
        for name in profile.ranking
        if profile.summary_for(name).ks is not None
    ]
    top = ranked[:5]

    names = ", ".join(f"**{s.feature}**" for s in top)
    summary = f"The selected rows differ from the rest most strongly in {names}."

    bullets = []
    for s in top:
        if s.kind == NUMERICAL:
            bullets.append(
                f"- **{s.feature}**: mean {_fmt_value(s.selected.mean)} vs "
                f"{_fmt_value(s.rest.mean)} in the rest."
            )
        else:
            sel_prop = s.proportions("selected")
            rest_prop = s.proportions("rest")
            category = max(
                s.ordering, key=lambda c: (abs(sel_prop[c] - rest_prop[c]), c)
            )
            share = (
                f"{100 * sel_prop[category]:.1f}% vs {100 * rest_prop[category]:.1f}%"
            )
            if _is_numberish(category):
                bullets.append(
                    f"- **{s.feature}**: leading value share {share} in the rest."
                )
            else:
                bullets.append(
                    f"- **{s.feature}**: {category} {share} in the rest."
                )
    for s in profile.summaries:
        if len(bullets) >= 3:
            break
        if s.ks is None:
            bullets.append(
                f"- **{s.feature}**: insufficient data on one side to compare."
            )

    text = summary + "\n" + "\n".join(bullets)
    return Explanation(
        raw_text=text,
        model=MOCK_MODEL_NAME,
        strategy=bundle.strategy.variant,
        trial_index=trial_index,
        latency_ms=0.0,
        mask_id=bundle.mask_id,
    )
