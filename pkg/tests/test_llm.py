import json

import httpx
import pytest

from lassolens.errors import (
    ConfigError,
    ContractViolationError,
    EmptyResponseError,
    LlmUnavailableError,
)
from lassolens.evidence import S1, Strategy, assemble_evidence, build_prompt, check_budget
from lassolens.llm import LlmConfig, generate_explanation, template_explain
from lassolens.selection import select_by_predicate
from lassolens.stats import summarize
from lassolens.validation import parse_explanation

FAST = LlmConfig(endpoint="http://llm.test/v1/chat/completions",
                 max_retries=3, backoff_base_s=0.0)


def completion(text: str, model: str = "gpt-5-mini") -> httpx.Response:
    return httpx.Response(
        200,
        json={"model": model, "choices": [{"message": {"content": text}}]},
    )


@pytest.fixture(scope="module")
def gentoo(penguins):
    mask = select_by_predicate(penguins, "species", "Gentoo")
    profile = summarize(penguins, mask)
    bundle = assemble_evidence(penguins, mask, Strategy(S1), profile=profile)
    prompt = build_prompt(bundle)
    decision = check_budget(prompt)
    return bundle, profile, prompt, decision


class TestGenerateExplanation:
    def test_pass_through(self, gentoo):
        _, _, prompt, decision = gentoo
        seen = []

        def handler(request: httpx.Request) -> httpx.Response:
            seen.append(json.loads(request.content))
            return completion("All fine.")

        explanation = generate_explanation(
            prompt, FAST, trial_index=2, budget_decision=decision,
            transport=httpx.MockTransport(handler),
        )
        assert explanation.raw_text == "All fine."
        assert explanation.trial_index == 2
        assert explanation.strategy == S1
        body = seen[0]
        assert body["messages"][0]["role"] == "system"
        assert body["messages"][0]["content"] == prompt.instruction
        assert body["messages"][1]["content"] == prompt.user_text()

    def test_retries_transient_failures(self, gentoo):
        _, _, prompt, decision = gentoo
        calls = {"n": 0}

        def handler(request):
            calls["n"] += 1
            if calls["n"] <= 2:
                return httpx.Response(500, text="boom")
            return completion("recovered")

        explanation = generate_explanation(
            prompt, FAST, budget_decision=decision,
            transport=httpx.MockTransport(handler),
        )
        assert explanation.raw_text == "recovered"
        assert calls["n"] == 3

    def test_unavailable_after_all_attempts(self, gentoo):
        _, _, prompt, decision = gentoo

        def handler(request):
            raise httpx.ConnectTimeout("slow")

        with pytest.raises(LlmUnavailableError) as err:
            generate_explanation(
                prompt, FAST, budget_decision=decision,
                transport=httpx.MockTransport(handler),
            )
        assert err.value.attempts == 4  # max_retries + 1
        assert "4" in str(err.value)

    def test_auth_failure_is_config_error(self, gentoo):
        _, _, prompt, decision = gentoo
        transport = httpx.MockTransport(lambda r: httpx.Response(401, text="nope"))
        with pytest.raises(ConfigError):
            generate_explanation(
                prompt, FAST, budget_decision=decision, transport=transport
            )

    def test_empty_completion(self, gentoo):
        _, _, prompt, decision = gentoo
        transport = httpx.MockTransport(lambda r: completion("   "))
        with pytest.raises(EmptyResponseError):
            generate_explanation(
                prompt, FAST, budget_decision=decision, transport=transport
            )

    def test_budget_check_is_mandatory(self, gentoo):
        _, _, prompt, _ = gentoo
        transport = httpx.MockTransport(lambda r: completion("hi"))
        with pytest.raises(ContractViolationError):
            generate_explanation(prompt, FAST, transport=transport)

    def test_failing_budget_decision_rejected(self, gentoo):
        _, _, prompt, _ = gentoo
        failing = check_budget(prompt, budget=1)
        transport = httpx.MockTransport(lambda r: completion("hi"))
        with pytest.raises(ContractViolationError):
            generate_explanation(
                prompt, FAST, budget_decision=failing, transport=transport
            )

    def test_backoff_schedule(self, gentoo):
        _, _, prompt, decision = gentoo
        naps = []
        config = LlmConfig(endpoint="http://llm.test/x", max_retries=3,
                           backoff_base_s=0.5)
        transport = httpx.MockTransport(lambda r: httpx.Response(503))
        with pytest.raises(LlmUnavailableError):
            generate_explanation(
                prompt, config, budget_decision=decision, transport=transport,
                sleep=naps.append,
            )
        assert naps == [0.5, 1.0, 2.0]

    def test_concurrent_requests_capped(self, gentoo):
        import threading

        _, _, prompt, decision = gentoo
        config = LlmConfig(endpoint="http://llm.test/capped", max_retries=0,
                           max_concurrent=2)
        gate = threading.Lock()
        live = {"now": 0, "peak": 0}
        hold = threading.Event()

        def handler(request):
            with gate:
                live["now"] += 1
                live["peak"] = max(live["peak"], live["now"])
            hold.wait(0.05)
            with gate:
                live["now"] -= 1
            return completion("ok")

        transport = httpx.MockTransport(handler)
        workers = [
            threading.Thread(
                target=generate_explanation,
                args=(prompt, config),
                kwargs={"budget_decision": decision, "transport": transport},
            )
            for _ in range(6)
        ]
        for w in workers:
            w.start()
        hold.set()
        for w in workers:
            w.join()
        assert live["peak"] <= 2


class TestTemplateExplain:
    def test_format_contract(self, gentoo):
        bundle, profile, _, _ = gentoo
        explanation = template_explain(bundle, profile)
        parsed = parse_explanation(explanation.raw_text)
        assert parsed.format_ok
        assert 3 <= len(parsed.bullets) <= 5
        assert parsed.word_count < 200
        assert parsed.bold_terms

    def test_bank_bullet_quotes_duration_means(self, bank):
        mask = select_by_predicate(bank, "deposit", "yes")
        profile = summarize(bank, mask)
        bundle = assemble_evidence(bank, mask, Strategy(S1), profile=profile)
        explanation = template_explain(bundle, profile)
        duration_bullets = [
            line
            for line in explanation.raw_text.splitlines()
            if line.startswith("- ") and "**duration**" in line
        ]
        assert duration_bullets
        assert "537" in duration_bullets[0] and "223" in duration_bullets[0]

    def test_deterministic(self, gentoo):
        bundle, profile, _, _ = gentoo
        first = template_explain(bundle, profile)
        second = template_explain(bundle, profile)
        assert first.raw_text == second.raw_text
