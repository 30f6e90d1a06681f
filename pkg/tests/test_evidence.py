import numpy as np
import pytest

from lassolens.errors import ParameterError, SelectionError
from lassolens.evidence import (
    INSTRUCTION,
    S1,
    S2,
    S3,
    Strategy,
    assemble_evidence,
    build_prompt,
    check_budget,
    estimate_tokens,
)
from lassolens.selection import SelectionMask, select_by_predicate
from lassolens.stats import summarize

from conftest import make_dataset


def mask_with(dataset, selected_count: int) -> SelectionMask:
    selected = np.zeros(dataset.row_count, dtype=bool)
    selected[:selected_count] = True
    return SelectionMask(dataset_id=dataset.id, selected=selected)


@pytest.fixture(scope="module")
def thousand_rows(tmp_path_factory):
    rng = np.random.default_rng(0)
    rows = ["a,b,c"]
    for _ in range(1000):
        rows.append(f"{rng.normal():.3f},{rng.normal():.3f},{rng.integers(0, 2)}")
    return make_dataset(tmp_path_factory.mktemp("ev"), "\n".join(rows) + "\n")


class TestStrategy:
    def test_fraction_bounds(self):
        with pytest.raises(ParameterError):
            Strategy(S2, fraction=0.0)
        with pytest.raises(ParameterError):
            Strategy(S2, fraction=1.0)
        with pytest.raises(ParameterError):
            Strategy("S9")


class TestAssembleEvidence:
    def test_s2_sample_sizes(self, thousand_rows):
        mask = mask_with(thousand_rows, 100)
        bundle = assemble_evidence(thousand_rows, mask, Strategy(S2))
        assert "Selected rows (20):" in bundle.payload
        assert "Non-selected rows (180):" in bundle.payload

    def test_s2_minimum_one_row(self, thousand_rows):
        mask = mask_with(thousand_rows, 3)
        bundle = assemble_evidence(thousand_rows, mask, Strategy(S2))
        assert "Selected rows (1):" in bundle.payload

    def test_s2_rows_are_a_subset_without_duplicates(self, thousand_rows):
        mask = mask_with(thousand_rows, 40)
        bundle = assemble_evidence(thousand_rows, mask, Strategy(S2, seed=9))
        section = bundle.payload.split("Non-selected rows")[0]
        rows = section.strip().splitlines()[2:]
        assert len(rows) == len(set(rows)) == 8
        all_rows = set()
        cols = thousand_rows.feature_columns()
        for i in range(40):
            all_rows.add(",".join(str(c.values[i]) for c in cols))
        for row in rows:
            assert row in all_rows

    def test_deterministic_bundles(self, thousand_rows):
        mask = mask_with(thousand_rows, 50)
        for strategy in (Strategy(S1), Strategy(S2, seed=4), Strategy(S3)):
            first = assemble_evidence(thousand_rows, mask, strategy)
            second = assemble_evidence(thousand_rows, mask, strategy)
            assert first == second

    def test_s1_bank_embeds_duration_means(self, bank):
        mask = select_by_predicate(bank, "deposit", "yes")
        bundle = assemble_evidence(bank, mask, Strategy(S1))
        assert "537" in bundle.payload and "223" in bundle.payload

    def test_s3_contains_every_row(self, thousand_rows):
        mask = mask_with(thousand_rows, 10)
        bundle = assemble_evidence(thousand_rows, mask, Strategy(S3))
        assert "Selected rows (10):" in bundle.payload
        assert "Non-selected rows (990):" in bundle.payload
        assert bundle.payload.count("\n") >= 1002

    def test_empty_side_rejected(self, thousand_rows):
        with pytest.raises(SelectionError):
            assemble_evidence(
                thousand_rows, mask_with(thousand_rows, 0), Strategy(S1)
            )

    def test_missing_serialized_as_na(self, tmp_path):
        dataset = make_dataset(tmp_path, "v,g\n1.5,x\nNA,y\n2.5,x\n12.5,y\n")
        mask = mask_with(dataset, 2)
        bundle = assemble_evidence(dataset, mask, Strategy(S3))
        assert "NA,y" in bundle.payload


class TestBuildPrompt:
    def test_instruction_opens_with_fixed_text(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        prompt = build_prompt(assemble_evidence(penguins, mask, Strategy(S1)))
        assert prompt.instruction.startswith("I want you to act as a data analyst")
        assert prompt.full_text().startswith("I want you to act as a data analyst")

    def test_payload_embedded_byte_for_byte(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        bundle = assemble_evidence(penguins, mask, Strategy(S1))
        prompt = build_prompt(bundle)
        assert bundle.payload in prompt.evidence

    def test_guardrail_sentence_present(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        prompt = build_prompt(assemble_evidence(penguins, mask, Strategy(S1)))
        assert "using only the provided attributes, without speculation" in (
            prompt.task_format
        )

    def test_format_contract_present(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        prompt = build_prompt(assemble_evidence(penguins, mask, Strategy(S1)))
        assert "3-5 bullet points" in prompt.task_format
        assert "under 200 words" in prompt.task_format
        assert "bold" in prompt.task_format

    def test_context_lists_only_dataset_features(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        prompt = build_prompt(assemble_evidence(penguins, mask, Strategy(S1)))
        names = {c.name for c in penguins.columns}
        for line in prompt.context.splitlines():
            if line.startswith("- "):
                assert line[2:].split(":")[0] in names


class TestTokens:
    def test_empty_is_zero(self):
        assert estimate_tokens("") == 0

    def test_four_hundred_chars_is_hundred(self):
        assert estimate_tokens("x" * 400) == 100

    def test_ceiling(self):
        assert estimate_tokens("x" * 401) == 101

    def test_s3_bank_exceeds_budget(self, bank):
        mask = select_by_predicate(bank, "deposit", "yes")
        prompt = build_prompt(assemble_evidence(bank, mask, Strategy(S3)))
        decision = check_budget(prompt, 128_000)
        assert not decision.ok
        assert decision.estimated_tokens > 128_000
        assert decision.to_dict()["strategy"] == S3

    def test_s1_fits_on_all_fixture_datasets(self, penguins, bank, food, customer):
        for dataset in (penguins, bank, food, customer):
            label = dataset.descriptions.label
            value = next(v for v in dataset.column(label).values if v is not None)
            mask = select_by_predicate(dataset, label, value)
            prompt = build_prompt(assemble_evidence(dataset, mask, Strategy(S1)))
            assert check_budget(prompt, 128_000).ok

    def test_s2_bank_fits(self, bank):
        mask = select_by_predicate(bank, "deposit", "yes")
        prompt = build_prompt(assemble_evidence(bank, mask, Strategy(S2)))
        assert check_budget(prompt, 128_000).ok

    def test_inclusive_boundary(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        prompt = build_prompt(assemble_evidence(penguins, mask, Strategy(S1)))
        assert check_budget(prompt, prompt.estimated_tokens).ok
        assert not check_budget(prompt, prompt.estimated_tokens - 1).ok

    def test_budget_must_be_positive(self, penguins):
        mask = select_by_predicate(penguins, "species", "Gentoo")
        prompt = build_prompt(assemble_evidence(penguins, mask, Strategy(S1)))
        with pytest.raises(ParameterError):
            check_budget(prompt, 0)

    def test_token_cost_ordering_s1_s2_s3(self, bank, customer):
        for dataset, value in ((bank, "yes"), (customer, "c1")):
            label = dataset.descriptions.label
            mask = select_by_predicate(dataset, label, value)
            estimates = {}
            for strategy in (Strategy(S1), Strategy(S2), Strategy(S3)):
                prompt = build_prompt(assemble_evidence(dataset, mask, strategy))
                estimates[strategy.variant] = prompt.estimated_tokens
            assert estimates[S1] < estimates[S2] < estimates[S3]
