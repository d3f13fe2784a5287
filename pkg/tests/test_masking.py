import json
import random

import pytest

from keymask.corpus import Document, Vocabulary, tokenize_document
from keymask.masking import (
    IGNORE_LABEL,
    EmissionSummary,
    MaskingConfig,
    emit_dataset,
    find_keyword_words,
    mask_example,
)

from conftest import TOY_TOKENS


class TestMaskingConfig:
    def test_mode_defaults(self):
        assert MaskingConfig(mode="keyword").select_prob == 0.75
        assert MaskingConfig(mode="random").select_prob == 0.15

    def test_explicit_select_prob_kept(self):
        assert MaskingConfig(mode="keyword", select_prob=0.5).select_prob == 0.5

    def test_scheduler_hints(self):
        assert MaskingConfig(mode="keyword").scheduler_hint() == "constant"
        assert MaskingConfig(mode="random").scheduler_hint() == "linear"

    def test_action_rates_sum_exactly(self):
        # the defaults must add to 1.0 in floating point, not just nearly
        cfg = MaskingConfig()
        assert cfg.mask_rate + cfg.random_rate + cfg.keep_rate == 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"mode": "both"},
            {"select_prob": 0.0},
            {"select_prob": 1.0001},
            {"mask_rate": 0.9},  # rates no longer sum to 1
            {"mask_rate": -0.1, "random_rate": 1.0, "keep_rate": 0.1},
            {"max_len": 1},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            MaskingConfig(**kwargs)


@pytest.fixture
def tokenized(toy_vocab):
    doc = Document(id="doc-1", text="playing health vaccines run walk")
    return tokenize_document(doc, toy_vocab)


class TestFindKeywordWords:
    def test_ascending_indices(self, tokenized):
        assert find_keyword_words(tokenized, {"health", "walk"}) == [1, 4]
        assert find_keyword_words(tokenized, set()) == []

    def test_every_occurrence_counts(self, toy_vocab):
        doc = Document(id="d", text="run walk run")
        tdoc = tokenize_document(doc, toy_vocab)
        assert find_keyword_words(tdoc, {"run"}) == [0, 2]

    def test_exact_surface_match_only(self, tokenized):
        # "playing" is a keyword only if listed; "play" does not match it
        assert find_keyword_words(tokenized, {"play"}) == []


class TestMaskExample:
    def test_all_masked(self, tokenized, toy_vocab):
        cfg = MaskingConfig(select_prob=1.0, mask_rate=1.0, random_rate=0.0, keep_rate=0.0, seed=1)
        eligible = list(range(len(tokenized.words)))
        ex = mask_example(tokenized, eligible, cfg, toy_vocab)
        # specials framed and untouched
        assert ex.input_ids[0] == toy_vocab.cls_id
        assert ex.input_ids[-1] == toy_vocab.sep_id
        assert ex.labels[0] == ex.labels[-1] == IGNORE_LABEL
        # every word position masked, labels carry originals
        for start, end in tokenized.word_token_ranges:
            assert ex.input_ids[start:end] == [toy_vocab.mask_id] * (end - start)
            assert ex.labels[start:end] == tokenized.input_ids[start:end]

    def test_keep_action_leaves_inputs(self, tokenized, toy_vocab):
        cfg = MaskingConfig(select_prob=1.0, mask_rate=0.0, random_rate=0.0, keep_rate=1.0, seed=1)
        ex = mask_example(tokenized, range(len(tokenized.words)), cfg, toy_vocab)
        assert ex.input_ids == tokenized.input_ids
        assert all(l != IGNORE_LABEL for s, e in tokenized.word_token_ranges for l in ex.labels[s:e])

    def test_random_action_draws_non_special_ids(self, tokenized, toy_vocab):
        cfg = MaskingConfig(select_prob=1.0, mask_rate=0.0, random_rate=1.0, keep_rate=0.0, seed=3)
        ex = mask_example(tokenized, range(len(tokenized.words)), cfg, toy_vocab)
        for start, end in tokenized.word_token_ranges:
            for tok, label, orig in zip(
                ex.input_ids[start:end], ex.labels[start:end], tokenized.input_ids[start:end]
            ):
                assert tok not in toy_vocab.special_ids
                assert label == orig

    def test_unselected_words_untouched(self, tokenized, toy_vocab):
        cfg = MaskingConfig(seed=5)
        ex = mask_example(tokenized, [1, 3], cfg, toy_vocab)
        for w, (start, end) in enumerate(tokenized.word_token_ranges):
            if w in (1, 3):
                continue
            assert ex.input_ids[start:end] == tokenized.input_ids[start:end]
            assert ex.labels[start:end] == [IGNORE_LABEL] * (end - start)

    def test_whole_word_atomicity(self, toy_vocab):
        # multi-subword words are labeled all-or-nothing
        doc = Document(id="d", text="vaccines playing vaccines playing vaccines")
        tdoc = tokenize_document(doc, toy_vocab)
        cfg = MaskingConfig(select_prob=0.5, seed=11)
        ex = mask_example(tdoc, range(len(tdoc.words)), cfg, toy_vocab)
        for start, end in tdoc.word_token_ranges:
            flags = [l != IGNORE_LABEL for l in ex.labels[start:end]]
            assert all(flags) or not any(flags)

    def test_eligible_order_is_irrelevant(self, tokenized, toy_vocab):
        cfg = MaskingConfig(seed=7)
        a = mask_example(tokenized, [3, 1, 4], cfg, toy_vocab)
        b = mask_example(tokenized, [1, 4, 3], cfg, toy_vocab)
        assert a == b

    def test_deterministic_per_seed(self, tokenized, toy_vocab):
        eligible = list(range(len(tokenized.words)))
        a = mask_example(tokenized, eligible, MaskingConfig(seed=7), toy_vocab)
        b = mask_example(tokenized, eligible, MaskingConfig(seed=7), toy_vocab)
        assert a == b

    def test_out_of_range_index(self, tokenized, toy_vocab):
        with pytest.raises(IndexError):
            mask_example(tokenized, [99], MaskingConfig(), toy_vocab)
        with pytest.raises(IndexError):
            mask_example(tokenized, [-1], MaskingConfig(), toy_vocab)


def keyword_corpus(n_docs: int, words_per_doc: int, seed: int = 0):
    """Synthetic docs built only from kw0..kw9 tokens."""
    rng = random.Random(seed)
    keywords = [f"kw{i}" for i in range(10)]
    docs = [
        Document(id=f"d{i}", text=" ".join(rng.choices(keywords, k=words_per_doc)))
        for i in range(n_docs)
    ]
    vocab = Vocabulary(list(TOY_TOKENS) + keywords)
    return docs, vocab, set(keywords)


class TestMaskingDistribution:
    def test_monte_carlo_rates(self):
        docs, vocab, keywords = keyword_corpus(400, 50)
        cfg = MaskingConfig(mode="keyword", seed=99)
        summary = EmissionSummary()
        for doc in docs:
            tdoc = tokenize_document(doc, vocab)
            eligible = find_keyword_words(tdoc, keywords)
            summary.words_eligible += len(eligible)
            from keymask.masking import _apply_mask

            _, decisions = _apply_mask(tdoc, eligible, cfg, vocab)
            summary.words_selected += len(decisions)
            for _, action in decisions:
                summary.actions[action] += 1
        assert summary.words_eligible == 20000
        selected_frac = summary.words_selected / summary.words_eligible
        assert selected_frac == pytest.approx(0.75, abs=0.02)
        for action, expected in [("mask", 0.8), ("random", 0.1), ("keep", 0.1)]:
            assert summary.actions[action] / summary.words_selected == pytest.approx(
                expected, abs=0.02
            )


class TestEmitDataset:
    def test_mode_keyword_requires_list(self, tmp_path, toy_vocab):
        with pytest.raises(ValueError, match="keyword"):
            emit_dataset([], toy_vocab, None, MaskingConfig(mode="keyword"), tmp_path / "o.jsonl")

    def test_mode_random_forbids_list(self, tmp_path, toy_vocab):
        with pytest.raises(ValueError, match="random"):
            emit_dataset(
                [], toy_vocab, {"run"}, MaskingConfig(mode="random"), tmp_path / "o.jsonl"
            )

    def test_zero_eligible_docs_still_emitted(self, tmp_path, toy_vocab):
        docs = [Document(id="a", text="playing run"), Document(id="b", text="walk")]
        out = tmp_path / "o.jsonl"
        summary = emit_dataset(docs, toy_vocab, {"zzz"}, MaskingConfig(seed=1), out)
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2
        assert summary.documents == 2
        assert summary.words_selected == 0
        for line in lines:
            record = json.loads(line)
            assert all(l == IGNORE_LABEL for l in record["labels"])

    def test_summary_matches_file(self, tmp_path):
        docs, vocab, keywords = keyword_corpus(50, 20, seed=4)
        out = tmp_path / "o.jsonl"
        summary = emit_dataset(docs, vocab, keywords, MaskingConfig(seed=2), out)
        n_lines = 0
        tokens = 0
        labeled = 0
        for line in out.read_text(encoding="utf-8").splitlines():
            record = json.loads(line)
            assert len(record["input_ids"]) == len(record["labels"])
            n_lines += 1
            tokens += len(record["input_ids"])
            labeled += sum(1 for l in record["labels"] if l != IGNORE_LABEL)
        assert summary.documents == n_lines == 50
        assert summary.tokens_total == tokens
        assert summary.labels_total == labeled
        assert sum(summary.actions.values()) == summary.words_selected

    def test_sidecar_contents(self, tmp_path, toy_vocab):
        out = tmp_path / "ds.jsonl"
        emit_dataset(
            [Document(id="a", text="run")],
            toy_vocab,
            {"run"},
            MaskingConfig(mode="keyword", seed=5),
            out,
            vocab_file="vocab.txt",
        )
        meta = json.loads((tmp_path / "ds.meta.json").read_text(encoding="utf-8"))
        assert meta == {
            "mode": "keyword",
            "select_prob": 0.75,
            "mask_rate": 0.8,
            "random_rate": 0.1,
            "keep_rate": 0.1,
            "seed": 5,
            "vocab_file": "vocab.txt",
            "scheduler_hint": "constant",
        }

    def test_random_mode_sidecar_and_eligibility(self, tmp_path, toy_vocab):
        out = tmp_path / "ds.jsonl"
        docs = [Document(id="a", text="playing health run walk the and of " * 30)]
        summary = emit_dataset(
            docs, toy_vocab, None, MaskingConfig(mode="random", seed=5), out
        )
        meta = json.loads((tmp_path / "ds.meta.json").read_text(encoding="utf-8"))
        assert meta["scheduler_hint"] == "linear"
        assert meta["select_prob"] == 0.15
        assert summary.words_eligible == 210  # every word is eligible

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        docs, vocab, keywords = keyword_corpus(120, 15, seed=8)
        cfg = MaskingConfig(seed=3)
        out1 = tmp_path / "t1.jsonl"
        out4 = tmp_path / "t4.jsonl"
        s1 = emit_dataset(docs, vocab, keywords, cfg, out1, threads=1)
        s4 = emit_dataset(docs, vocab, keywords, cfg, out4, threads=4)
        assert out1.read_bytes() == out4.read_bytes()
        assert s1 == s4

    def test_distinct_seeds_give_distinct_epochs(self, tmp_path):
        docs, vocab, keywords = keyword_corpus(30, 20, seed=8)
        out_a = tmp_path / "a.jsonl"
        out_b = tmp_path / "b.jsonl"
        emit_dataset(docs, vocab, keywords, MaskingConfig(seed=1), out_a)
        emit_dataset(docs, vocab, keywords, MaskingConfig(seed=2), out_b)
        assert out_a.read_bytes() != out_b.read_bytes()
