"""Desk corpus generator: determinism, separability, injected anomalies."""

import filecmp
from pathlib import Path

import pytest

from feedguard.corpus import dedup, ingest
from feedguard.deskdata import (DeskCorpusSpec, generate, keyword_vote,
                                write_corpus_files)
from feedguard.errors import DataError
from feedguard.textnorm import normalize

DATA_DIR = Path(__file__).parent / "data"


class TestSpec:
    def test_defaults_meet_minimums(self):
        spec = DeskCorpusSpec()
        assert len(spec.n_per_cell) >= 3
        assert 2 * sum(spec.n_per_cell.values()) >= 600

    def test_too_small_rejected(self):
        with pytest.raises(DataError):
            DeskCorpusSpec(n_per_cell={"ISOT": 10, "LIAR": 10, "PHEME": 10})

    def test_unknown_source_rejected(self):
        with pytest.raises(DataError):
            DeskCorpusSpec(n_per_cell={"ISOT": 200, "LIAR": 200, "nope": 200})


class TestGenerate:
    def test_deterministic_given_seed(self):
        a = generate(DeskCorpusSpec(seed=3))
        b = generate(DeskCorpusSpec(seed=3))
        assert a == b

    def test_different_seed_differs(self):
        a = generate(DeskCorpusSpec(seed=3))
        b = generate(DeskCorpusSpec(seed=4))
        assert a != b

    def test_cell_counts(self):
        spec = DeskCorpusSpec()
        posts = generate(spec)
        for source, n in spec.n_per_cell.items():
            base = [p for p in posts
                    if p.source == source and "-dup-" not in p.id
                    and "-noneng-" not in p.id and "-unv-" not in p.id]
            assert len(base) == 2 * n

    def test_duplicates_are_exact_copies(self, desk_posts):
        by_text = {}
        for p in desk_posts:
            if "-dup-" not in p.id and "-noneng-" not in p.id and "-unv-" not in p.id:
                by_text.setdefault(p.text, p)
        dups = [p for p in desk_posts if "-dup-" in p.id]
        assert dups
        assert all(p.text in by_text for p in dups)

    def test_dedup_removes_exactly_the_injected_duplicates(self, desk_posts):
        records, _ = ingest(desk_posts)
        kept, report = dedup(records)
        removed_ids = {r.id for r in records} - {r.id for r in kept}
        assert removed_ids == {r.id for r in records if "-dup-" in r.id}

    def test_non_english_lines_injected(self, desk_posts):
        noneng = [p for p in desk_posts if "-noneng-" in p.id]
        assert noneng
        from feedguard.textnorm import english_gate
        assert all(not english_gate(normalize(p.text)) for p in noneng)

    def test_separable_at_zero_noise(self):
        spec = DeskCorpusSpec(seed=11, noise_rate=0.0, duplicate_fraction=0.0,
                              non_english_fraction=0.0, unverified_fraction=0.0)
        posts = generate(spec)
        records, _ = ingest(posts)
        assert records
        hits = sum(keyword_vote(r.text.text) == r.y for r in records)
        assert hits == len(records)  # bag-of-words oracle is perfect

    def test_lengths_pass_the_length_gate(self, desk_posts):
        base = [p for p in desk_posts if "-noneng-" not in p.id]
        counts = [normalize(p.text).ws_token_count for p in base]
        assert min(counts) >= 10

    def test_generated_prevalence_exact_per_cell(self, desk_posts):
        from feedguard.corpus import harmonize_label
        spec = DeskCorpusSpec()
        for source, n in spec.n_per_cell.items():
            base = [p for p in desk_posts
                    if p.source == source and "-dup-" not in p.id
                    and "-noneng-" not in p.id and "-unv-" not in p.id]
            labels = [harmonize_label(p.source, p.raw_label) for p in base]
            assert labels.count(1) == n
            assert labels.count(0) == n


class TestSnapshot:
    def test_generator_reproduces_committed_snapshot(self, desk_posts, tmp_path):
        """The frozen corpus files and the generator must stay in lockstep."""
        write_corpus_files(desk_posts, tmp_path)
        frozen_dir = DATA_DIR / "desk"
        for source in DeskCorpusSpec().n_per_cell:
            fresh = tmp_path / f"{source}.tsv"
            frozen = frozen_dir / f"{source}.tsv"
            assert frozen.exists(), f"missing snapshot {frozen}"
            assert filecmp.cmp(fresh, frozen, shallow=False), source
