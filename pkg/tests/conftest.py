"""Shared fixtures: the desk corpus and one full CLI pipeline run per session."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import pytest

from feedguard.cli import main as cli_main
from feedguard.corpus import SPLITS, build_splits, dedup, ingest
from feedguard.deskdata import DeskCorpusSpec, generate
from feedguard.tokenizer import build_vocab

DATA_DIR = Path(__file__).parent / "data"

# pinned desk-scale run configuration (see tests/data/desk_config.json);
# the small batches give the optimizer enough steps on a ~1200-row corpus
DESK_CONFIG = {
    "seed": 7,
    "paths": {
        "corpora": {s: f"corpora/{s}.tsv"
                    for s in ("ISOT", "LIAR", "PHEME", "FNN", "TruthSeeker")},
        "out_dir": "run",
    },
    "model": {"n_layers": 2, "d_model": 64, "n_heads": 2, "d_ff": 128,
              "vocab_size": 2000, "max_len": 64, "dropout_rate": 0.1},
    "splits": {"seed": 42, "stage2_size": 600, "min_tokens": 10},
    "train": {"lr": 0.002, "batch_size": 16, "accumulation": 1,
              "stages": [
                  {"name": "Stage0", "split": "Stage0", "epochs": 3,
                   "loss": "weighted_bce", "freeze_lowest_layers": 1,
                   "balance": True, "class_weights": [1.0, 1.0]},
                  {"name": "Stage1", "split": "Stage1", "epochs": 1,
                   "loss": "weighted_bce"},
                  {"name": "Stage2", "split": "Stage2", "epochs": 10,
                   "loss": "focal", "fgm_enabled": True},
              ]},
    "quantize": True,
}


@pytest.fixture(scope="session")
def desk_posts():
    return generate(DeskCorpusSpec())


@pytest.fixture(scope="session")
def desk_records(desk_posts):
    records, _ = ingest(desk_posts)
    records, _ = dedup(records)
    return records


@pytest.fixture(scope="session")
def desk_split_map(desk_records):
    manifest = build_splits(desk_records, seed=42, stage2_size=600)
    by_split = {s: [] for s in SPLITS}
    for rec in desk_records:
        by_split[manifest.assignments[rec.id]].append(rec)
    return manifest, by_split


@pytest.fixture(scope="session")
def desk_vocab(desk_split_map):
    _, by_split = desk_split_map
    texts = [r.text for s in ("Stage0", "Stage1", "Stage2") for r in by_split[s]]
    return build_vocab(texts, 2000)


@dataclass
class DeskRun:
    """Artifacts of one CLI pipeline run: desk-corpus -> prepare -> train ->
    quantize -> export-bundle."""

    root: Path
    corpora_dir: Path
    out_dir: Path
    bundle_dir: Path
    config_path: Path
    elapsed_s: float

    @property
    def records_dir(self) -> Path:
        return self.out_dir / "records"

    @property
    def checkpoint(self) -> Path:
        return self.out_dir / "model.ckpt"

    @property
    def quant_checkpoint(self) -> Path:
        return self.out_dir / "model.q8"

    @property
    def vocab_path(self) -> Path:
        return self.out_dir / "vocab.txt"

    @property
    def calibration_path(self) -> Path:
        return self.out_dir / "calibration.json"

    @property
    def tau(self) -> float:
        return json.loads(self.calibration_path.read_text())["tau"]

    @property
    def history(self) -> list[dict]:
        lines = (self.out_dir / "history.jsonl").read_text().splitlines()
        return [json.loads(line) for line in lines]


@pytest.fixture(scope="session")
def desk_run(tmp_path_factory) -> DeskRun:
    root = tmp_path_factory.mktemp("desk_run")
    config_path = root / "config.json"
    config_path.write_text(json.dumps(DESK_CONFIG, indent=2))
    bundle_dir = root / "bundle"

    start = time.perf_counter()
    assert cli_main(["desk-corpus", "--out", str(root / "corpora"),
                     "--seed", "7"]) == 0
    assert cli_main(["prepare", "--config", str(config_path)]) == 0
    assert cli_main(["train", "--config", str(config_path)]) == 0
    out_dir = root / "run"
    assert cli_main(["quantize", "--checkpoint", str(out_dir / "model.ckpt"),
                     "--out", str(out_dir / "model.q8")]) == 0
    assert cli_main(["export-bundle",
                     "--checkpoint", str(out_dir / "model.q8"),
                     "--vocab", str(out_dir / "vocab.txt"),
                     "--calibration", str(out_dir / "calibration.json"),
                     "--seed", "7", "--out", str(bundle_dir)]) == 0
    elapsed = time.perf_counter() - start

    return DeskRun(root=root, corpora_dir=root / "corpora", out_dir=out_dir,
                   bundle_dir=bundle_dir, config_path=config_path,
                   elapsed_s=elapsed)
