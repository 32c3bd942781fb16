#!/usr/bin/env python3
"""Regenerate every committed test fixture.

Deterministic: re-running on the same code must reproduce the committed
bytes (the snapshot tests enforce exactly that).  Run from the repo root:

    python tools/make_fixtures.py
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"
sys.path.insert(0, str(ROOT / "tests"))

from feedguard.cli import main as cli_main
from feedguard.corpus import read_records
from feedguard.metrics import full_report
from feedguard.quant import load_quant_model, qpredict_probs
from feedguard.runtime import FeedPost, Session, load_bundle
from feedguard.tokenizer import load_vocab
from feedguard.train import encode_records

# fixed posts exercising every verdict status; the extension shell reuses
# these for its cross-boundary equivalence test
GOLDEN_POSTS = [
    {"post_id": "clean-1", "platform": "x",
     "text": "the committee confirmed the verified records for the city budget "
             "during the town hall meeting this week"},
    {"post_id": "flagged-1", "platform": "facebook",
     "text": "shocking secret miracle cure the elites keep hidden share this "
             "leaked bombshell before removal today"},
    {"post_id": "flagged-2", "platform": "x",
     "text": "banned footage proves the rigged count and the coverup was "
             "exposed in a leaked report again"},
    {"post_id": "dup-of-clean-1", "platform": "facebook",
     "text": "the committee confirmed the verified records for the city budget "
             "during the town hall meeting this week"},
    {"post_id": "short-1", "platform": "x", "text": "way too short to classify"},
    {"post_id": "noneng-1", "platform": "facebook",
     "text": "это полностью русский текст написанный специально для проверки "
             "фильтра языка и ничего больше"},
    {"post_id": "clean-2", "platform": "x",
     "text": "officials published the complete records and the audit confirmed "
             "the reported totals for the transit schedule"},
]


def main() -> None:
    from feedguard.deskdata import DeskCorpusSpec, generate, write_corpus_files
    from feedguard.corpus import SPLITS, build_splits, dedup, ingest
    from feedguard.tokenizer import build_vocab, save_vocab

    # 1. desk corpus + vocab snapshots
    posts = generate(DeskCorpusSpec())
    write_corpus_files(posts, DATA / "desk")
    records, _ = ingest(posts)
    records, _ = dedup(records)
    manifest = build_splits(records, seed=42, stage2_size=600)
    by_split = {s: [] for s in SPLITS}
    for rec in records:
        by_split[manifest.assignments[rec.id]].append(rec)
    texts = [r.text for s in ("Stage0", "Stage1", "Stage2") for r in by_split[s]]
    save_vocab(DATA / "desk_vocab.txt", build_vocab(texts, 2000))
    print(f"desk snapshot: {len(posts)} posts; splits {manifest.counts}")

    # 2. golden run: the pinned desk config end to end
    sys.path.insert(0, str(ROOT / "tests"))
    from conftest import DESK_CONFIG

    golden = DATA / "golden"
    if golden.exists():
        shutil.rmtree(golden)
    golden.mkdir(parents=True)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        (tmp / "config.json").write_text(json.dumps(DESK_CONFIG, indent=2))
        for step in (
            ["desk-corpus", "--out", str(tmp / "corpora"), "--seed", "7"],
            ["prepare", "--config", str(tmp / "config.json")],
            ["train", "--config", str(tmp / "config.json")],
        ):
            assert cli_main(step) == 0, step
        run = tmp / "run"
        assert cli_main(["quantize", "--checkpoint", str(run / "model.ckpt"),
                         "--out", str(run / "model.q8")]) == 0
        assert cli_main(["export-bundle", "--checkpoint", str(run / "model.q8"),
                         "--vocab", str(run / "vocab.txt"),
                         "--calibration", str(run / "calibration.json"),
                         "--seed", "7", "--out", str(golden / "bundle")]) == 0
        shutil.copyfile(run / "records" / "Test.tsv", golden / "Test.tsv")

    # 3. golden verdicts over the fixed posts
    engine, tau = load_bundle(golden / "bundle")
    session = Session(engine, tau)
    verdict_lines = []
    for post in GOLDEN_POSTS:
        v = session.classify_post(FeedPost(**post))
        verdict_lines.append(json.dumps({"post_id": v.post_id, "status": v.status,
                                         "p1": v.p1}))
        if v.p1 is not None:
            margin = abs(v.p1 - tau)
            assert margin > 1e-3, f"{v.post_id}: p1 {v.p1} too close to tau {tau}"
    (golden / "golden_posts.jsonl").write_text(
        "\n".join(json.dumps(p) for p in GOLDEN_POSTS) + "\n")
    (golden / "golden_verdicts.jsonl").write_text("\n".join(verdict_lines) + "\n")

    # 4. golden metrics on the Test split (quantized path, calibrated tau)
    qmodel = load_quant_model(golden / "bundle" / "model.q8")
    vocab = load_vocab(golden / "bundle" / "vocab.txt")
    test_records = read_records(golden / "Test.tsv")
    ids, mask, y = encode_records(test_records, vocab, qmodel.config.max_len)
    probs = qpredict_probs(qmodel, ids, mask)
    margin = min(abs(float(p) - tau) for p in probs)
    assert margin > 1e-3, f"test-split prob within {margin} of tau; counts unstable"
    report = full_report(probs, y, tau)
    (golden / "golden_metrics.json").write_text(
        json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
    print(f"golden: tau={tau} test macro_f1={report.macro_f1:.4f} "
          f"margin-to-tau={margin:.4f}")


if __name__ == "__main__":
    main()
