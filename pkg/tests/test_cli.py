"""CLI wiring: the full pipeline over the desk corpus, determinism of
prepare, error exit codes, and the golden desk artifacts."""

import json
from pathlib import Path

import pytest

from feedguard.cli import main

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = DATA_DIR / "golden"


class TestPipeline:
    def test_full_run_artifacts(self, desk_run):
        assert desk_run.checkpoint.exists()
        assert desk_run.quant_checkpoint.exists()
        assert desk_run.vocab_path.exists()
        assert (desk_run.out_dir / "history.jsonl").exists()
        assert (desk_run.out_dir / "splits.manifest").exists()
        assert (desk_run.bundle_dir / "bundle.json").exists()

    def test_curriculum_structure_in_history(self, desk_run):
        stages = [rec["stage"] for rec in desk_run.history]
        assert stages[0] == "Stage0"
        assert stages.count("Stage1") == 1  # single-epoch pass
        assert stages[-1] == "Stage2"

    def test_manifests_record_hashes(self, desk_run):
        manifest = json.loads((desk_run.out_dir / "train_manifest.json").read_text())
        assert manifest["command"] == "train"
        assert "model.ckpt" in manifest["outputs"]
        assert len(manifest["outputs"]["model.ckpt"]["sha256"]) == 64

    def test_eval_runs_on_both_checkpoints(self, desk_run, tmp_path, capsys):
        for ckpt in (desk_run.checkpoint, desk_run.quant_checkpoint):
            out = tmp_path / f"report-{ckpt.suffix[1:]}.json"
            code = main(["eval", "--checkpoint", str(ckpt),
                         "--vocab", str(desk_run.vocab_path),
                         "--records", str(desk_run.records_dir / "Test.tsv"),
                         "--calibration", str(desk_run.calibration_path),
                         "--out", str(out)])
            assert code == 0
            report = json.loads(out.read_text())
            assert report["macro_f1"] > 0.8
        capsys.readouterr()

    def test_classify_writes_verdicts(self, desk_run, tmp_path, capsys):
        posts = tmp_path / "posts.txt"
        posts.write_text(
            "the committee confirmed the verified records for the city budget today\n"
            "shocking secret miracle cure the elites keep hidden share before removal now\n",
            encoding="utf-8")
        out = tmp_path / "verdicts.jsonl"
        code = main(["classify", "--bundle", str(desk_run.bundle_dir),
                     "--posts", str(posts), "--out", str(out)])
        assert code == 0
        verdicts = [json.loads(l) for l in out.read_text().splitlines()]
        assert len(verdicts) == 2
        assert all(v["status"] in ("flagged", "clean") for v in verdicts)
        capsys.readouterr()

    def test_bench_reports_stats(self, desk_run, tmp_path, capsys):
        posts = tmp_path / "posts.txt"
        lines = [f"the committee confirmed the verified records for budget item {i}\n"
                 for i in range(15)]
        posts.write_text("".join(lines), encoding="utf-8")
        out = tmp_path / "bench.json"
        code = main(["bench", "--bundle", str(desk_run.bundle_dir),
                     "--posts", str(posts), "--warmup", "5",
                     "--out", str(out)])
        assert code == 0
        stats = json.loads(out.read_text())["stats"]
        assert stats["count"] == 10
        assert stats["median"] <= stats["p90"] <= stats["p99"]
        capsys.readouterr()

    def test_prepare_rerun_is_byte_identical(self, desk_run, tmp_path, capsys):
        rerun = tmp_path / "rerun"
        code = main(["prepare", "--config", str(desk_run.config_path),
                     "--out-dir", str(rerun)])
        assert code == 0
        original = (desk_run.out_dir / "splits.manifest").read_bytes()
        assert (rerun / "splits.manifest").read_bytes() == original
        for split in ("Stage0", "Stage1", "Stage2", "Dev", "Test"):
            a = (desk_run.records_dir / f"{split}.tsv").read_bytes()
            b = (rerun / "records" / f"{split}.tsv").read_bytes()
            assert a == b, split
        capsys.readouterr()


class TestErrorHandling:
    def test_unknown_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["prepare", "--config", "x.json", "--bogus-flag"])
        assert exc.value.code == 2
        capsys.readouterr()

    def test_invalid_config_field_exits_3_and_names_field(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({
            "paths": {"out_dir": "run"},
            "model": {"d_model": "sixty-four"},
        }))
        code = main(["prepare", "--config", str(cfg)])
        assert code == 3
        assert "model.d_model" in capsys.readouterr().err

    def test_unknown_config_key_exits_3(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"paths": {"out_dir": "run"}, "modle": {}}))
        code = main(["prepare", "--config", str(cfg)])
        assert code == 3
        assert "modle" in capsys.readouterr().err

    def test_missing_config_exits_4(self, tmp_path, capsys):
        code = main(["prepare", "--config", str(tmp_path / "nope.json")])
        assert code == 4
        capsys.readouterr()

    def test_missing_checkpoint_exits_4(self, tmp_path, capsys):
        code = main(["quantize", "--checkpoint", str(tmp_path / "none.ckpt"),
                     "--out", str(tmp_path / "out.q8")])
        assert code == 4
        capsys.readouterr()

    def test_corrupt_checkpoint_exits_5(self, tmp_path, capsys):
        bad = tmp_path / "bad.ckpt"
        bad.write_bytes(b"NOTMAGIC" + bytes(32))
        code = main(["quantize", "--checkpoint", str(bad),
                     "--out", str(tmp_path / "out.q8")])
        assert code == 5
        capsys.readouterr()

    def test_export_bundle_rejects_float_checkpoint(self, desk_run, tmp_path, capsys):
        code = main(["export-bundle", "--checkpoint", str(desk_run.checkpoint),
                     "--vocab", str(desk_run.vocab_path), "--tau", "0.5",
                     "--out", str(tmp_path / "b")])
        assert code == 5
        capsys.readouterr()


class TestBenchKernels:
    def test_subcommand_runs(self, capsys):
        code = main(["bench-kernels", "--shapes", "8,16,8", "--repeat", "2"])
        assert code == 0
        out = capsys.readouterr().out
        assert "backend" in out


class TestGoldenArtifacts:
    """Frozen desk-model outputs: the golden bundle must keep reproducing
    the same verdicts and the same metrics report."""

    def test_golden_verdicts(self, capsys):
        expected = [json.loads(l) for l in
                    (GOLDEN_DIR / "golden_verdicts.jsonl").read_text().splitlines()]
        from feedguard.runtime import FeedPost, Session, load_bundle
        engine, tau = load_bundle(GOLDEN_DIR / "bundle")
        session = Session(engine, tau)
        posts = [json.loads(l) for l in
                 (GOLDEN_DIR / "golden_posts.jsonl").read_text().splitlines()]
        for post, exp in zip(posts, expected):
            verdict = session.classify_post(
                FeedPost(post_id=post["post_id"], platform=post["platform"],
                         text=post["text"]))
            assert verdict.status == exp["status"], post["post_id"]
            if exp["p1"] is None:
                assert verdict.p1 is None
            else:
                # tolerance absorbs BLAS reduction-order differences only
                assert verdict.p1 == pytest.approx(exp["p1"], abs=1e-4)

    def test_golden_metrics_report(self, capsys):
        expected = json.loads((GOLDEN_DIR / "golden_metrics.json").read_text())
        from feedguard.corpus import read_records
        from feedguard.metrics import full_report
        from feedguard.quant import load_quant_model, qpredict_probs
        from feedguard.tokenizer import load_vocab
        from feedguard.train import encode_records

        qmodel = load_quant_model(GOLDEN_DIR / "bundle" / "model.q8")
        vocab = load_vocab(GOLDEN_DIR / "bundle" / "vocab.txt")
        records = read_records(GOLDEN_DIR / "Test.tsv")
        ids, mask, y = encode_records(records, vocab, qmodel.config.max_len)
        probs = qpredict_probs(qmodel, ids, mask)
        tau = json.loads((GOLDEN_DIR / "bundle" / "bundle.json").read_text())["tau"]
        report = full_report(probs, y, tau)
        assert report.confusion.tp == expected["confusion"]["tp"]
        assert report.confusion.fp == expected["confusion"]["fp"]
        assert report.confusion.tn == expected["confusion"]["tn"]
        assert report.confusion.fn == expected["confusion"]["fn"]
        assert report.accuracy == pytest.approx(expected["accuracy"], abs=1e-9)
        assert report.macro_f1 == pytest.approx(expected["macro_f1"], abs=1e-9)
        assert report.auroc == pytest.approx(expected["auroc"], abs=1e-3)
