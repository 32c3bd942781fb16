"""Single command-line entry point wiring all modules.

Subcommands: prepare, train, quantize, eval, bench, classify,
export-bundle, plus desk-corpus (synthetic data) and bench-kernels
(compiled vs numpy backend comparison).  Every run writes a manifest with
the config snapshot, seed, and sha256 of each artifact so runs can be
reproduced byte for byte.

Exit codes: 0 success, 2 usage error, 3 invalid config, 4 missing file,
5 data/checkpoint/training error, 1 unexpected failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from feedguard import __version__, kernel_bench, kernels
from feedguard.config import RunConfig, load_config
from feedguard.corpus import (SPLITS, build_splits, dedup, ingest,
                              read_raw_posts, read_records, write_records)
from feedguard.deskdata import DeskCorpusSpec, generate, write_corpus_files
from feedguard.encoder import (CKPT_MAGIC, init_params, load_checkpoint,
                               save_checkpoint)
from feedguard.errors import (CheckpointError, ConfigError, DataError,
                              FeedguardError, LabelError, TrainingDiverged)
from feedguard.metrics import full_report
from feedguard.quant import (QCKPT_MAGIC, load_quant_model, qpredict_probs,
                             quantize_model, save_quant_model)
from feedguard.runtime import (FeedPost, Session, bench, export_bundle,
                               load_bundle, _sha256)
from feedguard.tokenizer import build_vocab, load_vocab, save_vocab
from feedguard.train import (calibrate_threshold, encode_records,
                             predict_probs, run_curriculum, DEFAULT_TAU_GRID)

EXIT_OK = 0
EXIT_CONFIG = 3
EXIT_MISSING = 4
EXIT_DATA = 5
EXIT_UNEXPECTED = 1


def _write_manifest(out_dir: Path, command: str, seed, config_snapshot,
                    outputs: dict[str, Path], extra: dict | None = None) -> Path:
    manifest = {
        "command": command,
        "seed": seed,
        "config": config_snapshot,
        "outputs": {name: {"path": str(path), "sha256": _sha256(path)}
                    for name, path in sorted(outputs.items())},
    }
    if extra:
        manifest.update(extra)
    path = out_dir / f"{command}_manifest.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _require_file(path: str | Path, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"{what} not found: {p}")
    return p


def _sniff_checkpoint(path: Path) -> str:
    with open(path, "rb") as f:
        magic = f.read(8)
    if magic == CKPT_MAGIC:
        return "float"
    if magic == QCKPT_MAGIC:
        return "quant"
    raise CheckpointError(f"{path}: unrecognized checkpoint magic {magic!r}")


def _read_posts_file(path: Path, fmt: str) -> list[FeedPost]:
    posts = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            if fmt == "tsv":
                parts = line.split("\t", 2)
                if len(parts) != 3:
                    raise DataError(f"{path}:{lineno}: expected 3 tab-separated "
                                    f"fields (id, platform, text)")
                posts.append(FeedPost(post_id=parts[0], platform=parts[1],
                                      text=parts[2]))
            else:
                posts.append(FeedPost(post_id=str(lineno), platform="other",
                                      text=line))
    return posts


def _load_tau(args) -> float:
    if getattr(args, "tau", None) is not None:
        return float(args.tau)
    calib_path = getattr(args, "calibration", None)
    if calib_path is None:
        raise ConfigError("tau", "pass --tau or --calibration")
    with open(_require_file(calib_path, "calibration file"), encoding="utf-8") as f:
        return float(json.load(f)["tau"])


# ---------------------------------------------------------------------------
# subcommands


def cmd_prepare(args) -> int:
    cfg: RunConfig = load_config(args.config)
    if not cfg.corpora:
        raise ConfigError("paths.corpora", "prepare needs at least one corpus file")
    out_dir = Path(args.out_dir) if args.out_dir else cfg.out_dir
    records_dir = out_dir / "records"
    records_dir.mkdir(parents=True, exist_ok=True)

    posts = []
    for source in sorted(cfg.corpora):
        path = _require_file(cfg.corpora[source], f"corpus file for {source}")
        for post in read_raw_posts(path):
            if post.source != source:
                raise DataError(f"{path}: record {post.id} claims source "
                                f"{post.source!r}, expected {source!r}")
            posts.append(post)

    records, ingest_report = ingest(posts, min_tokens=cfg.min_tokens)
    records, dedup_report = dedup(records)
    manifest = build_splits(records, seed=cfg.split_seed,
                            stage2_mix=cfg.stage2_mix,
                            stage2_size=cfg.stage2_size)

    by_split = {s: [] for s in SPLITS}
    for rec in records:
        by_split[manifest.assignments[rec.id]].append(rec)
    outputs = {}
    for split in SPLITS:
        path = records_dir / f"{split}.tsv"
        write_records(path, by_split[split])
        outputs[f"records/{split}.tsv"] = path

    splits_path = out_dir / "splits.manifest"
    with open(splits_path, "w", encoding="utf-8") as f:
        json.dump({
            "seed": manifest.seed,
            "counts": manifest.counts,
            "prevalence": manifest.prevalence,
            "splits": {s: [r.id for r in by_split[s]] for s in SPLITS},
        }, f, indent=2, sort_keys=True)
        f.write("\n")
    outputs["splits.manifest"] = splits_path

    _write_manifest(out_dir, "prepare", cfg.split_seed, cfg.raw, outputs, extra={
        "ingest": {"total": ingest_report.total, "kept": ingest_report.kept,
                   "dropped_short": ingest_report.dropped_short,
                   "dropped_language": ingest_report.dropped_language,
                   "dropped_unlabeled": ingest_report.dropped_unlabeled},
        "dedup": {"raw": dict(dedup_report.raw), "kept": dict(dedup_report.kept)},
    })
    for split in SPLITS:
        print(f"{split}: {manifest.counts[split]} records, "
              f"prevalence {manifest.prevalence[split]:.3f}")
    print(f"wrote {splits_path}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg: RunConfig = load_config(args.config)
    out_dir = cfg.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    records_dir = Path(args.splits_dir) if args.splits_dir else out_dir / "records"
    splits = {}
    for split in SPLITS:
        path = _require_file(records_dir / f"{split}.tsv", f"{split} records")
        splits[split] = read_records(path)

    train_texts = [r.text for s in ("Stage0", "Stage1", "Stage2") for r in splits[s]]
    vocab = build_vocab(train_texts, cfg.model.vocab_size)
    model_cfg = replace(cfg.model, vocab_size=len(vocab))
    params = init_params(model_cfg, seed=cfg.seed)

    best, history = run_curriculum(cfg.plan, splits, model_cfg, params, vocab)

    dev_ids, dev_mask, dev_y = encode_records(splits["Dev"], vocab, model_cfg.max_len)
    dev_probs = predict_probs(best, dev_ids, dev_mask)
    calib = calibrate_threshold(dev_probs, dev_y)
    tau = cfg.tau_override if cfg.tau_override is not None else calib.tau

    vocab_path = out_dir / "vocab.txt"
    save_vocab(vocab_path, vocab)
    ckpt_path = out_dir / "model.ckpt"
    save_checkpoint(ckpt_path, best)
    history_path = out_dir / "history.jsonl"
    history.write_jsonl(history_path)
    calib_path = out_dir / "calibration.json"
    with open(calib_path, "w", encoding="utf-8") as f:
        json.dump({"tau": tau, "calibrated_tau": calib.tau,
                   "dev_macro_f1": calib.dev_macro_f1,
                   "grid": list(DEFAULT_TAU_GRID)}, f, indent=2, sort_keys=True)
        f.write("\n")

    outputs = {"vocab.txt": vocab_path, "model.ckpt": ckpt_path,
               "history.jsonl": history_path, "calibration.json": calib_path}
    _write_manifest(out_dir, "train", cfg.seed, cfg.raw, outputs, extra={
        "best_epoch": history.best_epoch,
        "best_dev_macro_f1": history.best_dev_macro_f1,
        "skipped_steps": history.skipped_steps,
    })
    for rec in history.epochs:
        print(f"epoch {rec.epoch} [{rec.stage}] loss {rec.train_loss:.4f} "
              f"dev macro-F1 {rec.dev_macro_f1:.4f} acc {rec.dev_accuracy:.4f} "
              f"auroc {rec.dev_auroc:.4f}")
    print(f"best epoch {history.best_epoch} (dev macro-F1 "
          f"{history.best_dev_macro_f1:.4f}); tau = {tau}")
    return EXIT_OK


def cmd_quantize(args) -> int:
    ckpt = _require_file(args.checkpoint, "checkpoint")
    if _sniff_checkpoint(ckpt) != "float":
        raise CheckpointError(f"{ckpt}: quantize expects a float checkpoint")
    params = load_checkpoint(ckpt)
    qmodel = quantize_model(params)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_quant_model(out, qmodel)
    report = qmodel.report
    report_path = out.parent / (out.name + ".report.json")
    with open(report_path, "w", encoding="utf-8") as f:
        json.dump(report.as_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    _write_manifest(out.parent, "quantize", None, {"checkpoint": str(ckpt)},
                    {out.name: out, report_path.name: report_path})
    print(f"covered weights: {report.covered_f32_bytes} -> "
          f"{report.covered_int8_bytes} bytes "
          f"(ratio {report.covered_ratio:.2f}x, "
          f"{report.covered_ratio_with_scales:.2f}x with scales)")
    print(f"checkpoint file: {report.float_file_bytes} -> "
          f"{report.quant_file_bytes} bytes ({report.file_ratio:.2f}x)")
    return EXIT_OK


def cmd_eval(args) -> int:
    ckpt = _require_file(args.checkpoint, "checkpoint")
    vocab = load_vocab(_require_file(args.vocab, "vocab file"))
    records = read_records(_require_file(args.records, "records file"))
    if not records:
        raise DataError(f"{args.records}: no records to evaluate")
    tau = _load_tau(args)

    kind = _sniff_checkpoint(ckpt)
    if kind == "float":
        params = load_checkpoint(ckpt)
        ids, mask, y = encode_records(records, vocab, params.config.max_len)
        probs = predict_probs(params, ids, mask)
    else:
        qmodel = load_quant_model(ckpt)
        ids, mask, y = encode_records(records, vocab, qmodel.config.max_len)
        probs = qpredict_probs(qmodel, ids, mask)

    report = full_report(probs, y, tau)
    cm = report.confusion
    print(f"n={cm.total} tau={tau}")
    print(f"confusion: tp={cm.tp} fp={cm.fp} tn={cm.tn} fn={cm.fn}")
    print(f"accuracy={report.accuracy:.4f} precision={report.precision:.4f} "
          f"recall={report.recall:.4f} f1={report.f1:.4f}")
    print(f"macro_f1={report.macro_f1:.4f} auroc={report.auroc:.4f}")
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as f:
            json.dump(report.as_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        _write_manifest(out.parent, "eval", None,
                        {"checkpoint": str(ckpt), "records": str(args.records),
                         "tau": tau}, {out.name: out})
    return EXIT_OK


def cmd_classify(args) -> int:
    engine, tau = load_bundle(_require_file(args.bundle, "bundle directory"))
    if args.tau is not None:
        tau = float(args.tau)
    posts = _read_posts_file(_require_file(args.posts, "posts file"), args.format)
    session = Session(engine, tau)
    lines = [json.dumps(session.classify_post(p).as_dict()) for p in posts]
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {len(lines)} verdicts to {out}")
    else:
        for line in lines:
            print(line)
    return EXIT_OK


def cmd_bench(args) -> int:
    engine, tau = load_bundle(_require_file(args.bundle, "bundle directory"))
    posts = _read_posts_file(_require_file(args.posts, "posts file"), args.format)
    report = bench(engine, tau, posts, warmup_n=args.warmup)
    stats = report.stats
    print(f"posts={report.total_posts} warmup={report.warmup_n} "
          f"samples={stats.count}")
    print(f"latency ms: median={stats.median:.3f} p90={stats.p90:.3f} "
          f"p99={stats.p99:.3f} mean={stats.mean:.3f}")
    if report.max_rss_bytes is not None:
        print(f"max rss: {report.max_rss_bytes / 1e6:.1f} MB")
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as f:
            json.dump(report.as_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
    return EXIT_OK


def cmd_export_bundle(args) -> int:
    ckpt = _require_file(args.checkpoint, "quantized checkpoint")
    if _sniff_checkpoint(ckpt) != "quant":
        raise CheckpointError(f"{ckpt}: export-bundle expects a quantized "
                              "checkpoint (run quantize first)")
    vocab_path = _require_file(args.vocab, "vocab file")
    tau = _load_tau(args)
    manifest_path = export_bundle(args.out, ckpt, vocab_path, tau,
                                  seed=args.seed)
    print(f"wrote bundle manifest {manifest_path}")
    return EXIT_OK


def cmd_desk_corpus(args) -> int:
    spec = DeskCorpusSpec(seed=args.seed)
    posts = generate(spec)
    paths = write_corpus_files(posts, args.out)
    out_dir = Path(args.out)
    _write_manifest(out_dir, "desk-corpus", spec.seed,
                    {"n_per_cell": spec.n_per_cell,
                     "noise_rate": spec.noise_rate,
                     "duplicate_fraction": spec.duplicate_fraction,
                     "non_english_fraction": spec.non_english_fraction},
                    {p.name: p for p in paths.values()})
    print(f"wrote {len(posts)} posts across {len(paths)} corpora to {out_dir}")
    return EXIT_OK


def cmd_bench_kernels(args) -> int:
    shapes = kernel_bench.DEFAULT_SHAPES
    if args.shapes:
        shapes = tuple(tuple(int(x) for x in s.split(",")) for s in args.shapes.split(";"))
        if any(len(s) != 3 for s in shapes):
            raise ConfigError("shapes", "expected 'm,k,n[;m,k,n...]'")
    rows = kernel_bench.run_benchmark(shapes=shapes, repeat=args.repeat)
    print(f"active backend: {kernels.active_backend()}")
    print(kernel_bench.format_table(rows))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump([r.as_dict() for r in rows], f, indent=2)
            f.write("\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feedguard",
        description="On-device misinformation detection toolkit.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="ingest corpora, dedup, build splits")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", help="override paths.out_dir")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("train", help="run the staged curriculum")
    p.add_argument("--config", required=True)
    p.add_argument("--splits-dir", help="records directory (default <out_dir>/records)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("quantize", help="INT8-quantize a float checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("eval", help="metrics report on a records file")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--tau", type=float)
    p.add_argument("--calibration", help="calibration.json from train")
    p.add_argument("--out", help="write the report as JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("classify", help="stream posts through a bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--posts", required=True)
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    p.add_argument("--tau", type=float, help="override the bundle threshold")
    p.add_argument("--out", help="write verdicts as JSONL")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bench", help="latency percentiles over a posts file")
    p.add_argument("--bundle", required=True)
    p.add_argument("--posts", required=True)
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    p.add_argument("--warmup", type=int, default=10)
    p.add_argument("--out", help="write the stats as JSON")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-bundle",
                       help="package checkpoint+vocab+tau for deployment")
    p.add_argument("--checkpoint", required=True, help="quantized checkpoint")
    p.add_argument("--vocab", required=True)
    p.add_argument("--tau", type=float)
    p.add_argument("--calibration", help="calibration.json from train")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_bundle)

    p = sub.add_parser("desk-corpus", help="generate the synthetic desk corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_desk_corpus)

    p = sub.add_parser("bench-kernels",
                       help="compare compiled and numpy INT8 kernels")
    p.add_argument("--shapes", help="m,k,n[;m,k,n...]")
    p.add_argument("--repeat", type=int, default=50)
    p.add_argument("--out", help="write timings as JSON")
    p.set_defaults(func=cmd_bench_kernels)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (DataError, LabelError, CheckpointError, TrainingDiverged) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FeedguardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
