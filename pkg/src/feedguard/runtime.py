"""Streaming post classifier: the deployable engine behind the extension.

Pipeline per post: normalize, length gate, language gate, duplicate
suppression keyed on the 8-byte fingerprint of the normalized text, then
tokenize + model inference and a thresholded verdict.  A skipped post never
touches the model.  Wall-clock latency is recorded for every call; nothing
in this module performs network activity.
"""

from __future__ import annotations

import hashlib
import json
import math
import shutil
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from feedguard import quant as quantmod
from feedguard.corpus import PLATFORMS, fingerprint
from feedguard.encoder import ModelConfig, ModelParams, forward, predict_proba
from feedguard.errors import CheckpointError, DataError
from feedguard.textnorm import CleanText, english_gate, length_gate, normalize
from feedguard.tokenizer import Vocab, batch_arrays, encode, load_vocab, save_vocab

STATUSES = ("flagged", "clean", "skipped_language", "skipped_short",
            "suppressed_duplicate")


@dataclass(frozen=True)
class FeedPost:
    post_id: str
    platform: str
    text: str

    def __post_init__(self):
        if not self.post_id:
            raise DataError("FeedPost.post_id must be non-empty")
        if self.platform not in PLATFORMS:
            raise DataError(f"unknown platform {self.platform!r}")


@dataclass(frozen=True)
class Verdict:
    post_id: str
    status: str
    p1: Optional[float]
    latency_ms: float

    def as_dict(self) -> dict:
        return {"post_id": self.post_id, "status": self.status,
                "p1": self.p1, "latency_ms": self.latency_ms}


@dataclass(frozen=True)
class LatencyStats:
    count: int
    median: float
    p90: float
    p99: float
    mean: float

    def as_dict(self) -> dict:
        return {"count": self.count, "median": self.median, "p90": self.p90,
                "p99": self.p99, "mean": self.mean}


class InferenceEngine:
    """Immutable bundle of vocab + config + one model (float or INT8)."""

    def __init__(self, vocab: Vocab, config: ModelConfig,
                 params: Optional[ModelParams] = None,
                 qmodel: Optional[quantmod.QuantModel] = None):
        if (params is None) == (qmodel is None):
            raise DataError("provide exactly one of params/qmodel")
        self.vocab = vocab
        self.config = config
        self._params = params
        self._qmodel = qmodel

    @property
    def quantized(self) -> bool:
        return self._qmodel is not None

    def score(self, clean: CleanText) -> float:
        """Class-1 probability for one normalized text."""
        seq = encode(self.vocab, clean, self.config.max_len)
        ids, mask = batch_arrays([seq])
        if self._qmodel is not None:
            logits = quantmod.qforward(self._qmodel, ids, mask)
        else:
            logits, _ = forward(self._params, ids, mask)
        return float(predict_proba(logits[0]))


class Session:
    """Single-owner mutable session state: seen fingerprints, threshold,
    latency samples.  In-memory only; one session per feed."""

    def __init__(self, engine: InferenceEngine, tau: float, *,
                 min_tokens: int = 10):
        if not 0.0 < tau < 1.0:
            raise DataError(f"tau must be in (0, 1), got {tau}")
        self.engine = engine
        self.tau = tau
        self.min_tokens = min_tokens
        self.seen: set[bytes] = set()
        self.latencies_ms: list[float] = []

    def classify_post(self, post: FeedPost) -> Verdict:
        start = time.perf_counter()
        clean = normalize(post.text)
        if not length_gate(clean, min_tokens=self.min_tokens):
            return self._finish(post, "skipped_short", None, start)
        if not english_gate(clean):
            return self._finish(post, "skipped_language", None, start)
        fp = fingerprint(clean)
        if fp in self.seen:
            return self._finish(post, "suppressed_duplicate", None, start)
        p1 = self.engine.score(clean)
        self.seen.add(fp)
        status = "flagged" if p1 >= self.tau else "clean"
        return self._finish(post, status, p1, start)

    def _finish(self, post: FeedPost, status: str, p1: Optional[float],
                start: float) -> Verdict:
        latency = (time.perf_counter() - start) * 1000.0
        self.latencies_ms.append(latency)
        return Verdict(post_id=post.post_id, status=status, p1=p1,
                       latency_ms=latency)


def latency_stats(samples_ms: Sequence[float]) -> LatencyStats:
    """Nearest-rank percentiles: P_q = sorted value at 1-based index
    ceil(q * n); median is P50."""
    if not samples_ms:
        raise DataError("latency_stats needs at least one sample")
    s = sorted(samples_ms)
    n = len(s)

    def pct(q: float) -> float:
        return s[max(1, math.ceil(q * n)) - 1]

    return LatencyStats(count=n, median=pct(0.50), p90=pct(0.90),
                        p99=pct(0.99), mean=sum(s) / n)


def max_rss_bytes() -> Optional[int]:
    """Best-effort resident-memory high-water mark (None if unavailable)."""
    try:
        import resource
        peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        return int(peak if sys.platform == "darwin" else peak * 1024)
    except Exception:
        return None


@dataclass(frozen=True)
class BenchReport:
    stats: LatencyStats
    warmup_n: int
    total_posts: int
    max_rss_bytes: Optional[int]
    samples_ms: tuple[float, ...]   # post-warmup samples, arrival order

    def as_dict(self) -> dict:
        return {"stats": self.stats.as_dict(), "warmup_n": self.warmup_n,
                "total_posts": self.total_posts,
                "max_rss_bytes": self.max_rss_bytes}


def bench(engine: InferenceEngine, tau: float, posts: Sequence[FeedPost],
          warmup_n: int = 10) -> BenchReport:
    """Classify every post in a fresh session and report percentile
    latency over the samples after the first `warmup_n`."""
    if len(posts) < warmup_n + 1:
        raise DataError(f"bench needs more than warmup_n={warmup_n} posts, "
                        f"got {len(posts)}")
    session = Session(engine, tau)
    for post in posts:
        session.classify_post(post)
    samples = session.latencies_ms[warmup_n:]
    return BenchReport(stats=latency_stats(samples), warmup_n=warmup_n,
                       total_posts=len(posts), max_rss_bytes=max_rss_bytes(),
                       samples_ms=tuple(samples))


# ---------------------------------------------------------------------------
# export bundle: the deployable directory {quantized checkpoint, vocab,
# config, tau} consumed by both the CLI and the extension shell

BUNDLE_MANIFEST = "bundle.json"
BUNDLE_MODEL = "model.q8"
BUNDLE_VOCAB = "vocab.txt"
BUNDLE_FORMAT = "feedguard-bundle"
BUNDLE_VERSION = 1


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def export_bundle(out_dir: str | Path, quant_checkpoint: str | Path,
                  vocab_path: str | Path, tau: float,
                  seed: Optional[int] = None) -> Path:
    """Package a quantized checkpoint + vocab + threshold into a bundle
    directory; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    qmodel = quantmod.load_quant_model(quant_checkpoint)  # validates format
    vocab = load_vocab(vocab_path)
    if len(vocab) != qmodel.config.vocab_size:
        raise CheckpointError(
            f"vocab has {len(vocab)} entries but model expects "
            f"{qmodel.config.vocab_size}")
    if not 0.0 < tau < 1.0:
        raise DataError(f"tau must be in (0, 1), got {tau}")

    shutil.copyfile(quant_checkpoint, out / BUNDLE_MODEL)
    save_vocab(out / BUNDLE_VOCAB, vocab)
    cfg = qmodel.config
    manifest = {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "model_file": BUNDLE_MODEL,
        "vocab_file": BUNDLE_VOCAB,
        "tau": tau,
        "seed": seed,
        "model_config": {
            "n_layers": cfg.n_layers, "d_model": cfg.d_model,
            "n_heads": cfg.n_heads, "d_ff": cfg.d_ff,
            "vocab_size": cfg.vocab_size, "max_len": cfg.max_len,
            "n_classes": cfg.n_classes, "dropout_rate": cfg.dropout_rate,
        },
        "sha256": {
            BUNDLE_MODEL: _sha256(out / BUNDLE_MODEL),
            BUNDLE_VOCAB: _sha256(out / BUNDLE_VOCAB),
        },
    }
    manifest_path = out / BUNDLE_MANIFEST
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest_path


def load_bundle(bundle_dir: str | Path) -> tuple[InferenceEngine, float]:
    """Load a bundle directory into an engine plus its calibrated tau."""
    bundle = Path(bundle_dir)
    manifest_path = bundle / BUNDLE_MANIFEST
    if not manifest_path.exists():
        raise CheckpointError(f"{bundle}: missing {BUNDLE_MANIFEST}")
    with open(manifest_path, encoding="utf-8") as f:
        manifest = json.load(f)
    if manifest.get("format") != BUNDLE_FORMAT:
        raise CheckpointError(f"{bundle}: not a {BUNDLE_FORMAT} directory")
    if manifest.get("version") != BUNDLE_VERSION:
        raise CheckpointError(f"{bundle}: unsupported bundle version "
                              f"{manifest.get('version')}")
    qmodel = quantmod.load_quant_model(bundle / manifest["model_file"])
    vocab = load_vocab(bundle / manifest["vocab_file"])
    engine = InferenceEngine(vocab=vocab, config=qmodel.config, qmodel=qmodel)
    return engine, float(manifest["tau"])
