"""Corpus ingestion: gating, label harmonization, dedup, curriculum splits.

Datasets travel as newline-delimited UTF-8 files with four tab-separated
fields (id, source, label, text), one file per corpus.  All text is pushed
through feedguard.textnorm before anything else so that deduplication and
training operate on the exact form the runtime will see.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from feedguard.errors import DataError, LabelError
from feedguard.textnorm import CleanText, english_gate, length_gate, normalize

SOURCES = ("ISOT", "LIAR", "PHEME", "FNN", "TruthSeeker", "live")
CORPUS_SOURCES = SOURCES[:-1]  # "live" never appears in prepared data
SPLITS = ("Stage0", "Stage1", "Stage2", "Dev", "Test")
PLATFORMS = ("facebook", "x", "news", "other")

# which feed each corpus most resembles; only informational at runtime
_SOURCE_PLATFORM = {
    "ISOT": "news", "LIAR": "other", "PHEME": "x",
    "FNN": "news", "TruthSeeker": "x", "live": "other",
}

DEFAULT_STAGE2_MIX = {"FNN": 0.5, "TruthSeeker": 0.3, "PHEME": 0.2}
DEV_TEST_SOURCES = ("FNN", "TruthSeeker", "PHEME")

# LIAR's six-way scale: three lowest credibility classes are misinformation
_LIAR_LOW = {"pants-on-fire", "pants-fire", "false", "barely-true"}
_LIAR_HIGH = {"half-true", "mostly-true", "true"}


@dataclass(frozen=True)
class RawPost:
    """One record as read from a corpus file or captured from a feed."""

    id: str
    platform: str
    text: str
    raw_label: Optional[str]
    source: str

    def __post_init__(self):
        if not self.id:
            raise DataError("RawPost.id must be non-empty")
        if self.source not in SOURCES:
            raise DataError(f"unknown source {self.source!r}")
        if self.platform not in PLATFORMS:
            raise DataError(f"unknown platform {self.platform!r}")


@dataclass(frozen=True)
class CleanRecord:
    """A gated, normalized, binary-labeled example."""

    id: str
    source: str
    text: CleanText
    y: int
    fingerprint: bytes


def fingerprint(text: CleanText) -> bytes:
    """8-byte BLAKE2b digest of the normalized text's UTF-8 bytes."""
    return hashlib.blake2b(text.text.encode("utf-8"), digest_size=8).digest()


def harmonize_label(source: str, raw_label: str) -> Optional[int]:
    """Collapse a corpus-native label to binary y (1 = misinformation).

    Returns None for records that must be dropped (unverified PHEME
    threads); raises LabelError for labels the source cannot produce.
    TruthSeeker labels are crowd truthfulness scores in [0, 1], binarized
    at 0.5 (score >= 0.5 counts as reliable).
    """
    label = raw_label.strip().lower() if raw_label is not None else ""
    if source == "ISOT":
        if label == "fake":
            return 1
        if label == "true":
            return 0
    elif source == "PHEME":
        if label == "false":
            return 1
        if label == "true":
            return 0
        if label == "unverified":
            return None
    elif source == "LIAR":
        if label in _LIAR_LOW:
            return 1
        if label in _LIAR_HIGH:
            return 0
    elif source == "FNN":
        if label == "fake":
            return 1
        if label == "real":
            return 0
    elif source == "TruthSeeker":
        try:
            score = float(label)
        except ValueError:
            raise LabelError(source, raw_label) from None
        if not 0.0 <= score <= 1.0:
            raise LabelError(source, raw_label)
        return 0 if score >= 0.5 else 1
    raise LabelError(source, str(raw_label))


@dataclass
class IngestReport:
    total: int = 0
    kept: int = 0
    dropped_short: int = 0
    dropped_language: int = 0
    dropped_unlabeled: int = 0
    per_source_kept: Counter = field(default_factory=Counter)


def ingest(posts: Iterable[RawPost], *, min_tokens: int = 10) -> tuple[list[CleanRecord], IngestReport]:
    """Normalize, gate, and label raw posts.

    Gate order matches the runtime: length first, then language.  Records
    whose label harmonizes to None are dropped; unknown labels raise.
    """
    report = IngestReport()
    records = []
    for post in posts:
        report.total += 1
        clean = normalize(post.text)
        if not length_gate(clean, min_tokens=min_tokens):
            report.dropped_short += 1
            continue
        if not english_gate(clean):
            report.dropped_language += 1
            continue
        y = harmonize_label(post.source, post.raw_label)
        if y is None:
            report.dropped_unlabeled += 1
            continue
        records.append(CleanRecord(id=post.id, source=post.source, text=clean,
                                   y=y, fingerprint=fingerprint(clean)))
        report.kept += 1
        report.per_source_kept[post.source] += 1
    return records, report


@dataclass
class DedupReport:
    raw: Counter = field(default_factory=Counter)
    kept: Counter = field(default_factory=Counter)

    @property
    def removed(self) -> Counter:
        return Counter({s: self.raw[s] - self.kept.get(s, 0) for s in self.raw})


def dedup(records: Sequence[CleanRecord]) -> tuple[list[CleanRecord], DedupReport]:
    """Drop all but the first occurrence of each fingerprint, keeping order.

    First-occurrence semantics are order-dependent: single-writer,
    sequential by contract.
    """
    report = DedupReport()
    seen: set[bytes] = set()
    kept = []
    for rec in records:
        report.raw[rec.source] += 1
        if rec.fingerprint in seen:
            continue
        seen.add(rec.fingerprint)
        kept.append(rec)
        report.kept[rec.source] += 1
    return kept, report


@dataclass
class SplitManifest:
    """Reproducible record-to-split assignment."""

    seed: int
    assignments: dict[str, str]
    counts: dict[str, int]
    prevalence: dict[str, float]

    def ids_for(self, split: str) -> list[str]:
        return [rid for rid, s in self.assignments.items() if s == split]


def _prevalence(records: Sequence[CleanRecord]) -> float:
    return sum(r.y for r in records) / len(records) if records else 0.0


def build_splits(records: Sequence[CleanRecord], seed: int = 42,
                 stage2_mix: Optional[dict[str, float]] = None,
                 stage2_size: Optional[int] = None) -> SplitManifest:
    """Assign every record to exactly one of Stage0/Stage1/Stage2/Dev/Test.

    Stage0 takes all ISOT, Stage1 all LIAR.  Stage2 samples from
    FNN/TruthSeeker/PHEME in `stage2_mix` proportions: when `stage2_size`
    is given each source contributes round(size * fraction) capped at
    availability; otherwise the anchor source (FNN when present, else the
    largest fraction) is taken whole and the others scaled to the mix.
    The remaining FNN/TruthSeeker/PHEME records are split 1:1 into Dev and
    Test, stratified per (source, label) cell; odd cells alternate their
    extra record between the two sides so sizes differ by at most one.
    Deterministic for a given seed and record order.
    """
    if stage2_mix is None:
        stage2_mix = dict(DEFAULT_STAGE2_MIX)
    bad = set(stage2_mix) - set(DEV_TEST_SOURCES)
    if bad:
        raise DataError(f"stage2 mix names non-stage2 sources: {sorted(bad)}")

    ids_seen = set()
    for rec in records:
        if rec.id in ids_seen:
            raise DataError(f"duplicate record id {rec.id!r}")
        ids_seen.add(rec.id)

    by_source: dict[str, list[CleanRecord]] = {}
    for rec in records:
        if rec.source == "live":
            raise DataError("'live' records cannot enter training splits")
        by_source.setdefault(rec.source, []).append(rec)

    for src, frac in stage2_mix.items():
        if frac > 0 and not by_source.get(src):
            raise DataError(f"stage2 mix requests source {src!r} but no records exist")

    rng = np.random.default_rng(seed)
    assignments: dict[str, str] = {}
    for rec in by_source.get("ISOT", []):
        assignments[rec.id] = "Stage0"
    for rec in by_source.get("LIAR", []):
        assignments[rec.id] = "Stage1"

    # per-source Stage2 take counts
    takes: dict[str, int] = {}
    if stage2_size is None:
        anchor = "FNN" if stage2_mix.get("FNN") else max(stage2_mix, key=stage2_mix.get)
        implied_total = len(by_source.get(anchor, [])) / stage2_mix[anchor]
        for src, frac in stage2_mix.items():
            avail = len(by_source.get(src, []))
            takes[src] = min(avail, round(frac * implied_total))
    else:
        for src, frac in stage2_mix.items():
            avail = len(by_source.get(src, []))
            takes[src] = min(avail, round(frac * stage2_size))

    remainder: list[CleanRecord] = []
    for src in DEV_TEST_SOURCES:
        pool = by_source.get(src, [])
        n_take = takes.get(src, 0)
        order = rng.permutation(len(pool))
        chosen = set(order[:n_take].tolist())
        for i, rec in enumerate(pool):
            if i in chosen:
                assignments[rec.id] = "Stage2"
            else:
                remainder.append(rec)

    # stratified 1:1 Dev/Test split per (source, label) cell
    cells: dict[tuple[str, int], list[CleanRecord]] = {}
    for rec in remainder:
        cells.setdefault((rec.source, rec.y), []).append(rec)
    dev_gets_extra = True
    for key in sorted(cells):
        cell = cells[key]
        order = rng.permutation(len(cell))
        half, odd = divmod(len(cell), 2)
        n_dev = half + (1 if odd and dev_gets_extra else 0)
        if odd:
            dev_gets_extra = not dev_gets_extra
        dev_idx = set(order[:n_dev].tolist())
        for i, rec in enumerate(cell):
            assignments[rec.id] = "Dev" if i in dev_idx else "Test"

    by_split: dict[str, list[CleanRecord]] = {s: [] for s in SPLITS}
    for rec in records:
        by_split[assignments[rec.id]].append(rec)
    counts = {s: len(by_split[s]) for s in SPLITS}
    prevalence = {s: _prevalence(by_split[s]) for s in SPLITS}
    return SplitManifest(seed=seed, assignments=assignments,
                         counts=counts, prevalence=prevalence)


# ---------------------------------------------------------------------------
# record-file round trip


def parse_raw_line(line: str, lineno: int, path: str) -> RawPost:
    parts = line.split("\t", 3)
    if len(parts) != 4:
        raise DataError(f"{path}:{lineno}: expected 4 tab-separated fields, got {len(parts)}")
    rid, source, label, text = parts
    if source not in SOURCES:
        raise DataError(f"{path}:{lineno}: unknown source {source!r}")
    return RawPost(id=rid, platform=_SOURCE_PLATFORM[source], text=text,
                   raw_label=label, source=source)


def read_raw_posts(path: str | Path) -> list[RawPost]:
    """Read one corpus file: lines of id<TAB>source<TAB>label<TAB>text."""
    posts = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            posts.append(parse_raw_line(line, lineno, str(path)))
    return posts


def write_records(path: str | Path, records: Sequence[CleanRecord]) -> None:
    """Write cleaned records as id<TAB>source<TAB>y<TAB>text lines."""
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(f"{rec.id}\t{rec.source}\t{rec.y}\t{rec.text.text}\n")


def read_records(path: str | Path) -> list[CleanRecord]:
    """Read cleaned records back; text is re-wrapped (normalization is
    idempotent so the stored form is already canonical)."""
    records = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 3)
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            rid, source, y_str, text = parts
            if y_str not in ("0", "1"):
                raise DataError(f"{path}:{lineno}: label must be 0 or 1, got {y_str!r}")
            clean = CleanText(text=text, ws_token_count=len(text.split()))
            records.append(CleanRecord(id=rid, source=source, text=clean,
                                       y=int(y_str), fingerprint=fingerprint(clean)))
    return records
