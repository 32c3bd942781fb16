"""Seeded synthetic "desk corpus" used wherever the real corpora would be.

Generates lexically separable posts for all five sources with native label
formats, plus controlled fractions of exact duplicates, non-English lines,
and unverifiable rumour threads, so the gates, dedup, harmonization, and
splits can all be exercised at desk scale.  Injected anomalies carry
self-describing ids ("<source>-dup-*", "<source>-noneng-*") so tests can
identify them without side-channel state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from feedguard.corpus import CORPUS_SOURCES, RawPost
from feedguard.errors import DataError
from feedguard.textnorm import normalize

# distinctive one-word markers; every signal phrase of a class contains at
# least one of its own markers and none of the other class's
MISINFO_MARKERS = frozenset({
    "shocking", "secret", "miracle", "hoax", "banned", "rigged",
    "bombshell", "elites", "cabal", "leaked", "coverup", "exposed",
})
RELIABLE_MARKERS = frozenset({
    "officials", "records", "confirmed", "verified", "audit",
    "researchers", "published", "reviewed", "committee", "archive",
    "transcript", "measured",
})

_MISINFO_PHRASES = (
    "shocking secret they refuse to show you",
    "miracle cure the insiders keep hidden",
    "leaked memo finally exposed the hoax",
    "banned footage proves the rigged count",
    "this bombshell was exposed by an anonymous insider",
    "the elites planned the whole coverup",
    "a secret cabal wrote the rigged script",
    "share this leaked bombshell before removal",
    "the coverup was exposed in a banned report",
    "shocking miracle claims spread by the cabal",
)
_RELIABLE_PHRASES = (
    "officials published the complete records",
    "the audit confirmed the reported totals",
    "researchers published the reviewed findings",
    "public records show the verified timeline",
    "the committee reviewed and confirmed the figures",
    "the archive holds the full transcript",
    "inspectors measured and verified the results",
    "the transcript was reviewed by the committee",
    "officials confirmed the measured values",
    "the audit and archive records agree",
)
_TOPICS = (
    "the city council budget", "the vaccine rollout", "the election tally",
    "the climate summit", "the school lunch plan", "the census count",
    "the highway project", "the water quality tests", "the energy grid",
    "the housing survey", "the transit schedule", "the farm subsidies",
)
_FILLER = (
    "according to the latest update", "earlier this week", "in a long thread",
    "during the town hall", "as many noticed", "for the third time",
    "despite the weather", "with more detail to come", "in plain language",
    "after much discussion", "near the end of the meeting", "once again",
)
_NON_ENGLISH = (
    "это сообщение написано полностью на русском языке и не должно проходить фильтр",
    "эта новость распространяется в сети без каких либо подтверждений и источников",
    "el consejo municipal aprobó ayer un presupuesto récord para el transporte público",
    "les autorités ont confirmé hier soir une panne générale du réseau électrique",
    "новые данные переписи населения вызвали бурное обсуждение в социальных сетях",
    "ce message est rédigé entièrement en français pour tester le filtre linguistique",
)

_LIAR_LOW = ("pants-fire", "false", "barely-true")
_LIAR_HIGH = ("half-true", "mostly-true", "true")
_SOURCE_PLATFORM = {"ISOT": "news", "LIAR": "other", "PHEME": "x",
                    "FNN": "news", "TruthSeeker": "x"}

DEFAULT_CELLS = {"ISOT": 150, "LIAR": 150, "PHEME": 250, "FNN": 250,
                 "TruthSeeker": 250}


@dataclass(frozen=True)
class DeskCorpusSpec:
    seed: int = 7
    n_per_cell: dict = field(default_factory=lambda: dict(DEFAULT_CELLS))
    noise_rate: float = 0.05
    duplicate_fraction: float = 0.05
    non_english_fraction: float = 0.03
    unverified_fraction: float = 0.04  # PHEME only

    def __post_init__(self):
        if len(self.n_per_cell) < 3:
            raise DataError("desk corpus needs at least 3 sources")
        unknown = set(self.n_per_cell) - set(CORPUS_SOURCES)
        if unknown:
            raise DataError(f"unknown desk sources: {sorted(unknown)}")
        if 2 * sum(self.n_per_cell.values()) < 600:
            raise DataError("desk corpus must total at least 600 records")


def _native_label(source: str, y: int, rng: random.Random) -> str:
    if source == "ISOT":
        return "fake" if y else "true"
    if source == "FNN":
        return "fake" if y else "real"
    if source == "PHEME":
        return "false" if y else "true"
    if source == "LIAR":
        return rng.choice(_LIAR_LOW if y else _LIAR_HIGH)
    if source == "TruthSeeker":
        score = rng.uniform(0.05, 0.44) if y else rng.uniform(0.55, 0.95)
        return f"{score:.2f}"
    raise DataError(f"no native labels for source {source}")


def _compose_text(y: int, rng: random.Random, noise_rate: float) -> str:
    own = _MISINFO_PHRASES if y else _RELIABLE_PHRASES
    other = _RELIABLE_PHRASES if y else _MISINFO_PHRASES
    parts = [rng.choice(_FILLER), rng.choice(_TOPICS), rng.choice(own)]
    if rng.random() < noise_rate:
        parts.append(rng.choice(other))
    target = rng.randint(10, 60)
    while sum(len(p.split()) for p in parts) < target:
        parts.append(rng.choice(_FILLER) + " " + rng.choice(_TOPICS))
    rng.shuffle(parts)
    text = " ".join(parts)
    if rng.random() < 0.10:
        text += " " + rng.choice(("#breaking", "@newsdesk", "https://example.com/a"))
    return text


def generate(spec: DeskCorpusSpec) -> list[RawPost]:
    """Deterministic templated corpus; equal seeds give byte-equal output."""
    rng = random.Random(spec.seed)
    posts: list[RawPost] = []
    # uniqueness is tracked on the normalized form across all sources: that
    # is what dedup fingerprints, so injected duplicates stay the only ones
    seen_texts: set[str] = set()
    for source in sorted(spec.n_per_cell):
        n_cell = spec.n_per_cell[source]
        platform = _SOURCE_PLATFORM[source]
        base: list[RawPost] = []
        counter = 0
        for y in (0, 1):
            for _ in range(n_cell):
                text = _compose_text(y, rng, spec.noise_rate)
                while normalize(text).text in seen_texts:
                    text = _compose_text(y, rng, spec.noise_rate)
                seen_texts.add(normalize(text).text)
                base.append(RawPost(id=f"{source}-{counter:05d}", platform=platform,
                                    text=text, raw_label=_native_label(source, y, rng),
                                    source=source))
                counter += 1
        posts.extend(base)

        n_dup = int(spec.duplicate_fraction * len(base))
        for i, victim in enumerate(rng.sample(base, n_dup)):
            posts.append(RawPost(id=f"{source}-dup-{i:04d}", platform=platform,
                                 text=victim.text, raw_label=victim.raw_label,
                                 source=source))

        n_noneng = int(spec.non_english_fraction * len(base))
        for i in range(n_noneng):
            y = i % 2
            posts.append(RawPost(id=f"{source}-noneng-{i:04d}", platform=platform,
                                 text=rng.choice(_NON_ENGLISH),
                                 raw_label=_native_label(source, y, rng),
                                 source=source))

        if source == "PHEME":
            n_unv = int(spec.unverified_fraction * len(base))
            for i in range(n_unv):
                posts.append(RawPost(id=f"PHEME-unv-{i:04d}", platform=platform,
                                     text=_compose_text(i % 2, rng, spec.noise_rate),
                                     raw_label="unverified", source=source))
    return posts


def keyword_vote(text: str) -> int:
    """Bag-of-words oracle: 1 if misinfo markers outnumber reliable ones."""
    words = set(text.lower().split())
    mis = len(words & MISINFO_MARKERS)
    rel = len(words & RELIABLE_MARKERS)
    return 1 if mis > rel else 0


def write_corpus_files(posts: Sequence[RawPost], out_dir: str | Path) -> dict[str, Path]:
    """One raw-format file per source: id<TAB>source<TAB>label<TAB>text."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_source: dict[str, list[RawPost]] = {}
    for post in posts:
        by_source.setdefault(post.source, []).append(post)
    paths = {}
    for source, rows in sorted(by_source.items()):
        path = out / f"{source}.tsv"
        with open(path, "w", encoding="utf-8") as f:
            for post in rows:
                f.write(f"{post.id}\t{post.source}\t{post.raw_label}\t{post.text}\n")
        paths[source] = path
    return paths
