"""WordPiece-style subword tokenizer with a frequency-based vocab builder.

Continuation pieces carry the "##" prefix and segmentation is greedy
longest-match per whitespace token; a word with unmatched residue collapses
to [UNK].  The placeholder tokens emitted by textnorm ([URL], [USER],
[HASHTAG]) are atomic vocabulary entries and are never segmented.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from feedguard.errors import DataError
from feedguard.textnorm import CleanText

PAD, UNK, CLS, SEP = "[PAD]", "[UNK]", "[CLS]", "[SEP]"
SPECIALS = (PAD, UNK, CLS, SEP, "[URL]", "[USER]", "[HASHTAG]")

DEFAULT_MAX_LEN = 280  # matches the feed listener's truncation bound


@dataclass(frozen=True)
class Vocab:
    tokens: tuple[str, ...]
    index: dict[str, int]

    @property
    def pad_id(self) -> int:
        return self.index[PAD]

    @property
    def unk_id(self) -> int:
        return self.index[UNK]

    @property
    def cls_id(self) -> int:
        return self.index[CLS]

    @property
    def sep_id(self) -> int:
        return self.index[SEP]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class TokenSeq:
    """Fixed-length id sequence: [CLS] pieces... [SEP] [PAD]..."""

    ids: tuple[int, ...]
    attention_mask: tuple[int, ...]


def _make_vocab(tokens: Sequence[str]) -> Vocab:
    index = {}
    for i, tok in enumerate(tokens):
        if tok in index:
            raise DataError(f"duplicate vocab token {tok!r} at ids {index[tok]} and {i}")
        index[tok] = i
    for special in (PAD, UNK, CLS, SEP):
        if special not in index:
            raise DataError(f"vocabulary is missing required token {special}")
    if index[PAD] != 0:
        raise DataError(f"{PAD} must occupy id 0, found id {index[PAD]}")
    return Vocab(tokens=tuple(tokens), index=index)


def _ranked(counter: Counter) -> list[str]:
    # frequency descending, then lexicographic for determinism
    return sorted(counter, key=lambda t: (-counter[t], t))


def build_vocab(corpus: Iterable[CleanText], size: int) -> Vocab:
    """Greedy frequency-based vocabulary.

    Admission order: specials, observed single characters, whole words,
    then "##" continuation suffixes of length 2-6, each ranked by frequency
    with lexicographic tie-break, until `size` entries (or candidates run
    out on tiny corpora).
    """
    if size < len(SPECIALS) + 26:
        raise DataError(f"vocab size {size} too small (minimum {len(SPECIALS) + 26})")

    word_freq: Counter = Counter()
    for text in corpus:
        word_freq.update(text.text.split())

    char_freq: Counter = Counter()
    suffix_freq: Counter = Counter()
    for word, freq in word_freq.items():
        for ch in word:
            char_freq[ch] += freq
        for start in range(1, len(word)):
            suffix = word[start:]
            if 2 <= len(suffix) <= 6:
                suffix_freq["##" + suffix] += freq

    tokens: list[str] = list(SPECIALS)
    admitted = set(tokens)
    for pool in (_ranked(char_freq), _ranked(word_freq), _ranked(suffix_freq)):
        for tok in pool:
            if len(tokens) >= size:
                break
            if tok not in admitted:
                tokens.append(tok)
                admitted.add(tok)
    return _make_vocab(tokens)


def wordpiece(vocab: Vocab, word: str) -> list[str]:
    """Greedy longest-match segmentation; [UNK] on any unmatched residue."""
    pieces = []
    start = 0
    while start < len(word):
        end = len(word)
        found = None
        while end > start:
            candidate = word[start:end] if start == 0 else "##" + word[start:end]
            if candidate in vocab.index:
                found = candidate
                break
            end -= 1
        if found is None:
            return [UNK]
        pieces.append(found)
        start = end
    return pieces


def encode(vocab: Vocab, text: CleanText, max_len: int = DEFAULT_MAX_LEN) -> TokenSeq:
    """Encode to exactly `max_len` ids with [CLS] first and [SEP] last.

    Truncation keeps the leading pieces so the total length (specials
    included) never exceeds max_len; [SEP] always terminates the non-pad
    prefix.
    """
    if max_len < 2:
        raise DataError(f"max_len must be at least 2, got {max_len}")
    piece_ids = []
    for word in text.text.split():
        for piece in wordpiece(vocab, word):
            piece_ids.append(vocab.index[piece])
    piece_ids = piece_ids[:max_len - 2]
    ids = [vocab.cls_id] + piece_ids + [vocab.sep_id]
    n = len(ids)
    ids.extend([vocab.pad_id] * (max_len - n))
    mask = [1] * n + [0] * (max_len - n)
    return TokenSeq(ids=tuple(ids), attention_mask=tuple(mask))


def batch_arrays(seqs: Sequence[TokenSeq]) -> tuple[np.ndarray, np.ndarray]:
    """Stack token sequences into (ids, mask) arrays for the encoder."""
    ids = np.array([s.ids for s in seqs], dtype=np.int64)
    mask = np.array([s.attention_mask for s in seqs], dtype=np.float32)
    return ids, mask


def save_vocab(path: str | Path, vocab: Vocab) -> None:
    """BERT vocab.txt convention: one token per line, line number = id."""
    with open(path, "w", encoding="utf-8") as f:
        for tok in vocab.tokens:
            f.write(tok + "\n")


def load_vocab(path: str | Path) -> Vocab:
    """Load a one-token-per-line vocabulary file.

    Published WordPiece vocabularies work as long as [PAD] sits on line 1
    and [UNK]/[CLS]/[SEP] appear somewhere; the placeholder specials are
    optional there (absent ones simply segment like ordinary words).
    """
    tokens = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            tokens.append(line.rstrip("\n"))
    while tokens and tokens[-1] == "":
        tokens.pop()
    return _make_vocab(tokens)
