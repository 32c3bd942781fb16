"""Deterministic text normalization and gating.

The exact same cleaner runs at corpus-preparation time and at inference
time, so every transform here must be deterministic and idempotent:
normalizing already-normalized text is a no-op.

Pipeline order: HTML entity unescape, Unicode NFKC, contraction expansion,
lower-casing, placeholder substitution for URLs / @mentions / #hashtags,
emoji-to-alias replacement, whitespace collapse.  Unescape + NFKC +
lower-casing are iterated to a joint fixed point so double-encoded entities
or compatibility characters cannot defeat idempotence; contraction matching
is case-insensitive with lower-case expansions, which commutes with the
lower-casing step.  Placeholder tokens are emitted verbatim ([URL], [USER],
[HASHTAG]) and exempted from lower-casing so the tokenizer can treat them as
atomic symbols.
"""

from __future__ import annotations

import html
import re
import string
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

URL_PLACEHOLDER = "[URL]"
USER_PLACEHOLDER = "[USER]"
HASHTAG_PLACEHOLDER = "[HASHTAG]"
PLACEHOLDERS = (URL_PLACEHOLDER, USER_PLACEHOLDER, HASHTAG_PLACEHOLDER)

_PLACEHOLDER_RE = re.compile(r"\[(?:URL|USER|HASHTAG)\]")
# scheme-based URLs plus bare www. hosts; \S+ mirrors how links appear in
# social posts (no full URI grammar)
_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#\w+")
_WS_RE = re.compile(r"\s+")

# emoji codepoint blocks; modifiers (variation selectors, ZWJ, skin tones,
# keycap combiner) are dropped rather than aliased
_EMOJI_RANGES = ((0x1F000, 0x1FFFF), (0x2600, 0x27BF), (0x2B00, 0x2BFF))
_EMOJI_MODIFIERS = frozenset({0xFE0E, 0xFE0F, 0x200D, 0x20E3,
                              *range(0x1F3FB, 0x1F400)})
UNKNOWN_EMOJI_ALIAS = ":emoji:"

_STRIP_PUNCT = string.punctuation


@dataclass(frozen=True)
class CleanText:
    """Normalized text plus its whitespace-token count."""

    text: str
    ws_token_count: int


def _load_table(name: str) -> dict[str, str]:
    table = {}
    data = resources.files("feedguard.resources").joinpath(name).read_text("utf-8")
    for line in data.splitlines():
        if not line:
            continue
        term, _, replacement = line.partition("\t")
        table[term] = replacement
    return table


@lru_cache(maxsize=1)
def contraction_table() -> dict[str, str]:
    return _load_table("contractions.tsv")


@lru_cache(maxsize=1)
def emoji_alias_table() -> dict[int, str]:
    return {ord(term): alias for term, alias in _load_table("emoji_aliases.tsv").items()}


@lru_cache(maxsize=1)
def stopword_set() -> frozenset[str]:
    data = resources.files("feedguard.resources").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in data.split() if w)


@lru_cache(maxsize=1)
def _contraction_re() -> re.Pattern[str]:
    # longest-first alternation so can't've wins over can't; lookarounds
    # instead of \b because several forms start or end with an apostrophe
    alts = sorted(contraction_table(), key=len, reverse=True)
    pattern = "|".join(re.escape(term) for term in alts)
    return re.compile(rf"(?<![\w'])(?:{pattern})(?!['\w])", re.IGNORECASE)


def _lower_outside_placeholders(text: str) -> str:
    parts = []
    pos = 0
    for m in _PLACEHOLDER_RE.finditer(text):
        parts.append(text[pos:m.start()].lower())
        parts.append(m.group())
        pos = m.end()
    parts.append(text[pos:].lower())
    return "".join(parts)


def _scrub(text: str) -> str:
    # unescape / NFKC / lower-case to a joint fixed point: each map is
    # idempotent alone but can re-expose work for the others (e.g. NFKC
    # turning a fullwidth ampersand into a fresh entity)
    for _ in range(8):
        step = html.unescape(text)
        step = unicodedata.normalize("NFKC", step)
        step = _lower_outside_placeholders(step)
        if step == text:
            break
        text = step
    return text


def _expand_contractions(text: str) -> str:
    table = contraction_table()
    return _contraction_re().sub(lambda m: table[m.group().lower()], text)


def _is_emoji(cp: int) -> bool:
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


def _replace_emoji(text: str) -> str:
    aliases = emoji_alias_table()
    out = []
    for ch in text:
        cp = ord(ch)
        if cp in _EMOJI_MODIFIERS:
            continue
        if cp in aliases:
            out.append(aliases[cp])
        elif _is_emoji(cp):
            out.append(UNKNOWN_EMOJI_ALIAS)
        else:
            out.append(ch)
    return "".join(out)


def normalize(text: str) -> CleanText:
    """Normalize raw post text into its canonical lower-case form.

    Total on valid unicode input and idempotent:
    normalize(normalize(t).text).text == normalize(t).text.
    """
    text = _scrub(text)
    text = _expand_contractions(text)
    text = _URL_RE.sub(URL_PLACEHOLDER, text)
    text = _MENTION_RE.sub(USER_PLACEHOLDER, text)
    text = _HASHTAG_RE.sub(HASHTAG_PLACEHOLDER, text)
    text = _replace_emoji(text)
    text = _WS_RE.sub(" ", text).strip()
    return CleanText(text=text, ws_token_count=len(text.split()))


def english_gate(text: CleanText, *, ascii_threshold: float = 0.9,
                 min_stopword_hits: int = 1) -> bool:
    """Heuristic English filter: mostly-ASCII letters plus a stopword hit.

    True iff at least `ascii_threshold` of the alphabetic characters are
    ASCII letters and at least `min_stopword_hits` whitespace tokens
    (surrounding punctuation ignored) appear in the bundled stopword list.
    """
    alpha = [ch for ch in text.text if ch.isalpha()]
    if alpha:
        ascii_count = sum(1 for ch in alpha if ch.isascii())
        if ascii_count / len(alpha) < ascii_threshold:
            return False
    stopwords = stopword_set()
    hits = sum(1 for tok in text.text.split()
               if tok.strip(_STRIP_PUNCT) in stopwords)
    return hits >= min_stopword_hits


def length_gate(text: CleanText, min_tokens: int = 10) -> bool:
    """True iff the normalized text has at least `min_tokens` tokens."""
    return text.ws_token_count >= min_tokens
