// Text normalization mirroring the training pipeline byte for byte:
// entity unescape + NFKC + lower-casing iterated to a fixed point, then
// contraction expansion, URL/@mention/#hashtag placeholders, emoji
// aliases, whitespace collapse.  Placeholder tokens stay uppercase.
//
// Character classes are written out to match Python's unicode-aware \w
// and \s (JS \w is ASCII-only and JS \s includes the BOM, which Python's
// does not).

import { CONTRACTIONS, EMOJI_ALIASES, STOPWORDS } from "./tables.gen.js";

export interface CleanText {
  text: string;
  wsTokenCount: number;
}

// Python's \s in unicode mode: ASCII controls 9-13 + 0x1c-0x1f + 0x85,
// space, plus the Zs/Zl/Zp categories
const WS = " \\t\\n\\x0b\\x0c\\r\\x1c-\\x1f\\x85\\u00a0\\u1680\\u2000-\\u200a\\u2028\\u2029\\u202f\\u205f\\u3000";
const WS_RUN = new RegExp(`[${WS}]+`, "gu");
const NOT_WS = `[^${WS}]`;
// Python's \w in unicode mode is approximately letters + numbers + _
const WORD = "\\p{L}\\p{N}_";

const URL_RE = new RegExp(`(?:https?://|www\\.)${NOT_WS}+`, "gu");
const MENTION_RE = new RegExp(`@[${WORD}]+`, "gu");
const HASHTAG_RE = new RegExp(`#[${WORD}]+`, "gu");
const PLACEHOLDER_RE = /\[(?:URL|USER|HASHTAG)\]/g;

const NAMED_ENTITIES: Record<string, string> = {
  amp: "&", lt: "<", gt: ">", quot: '"', apos: "'", nbsp: " ",
  ndash: "–", mdash: "—", hellip: "…", rsquo: "’",
  lsquo: "‘", ldquo: "“", rdquo: "”", copy: "©",
  reg: "®", trade: "™", deg: "°", plusmn: "±",
  times: "×", divide: "÷", middot: "·", bull: "•",
  sect: "§", para: "¶", laquo: "«", raquo: "»",
  cent: "¢", pound: "£", euro: "€", yen: "¥",
};
const ENTITY_RE = /&(?:#(\d+);?|#[xX]([0-9a-fA-F]+);?|([a-zA-Z][a-zA-Z0-9]*);)/g;

const EMOJI_RANGES: ReadonlyArray<[number, number]> = [
  [0x1f000, 0x1ffff], [0x2600, 0x27bf], [0x2b00, 0x2bff],
];
const EMOJI_MODIFIERS = new Set<number>([0xfe0e, 0xfe0f, 0x200d, 0x20e3]);
for (let cp = 0x1f3fb; cp <= 0x1f3ff; cp++) EMOJI_MODIFIERS.add(cp);
const UNKNOWN_EMOJI_ALIAS = ":emoji:";

const CONTRACTION_RE = new RegExp(
  `(?<![${WORD}'])(?:` +
    Object.keys(CONTRACTIONS)
      .sort((a, b) => b.length - a.length)
      .map((t) => t.replace(/[.*+?^${}()|[\]\\]/g, "\\$&"))
      .join("|") +
    `)(?!['${WORD}])`,
  "giu",
);

const ASCII_PUNCT = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

function unescapeEntities(text: string): string {
  return text.replace(ENTITY_RE, (whole, dec, hex, named) => {
    if (dec !== undefined) return String.fromCodePoint(Number(dec));
    if (hex !== undefined) return String.fromCodePoint(parseInt(hex, 16));
    const repl = NAMED_ENTITIES[named];
    return repl !== undefined ? repl : whole;
  });
}

function lowerOutsidePlaceholders(text: string): string {
  const parts: string[] = [];
  let pos = 0;
  PLACEHOLDER_RE.lastIndex = 0;
  for (let m = PLACEHOLDER_RE.exec(text); m; m = PLACEHOLDER_RE.exec(text)) {
    parts.push(text.slice(pos, m.index).toLowerCase(), m[0]);
    pos = m.index + m[0].length;
  }
  parts.push(text.slice(pos).toLowerCase());
  return parts.join("");
}

function scrub(text: string): string {
  for (let i = 0; i < 8; i++) {
    const step = lowerOutsidePlaceholders(
      unescapeEntities(text).normalize("NFKC"),
    );
    if (step === text) break;
    text = step;
  }
  return text;
}

function replaceEmoji(text: string): string {
  let out = "";
  for (const ch of text) {
    const cp = ch.codePointAt(0)!;
    if (EMOJI_MODIFIERS.has(cp)) continue;
    const alias = EMOJI_ALIASES[cp];
    if (alias !== undefined) {
      out += alias;
    } else if (EMOJI_RANGES.some(([lo, hi]) => cp >= lo && cp <= hi)) {
      out += UNKNOWN_EMOJI_ALIAS;
    } else {
      out += ch;
    }
  }
  return out;
}

export function splitTokens(text: string): string[] {
  return text.split(WS_RUN).filter((t) => t.length > 0);
}

export function normalize(raw: string): CleanText {
  let text = scrub(raw);
  text = text.replace(CONTRACTION_RE, (m) => CONTRACTIONS[m.toLowerCase()]);
  text = text.replace(URL_RE, "[URL]");
  text = text.replace(MENTION_RE, "[USER]");
  text = text.replace(HASHTAG_RE, "[HASHTAG]");
  text = replaceEmoji(text);
  text = text.replace(WS_RUN, " ").trim();
  return { text, wsTokenCount: splitTokens(text).length };
}

function stripPunct(token: string): string {
  let start = 0;
  let end = token.length;
  while (start < end && ASCII_PUNCT.includes(token[start])) start++;
  while (end > start && ASCII_PUNCT.includes(token[end - 1])) end--;
  return token.slice(start, end);
}

export function englishGate(
  clean: CleanText,
  asciiThreshold = 0.9,
  minStopwordHits = 1,
): boolean {
  let alpha = 0;
  let ascii = 0;
  for (const ch of clean.text) {
    if (/\p{L}/u.test(ch)) {
      alpha++;
      if (ch.codePointAt(0)! <= 0x7f) ascii++;
    }
  }
  if (alpha > 0 && ascii / alpha < asciiThreshold) return false;
  let hits = 0;
  for (const token of splitTokens(clean.text)) {
    if (STOPWORDS.has(stripPunct(token))) hits++;
  }
  return hits >= minStopwordHits;
}

export function lengthGate(clean: CleanText, minTokens = 10): boolean {
  return clean.wsTokenCount >= minTokens;
}
