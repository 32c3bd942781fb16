#!/usr/bin/env python3
"""Regenerate src/core/tables.gen.ts from the Python package resources.

The extension core must normalize text exactly like the training pipeline,
so the contraction/emoji/stopword tables are generated from the same files
(tests/tables-parity.test.ts enforces the match).
"""

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
RESOURCES = ROOT.parent / "src" / "feedguard" / "resources"
OUT = ROOT / "src" / "core" / "tables.gen.ts"


def read_pairs(name: str) -> list[tuple[str, str]]:
    pairs = []
    for line in (RESOURCES / name).read_text("utf-8").splitlines():
        if line:
            term, _, repl = line.partition("\t")
            pairs.append((term, repl))
    return pairs


def main() -> None:
    contractions = dict(read_pairs("contractions.tsv"))
    emoji = {ord(term): alias for term, alias in read_pairs("emoji_aliases.tsv")}
    stopwords = [w for w in (RESOURCES / "stopwords.txt").read_text("utf-8").split() if w]

    body = f"""// generated by scripts/generate_tables.py from the Python package
// resources; do not edit by hand (tests/tables-parity.test.ts checks this)

export const CONTRACTIONS: Record<string, string> = {json.dumps(contractions, ensure_ascii=False, indent=2)};

export const EMOJI_ALIASES: Record<number, string> = {json.dumps(emoji, indent=2)};

export const STOPWORDS: ReadonlySet<string> = new Set({json.dumps(stopwords, indent=2)});
"""
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(body, "utf-8")
    print(f"wrote {OUT} ({len(contractions)} contractions, {len(emoji)} emoji, "
          f"{len(stopwords)} stopwords)")


if __name__ == "__main__":
    main()
