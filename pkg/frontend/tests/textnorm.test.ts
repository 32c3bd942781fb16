// The core normalizer must match the training-side cleaner exactly; these
// mirror that suite's fixed cases, plus the table-parity check against the
// Python resource files.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { CONTRACTIONS, EMOJI_ALIASES, STOPWORDS } from "../src/core/tables.gen.js";
import { englishGate, lengthGate, normalize } from "../src/core/textnorm.js";
import { RESOURCES } from "./helpers.js";

describe("normalize", () => {
  it("unescapes entities and lower-cases", () => {
    const clean = normalize("Tom &amp; Jerry");
    expect(clean.text).toBe("tom & jerry");
    expect(clean.wsTokenCount).toBe(3);
  });

  it("substitutes placeholders", () => {
    expect(normalize("Check https://a.co @bob #Fake").text)
      .toBe("check [URL] [USER] [HASHTAG]");
  });

  it("expands contractions case-insensitively", () => {
    expect(normalize("can't stop").text).toBe("cannot stop");
    expect(normalize("CAN'T STOP").text).toBe("cannot stop");
    expect(normalize("won't've happened").text).toBe("will not have happened");
  });

  it("keeps placeholder tokens uppercase", () => {
    expect(normalize("see [URL] now").text).toBe("see [URL] now");
  });

  it("maps emoji to aliases and unknown emoji to :emoji:", () => {
    expect(normalize("good news \u{1F602}").text).toBe("good news :joy:");
    expect(normalize("odd \u{1F9FF} charm").text).toBe("odd :emoji: charm");
  });

  it("drops emoji modifiers", () => {
    expect(normalize("ok \u{1F44D}\u{1F3FD} done").text).toBe("ok :thumbsup: done");
  });

  it("applies NFKC", () => {
    expect(normalize("ﬁle Ⅻ").text).toBe("file xii");
  });

  it("resolves double-encoded entities to a fixed point", () => {
    expect(normalize("&amp;amp;").text).toBe("&");
    expect(normalize("＆amp;").text).toBe("&");
  });

  it("collapses whitespace", () => {
    expect(normalize("  a \t b\n\nc  ").text).toBe("a b c");
  });

  it("is idempotent", () => {
    const samples = [
      "Tom &amp; Jerry!", "Check https://a.co @bob #Fake", "can't \u{1F602} stop",
      "&amp;amp; ＆amp;", "www.example.com", "  spaced   out  ",
    ];
    for (const s of samples) {
      const once = normalize(s);
      expect(normalize(once.text)).toEqual(once);
    }
  });
});

describe("gates", () => {
  it("passes plain English", () => {
    expect(englishGate(normalize("the cat sat on the mat today ok now"))).toBe(true);
  });

  it("rejects non-Latin text", () => {
    expect(englishGate(normalize("это полностью русский текст без латиницы"))).toBe(false);
  });

  it("rejects ASCII without stopwords", () => {
    expect(englishGate(normalize("zzz qqq xxx vvv"))).toBe(false);
  });

  it("length gate boundary is inclusive at 10", () => {
    expect(lengthGate(normalize("one two three four five six seven eight nine"))).toBe(false);
    expect(lengthGate(normalize("one two three four five six seven eight nine ten"))).toBe(true);
  });
});

describe("table parity with the training pipeline", () => {
  function readPairs(name: string): Array<[string, string]> {
    return readFileSync(join(RESOURCES, name), "utf-8")
      .split("\n")
      .filter((l) => l.length > 0)
      .map((l) => {
        const i = l.indexOf("\t");
        return [l.slice(0, i), l.slice(i + 1)];
      });
  }

  it("contractions match", () => {
    expect(CONTRACTIONS).toEqual(Object.fromEntries(readPairs("contractions.tsv")));
  });

  it("emoji aliases match", () => {
    const expected: Record<number, string> = {};
    for (const [term, alias] of readPairs("emoji_aliases.tsv")) {
      expected[term.codePointAt(0)!] = alias;
    }
    expect(EMOJI_ALIASES).toEqual(expected);
  });

  it("stopwords match", () => {
    const words = readFileSync(join(RESOURCES, "stopwords.txt"), "utf-8")
      .split("\n").filter((w) => w.length > 0);
    expect([...STOPWORDS].sort()).toEqual(words.sort());
  });
});
