// Session state and the post-classification pipeline: length gate,
// language gate, duplicate suppression on the normalized-text fingerprint,
// then tokenize + quantized inference and the thresholded verdict.  All
// state is in-memory for the lifetime of the session; nothing here (or in
// anything it calls) can issue a network request.

import { parseQuantModel, predictProba, qforward, QuantModel } from "./model.js";
import { englishGate, lengthGate, normalize } from "./textnorm.js";
import { encode, parseVocab, Vocab } from "./tokenizer.js";
import type { BundleManifest, Verdict, VerdictStatus } from "./types.js";

// FNV-1a 64-bit over the UTF-8 bytes of the normalized text; equality
// semantics match the training-side 8-byte fingerprint (same text, same
// key) without needing a full hash construction in the shell.
export function fingerprintHex(text: string): string {
  let h = 0xcbf29ce484222325n;
  for (const byte of new TextEncoder().encode(text)) {
    h ^= BigInt(byte);
    h = (h * 0x100000001b3n) & 0xffffffffffffffffn;
  }
  return h.toString(16).padStart(16, "0");
}

export interface CoreEngine {
  vocab: Vocab;
  model: QuantModel;
  tau: number;
}

export function loadBundle(manifestJson: string, modelBytes: ArrayBuffer,
                           vocabText: string): CoreEngine {
  const manifest = JSON.parse(manifestJson) as BundleManifest;
  if (manifest.format !== "feedguard-bundle") {
    throw new Error(`not a feedguard bundle (format ${manifest.format})`);
  }
  if (manifest.version !== 1) {
    throw new Error(`unsupported bundle version ${manifest.version}`);
  }
  const model = parseQuantModel(modelBytes);
  const vocab = parseVocab(vocabText);
  if (vocab.tokens.length !== model.config.vocabSize) {
    throw new Error(
      `vocab has ${vocab.tokens.length} entries, model expects ${model.config.vocabSize}`);
  }
  if (!(manifest.tau > 0 && manifest.tau < 1)) {
    throw new Error(`tau out of range: ${manifest.tau}`);
  }
  return { vocab, model, tau: manifest.tau };
}

export class Session {
  private readonly seen = new Set<string>();
  private readonly verdictByFingerprint = new Map<string, Verdict>();
  readonly latenciesMs: number[] = [];

  constructor(private readonly engine: CoreEngine,
              private readonly minTokens = 10) {}

  get tau(): number {
    return this.engine.tau;
  }

  /** Classify one post; every call is timed and recorded. */
  classify(postId: string, rawText: string): Verdict {
    const start = performance.now();
    const clean = normalize(rawText);
    if (!lengthGate(clean, this.minTokens)) {
      return this.finish(postId, "skipped_short", null, start, null);
    }
    if (!englishGate(clean)) {
      return this.finish(postId, "skipped_language", null, start, null);
    }
    const fp = fingerprintHex(clean.text);
    if (this.seen.has(fp)) {
      return this.finish(postId, "suppressed_duplicate", null, start, fp);
    }
    const { ids, mask } = encode(this.engine.vocab, clean.text,
                                 this.engine.model.config.maxLen);
    const p1 = predictProba(qforward(this.engine.model, ids, mask));
    this.seen.add(fp);
    const status: VerdictStatus = p1 >= this.engine.tau ? "flagged" : "clean";
    return this.finish(postId, status, p1, start, fp);
  }

  /**
   * The verdict previously computed for this text, if any.  Suppressed
   * duplicates of flagged posts reuse it so visible copies still warn.
   */
  cachedVerdict(rawText: string): Verdict | undefined {
    return this.verdictByFingerprint.get(fingerprintHex(normalize(rawText).text));
  }

  private finish(postId: string, status: VerdictStatus, p1: number | null,
                 start: number, fp: string | null): Verdict {
    const verdict: Verdict = {
      postId, status, p1, latencyMs: performance.now() - start,
    };
    this.latenciesMs.push(verdict.latencyMs);
    if (fp !== null && p1 !== null) {
      this.verdictByFingerprint.set(fp, verdict);
    }
    return verdict;
  }
}
