// Shared test plumbing: fixture documents and the golden bundle committed
// by the training pipeline (the export-bundle directory is the only
// interface between the extension and the trainer).

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { JSDOM } from "jsdom";

import { CoreEngine, loadBundle } from "../src/core/session.js";

const HERE = dirname(fileURLToPath(import.meta.url));
export const FIXTURES = join(HERE, "fixtures");
export const GOLDEN = join(HERE, "..", "..", "tests", "data", "golden");
export const RESOURCES = join(HERE, "..", "..", "src", "feedguard", "resources");

export function loadFixtureDom(name: string): JSDOM {
  return new JSDOM(readFileSync(join(FIXTURES, name), "utf-8"));
}

export function loadGoldenEngine(): CoreEngine {
  const manifest = readFileSync(join(GOLDEN, "bundle", "bundle.json"), "utf-8");
  const model = readFileSync(join(GOLDEN, "bundle", "model.q8"));
  const vocab = readFileSync(join(GOLDEN, "bundle", "vocab.txt"), "utf-8");
  return loadBundle(
    manifest,
    model.buffer.slice(model.byteOffset, model.byteOffset + model.byteLength) as ArrayBuffer,
    vocab,
  );
}

export function readJsonl(path: string): Array<Record<string, unknown>> {
  return readFileSync(path, "utf-8")
    .trim()
    .split("\n")
    .map((line) => JSON.parse(line));
}
