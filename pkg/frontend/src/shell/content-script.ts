// Extension entry point: load the embedded model bundle, watch the feed,
// classify each post on-device, and ribbon the flagged ones.  The bundle
// is read from extension-local resources; no request ever leaves the
// browser.

import { fingerprintHex, loadBundle, Session } from "../core/session.js";
import { normalize } from "../core/textnorm.js";
import { renderBanner } from "./banner.js";
import { ExtractedPost, observePosts } from "./extract.js";

declare const chrome: {
  runtime: { getURL(path: string): string };
};

async function loadEmbeddedBundle() {
  const url = (p: string) => chrome.runtime.getURL(`bundle/${p}`);
  const manifestJson = await (await fetch(url("bundle.json"))).text();
  const manifest = JSON.parse(manifestJson);
  const [modelBytes, vocabText] = await Promise.all([
    (await fetch(url(manifest.model_file))).arrayBuffer(),
    (await fetch(url(manifest.vocab_file))).text(),
  ]);
  return loadBundle(manifestJson, modelBytes, vocabText);
}

function handlePost(session: Session, post: ExtractedPost, counter: number): void {
  const verdict = session.classify(`${post.platform}-${counter}`, post.text);
  const effective = verdict.status === "suppressed_duplicate"
    ? session.cachedVerdict(post.text) ?? verdict
    : verdict;
  if (effective.status === "flagged") {
    renderBanner(post.node, effective, fingerprintHex(normalize(post.text).text));
  }
}

async function main(): Promise<void> {
  let engine;
  try {
    engine = await loadEmbeddedBundle();
  } catch (err) {
    // visible error state, never a crash of the host page
    console.error("[feedguard] model bundle unavailable:", err);
    return;
  }
  const session = new Session(engine);
  let counter = 0;
  observePosts(document, (post) => {
    counter += 1;
    try {
      handlePost(session, post, counter);
    } catch (err) {
      console.error("[feedguard] classification failed:", err);
    }
  });
}

void main();
