// Feed observation and post extraction.  The shell watches for newly
// rendered post containers, expands truncated "See more" segments before
// reading text, and hands raw text to the core; it contains no model
// logic.  IntersectionObserver (viewport gating) is a progressive
// enhancement: where unavailable, matched posts are processed immediately.

export const FACEBOOK_POST_SELECTOR = 'div[data-ad-comet-preview="message"]';
export const X_POST_SELECTOR = 'article[data-testid="tweet"]';
const COMBINED_SELECTOR = `${FACEBOOK_POST_SELECTOR}, ${X_POST_SELECTOR}`;

export type Platform = "facebook" | "x";

export interface ExtractedPost {
  node: Element;
  platform: Platform;
  text: string;
}

function platformOf(node: Element): Platform {
  return node.matches(X_POST_SELECTOR) ? "x" : "facebook";
}

/** Click every "See more" control inside the post so the full text is in
 * the DOM before extraction. */
export function expandSeeMore(node: Element): void {
  for (const button of Array.from(node.querySelectorAll('[role="button"]'))) {
    const label = (button.textContent ?? "").trim().toLowerCase();
    if (label === "see more" || label === "show more") {
      (button as HTMLElement).click();
    }
  }
}

function toPost(node: Element): ExtractedPost {
  expandSeeMore(node);
  return {
    node,
    platform: platformOf(node),
    text: (node.textContent ?? "").trim(),
  };
}

/** One-shot extraction of every post currently in the document. */
export function extractPosts(doc: Document): ExtractedPost[] {
  return Array.from(doc.querySelectorAll(COMBINED_SELECTOR)).map(toPost);
}

/**
 * Watch the document for dynamically inserted posts.  Every current and
 * future match is reported to `onPost` exactly once, viewport-gated when
 * IntersectionObserver exists.  Returns a teardown function.
 */
export function observePosts(doc: Document,
                             onPost: (post: ExtractedPost) => void): () => void {
  const seen = new WeakSet<Element>();
  const win = doc.defaultView;
  const io = win && typeof win.IntersectionObserver === "function"
    ? new win.IntersectionObserver((entries) => {
        for (const entry of entries) {
          if (entry.isIntersecting) {
            io!.unobserve(entry.target);
            onPost(toPost(entry.target));
          }
        }
      })
    : null;

  const admit = (node: Element) => {
    if (seen.has(node)) return;
    seen.add(node);
    if (io) {
      io.observe(node);
    } else {
      onPost(toPost(node));
    }
  };

  const scan = (root: Element) => {
    if (root.matches?.(COMBINED_SELECTOR)) admit(root);
    for (const node of Array.from(root.querySelectorAll?.(COMBINED_SELECTOR) ?? [])) {
      admit(node);
    }
  };

  scan(doc.documentElement);
  const MutationObserverCtor =
    (win as (Window & typeof globalThis) | null)?.MutationObserver ?? MutationObserver;
  const mo = new MutationObserverCtor((records: MutationRecord[]) => {
    for (const record of records) {
      for (const added of Array.from(record.addedNodes)) {
        if (added.nodeType === 1) scan(added as Element);
      }
    }
  });
  mo.observe(doc.body ?? doc.documentElement, { childList: true, subtree: true });
  return () => {
    mo.disconnect();
    io?.disconnect();
  };
}
