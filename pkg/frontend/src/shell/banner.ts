// Warning banner rendering.  The banner is appended to the post container
// as a sibling of its content nodes: the original text nodes are never
// touched, rendering is idempotent per fingerprint per session, and
// removing the post node removes the banner with it.

import type { Verdict } from "../core/types.js";

export const BANNER_MESSAGE = "Warning: This content may contain false information.";
export const BANNER_CLASS = "feedguard-banner";

const BANNER_STYLE = [
  "display:block",
  "margin-top:8px",
  "padding:6px 10px",
  "border-radius:4px",
  "background:#b3001b",
  "color:#ffffff",           // legible on both dark and light themes
  "font-size:13px",
  "font-weight:600",
  "line-height:1.4",
].join(";");

/**
 * Insert the warning ribbon for a flagged verdict.  No-ops for non-flagged
 * verdicts, detached nodes, and repeat renders of the same fingerprint.
 */
export function renderBanner(node: Element, verdict: Verdict,
                             fingerprint: string): void {
  if (verdict.status !== "flagged") return;
  if (!node.isConnected) return;
  for (const existing of Array.from(node.getElementsByClassName(BANNER_CLASS))) {
    if (existing.getAttribute("data-feedguard-fp") === fingerprint) return;
  }
  const doc = node.ownerDocument;
  const banner = doc.createElement("div");
  banner.className = BANNER_CLASS;
  banner.setAttribute("role", "alert");
  banner.setAttribute("data-feedguard-fp", fingerprint);
  banner.setAttribute("style", BANNER_STYLE);
  banner.textContent = BANNER_MESSAGE;
  node.appendChild(banner);
}
