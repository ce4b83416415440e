/** Pure text helpers for the DOM layer. */

const HTML_ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (c) => HTML_ESCAPES[c]);
}

/**
 * Make whitespace anomalies visible so the "clean" attribute is judgeable:
 * middle dots for spaces, arrows for tabs, pilcrows at line ends.
 */
export function revealWhitespace(text: string): string {
  // Spaces first, so the blank padding after the tab arrow stays blank.
  return text
    .replace(/ /g, "·")
    .replace(/\t/g, "→   ")
    .replace(/\n/g, "¶\n");
}

export function progressLabel(position: number, total: number): string {
  return `${position + 1} / ${total}`;
}
