// Minimal HTML escaping for user- and server-supplied text dropped into
// innerHTML templates. Token strings in particular look like markup.

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
