// Slash-command templates and input autocomplete for the Recom Edit Panel.
// Pure functions: the panel supplies the session context, nothing is fetched.

export type SessionContext = {
  config: string; // bare token string, "" for a blank session
  datasets: { name: string; kind: string }[];
};

export const COMMANDS = ["\\recommend", "\\data"] as const;

export function expandTemplate(input: string, session: SessionContext): string {
  const trimmed = input.trimStart();
  if (trimmed.startsWith("\\recommend")) {
    const rest = trimmed.slice("\\recommend".length).trim();
    const base = session.config
      ? `Recommend track combinations that extend the current design ${session.config}.`
      : "Recommend track combinations for a new circos plot; the current design is empty.";
    return rest ? `${base} ${rest}` : base;
  }
  if (trimmed.startsWith("\\data")) {
    const rest = trimmed.slice("\\data".length).trim();
    const names = session.datasets.map((dataset) => `${dataset.name} (${dataset.kind})`).join(", ");
    if (!names) {
      return rest;
    }
    return rest ? `${names}: ${rest}` : names;
  }
  return input;
}

// Completion entries offered for the text cursor sitting at the end of input:
// the two commands after "\", the nine track tokens after an unclosed "<".
export function suggest(input: string, tokens: string[]): string[] {
  const backslash = input.lastIndexOf("\\");
  if (backslash !== -1 && !input.slice(backslash).includes(" ")) {
    const prefix = input.slice(backslash);
    return COMMANDS.filter((command) => command.startsWith(prefix) && command !== prefix);
  }
  const open = input.lastIndexOf("<");
  if (open !== -1 && !input.slice(open).includes(">")) {
    const prefix = input.slice(open + 1).toLowerCase();
    return tokens.filter((token) => token.startsWith(prefix)).map((token) => `<${token}>`);
  }
  return [];
}

// Applying a suggestion replaces the partial command/token at the cursor.
export function applySuggestion(input: string, suggestion: string): string {
  if (suggestion.startsWith("\\")) {
    const backslash = input.lastIndexOf("\\");
    return input.slice(0, backslash) + suggestion;
  }
  const open = input.lastIndexOf("<");
  return input.slice(0, open) + suggestion;
}
