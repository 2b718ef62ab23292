/** Whitespace tokens with character offsets: the unit kappa is computed on. */

export interface TokenSpan {
  start: number;
  end: number;
  text: string;
}

export function tokenize(text: string): TokenSpan[] {
  const tokens: TokenSpan[] = [];
  const re = /\S+/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(text)) !== null) {
    tokens.push({ start: m.index, end: m.index + m[0].length, text: m[0] });
  }
  return tokens;
}

/**
 * Expand a character range outward to whole-token boundaries.
 *
 * Any token the range partially covers is included in full, matching how
 * the agreement statistic counts partially covered tokens. Returns null
 * when the range touches no token at all.
 */
export function snapToTokens(
  tokens: TokenSpan[],
  start: number,
  end: number,
): { start: number; end: number } | null {
  const covered = tokens.filter((t) => t.start < end && start < t.end);
  if (covered.length === 0) return null;
  return { start: covered[0].start, end: covered[covered.length - 1].end };
}
