/** Covered-token highlighting.
 *
 * The service reports covered tokens in the tokenizer's normal form
 * (lowercased, punctuation detached). To mark them inside the original
 * sentence text, each whitespace chunk is split into leading punctuation,
 * core, and trailing punctuation pieces, and each piece matches against the
 * covered set by its lowercased form. The client only performs this set
 * membership lookup; it never derives scores.
 */

const PUNCT = /[ -⁯⸀-⹿!-/:-@[-`{-~«»„“”‘’]/;

export interface TextPiece {
  text: string;
  covered: boolean;
  token: string | null; // normalized token this piece matched, if covered
}

function pieceOf(text: string, covered: Set<string>): TextPiece {
  const norm = text.toLowerCase();
  const hit = covered.has(norm);
  return { text, covered: hit, token: hit ? norm : null };
}

export function splitChunk(chunk: string): string[] {
  let start = 0;
  let end = chunk.length;
  const lead: string[] = [];
  const trail: string[] = [];
  while (start < end && PUNCT.test(chunk[start])) {
    lead.push(chunk[start]);
    start += 1;
  }
  while (end > start && PUNCT.test(chunk[end - 1])) {
    trail.unshift(chunk[end - 1]);
    end -= 1;
  }
  const pieces = [...lead];
  if (end > start) pieces.push(chunk.slice(start, end));
  pieces.push(...trail);
  return pieces;
}

/** Break sentence text into pieces, marking those in the covered set. */
export function markCovered(text: string, coveredTokens: string[]): TextPiece[] {
  const covered = new Set(coveredTokens);
  const out: TextPiece[] = [];
  const chunks = text.split(/(\s+)/);
  for (const chunk of chunks) {
    if (chunk === "") continue;
    if (/^\s+$/.test(chunk)) {
      out.push({ text: chunk, covered: false, token: null });
      continue;
    }
    for (const piece of splitChunk(chunk)) {
      out.push(pieceOf(piece, covered));
    }
  }
  return out;
}

/** The set of normalized tokens actually marked in a rendering. */
export function markedTokens(pieces: TextPiece[]): Set<string> {
  return new Set(pieces.filter((p) => p.covered).map((p) => p.token as string));
}
