/** Parser for the core's line-delimited token-stream export.
 *
 * Record schema: `kind gop frame row col coeff e0 e1 ...` with -1 in
 * fields that do not apply to the token kind; `#` lines are headers.
 */

import { ValidationError } from "./errors";

export type TokenKind = "raw_anchor" | "dynamic_p" | "summary" | "static";

export const TOKEN_KINDS: readonly TokenKind[] = [
  "raw_anchor",
  "dynamic_p",
  "summary",
  "static",
];

export interface TokenRecord {
  kind: TokenKind;
  gop: number;
  frame: number;
  row: number;
  col: number;
  coeff: number;
  embedding: Float32Array;
}

export interface TokenStream {
  records: TokenRecord[];
  counts: Record<TokenKind, number>;
  total: number;
  dim: number;
}

export function parseTokens(text: string): TokenStream {
  const records: TokenRecord[] = [];
  const counts: Record<TokenKind, number> = {
    raw_anchor: 0,
    dynamic_p: 0,
    summary: 0,
    static: 0,
  };
  let dim = 0;
  for (const line of text.split("\n")) {
    if (!line || line.startsWith("#")) continue;
    const parts = line.split(" ");
    if (parts.length < 7) {
      throw new ValidationError(`token record too short: ${JSON.stringify(line)}`);
    }
    const kind = parts[0] as TokenKind;
    if (!TOKEN_KINDS.includes(kind)) {
      throw new ValidationError(`unknown token kind ${JSON.stringify(parts[0])}`);
    }
    const nums = parts.slice(1, 6).map((p) => Number.parseInt(p, 10));
    const embedding = new Float32Array(parts.length - 6);
    for (let i = 6; i < parts.length; i++) {
      embedding[i - 6] = Number.parseFloat(parts[i]);
    }
    dim = embedding.length;
    counts[kind] += 1;
    records.push({
      kind,
      gop: nums[0],
      frame: nums[1],
      row: nums[2],
      col: nums[3],
      coeff: nums[4],
      embedding,
    });
  }
  return { records, counts, total: records.length, dim };
}
