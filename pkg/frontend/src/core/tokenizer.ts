// Greedy longest-match subword tokenizer over a one-token-per-line
// vocabulary (line number = id).  Words are handled as codepoint arrays so
// segmentation boundaries match the training-side implementation exactly.

import { splitTokens } from "./textnorm.js";

export const PAD = "[PAD]";
export const UNK = "[UNK]";
export const CLS = "[CLS]";
export const SEP = "[SEP]";

export interface Vocab {
  tokens: string[];
  index: Map<string, number>;
  padId: number;
  unkId: number;
  clsId: number;
  sepId: number;
}

export interface TokenSeq {
  ids: Int32Array;
  mask: Int32Array;
}

export function parseVocab(text: string): Vocab {
  const tokens = text.split("\n");
  while (tokens.length && tokens[tokens.length - 1] === "") tokens.pop();
  const index = new Map<string, number>();
  tokens.forEach((tok, i) => {
    if (index.has(tok)) throw new Error(`duplicate vocab token ${tok}`);
    index.set(tok, i);
  });
  for (const special of [PAD, UNK, CLS, SEP]) {
    if (!index.has(special)) throw new Error(`vocabulary missing ${special}`);
  }
  if (index.get(PAD) !== 0) throw new Error(`${PAD} must occupy id 0`);
  return {
    tokens,
    index,
    padId: 0,
    unkId: index.get(UNK)!,
    clsId: index.get(CLS)!,
    sepId: index.get(SEP)!,
  };
}

export function wordpiece(vocab: Vocab, word: string): string[] {
  const chars = Array.from(word);
  const pieces: string[] = [];
  let start = 0;
  while (start < chars.length) {
    let found: string | null = null;
    let end = chars.length;
    for (; end > start; end--) {
      const body = chars.slice(start, end).join("");
      const candidate = start === 0 ? body : "##" + body;
      if (vocab.index.has(candidate)) {
        found = candidate;
        break;
      }
    }
    if (found === null) return [UNK];
    pieces.push(found);
    start = end;
  }
  return pieces;
}

export function encode(vocab: Vocab, normalizedText: string, maxLen: number): TokenSeq {
  const pieceIds: number[] = [];
  for (const word of splitTokens(normalizedText)) {
    for (const piece of wordpiece(vocab, word)) {
      pieceIds.push(vocab.index.get(piece)!);
    }
  }
  const body = pieceIds.slice(0, maxLen - 2);
  const ids = new Int32Array(maxLen).fill(vocab.padId);
  const mask = new Int32Array(maxLen);
  ids[0] = vocab.clsId;
  body.forEach((id, i) => (ids[i + 1] = id));
  ids[body.length + 1] = vocab.sepId;
  for (let i = 0; i < body.length + 2; i++) mask[i] = 1;
  return { ids, mask };
}
