/**
 * Token-level diff between an original sentence and its augmented
 * candidate, for the side-by-side color coding: inserted entity tokens
 * and relabeled originals mark the entity change, inserted O tokens are
 * the context change, deletions are struck out on the original side.
 *
 * Everything here is derived from the server payload alone (tokens and
 * labels); no extra provenance is trusted for rendering.
 */

import { SentencePayload } from './types.js';

export type CandidateKind = 'same' | 'inserted-entity' | 'inserted-context' | 'relabeled';
export type OriginalKind = 'same' | 'deleted' | 'relabeled';

export interface CandidateToken {
  text: string;
  label: string;
  kind: CandidateKind;
}

export interface OriginalToken {
  text: string;
  label: string;
  kind: OriginalKind;
}

export interface TokenDiff {
  original: OriginalToken[];
  candidate: CandidateToken[];
}

function isEntityLabel(label: string): boolean {
  return label.startsWith('B-') || label.startsWith('I-');
}

/** Longest common subsequence over token texts, as index pairs. */
function lcsPairs(a: string[], b: string[]): Array<[number, number]> {
  const n = a.length;
  const m = b.length;
  const table: number[][] = Array.from({ length: n + 1 }, () => new Array(m + 1).fill(0));
  for (let i = n - 1; i >= 0; i--) {
    for (let j = m - 1; j >= 0; j--) {
      table[i][j] = a[i] === b[j]
        ? table[i + 1][j + 1] + 1
        : Math.max(table[i + 1][j], table[i][j + 1]);
    }
  }
  const pairs: Array<[number, number]> = [];
  let i = 0;
  let j = 0;
  while (i < n && j < m) {
    if (a[i] === b[j]) {
      pairs.push([i, j]);
      i++;
      j++;
    } else if (table[i + 1][j] >= table[i][j + 1]) {
      i++;
    } else {
      j++;
    }
  }
  return pairs;
}

export function diffTokens(original: SentencePayload, candidate: SentencePayload): TokenDiff {
  const pairs = lcsPairs(original.tokens, candidate.tokens);
  const matchedOrig = new Map(pairs);
  const matchedCand = new Map(pairs.map(([i, j]) => [j, i] as [number, number]));

  const originalOut: OriginalToken[] = original.tokens.map((text, i) => {
    const j = matchedOrig.get(i);
    if (j === undefined) {
      return { text, label: original.labels[i], kind: 'deleted' };
    }
    const kind: OriginalKind = original.labels[i] === candidate.labels[j] ? 'same' : 'relabeled';
    return { text, label: original.labels[i], kind };
  });

  const candidateOut: CandidateToken[] = candidate.tokens.map((text, j) => {
    const label = candidate.labels[j];
    const i = matchedCand.get(j);
    if (i === undefined) {
      const kind: CandidateKind = isEntityLabel(label) ? 'inserted-entity' : 'inserted-context';
      return { text, label, kind };
    }
    const kind: CandidateKind = original.labels[i] === label ? 'same' : 'relabeled';
    return { text, label, kind };
  });

  return { original: originalOut, candidate: candidateOut };
}
