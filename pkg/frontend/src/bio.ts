/**
 * Client-side BIO validation, kept in lockstep with the backend.
 *
 * The rules are exactly what the server enforces on edited sentences:
 * labels are O or B-/I- over the four entity types, and an I-X must
 * directly continue a B-X or I-X of the same type.  A shared fixture
 * (tests/fixtures/bio_conformance.json) pins the two implementations
 * to each other.
 */

export const ENTITY_TYPES = ['PER', 'ORG', 'LOC', 'MISC'] as const;

export interface BioProblem {
  index: number;
  message: string;
}

function labelOk(label: string): boolean {
  if (label === 'O') return true;
  if (!label.startsWith('B-') && !label.startsWith('I-')) return false;
  return (ENTITY_TYPES as readonly string[]).includes(label.slice(2));
}

function labelType(label: string): string | null {
  return label.startsWith('B-') || label.startsWith('I-') ? label.slice(2) : null;
}

export function bioProblems(labels: string[]): BioProblem[] {
  const problems: BioProblem[] = [];
  let prev = 'O';
  for (let i = 0; i < labels.length; i++) {
    const label = labels[i];
    if (!labelOk(label)) {
      problems.push({ index: i, message: `unknown tag ${label}` });
      prev = 'O';
      continue;
    }
    if (label.startsWith('I-') && labelType(prev) !== label.slice(2)) {
      problems.push({ index: i, message: `${label} does not continue a ${label.slice(2)} entity` });
    }
    prev = label;
  }
  return problems;
}

export function isBioValid(labels: string[]): boolean {
  return bioProblems(labels).length === 0;
}

/** The label inventory offered by the inline editor. */
export function editableLabels(): string[] {
  const labels = ['O'];
  for (const t of ENTITY_TYPES) {
    labels.push(`B-${t}`, `I-${t}`);
  }
  return labels;
}
