/** Wire types of the curation service REST API. */

export type Quality = 'high' | 'low';

export interface SentencePayload {
  tokens: string[];
  labels: string[];
}

export interface VerdictView {
  quality: Quality;
  edited: SentencePayload | null;
}

export interface ItemSummary {
  id: string;
  transition: string;
  status: 'pending' | 'done';
  original: SentencePayload;
  candidate: SentencePayload;
  verdicts: Record<string, VerdictView>;
}

export interface AgreementResponse {
  agreement: number | null;
  shared: number;
}

export interface StatsResponse {
  items: number;
  pending: number;
  per_transition: Record<string, number>;
  annotators: string[];
  calibration_size: number;
  calibration_done: Record<string, number>;
  agreement: number | null;
}

/** One verdict as POSTed to /items/{id}/verdict. */
export interface VerdictRequest {
  itemId: string;
  quality: Quality;
  editedTokens?: string[];
  editedLabels?: string[];
}
