/**
 * REST client for the curation service.
 *
 * Submission distinguishes three outcomes: delivered, retriable failure
 * (network down or 5xx -- the caller queues the verdict and replays it
 * later), and rejected (4xx -- the caller surfaces the item instead of
 * retrying; a 409 marks a version conflict).
 */

import {
  AgreementResponse,
  ItemSummary,
  StatsResponse,
  VerdictRequest,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export type SubmitOutcome =
  | { kind: 'delivered' }
  | { kind: 'retriable'; reason: string }
  | { kind: 'rejected'; status: number; conflict: boolean; reason: string };

export class CurationClient {
  constructor(
    private readonly baseUrl: string,
    private token: string | null = null,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers['Content-Type'] = 'application/json';
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    return headers;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, { headers: this.headers() });
    if (!response.ok) {
      throw new Error(`GET ${path} failed with ${response.status}`);
    }
    return (await response.json()) as T;
  }

  listItems(status?: 'pending' | 'done', transition?: string): Promise<{ items: ItemSummary[] }> {
    const query = new URLSearchParams();
    if (status) query.set('status', status);
    if (transition) query.set('transition', transition);
    const suffix = query.toString() ? `?${query}` : '';
    return this.getJson(`/items${suffix}`);
  }

  getItem(id: string): Promise<ItemSummary> {
    return this.getJson(`/items/${id}`);
  }

  agreement(): Promise<AgreementResponse> {
    return this.getJson('/agreement');
  }

  stats(): Promise<StatsResponse> {
    return this.getJson('/stats');
  }

  exportUrl(policy: string): string {
    return `${this.baseUrl}/export?policy=${encodeURIComponent(policy)}`;
  }

  async submitVerdict(request: VerdictRequest): Promise<SubmitOutcome> {
    const body: Record<string, unknown> = { quality: request.quality };
    if (request.editedTokens && request.editedLabels) {
      body.edited_tokens = request.editedTokens;
      body.edited_labels = request.editedLabels;
    }
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}/items/${request.itemId}/verdict`, {
        method: 'POST',
        headers: this.headers(true),
        body: JSON.stringify(body),
      });
    } catch (err) {
      return { kind: 'retriable', reason: String(err) };
    }
    if (response.ok) {
      return { kind: 'delivered' };
    }
    if (response.status >= 500) {
      return { kind: 'retriable', reason: `server error ${response.status}` };
    }
    return {
      kind: 'rejected',
      status: response.status,
      conflict: response.status === 409,
      reason: `rejected with ${response.status}`,
    };
  }
}
