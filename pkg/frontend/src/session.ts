/**
 * The annotator's review loop, independent of the DOM.
 *
 * Verdicts go straight to the server when it is reachable; otherwise
 * they are parked in the offline queue and replayed on reconnect.  A
 * version conflict resurfaces the item at the back of the local queue
 * so the annotator sees the fresh state before re-judging.
 */

import { CurationClient } from './api.js';
import { bioProblems, isBioValid } from './bio.js';
import { OfflineQueue } from './queue.js';
import { ItemSummary, Quality, VerdictRequest } from './types.js';

export type SubmitResult =
  | { status: 'delivered' }
  | { status: 'queued' }
  | { status: 'conflict' }
  | { status: 'invalid-edit'; problems: number[] };

export class ReviewSession {
  private items: ItemSummary[] = [];
  private cursor = 0;

  constructor(
    private readonly client: CurationClient,
    private readonly queue: OfflineQueue,
  ) {}

  async refresh(transition?: string): Promise<number> {
    const response = await this.client.listItems('pending', transition);
    this.items = response.items;
    this.cursor = 0;
    return this.items.length;
  }

  current(): ItemSummary | null {
    return this.cursor < this.items.length ? this.items[this.cursor] : null;
  }

  position(): { index: number; total: number } {
    return { index: Math.min(this.cursor, this.items.length), total: this.items.length };
  }

  skip(): ItemSummary | null {
    if (this.cursor < this.items.length) this.cursor++;
    return this.current();
  }

  queuedCount(): number {
    return this.queue.size();
  }

  /**
   * Judge the current item.  Edits are BIO-validated before anything
   * leaves the client; the server re-checks them anyway.
   */
  async submit(quality: Quality, editedTokens?: string[], editedLabels?: string[]): Promise<SubmitResult> {
    const item = this.current();
    if (!item) throw new Error('no current item');
    if (editedLabels) {
      if (!editedTokens || editedTokens.length !== editedLabels.length || !isBioValid(editedLabels)) {
        return { status: 'invalid-edit', problems: bioProblems(editedLabels).map((p) => p.index) };
      }
    }
    const request: VerdictRequest = { itemId: item.id, quality };
    if (editedTokens && editedLabels) {
      request.editedTokens = editedTokens;
      request.editedLabels = editedLabels;
    }
    const outcome = await this.client.submitVerdict(request);
    if (outcome.kind === 'retriable') {
      this.queue.push(request);
      this.cursor++;
      return { status: 'queued' };
    }
    if (outcome.kind === 'rejected' && outcome.conflict) {
      const fresh = await this.client.getItem(item.id);
      this.items.splice(this.cursor, 1);
      this.items.push(fresh);
      return { status: 'conflict' };
    }
    if (outcome.kind === 'rejected') {
      throw new Error(outcome.reason);
    }
    this.cursor++;
    return { status: 'delivered' };
  }

  /** Replay everything parked while offline; returns how many got through. */
  async reconnect(): Promise<number> {
    const result = await this.queue.flush((request) => this.client.submitVerdict(request));
    return result.delivered;
  }
}
