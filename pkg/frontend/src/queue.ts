/**
 * Offline verdict queue.
 *
 * A verdict that cannot reach the server is persisted here and replayed
 * on the next flush (reconnect, timer, or manual retry).  The storage
 * backend is injectable: the browser passes localStorage, tests pass a
 * plain in-memory map.  Replay preserves submission order and never
 * drops a verdict on a retriable failure; a rejected verdict (e.g. a
 * version conflict) is removed from the queue and handed back so the
 * item can be resurfaced.
 */

import { SubmitOutcome } from './api.js';
import { VerdictRequest } from './types.js';

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface FlushResult {
  delivered: number;
  rejected: VerdictRequest[];
  remaining: number;
}

export class OfflineQueue {
  constructor(
    private readonly storage: StorageLike,
    private readonly key = 'entshift-verdict-queue',
  ) {}

  load(): VerdictRequest[] {
    const raw = this.storage.getItem(this.key);
    if (!raw) return [];
    try {
      return JSON.parse(raw) as VerdictRequest[];
    } catch {
      return [];
    }
  }

  private save(queue: VerdictRequest[]): void {
    if (queue.length === 0) {
      this.storage.removeItem(this.key);
    } else {
      this.storage.setItem(this.key, JSON.stringify(queue));
    }
  }

  size(): number {
    return this.load().length;
  }

  /** Append a verdict; a newer verdict for the same item replaces the queued one. */
  push(request: VerdictRequest): void {
    const queue = this.load().filter((r) => r.itemId !== request.itemId);
    queue.push(request);
    this.save(queue);
  }

  /**
   * Replay queued verdicts in order.  Stops at the first retriable
   * failure (the connection is evidently still bad) and keeps the rest.
   */
  async flush(submit: (request: VerdictRequest) => Promise<SubmitOutcome>): Promise<FlushResult> {
    const queue = this.load();
    const rejected: VerdictRequest[] = [];
    let delivered = 0;
    let index = 0;
    while (index < queue.length) {
      const outcome = await submit(queue[index]);
      if (outcome.kind === 'delivered') {
        delivered++;
        index++;
      } else if (outcome.kind === 'rejected') {
        rejected.push(queue[index]);
        index++;
      } else {
        break;
      }
    }
    const remaining = queue.slice(index);
    this.save(remaining);
    return { delivered, rejected, remaining: remaining.length };
  }
}
