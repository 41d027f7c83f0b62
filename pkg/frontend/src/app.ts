/**
 * DOM wiring: renders the side-by-side review card, the inline editor,
 * and the dashboard; binds the keyboard shortcuts (h = high, l = low,
 * s = skip, e = toggle editor, r = retry queued verdicts).
 *
 * All state changes go through the documented REST endpoints; this file
 * only draws what the ReviewSession and the server report.
 */

import { CurationClient } from './api.js';
import { bioProblems, editableLabels } from './bio.js';
import { buildDashboard } from './dashboard.js';
import { diffTokens } from './diff.js';
import { OfflineQueue } from './queue.js';
import { ReviewSession } from './session.js';
import { ItemSummary, Quality } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  private readonly session: ReviewSession;
  private editing = false;
  private editTokens: string[] = [];
  private editLabels: string[] = [];

  constructor(
    private readonly client: CurationClient,
    queue: OfflineQueue,
    private readonly root: HTMLElement,
  ) {
    this.session = new ReviewSession(client, queue);
  }

  async start(): Promise<void> {
    document.addEventListener('keydown', (event) => this.onKey(event));
    window.addEventListener('online', () => void this.retryQueued());
    await this.session.refresh();
    await this.render();
  }

  private onKey(event: KeyboardEvent): void {
    if ((event.target as HTMLElement)?.tagName === 'INPUT') return;
    const actions: Record<string, () => void> = {
      h: () => void this.judge('high'),
      l: () => void this.judge('low'),
      s: () => void this.advance(),
      e: () => this.toggleEditor(),
      r: () => void this.retryQueued(),
    };
    actions[event.key]?.();
  }

  private async judge(quality: Quality): Promise<void> {
    const edited = this.editing
      ? { tokens: this.editTokens, labels: this.editLabels }
      : undefined;
    const result = await this.session.submit(quality, edited?.tokens, edited?.labels);
    if (result.status === 'invalid-edit') {
      this.note(`edit rejected: BIO problems at token(s) ${result.problems.join(', ')}`);
      return;
    }
    if (result.status === 'queued') this.note('offline: verdict queued, will retry');
    if (result.status === 'conflict') this.note('item changed on the server; it will come back');
    this.editing = false;
    await this.render();
  }

  private async advance(): Promise<void> {
    this.editing = false;
    this.session.skip();
    await this.render();
  }

  private async retryQueued(): Promise<void> {
    const delivered = await this.session.reconnect();
    if (delivered > 0) this.note(`replayed ${delivered} queued verdict(s)`);
    await this.render();
  }

  private toggleEditor(): void {
    const item = this.session.current();
    if (!item) return;
    this.editing = !this.editing;
    if (this.editing) {
      this.editTokens = [...item.candidate.tokens];
      this.editLabels = [...item.candidate.labels];
    }
    void this.render();
  }

  private note(message: string): void {
    const banner = document.getElementById('note');
    if (banner) {
      banner.textContent = message;
      banner.classList.add('visible');
      setTimeout(() => banner.classList.remove('visible'), 4000);
    }
  }

  private renderSentence(tokens: Array<{ text: string; label: string; kind: string }>): HTMLElement {
    const box = el('div', 'sentence');
    for (const token of tokens) {
      const chip = el('span', `token ${token.kind}`, token.text);
      if (token.label !== 'O') chip.append(el('sup', 'tag', token.label));
      box.append(chip);
    }
    return box;
  }

  private renderEditor(item: ItemSummary): HTMLElement {
    const box = el('div', 'editor');
    const labels = editableLabels();
    item.candidate.tokens.forEach((_, i) => {
      const row = el('div', 'edit-row');
      const input = el('input');
      input.value = this.editTokens[i];
      input.addEventListener('input', () => { this.editTokens[i] = input.value; });
      const select = el('select');
      for (const label of labels) {
        const option = el('option', undefined, label);
        option.selected = label === this.editLabels[i];
        select.append(option);
      }
      select.addEventListener('change', () => {
        this.editLabels[i] = select.value;
        this.markProblems(box);
      });
      row.append(input, select);
      box.append(row);
    });
    this.markProblems(box);
    return box;
  }

  private markProblems(box: HTMLElement): void {
    const bad = new Set(bioProblems(this.editLabels).map((p) => p.index));
    box.querySelectorAll('.edit-row').forEach((row, i) => {
      row.classList.toggle('invalid', bad.has(i));
    });
  }

  private async render(): Promise<void> {
    const item = this.session.current();
    const review = this.root.querySelector('#review')!;
    review.innerHTML = '';
    const { index, total } = this.session.position();
    const queued = this.session.queuedCount();
    const status = `${index} / ${total} pending` + (queued ? ` · ${queued} queued offline` : '');
    review.append(el('div', 'status', status));

    if (!item) {
      review.append(el('p', 'empty', total === 0
        ? 'Nothing to review. Ingest candidates first.'
        : 'Queue finished. Refresh for more.'));
    } else {
      const diff = diffTokens(item.original, item.candidate);
      review.append(el('h3', undefined, `candidate ${item.id} · ${item.transition}`));
      review.append(el('div', 'pane-label', 'original'));
      review.append(this.renderSentence(diff.original));
      review.append(el('div', 'pane-label', 'candidate'));
      review.append(this.renderSentence(diff.candidate));
      if (this.editing) review.append(this.renderEditor(item));

      const controls = el('div', 'controls');
      for (const [label, handler] of [
        ['high (h)', () => void this.judge('high')],
        ['low (l)', () => void this.judge('low')],
        ['skip (s)', () => void this.advance()],
        [this.editing ? 'discard edit (e)' : 'edit (e)', () => this.toggleEditor()],
      ] as Array<[string, () => void]>) {
        const button = el('button', undefined, label);
        button.addEventListener('click', handler);
        controls.append(button);
      }
      review.append(controls);
    }
    await this.renderDashboard();
  }

  private async renderDashboard(): Promise<void> {
    const pane = this.root.querySelector('#dashboard')!;
    pane.innerHTML = '';
    try {
      const view = buildDashboard(await this.client.stats(), await this.client.agreement());
      if (view.calibrationBanner) {
        pane.append(el('div', 'calibration',
          'calibration round: finish the shared sample before the full set'));
      }
      if (view.empty) {
        pane.append(el('p', 'empty', 'no items yet'));
        return;
      }
      pane.append(el('div', undefined, `complete: ${view.completionPercent}%`));
      pane.append(el('div', undefined, view.agreementPercent === null
        ? 'agreement: n/a'
        : `agreement: ${view.agreementPercent}% over ${view.agreementShared} shared`));
      const list = el('ul', 'transitions');
      for (const row of view.transitionRows) {
        list.append(el('li', undefined, `${row.transition}: ${row.count}`));
      }
      pane.append(list);
    } catch {
      pane.append(el('p', 'empty', 'stats unavailable (read-only view)'));
    }
  }
}
