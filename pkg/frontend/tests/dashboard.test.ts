import { describe, expect, it } from 'vitest';

import { buildDashboard } from '../src/dashboard.js';
import { StatsResponse } from '../src/types.js';

function stats(overrides: Partial<StatsResponse> = {}): StatsResponse {
  return {
    items: 1000,
    pending: 400,
    per_transition: { to_org: 510, to_loc: 99, to_per: 391 },
    annotators: ['ann1', 'ann2'],
    calibration_size: 50,
    calibration_done: { ann1: 50, ann2: 50 },
    agreement: 0.78,
    ...overrides,
  };
}

describe('dashboard view model', () => {
  it('shows 78% over the 50-item pilot', () => {
    const view = buildDashboard(stats(), { agreement: 0.78, shared: 50 });
    expect(view.agreementPercent).toBe(78);
    expect(view.agreementShared).toBe(50);
  });

  it('renders the per-transition counts', () => {
    const view = buildDashboard(stats(), { agreement: 0.78, shared: 50 });
    expect(view.transitionRows).toEqual([
      { transition: 'to_loc', count: 99 },
      { transition: 'to_org', count: 510 },
      { transition: 'to_per', count: 391 },
    ]);
    expect(view.completionPercent).toBe(60);
  });

  it('keeps the calibration banner until every annotator finishes the sample', () => {
    const during = buildDashboard(
      stats({ calibration_done: { ann1: 50, ann2: 12 } }),
      { agreement: null, shared: 0 });
    expect(during.calibrationBanner).toBe(true);
    const after = buildDashboard(stats(), { agreement: 0.78, shared: 50 });
    expect(after.calibrationBanner).toBe(false);
  });

  it('empty store produces the empty state', () => {
    const view = buildDashboard(
      stats({ items: 0, pending: 0, per_transition: {}, annotators: [],
              calibration_size: 0, calibration_done: {}, agreement: null }),
      { agreement: null, shared: 0 });
    expect(view.empty).toBe(true);
    expect(view.completionPercent).toBe(0);
    expect(view.agreementPercent).toBeNull();
  });
});
