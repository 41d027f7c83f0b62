/**
 * Pure view-model for the progress dashboard: per-transition counts,
 * completion, live agreement, and the calibration-round banner that
 * stays up until every annotator has finished the shared sample.
 */

import { AgreementResponse, StatsResponse } from './types.js';

export interface DashboardView {
  transitionRows: Array<{ transition: string; count: number }>;
  completionPercent: number;
  agreementPercent: number | null;
  agreementShared: number;
  calibrationBanner: boolean;
  calibrationProgress: Array<{ annotator: string; done: number; of: number }>;
  empty: boolean;
}

export function buildDashboard(stats: StatsResponse, agreement: AgreementResponse): DashboardView {
  const done = stats.items - stats.pending;
  const transitionRows = Object.entries(stats.per_transition)
    .map(([transition, count]) => ({ transition, count }))
    .sort((a, b) => a.transition.localeCompare(b.transition));

  const calibrationProgress = stats.annotators.map((annotator) => ({
    annotator,
    done: stats.calibration_done[annotator] ?? 0,
    of: stats.calibration_size,
  }));
  const calibrationBanner =
    stats.calibration_size > 0 &&
    (stats.annotators.length === 0 ||
      calibrationProgress.some((p) => p.done < p.of));

  return {
    transitionRows,
    completionPercent: stats.items === 0 ? 0 : Math.round((100 * done) / stats.items),
    agreementPercent:
      agreement.agreement === null ? null : Math.round(100 * agreement.agreement),
    agreementShared: agreement.shared,
    calibrationBanner,
    calibrationProgress,
    empty: stats.items === 0,
  };
}
