/** Pure view-model layer: server payloads in, render-ready views out.
 * Every displayed number must round-trip from a payload — nothing here
 * invents state. */

import type { FinalPayload, Progress, SessionPayload } from "./api.js";

export interface QuestionView {
  kind: "question";
  alternativeId: string;
  /** criterion name/value pairs in server order */
  performances: [string, number][];
  /** one answer control per category, exactly q of them */
  categories: number[];
  progressLabel: string;
  iteration: number;
}

export interface SelectingView {
  kind: "selecting";
  progressLabel: string;
  iteration: number;
}

export interface FinalView {
  kind: "final";
  assignments: [string, number][];
  accuracyAll: number | null;
  early: boolean;
  objective: number;
  inconsistency: number;
  progressLabel: string;
}

export type SessionView = QuestionView | SelectingView | FinalView;

export function progressLabel(progress: Progress): string {
  if (progress.budget !== null) {
    return `question ${Math.min(progress.answered + 1, progress.budget)} of ${progress.budget}`;
  }
  if (progress.target_accuracy !== null) {
    return `target accuracy ${progress.target_accuracy.toFixed(2)}, answered ${progress.answered}`;
  }
  return `answered ${progress.answered}`;
}

export function toView(payload: SessionPayload): SessionView {
  const label = progressLabel(payload.progress);
  if (payload.status === "finished" && payload.final) {
    return finalView(payload.final, payload.progress);
  }
  if (payload.status === "awaiting_answer" && payload.question) {
    return {
      kind: "question",
      alternativeId: payload.question.alternative_id,
      performances: Object.entries(payload.question.performances),
      categories: [...payload.question.categories],
      progressLabel: label,
      iteration: payload.iteration,
    };
  }
  return { kind: "selecting", progressLabel: label, iteration: payload.iteration };
}

export function finalView(final: FinalPayload, progress: Progress): FinalView {
  const assignments = Object.entries(final.assignments).sort(
    (a, b) => naturalOrder(a[0], b[0]),
  );
  return {
    kind: "final",
    assignments,
    accuracyAll: final.accuracy_all,
    early: final.early,
    objective: final.objective,
    inconsistency: final.inconsistency,
    progressLabel: `finished after ${progress.answered} answers`,
  };
}

/** a2 before a10: sort ids by their numeric suffix when both have one. */
export function naturalOrder(a: string, b: string): number {
  const na = a.match(/\d+$/);
  const nb = b.match(/\d+$/);
  if (na && nb && a.slice(0, -na[0].length) === b.slice(0, -nb[0].length)) {
    return Number(na[0]) - Number(nb[0]);
  }
  return a < b ? -1 : a > b ? 1 : 0;
}
