/** Answer-submission guard: one in-flight mutation per session tab.
 *
 * A double-click (or an out-of-order tab) must never produce two accepted
 * answers: the second call is swallowed while the first is in flight, and
 * a state_conflict response triggers a re-sync instead of an error. */

import type { ApiResult, SessionPayload } from "./api.js";

export type SubmitOutcome =
  | { kind: "accepted"; payload: SessionPayload }
  | { kind: "ignored" }            // another submission already in flight
  | { kind: "resync"; payload: SessionPayload }  // conflict; fresh state
  | { kind: "failed"; message: string };

export class AnswerGate {
  private inflight = false;

  get busy(): boolean {
    return this.inflight;
  }

  async submit(
    send: () => Promise<ApiResult<SessionPayload>>,
    refresh: () => Promise<ApiResult<SessionPayload>>,
  ): Promise<SubmitOutcome> {
    if (this.inflight) {
      return { kind: "ignored" };
    }
    this.inflight = true;
    try {
      const result = await send();
      if (result.ok) {
        return { kind: "accepted", payload: result.value };
      }
      if (result.error.code === "state_conflict") {
        const fresh = await refresh();
        if (fresh.ok) {
          return { kind: "resync", payload: fresh.value };
        }
        return { kind: "failed", message: fresh.error.message };
      }
      return { kind: "failed", message: result.error.message };
    } finally {
      this.inflight = false;
    }
  }
}
