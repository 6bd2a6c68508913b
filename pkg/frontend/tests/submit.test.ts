import assert from "node:assert/strict";
import { test } from "node:test";

import type { ApiResult, SessionPayload } from "../src/api.js";
import { AnswerGate } from "../src/submit.js";

function payload(iteration: number): SessionPayload {
  return {
    id: "se-0001",
    dataset_id: "ds-0001",
    status: "selecting",
    iteration,
    pending_question: null,
    reference_ids: [],
    candidate_ids: [],
    q: 4,
    strategy: "ES",
    progress: { answered: iteration, budget: 8, target_accuracy: null },
    history: [],
  };
}

function ok(iteration: number): ApiResult<SessionPayload> {
  return { ok: true, value: payload(iteration) };
}

test("double-click produces exactly one accepted answer", async () => {
  const gate = new AnswerGate();
  let posts = 0;
  const send = async (): Promise<ApiResult<SessionPayload>> => {
    posts += 1;
    await new Promise((r) => setTimeout(r, 20));
    return ok(1);
  };
  const refresh = async () => ok(1);
  const [first, second] = await Promise.all([
    gate.submit(send, refresh),
    gate.submit(send, refresh),
  ]);
  const kinds = [first.kind, second.kind].sort();
  assert.deepEqual(kinds, ["accepted", "ignored"]);
  assert.equal(posts, 1);
});

test("state conflict re-syncs instead of failing", async () => {
  const gate = new AnswerGate();
  let refreshed = 0;
  const send = async (): Promise<ApiResult<SessionPayload>> => ({
    ok: false,
    error: { code: "state_conflict", message: "already answered" },
    status: 409,
  });
  const refresh = async () => {
    refreshed += 1;
    return ok(2);
  };
  const outcome = await gate.submit(send, refresh);
  assert.equal(outcome.kind, "resync");
  assert.equal(refreshed, 1);
  if (outcome.kind === "resync") {
    assert.equal(outcome.payload.iteration, 2);
  }
});

test("other errors surface as failures", async () => {
  const gate = new AnswerGate();
  const send = async (): Promise<ApiResult<SessionPayload>> => ({
    ok: false,
    error: { code: "invalid_input", message: "category 7 outside 1..4" },
    status: 400,
  });
  const outcome = await gate.submit(send, async () => ok(0));
  assert.equal(outcome.kind, "failed");
});

test("gate frees after completion", async () => {
  const gate = new AnswerGate();
  const send = async () => ok(1);
  const refresh = async () => ok(1);
  const first = await gate.submit(send, refresh);
  const second = await gate.submit(send, refresh);
  assert.equal(first.kind, "accepted");
  assert.equal(second.kind, "accepted");
  assert.equal(gate.busy, false);
});
