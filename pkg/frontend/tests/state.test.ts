import assert from "node:assert/strict";
import { test } from "node:test";

import type { SessionPayload } from "../src/api.js";
import { naturalOrder, progressLabel, toView } from "../src/state.js";

function basePayload(): SessionPayload {
  return {
    id: "se-0001",
    dataset_id: "ds-0001",
    status: "awaiting_answer",
    iteration: 0,
    pending_question: "a17",
    reference_ids: ["a3", "a12", "a16", "a20"],
    candidate_ids: ["a1", "a2"],
    q: 4,
    strategy: "ES",
    progress: { answered: 0, budget: 8, target_accuracy: null },
    history: [],
    question: {
      alternative_id: "a17",
      performances: { g1: 8.86, g2: 29.06, g3: 47.4 },
      categories: [1, 2, 3, 4],
    },
  };
}

test("question view carries exactly q answer controls", () => {
  const view = toView(basePayload());
  assert.equal(view.kind, "question");
  if (view.kind === "question") {
    assert.equal(view.categories.length, 4);
    assert.deepEqual(view.categories, [1, 2, 3, 4]);
    assert.equal(view.alternativeId, "a17");
    assert.equal(view.performances.length, 3);
  }
});

test("selecting view while the server is choosing", () => {
  const payload = basePayload();
  payload.status = "selecting";
  delete payload.question;
  payload.pending_question = null;
  const view = toView(payload);
  assert.equal(view.kind, "selecting");
});

test("every displayed number round-trips from the payload", () => {
  const payload = basePayload();
  const view = toView(payload);
  if (view.kind !== "question") throw new Error("expected question view");
  for (const [name, value] of view.performances) {
    assert.equal(value, payload.question!.performances[name]);
  }
});

test("final view sorts the assignment table naturally", () => {
  const payload = basePayload();
  payload.status = "finished";
  delete payload.question;
  payload.final = {
    assignments: { a10: 3, a2: 4, a1: 2 },
    model: { criteria: [], thresholds: [], epsilon: 0 },
    normalized: { utilities: [], thresholds: [], epsilon: 0 },
    objective: 0.0239,
    inconsistency: 0,
    early: false,
    accuracy_all: 0.75,
    accuracy_nonref: null,
  };
  const view = toView(payload);
  assert.equal(view.kind, "final");
  if (view.kind === "final") {
    assert.deepEqual(view.assignments.map((e) => e[0]), ["a1", "a2", "a10"]);
    assert.equal(view.accuracyAll, 0.75);
  }
});

test("progress label shows t/T under a budget", () => {
  assert.equal(
    progressLabel({ answered: 0, budget: 8, target_accuracy: null }),
    "question 1 of 8",
  );
  assert.equal(
    progressLabel({ answered: 8, budget: 8, target_accuracy: null }),
    "question 8 of 8",
  );
  assert.match(
    progressLabel({ answered: 3, budget: null, target_accuracy: 0.9 }),
    /target accuracy 0.90/,
  );
});

test("natural ordering", () => {
  assert.ok(naturalOrder("a2", "a10") < 0);
  assert.ok(naturalOrder("a10", "a2") > 0);
  assert.equal(naturalOrder("a5", "a5"), 0);
});
