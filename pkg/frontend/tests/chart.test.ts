import assert from "node:assert/strict";
import { test } from "node:test";

import type { ModelPayload } from "../src/api.js";
import {
  thresholdMarkers,
  toSvgPath,
  utilityPolylines,
} from "../src/chart.js";

function modelPayload(): ModelPayload {
  return {
    criteria: [
      {
        name: "g1",
        breakpoints: [0.04, 8.795, 17.55, 26.305, 35.06],
        utilities: [0, 0.8376, 0.3518, 0.8998, 1],
      },
      {
        name: "g2",
        breakpoints: [0.97, 7.9925, 15.015, 22.0375, 29.06],
        utilities: [0.8848, 0, 1, 1, 1],
      },
      {
        name: "g3",
        breakpoints: [23.9, 42.905, 61.91, 80.915, 99.92],
        utilities: [0.5428, 1, 0.9511, 0, 1],
      },
    ],
    thresholds: [0, 1.5715, 1.9367, 2.1765, 3.2398],
    epsilon: 0.2397,
    normalized: {
      utilities: [
        [0, 0.2792, 0.117266, 0.299933, 0.333333],
        [0.294933, 0, 0.333333, 0.333333, 0.333333],
        [0.180933, 0.333333, 0.317033, 0, 0.333333],
      ],
      thresholds: [0, 0.5238, 0.6456, 0.7255, 1.0799],
      epsilon: 0.0799,
    },
    iteration: 8,
    assignments: { a1: 2 },
    scores: {},
  };
}

test("three polylines of five vertices each", () => {
  const polylines = utilityPolylines(modelPayload());
  assert.equal(polylines.length, 3);
  for (const polyline of polylines) {
    assert.equal(polyline.vertices.length, 5);
  }
});

test("vertex values equal the payload within 1e-6 before pixel mapping", () => {
  const payload = modelPayload();
  const polylines = utilityPolylines(payload);
  polylines.forEach((polyline, j) => {
    polyline.vertices.forEach((vertex, l) => {
      const expectedY = payload.normalized.utilities[j]![l]!;
      const expectedX = payload.criteria[j]!.breakpoints[l]!;
      assert.ok(Math.abs(vertex.y - expectedY) < 1e-6);
      assert.ok(Math.abs(vertex.x - expectedX) < 1e-6);
    });
  });
});

test("interior threshold markers, strictly increasing", () => {
  const markers = thresholdMarkers(modelPayload());
  assert.equal(markers.length, 3); // q-1 interior cutoffs between b0 and bq
  assert.deepEqual(
    markers.map((m) => m.value),
    [0.5238, 0.6456, 0.7255],
  );
  for (let i = 1; i < markers.length; i += 1) {
    assert.ok(markers[i]!.value > markers[i - 1]!.value);
  }
});

test("non-increasing thresholds are rejected", () => {
  const payload = modelPayload();
  payload.normalized.thresholds = [0, 0.6, 0.6, 0.7, 1.1];
  assert.throws(() => thresholdMarkers(payload), /strictly/);
});

test("mismatched utility vector is rejected", () => {
  const payload = modelPayload();
  payload.normalized.utilities[0] = [0, 1];
  assert.throws(() => utilityPolylines(payload), /normalized/);
});

test("svg path visits one point per vertex and stays in the box", () => {
  const payload = modelPayload();
  const [polyline] = utilityPolylines(payload);
  const box = { width: 360, height: 220, pad: 28 };
  const path = toSvgPath(polyline!, box, 0.35);
  const points = path.split(" ");
  assert.equal(points.length, 5);
  assert.match(points[0]!, /^M/);
  for (const point of points) {
    const [x, y] = point.slice(1).split(",").map(Number);
    assert.ok(x! >= 0 && x! <= box.width);
    assert.ok(y! >= 0 && y! <= box.height);
  }
});

test("flat criterion renders a horizontal polyline", () => {
  const payload = modelPayload();
  payload.criteria = [
    { name: "flat", breakpoints: [0, 50, 100], utilities: [0.2, 0.2, 0.2] },
  ];
  payload.normalized.utilities = [[0, 0, 0]];
  const [polyline] = utilityPolylines(payload);
  const ys = new Set(polyline!.vertices.map((v) => v.y));
  assert.equal(ys.size, 1);
});
