/** Marginal-utility chart geometry.
 *
 * Vertex values are copied verbatim from the model payload (the checked
 * contract: they differ from it by less than 1e-6 before pixel mapping);
 * only the final SVG path maps them to pixels. */

import type { ModelPayload } from "./api.js";

export interface Vertex {
  x: number; // performance level (breakpoint)
  y: number; // normalized marginal utility
}

export interface Polyline {
  name: string;
  vertices: Vertex[];
}

export interface ThresholdMarker {
  value: number; // normalized comprehensive-utility cutoff
  label: string;
}

export function utilityPolylines(model: ModelPayload): Polyline[] {
  return model.criteria.map((criterion, j) => {
    const normalized = model.normalized.utilities[j];
    if (!normalized || normalized.length !== criterion.breakpoints.length) {
      throw new Error(
        `criterion ${criterion.name}: ${criterion.breakpoints.length} ` +
        `breakpoints but ${normalized?.length ?? 0} normalized utilities`,
      );
    }
    return {
      name: criterion.name,
      vertices: criterion.breakpoints.map((x, l) => ({
        x,
        y: normalized[l] as number,
      })),
    };
  });
}

/** Interior cutoffs only; the endpoints are display values. */
export function thresholdMarkers(model: ModelPayload): ThresholdMarker[] {
  const thresholds = model.normalized.thresholds;
  const markers: ThresholdMarker[] = [];
  for (let h = 1; h < thresholds.length - 1; h += 1) {
    markers.push({ value: thresholds[h] as number, label: `b${h}` });
  }
  for (let i = 1; i < markers.length; i += 1) {
    const prev = markers[i - 1] as ThresholdMarker;
    const here = markers[i] as ThresholdMarker;
    if (here.value <= prev.value) {
      throw new Error("thresholds must increase strictly on screen");
    }
  }
  return markers;
}

export interface PixelBox {
  width: number;
  height: number;
  pad: number;
}

/** Map a polyline into an SVG path; y is flipped (SVG grows downward). */
export function toSvgPath(
  polyline: Polyline,
  box: PixelBox,
  yMax: number,
): string {
  const xs = polyline.vertices.map((v) => v.x);
  const xMin = Math.min(...xs);
  const xSpan = Math.max(...xs) - xMin || 1;
  const innerW = box.width - 2 * box.pad;
  const innerH = box.height - 2 * box.pad;
  return polyline.vertices
    .map((v, i) => {
      const px = box.pad + ((v.x - xMin) / xSpan) * innerW;
      const py = box.height - box.pad - (v.y / (yMax || 1)) * innerH;
      return `${i === 0 ? "M" : "L"}${px.toFixed(2)},${py.toFixed(2)}`;
    })
    .join(" ");
}

/** Vertical pixel position of a threshold marker on a 0..yMax scale. */
export function thresholdPixelY(
  value: number,
  box: PixelBox,
  yMax: number,
): number {
  const innerH = box.height - 2 * box.pad;
  return box.height - box.pad - (value / (yMax || 1)) * innerH;
}
