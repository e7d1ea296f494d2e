/**
 * Pixel <-> world mapping with exact parity to the Python geometry layer.
 *
 * pixelToWorld reads the view's stored per-pixel 3D channel (so the answer
 * is a physically observed point); worldToPixel re-derives the orthographic
 * projection from the pose JSON using the same double arithmetic as the
 * Python implementation, which is what keeps adapter responses consistent
 * under the primary package's validator.
 */

import { LoadedView } from "./chunk.js";
import { PoseJson } from "./schema.js";

export type Vec3 = [number, number, number];

function dot(a: Vec3, b: readonly number[]): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

function axisRange(pose: PoseJson, axis: readonly number[]): [number, number] {
  const { lo, hi } = pose.bounds;
  let min = Infinity;
  let max = -Infinity;
  for (const x of [lo[0], hi[0]]) {
    for (const y of [lo[1], hi[1]]) {
      for (const z of [lo[2], hi[2]]) {
        const d = dot([x, y, z], axis);
        if (d < min) min = d;
        if (d > max) max = d;
      }
    }
  }
  return [min, max];
}

/** Integer pixel of a world point, clipped to the image (floor convention). */
export function worldToPixel(pose: PoseJson, point: Vec3): [number, number] {
  const R = pose.resolution;
  const clip = (v: number) => Math.min(Math.max(v, 0), R - 1);
  const [uLo, uHi] = axisRange(pose, pose.u_axis);
  const [vLo, vHi] = axisRange(pose, pose.v_axis);
  const su = (dot(point, pose.u_axis) - uLo) / (uHi - uLo);
  const sv = (dot(point, pose.v_axis) - vLo) / (vHi - vLo);
  return [clip(Math.floor(su * R)), clip(Math.floor(sv * R))];
}

/** Stored world coordinates at an occupied pixel, or null if unoccupied. */
export function pixelToWorld(view: LoadedView, u: number, v: number): Vec3 | null {
  const R = view.resolution;
  if (!Number.isInteger(u) || !Number.isInteger(v) || u < 0 || u >= R || v < 0 || v >= R) {
    throw new RangeError(`pixel (${u}, ${v}) outside ${R}x${R} view`);
  }
  if (!view.occupancy[v * R + u]) {
    return null;
  }
  const base = (v * R + u) * 3;
  return [view.worldXyz[base], view.worldXyz[base + 1], view.worldXyz[base + 2]];
}

/**
 * Fuse per-view pixel predictions into one world point: the mean of the
 * occupied pixel lookups (at most three). Views whose pixel lands on an
 * unoccupied cell contribute nothing; if none are occupied there is no
 * grounding at all, which callers treat as a parse-level failure.
 */
export function fuseKeypoint(
  views: Map<string, LoadedView>,
  pixels: Record<string, [number, number]>,
): Vec3 | null {
  const hits: Vec3[] = [];
  for (const [viewId, [u, v]] of Object.entries(pixels)) {
    const view = views.get(viewId);
    if (!view) continue;
    const world = pixelToWorld(view, u, v);
    if (world) hits.push(world);
  }
  if (hits.length === 0) return null;
  const sum: Vec3 = [0, 0, 0];
  for (const h of hits) {
    sum[0] += h[0];
    sum[1] += h[1];
    sum[2] += h[2];
  }
  return [sum[0] / hits.length, sum[1] / hits.length, sum[2] / hits.length];
}
