/**
 * Fine-tuning data export: dataset manifest -> JSONL conversations.
 *
 * One record per training sample (the full two-round conversation), one per
 * plan-corpus entry (round 1 only), and one per object-position record (the
 * auxiliary spatial-grounding task). Every assistant turn is produced by the
 * same formatter the parser understands, so export/parse closure holds by
 * construction and is asserted by the test suite. Output order follows the
 * manifest, making exports byte-reproducible.
 */

import { existsSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

import {
  formatRound1Completion,
  formatRound2Completion,
  renderRound1Prompt,
  renderRound2Prompt,
} from "./grammar.js";
import { worldToPixel, Vec3 } from "./pixelworld.js";
import {
  Manifest,
  PLANNER_FINETUNE_HYPERPARAMETERS,
  SampleSidecar,
  manifestSchema,
  sampleSidecarSchema,
} from "./schema.js";

export class ExportDataError extends Error {
  constructor(message: string, public readonly paths: string[] = []) {
    super(message);
  }
}

export type Message = { role: "user" | "assistant"; content: string };

export type FinetuneRecord = {
  kind: "trajectory" | "plan" | "object_positions";
  messages: Message[];
  meta: Record<string, unknown>;
  hyperparameters: typeof PLANNER_FINETUNE_HYPERPARAMETERS;
};

const SENTINEL = "the robot is currently at the initial state";

function pixelsFor(sidecar: SampleSidecar, world: Vec3): Record<string, [number, number]> {
  const out: Record<string, [number, number]> = {};
  for (const pose of sidecar.poses) {
    out[pose.view_id] = worldToPixel(pose, world);
  }
  return out;
}

export function sampleToRecord(sidecar: SampleSidecar, samplePath: string,
                               trajectory = ""): FinetuneRecord {
  const subtask = sidecar.subtask_plan;
  const images: Record<string, string> = {};
  for (const pose of sidecar.poses) {
    images[pose.view_id] = `file:${samplePath}#${pose.view_id}`;
  }
  const round2Prompt = renderRound2Prompt({
    images,
    subtaskPlan: subtask,
    prevStep: sidecar.prev_step,
  });
  const completion = formatRound2Completion({
    objects: sidecar.object_positions.map((o) => ({
      name: o.name,
      pixels: Object.fromEntries(
        Object.entries(o.pixels).map(([k, v]) => [k, [v[0], v[1]] as [number, number]]),
      ),
    })),
    step: sidecar.step,
    keypointPixels: pixelsFor(sidecar, sidecar.action.position as Vec3),
  });
  return {
    kind: "trajectory",
    messages: [
      { role: "user", content: renderRound1Prompt(sidecar.task, sidecar.prev_step) },
      { role: "assistant", content: formatRound1Completion(subtask) },
      { role: "user", content: round2Prompt },
      { role: "assistant", content: completion },
    ],
    meta: {
      task: sidecar.task,
      trajectory,
      sample: samplePath,
      obs_index: sidecar.obs_index,
      target_keyframe: sidecar.target_keyframe,
      prev_step: sidecar.prev_step,
    },
    hyperparameters: PLANNER_FINETUNE_HYPERPARAMETERS,
  };
}

export function planToRecord(entry: Manifest["plans"][number]): FinetuneRecord {
  return {
    kind: "plan",
    messages: [
      { role: "user", content: renderRound1Prompt(entry.task, SENTINEL) },
      { role: "assistant", content: formatRound1Completion(entry.subtasks[0]) },
    ],
    meta: { task: entry.task, trajectory: entry.trajectory, subtasks: entry.subtasks.length },
    hyperparameters: PLANNER_FINETUNE_HYPERPARAMETERS,
  };
}

export function objectRecordToRecord(
  entry: Manifest["object_records"][number],
  root: string,
): FinetuneRecord {
  const images: Record<string, string> = {};
  const missing: string[] = [];
  for (const [viewId, rel] of Object.entries(entry.views)) {
    const path = join(root, rel);
    if (!existsSync(path) || !existsSync(path + ".json")) {
      missing.push(path);
    }
    images[viewId] = `file:${path}`;
  }
  if (missing.length) {
    throw new ExportDataError(
      `object record references missing view files: ${missing.join(", ")}`, missing,
    );
  }
  const prompt = renderRound2Prompt({
    images,
    subtaskPlan: ["list the positions of every object in the scene"],
    prevStep: SENTINEL,
  });
  const lines = ["[OBJECTS]"];
  for (const obj of entry.objects) {
    const pix = ["front", "left", "top"]
      .map((v) => `${v} ${obj.pixels[v][0]} ${obj.pixels[v][1]}`)
      .join(" | ");
    lines.push(`${obj.name} | ${pix}`);
  }
  return {
    kind: "object_positions",
    messages: [
      { role: "user", content: prompt },
      { role: "assistant", content: lines.join("\n") },
    ],
    meta: { objects: entry.objects.length },
    hyperparameters: PLANNER_FINETUNE_HYPERPARAMETERS,
  };
}

export function exportFinetune(manifestPath: string, outPath: string): FinetuneRecord[] {
  const manifest = manifestSchema.parse(
    JSON.parse(readFileSync(manifestPath, "utf8")),
  ) as Manifest;
  const root = dirname(manifestPath);
  const records: FinetuneRecord[] = [];
  const missing: string[] = [];

  for (const entry of manifest.samples) {
    const samplePath = join(root, entry.path);
    if (!existsSync(samplePath) || !existsSync(samplePath + ".json")) {
      missing.push(samplePath);
      continue;
    }
    const sidecar = sampleSidecarSchema.parse(
      JSON.parse(readFileSync(samplePath + ".json", "utf8")),
    );
    records.push(sampleToRecord(sidecar, samplePath, entry.trajectory));
  }
  if (missing.length) {
    throw new ExportDataError(
      `manifest references missing sample files: ${missing.join(", ")}`, missing,
    );
  }
  for (const plan of manifest.plans) {
    records.push(planToRecord(plan));
  }
  for (const entry of manifest.object_records) {
    records.push(objectRecordToRecord(entry, root));
  }

  const lines = records.map((r) => JSON.stringify(r));
  writeFileSync(outPath, lines.join("\n") + "\n");
  return records;
}
