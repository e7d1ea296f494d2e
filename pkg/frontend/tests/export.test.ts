import { cpSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";

import { describe, expect, it } from "vitest";

import { exportFinetune, ExportDataError, FinetuneRecord } from "../src/export.js";
import {
  parseObjectsCompletion,
  parseRound1Completion,
  parseRound2Completion,
} from "../src/grammar.js";
import { manifestSchema } from "../src/schema.js";
import { FIXTURES, MANIFEST } from "./helpers.js";

const SENTINEL = "the robot is currently at the initial state";

function exportRecords(): FinetuneRecord[] {
  const out = join(mkdtempSync(join(tmpdir(), "ft-")), "finetune.jsonl");
  return exportFinetune(MANIFEST, out);
}

describe("fine-tune export", () => {
  it("emits one record per sample, plan entry, and object record", () => {
    const manifest = manifestSchema.parse(JSON.parse(readFileSync(MANIFEST, "utf8")));
    const records = exportRecords();
    const byKind = { trajectory: 0, plan: 0, object_positions: 0 };
    for (const r of records) byKind[r.kind] += 1;
    expect(byKind.trajectory).toBe(manifest.total_samples);
    expect(byKind.plan).toBe(manifest.plans.length);
    expect(byKind.object_positions).toBe(manifest.object_records.length);
    expect(records.length).toBeGreaterThanOrEqual(100);
    for (const r of records) {
      expect(r.hyperparameters).toEqual({ lora_rank: 8, lora_alpha: 32, learning_rate: 3e-4 });
    }
  });

  it("achieves 100% export/parse closure", () => {
    const records = exportRecords();
    expect(records.length).toBeGreaterThanOrEqual(100);
    for (const record of records) {
      const assistants = record.messages.filter((m) => m.role === "assistant");
      expect(assistants.length).toBeGreaterThan(0);
      if (record.kind === "trajectory") {
        expect(record.messages).toHaveLength(4);
        expect(() => parseRound1Completion(assistants[0].content)).not.toThrow();
        const parsed = parseRound2Completion(assistants[1].content);
        expect(parsed.step.length).toBeGreaterThan(0);
      } else if (record.kind === "plan") {
        const steps = parseRound1Completion(assistants[0].content);
        expect(steps.length).toBeGreaterThan(0);
      } else {
        expect(() => parseObjectsCompletion(assistants[0].content)).not.toThrow();
      }
    }
  });

  it("carries the sentinel exactly once per trajectory", () => {
    const records = exportRecords().filter((r) => r.kind === "trajectory");
    const byTrajectory = new Map<string, number>();
    for (const r of records) {
      const traj = r.meta.trajectory as string;
      if (r.meta.prev_step === SENTINEL) {
        byTrajectory.set(traj, (byTrajectory.get(traj) ?? 0) + 1);
      } else {
        byTrajectory.set(traj, byTrajectory.get(traj) ?? 0);
      }
    }
    expect(byTrajectory.size).toBeGreaterThan(0);
    for (const [traj, count] of byTrajectory) {
      expect(count, traj).toBe(1);
    }
  });

  it("is byte-deterministic", () => {
    const dir = mkdtempSync(join(tmpdir(), "ft-det-"));
    exportFinetune(MANIFEST, join(dir, "a.jsonl"));
    exportFinetune(MANIFEST, join(dir, "b.jsonl"));
    expect(readFileSync(join(dir, "a.jsonl"))).toEqual(readFileSync(join(dir, "b.jsonl")));
  });

  it("reports missing view files with their paths", () => {
    // copy the dataset, delete one object view, expect a listed path
    const tmp = mkdtempSync(join(tmpdir(), "ft-missing-"));
    const datasetCopy = join(tmp, "dataset");
    cpSync(join(FIXTURES, "dataset"), datasetCopy, { recursive: true });
    const manifest = manifestSchema.parse(JSON.parse(readFileSync(MANIFEST, "utf8")));
    const victim = join(datasetCopy, Object.values(manifest.object_records[0].views)[0]);
    rmSync(victim);
    try {
      exportFinetune(join(datasetCopy, "manifest.json"), join(tmp, "out.jsonl"));
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ExportDataError);
      expect((err as ExportDataError).paths.some((p) => p === victim)).toBe(true);
      expect((err as ExportDataError).message).toContain(dirname(victim));
    }
  });

  it("writes parseable JSONL", () => {
    const out = join(mkdtempSync(join(tmpdir(), "ft-lines-")), "finetune.jsonl");
    const records = exportFinetune(MANIFEST, out);
    const lines = readFileSync(out, "utf8").trim().split("\n");
    expect(lines).toHaveLength(records.length);
    const first = JSON.parse(lines[0]);
    expect(first.messages[0].role).toBe("user");
  });
});
