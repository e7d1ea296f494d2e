import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { ChunkFormatError, readChunks } from "../src/chunk.js";
import { fixtureViews, sceneFixture } from "./helpers.js";

describe("chunk container reader", () => {
  it("reads the channels of a staged view", () => {
    const fix = sceneFixture();
    const ref = fix.views[0] as { path: string };
    const chunks = readChunks(ref.path);
    expect([...chunks.keys()]).toEqual(["rgb", "depth", "world_xyz", "occupancy"]);
    const world = chunks.get("world_xyz")!;
    expect(world.dims).toEqual([32, 32, 3]);
    expect(world.data).toBeInstanceOf(Float64Array); // geometry channels keep full precision
    const occ = chunks.get("occupancy")!;
    expect(occ.data).toBeInstanceOf(Uint8Array);
    expect([...occ.data].some((x) => x === 1)).toBe(true);
  });

  it("loads views with poses", () => {
    const views = fixtureViews();
    expect([...views.keys()].sort()).toEqual(["front", "left", "top"]);
    const front = views.get("front")!;
    expect(front.resolution).toBe(32);
    expect(front.pose.view_dir).toEqual([0, 1, 0]);
  });

  it("rejects non-chunk files", () => {
    const dir = mkdtempSync(join(tmpdir(), "chunk-"));
    const bad = join(dir, "bad.c2f");
    writeFileSync(bad, "BAAD" + "\0".repeat(16), "latin1");
    expect(() => readChunks(bad)).toThrow(ChunkFormatError);
  });
});
