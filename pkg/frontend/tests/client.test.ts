import { describe, expect, it } from "vitest";

import { callRound1, callRound2, TransportError } from "../src/client.js";
import { CompletionParseError } from "../src/grammar.js";
import { pixelToWorld } from "../src/pixelworld.js";
import { cannedCompletion, fixtureViews, mockFetch, round2Query, sceneFixture } from "./helpers.js";

const ENDPOINT = { url: "http://mock", timeoutMs: 1000, random: () => 0.0 };

describe("round 1", () => {
  it("parses a plan from the endpoint", async () => {
    const { impl, calls } = mockFetch(["[PLAN]\n- step a\n- step b"]);
    const plan = await callRound1(
      { ...ENDPOINT, fetchImpl: impl },
      { schema_version: 1, round: 1, task: "stack the cups", prev_step: "x" },
    );
    expect(plan).toEqual(["step a", "step b"]);
    expect(calls[0].url).toBe("http://mock/v1/chat/completions");
    const body = calls[0].body as { messages: { content: string }[] };
    expect(body.messages[0].content).toContain("stack the cups");
  });

  it("rejects malformed queries before any network call", async () => {
    const { impl, calls } = mockFetch(["[PLAN]"]);
    await expect(
      callRound1({ ...ENDPOINT, fetchImpl: impl }, { round: 1 } as never),
    ).rejects.toThrow();
    expect(calls).toHaveLength(0);
  });
});

describe("round 2", () => {
  it("parses a canned completion into a grounded, consistent response", async () => {
    const fix = sceneFixture();
    const { impl } = mockFetch([cannedCompletion(fix)]);
    const { response } = await callRound2({ ...ENDPOINT, fetchImpl: impl }, round2Query(fix));

    expect(response.step).toBe("The robot arm grasps the red block");
    expect(response.object_positions).toHaveLength(1);
    expect(response.object_positions[0].name).toBe("red block");

    // world keypoint equals the mean of the occupied pixel lookups
    const views = fixtureViews();
    const hits = Object.entries(fix.target_pixels)
      .map(([vid, [u, v]]) => pixelToWorld(views.get(vid)!, u, v))
      .filter((w): w is [number, number, number] => w !== null);
    for (let k = 0; k < 3; k++) {
      const mean = hits.reduce((a, h) => a + h[k], 0) / hits.length;
      expect(response.keypoint.world[k]).toBeCloseTo(mean, 12);
    }
    // and the emitted pixels re-project from that world point
    for (const [vid, view] of views) {
      const expected = [
        response.keypoint.pixels[vid][0],
        response.keypoint.pixels[vid][1],
      ];
      const { worldToPixel } = await import("../src/pixelworld.js");
      expect(worldToPixel(view.pose, response.keypoint.world as never)).toEqual(expected);
    }
  });

  it("raises a parse error with the raw text on out-of-order output", async () => {
    const fix = sceneFixture();
    const bad = cannedCompletion(fix)
      .split("\n")
      .reverse()
      .join("\n");
    const { impl } = mockFetch([bad]);
    await expect(
      callRound2({ ...ENDPOINT, fetchImpl: impl }, round2Query(fix)),
    ).rejects.toThrow(CompletionParseError);
  });

  it("retries retryable failures with backoff, then succeeds", async () => {
    const fix = sceneFixture();
    const { impl, calls } = mockFetch([503, 429, cannedCompletion(fix)]);
    const { response } = await callRound2(
      { ...ENDPOINT, fetchImpl: impl, maxAttempts: 3 },
      round2Query(fix),
    );
    expect(response.step).toContain("grasps");
    expect(calls).toHaveLength(3);
  });

  it("exhausts the retry budget into a transport error", async () => {
    const fix = sceneFixture();
    const { impl, calls } = mockFetch([500]);
    await expect(
      callRound2({ ...ENDPOINT, fetchImpl: impl, maxAttempts: 2 }, round2Query(fix)),
    ).rejects.toThrow(TransportError);
    expect(calls).toHaveLength(2);
  });

  it("does not retry non-retryable statuses", async () => {
    const fix = sceneFixture();
    const { impl, calls } = mockFetch([404]);
    await expect(
      callRound2({ ...ENDPOINT, fetchImpl: impl, maxAttempts: 3 }, round2Query(fix)),
    ).rejects.toThrow(/404/);
    expect(calls).toHaveLength(1);
  });

  it("fails the content hash on tampered view files", async () => {
    const fix = sceneFixture();
    const tampered = {
      ...round2Query(fix),
      views: fix.views.map((v) =>
        "path" in v ? { ...v, sha256: "0".repeat(64) } : v,
      ),
    };
    const { impl } = mockFetch([cannedCompletion(fix)]);
    await expect(
      callRound2({ ...ENDPOINT, fetchImpl: impl }, tampered),
    ).rejects.toThrow(/hash/);
  });
});
