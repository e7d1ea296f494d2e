/**
 * Chat-endpoint client for the two-round protocol.
 *
 * Stateless: every call carries its whole context. Queries are idempotent,
 * so transport failures retry with jittered exponential backoff up to a
 * budget; a bounded semaphore caps in-flight requests. Endpoint location
 * and auth come from C2F_VLM_URL / C2F_VLM_API_KEY / C2F_VLM_MODEL unless
 * passed explicitly.
 */

import { LoadedView, loadView, sha256File } from "./chunk.js";
import {
  CompletionParseError,
  parseRound1Completion,
  parseRound2Completion,
  renderRound1Prompt,
  renderRound2Prompt,
} from "./grammar.js";
import { fuseKeypoint, worldToPixel, Vec3 } from "./pixelworld.js";
import {
  Round1QueryWire,
  Round2QueryWire,
  WIRE_SCHEMA_VERSION,
  WireResponse,
  round1QueryWireSchema,
  round2QueryWireSchema,
} from "./schema.js";

export class TransportError extends Error {}

export type FetchLike = (url: string, init: {
  method: string;
  headers: Record<string, string>;
  body: string;
  signal?: AbortSignal;
}) => Promise<{ ok: boolean; status: number; text(): Promise<string> }>;

export type EndpointConfig = {
  url: string;
  apiKey?: string;
  model?: string;
  timeoutMs?: number;
  maxAttempts?: number;
  maxInFlight?: number;
  fetchImpl?: FetchLike;
  /** deterministic backoff jitter for tests */
  random?: () => number;
};

export function endpointFromEnv(overrides: Partial<EndpointConfig> = {}): EndpointConfig {
  const url = overrides.url ?? process.env.C2F_VLM_URL;
  if (!url) {
    throw new TransportError("no endpoint configured (set C2F_VLM_URL)");
  }
  return {
    url,
    apiKey: overrides.apiKey ?? process.env.C2F_VLM_API_KEY,
    model: overrides.model ?? process.env.C2F_VLM_MODEL ?? "planner",
    ...overrides,
  };
}

class Semaphore {
  private queue: (() => void)[] = [];
  private active = 0;

  constructor(private readonly limit: number) {}

  async acquire(): Promise<() => void> {
    if (this.active < this.limit) {
      this.active += 1;
      return () => this.release();
    }
    await new Promise<void>((resolve) => this.queue.push(resolve));
    this.active += 1;
    return () => this.release();
  }

  private release() {
    this.active -= 1;
    const next = this.queue.shift();
    if (next) next();
  }
}

const semaphores = new WeakMap<object, Semaphore>();

async function complete(endpoint: EndpointConfig, prompt: string): Promise<string> {
  const fetchImpl: FetchLike = endpoint.fetchImpl ?? (fetch as unknown as FetchLike);
  const attempts = endpoint.maxAttempts ?? 3;
  const rand = endpoint.random ?? Math.random;
  let sem = semaphores.get(endpoint);
  if (!sem) {
    sem = new Semaphore(endpoint.maxInFlight ?? 4);
    semaphores.set(endpoint, sem);
  }
  const release = await sem.acquire();
  try {
    let lastError: unknown;
    for (let attempt = 0; attempt < attempts; attempt++) {
      if (attempt > 0) {
        const backoff = 100 * 2 ** (attempt - 1) * (0.5 + rand());
        await new Promise((r) => setTimeout(r, backoff));
      }
      const controller = new AbortController();
      const timer = setTimeout(() => controller.abort(), endpoint.timeoutMs ?? 30_000);
      try {
        const headers: Record<string, string> = { "content-type": "application/json" };
        if (endpoint.apiKey) headers["authorization"] = `Bearer ${endpoint.apiKey}`;
        const res = await fetchImpl(`${endpoint.url}/v1/chat/completions`, {
          method: "POST",
          headers,
          body: JSON.stringify({
            model: endpoint.model ?? "planner",
            messages: [{ role: "user", content: prompt }],
          }),
          signal: controller.signal,
        });
        if (!res.ok) {
          if (res.status >= 500 || res.status === 429) {
            lastError = new TransportError(`endpoint returned ${res.status}`);
            continue; // retryable
          }
          throw new TransportError(`endpoint returned ${res.status}`);
        }
        const body = JSON.parse(await res.text());
        const content = body?.choices?.[0]?.message?.content;
        if (typeof content !== "string") {
          throw new CompletionParseError("completion payload has no message content",
            JSON.stringify(body));
        }
        return content;
      } catch (err) {
        // parse failures and non-retryable statuses are final; timeouts and
        // network-level failures go back through the backoff loop
        if (err instanceof CompletionParseError || err instanceof TransportError) {
          throw err;
        }
        lastError = err;
      } finally {
        clearTimeout(timer);
      }
    }
    throw new TransportError(`retry budget exhausted after ${attempts} attempts: ${lastError}`);
  } finally {
    release();
  }
}

export async function callRound1(
  endpoint: EndpointConfig,
  query: Round1QueryWire,
): Promise<string[]> {
  round1QueryWireSchema.parse(query);
  const prompt = renderRound1Prompt(query.task, query.prev_step);
  return parseRound1Completion(await complete(endpoint, prompt));
}

export type Round2Result = {
  response: WireResponse;
  views: Map<string, LoadedView>;
};

export async function callRound2(
  endpoint: EndpointConfig,
  query: Round2QueryWire,
): Promise<Round2Result> {
  round2QueryWireSchema.parse(query);
  const views = new Map<string, LoadedView>();
  const images: Record<string, string> = {};
  for (const ref of query.views) {
    if ("path" in ref) {
      if (sha256File(ref.path) !== ref.sha256) {
        throw new CompletionParseError(`view ${ref.path} fails its content hash`, ref.path);
      }
      views.set(ref.view_id, loadView(ref.path));
      images[ref.view_id] = `file:${ref.path}`;
    } else {
      images[ref.view_id] = `data:image/png;base64,${ref.png_base64}`;
    }
  }
  if (views.size !== 3) {
    // pixel->world grounding needs the full 3D channels
    throw new CompletionParseError(
      "round-2 queries must reference all three views as chunk files", JSON.stringify(query.views),
    );
  }

  const prompt = renderRound2Prompt({
    images,
    subtaskPlan: query.subtask_plan,
    prevStep: query.prev_step,
  });
  const raw = await complete(endpoint, prompt);
  const parsed = parseRound2Completion(raw);
  return { response: groundResponse(parsed, views, raw), views };
}

/**
 * Turn parsed pixels into a wire response: world positions come from the
 * views' stored 3D channel, the fused keypoint is the mean of the occupied
 * lookups, and every emitted pixel is re-derived from the fused world point
 * so the response satisfies the pixel/world consistency invariant.
 */
export function groundResponse(
  parsed: ReturnType<typeof parseRound2Completion>,
  views: Map<string, LoadedView>,
  raw: string,
): WireResponse {
  const kpWorld = fuseKeypoint(views, parsed.keypointPixels);
  if (!kpWorld) {
    throw new CompletionParseError(
      "keypoint pixels hit no occupied cell in any view", raw,
    );
  }
  const consistentPixels = (world: Vec3) => {
    const out: Record<string, [number, number]> = {};
    for (const [viewId, view] of views) {
      out[viewId] = worldToPixel(view.pose, world);
    }
    return out;
  };
  const objects = [];
  for (const obj of parsed.objects) {
    const world = fuseKeypoint(views, obj.pixels);
    if (!world) {
      throw new CompletionParseError(
        `object ${JSON.stringify(obj.name)} pixels hit no occupied cell`, raw,
      );
    }
    objects.push({ name: obj.name, world, pixels: consistentPixels(world) });
  }
  return {
    schema_version: WIRE_SCHEMA_VERSION,
    object_positions: objects,
    step: parsed.step,
    keypoint: { world: kpWorld, pixels: consistentPixels(kpWorld) },
  };
}
