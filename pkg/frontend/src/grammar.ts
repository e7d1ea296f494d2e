/**
 * Prompt templates and the strict output grammar.
 *
 * Round-2 completions must contain exactly these fenced sections, in this
 * order (object reasoning first, then the instruction, then the keypoint):
 *
 *     [OBJECTS]
 *     red block | front 12 34 | left 5 6 | top 7 8
 *     [STEP]
 *     The robot arm grasps the red block
 *     [KEYPOINT]
 *     front 12 34 | left 5 6 | top 7 8
 *
 * Round-1 completions list the current sub-task plan (empty = task done):
 *
 *     [PLAN]
 *     - The robot arm moves above the red block
 *     - The robot arm grasps the red block
 *
 * The grammar is deliberately rigid: one valid parse or an error carrying
 * the raw text, never silent drift.
 */

export class CompletionParseError extends Error {
  constructor(message: string, public readonly raw: string) {
    super(message);
  }
}

export type ParsedObjects = { name: string; pixels: Record<string, [number, number]> }[];

export type ParsedRound2 = {
  objects: ParsedObjects;
  step: string;
  keypointPixels: Record<string, [number, number]>;
};

export const ROUND1_TEMPLATE = `You are the task planner for a tabletop robot.
Task: {task}
Previous step: {prev_step}
Reply with the plan for the current sub-task in exactly this format, or an
empty [PLAN] section if the task is complete:
[PLAN]
- <step instruction>
- <step instruction>`;

export const ROUND2_TEMPLATE = `You see the scene in three orthogonal views.
Front view: {front_image}
Left view: {left_image}
Top view: {top_image}
Current sub-task plan:
{subtask_plan}
Previous step: {prev_step}
First list the task-related object positions, then the next step
instruction, then its keypoint pixels, in exactly this format:
[OBJECTS]
<name> | front <u> <v> | left <u> <v> | top <u> <v>
[STEP]
<step instruction>
[KEYPOINT]
front <u> <v> | left <u> <v> | top <u> <v>`;

function fillTemplate(template: string, slots: Record<string, string>): string {
  let out = template;
  for (const [key, value] of Object.entries(slots)) {
    const token = `{${key}}`;
    const first = out.indexOf(token);
    if (first < 0) {
      throw new Error(`template is missing slot ${token}`);
    }
    if (out.indexOf(token, first + 1) >= 0) {
      throw new Error(`template repeats slot ${token}`);
    }
    out = out.replace(token, value);
  }
  const leftover = out.match(/\{[a-z_]+\}/);
  if (leftover) {
    throw new Error(`unfilled template slot ${leftover[0]}`);
  }
  return out;
}

export function renderRound1Prompt(task: string, prevStep: string): string {
  return fillTemplate(ROUND1_TEMPLATE, { task, prev_step: prevStep });
}

export function renderRound2Prompt(args: {
  images: Record<string, string>; // view id -> image reference / data url
  subtaskPlan: string[];
  prevStep: string;
}): string {
  return fillTemplate(ROUND2_TEMPLATE, {
    front_image: args.images["front"] ?? "",
    left_image: args.images["left"] ?? "",
    top_image: args.images["top"] ?? "",
    subtask_plan: args.subtaskPlan.map((s) => `- ${s}`).join("\n"),
    prev_step: args.prevStep,
  });
}

// ---------------------------------------------------------------------------
// parsing

const SECTION_ORDER = ["[OBJECTS]", "[STEP]", "[KEYPOINT]"] as const;

function splitSections(raw: string): Map<string, string[]> {
  const lines = raw.split("\n").map((l) => l.trim());
  const headerPositions: { header: string; index: number }[] = [];
  lines.forEach((line, index) => {
    if ((SECTION_ORDER as readonly string[]).includes(line) || line === "[PLAN]") {
      headerPositions.push({ header: line, index });
    }
  });
  const sections = new Map<string, string[]>();
  for (let i = 0; i < headerPositions.length; i++) {
    const { header, index } = headerPositions[i];
    if (sections.has(header)) {
      throw new CompletionParseError(`duplicate section ${header}`, raw);
    }
    const end = i + 1 < headerPositions.length ? headerPositions[i + 1].index : lines.length;
    sections.set(header, lines.slice(index + 1, end).filter((l) => l.length > 0));
  }
  return sections;
}

function parsePixelTriple(fragment: string, raw: string): Record<string, [number, number]> {
  const pixels: Record<string, [number, number]> = {};
  for (const part of fragment.split("|").map((p) => p.trim()).filter(Boolean)) {
    const m = part.match(/^(front|left|top)\s+(-?\d+)\s+(-?\d+)$/);
    if (!m) {
      throw new CompletionParseError(`cannot parse pixel fragment ${r_safe(part)}`, raw);
    }
    pixels[m[1]] = [parseInt(m[2], 10), parseInt(m[3], 10)];
  }
  const missing = ["front", "left", "top"].filter((v) => !(v in pixels));
  if (missing.length) {
    throw new CompletionParseError(`missing views in pixel list: ${missing.join(", ")}`, raw);
  }
  return pixels;
}

function r_safe(s: string): string {
  return JSON.stringify(s);
}

export function parseRound2Completion(raw: string): ParsedRound2 {
  const sections = splitSections(raw);
  // grammar enforces the reasoning order: objects, then step, then keypoint
  const present = [...sections.keys()];
  if (present.length !== 3 || present.some((h, i) => h !== SECTION_ORDER[i])) {
    throw new CompletionParseError(
      `sections must be exactly ${SECTION_ORDER.join(", ")} in order; got ${present.join(", ")}`,
      raw,
    );
  }

  const objects: ParsedObjects = [];
  for (const line of sections.get("[OBJECTS]")!) {
    const [name, ...rest] = line.split("|").map((p) => p.trim());
    if (!name || rest.length === 0) {
      throw new CompletionParseError(`cannot parse object line ${r_safe(line)}`, raw);
    }
    objects.push({ name, pixels: parsePixelTriple(rest.join(" | "), raw) });
  }

  const stepLines = sections.get("[STEP]")!;
  if (stepLines.length !== 1) {
    throw new CompletionParseError(
      `[STEP] must contain exactly one instruction line, got ${stepLines.length}`,
      raw,
    );
  }

  const keypointLines = sections.get("[KEYPOINT]")!;
  if (keypointLines.length !== 1) {
    throw new CompletionParseError(
      `[KEYPOINT] must contain exactly one pixel line, got ${keypointLines.length}`,
      raw,
    );
  }
  return {
    objects,
    step: stepLines[0],
    keypointPixels: parsePixelTriple(keypointLines[0], raw),
  };
}

/** Auxiliary object-position completions: a single [OBJECTS] section. */
export function parseObjectsCompletion(raw: string): ParsedObjects {
  const sections = splitSections(raw);
  const keys = [...sections.keys()];
  if (keys.length !== 1 || keys[0] !== "[OBJECTS]") {
    throw new CompletionParseError(
      `object-position completion must contain only [OBJECTS]; got ${keys.join(", ")}`, raw,
    );
  }
  const objects: ParsedObjects = [];
  for (const line of sections.get("[OBJECTS]")!) {
    const [name, ...rest] = line.split("|").map((p) => p.trim());
    if (!name || rest.length === 0) {
      throw new CompletionParseError(`cannot parse object line ${r_safe(line)}`, raw);
    }
    objects.push({ name, pixels: parsePixelTriple(rest.join(" | "), raw) });
  }
  return objects;
}

export function parseRound1Completion(raw: string): string[] {
  const sections = splitSections(raw);
  if (![...sections.keys()].every((k) => k === "[PLAN]") || !sections.has("[PLAN]")) {
    throw new CompletionParseError("round-1 completion must contain only a [PLAN] section", raw);
  }
  return sections.get("[PLAN]")!.map((line) => {
    if (!line.startsWith("- ")) {
      throw new CompletionParseError(`plan lines must start with "- ": ${r_safe(line)}`, raw);
    }
    return line.slice(2).trim();
  });
}

// ---------------------------------------------------------------------------
// formatting (used by the fine-tune exporter; parses back by construction)

export function formatRound2Completion(parsed: ParsedRound2): string {
  const pix = (p: Record<string, [number, number]>) =>
    ["front", "left", "top"].map((v) => `${v} ${p[v][0]} ${p[v][1]}`).join(" | ");
  const lines = ["[OBJECTS]"];
  for (const obj of parsed.objects) {
    lines.push(`${obj.name} | ${pix(obj.pixels)}`);
  }
  lines.push("[STEP]", parsed.step, "[KEYPOINT]", pix(parsed.keypointPixels));
  return lines.join("\n");
}

export function formatRound1Completion(steps: string[]): string {
  return ["[PLAN]", ...steps.map((s) => `- ${s}`)].join("\n");
}
