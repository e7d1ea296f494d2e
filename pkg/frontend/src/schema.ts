/**
 * Wire schema (version 1) shared with the Python planner protocol, plus the
 * dataset manifest and sidecar layouts this adapter consumes. Everything is
 * validated with zod at the boundary so malformed data fails loudly.
 */

import { z } from "zod";

export const WIRE_SCHEMA_VERSION = 1;

export const vec3 = z.tuple([z.number(), z.number(), z.number()]);
export const pixel = z.tuple([z.number().int(), z.number().int()]);

export const pixelsPerView = z.record(z.string(), pixel);

export const objectPixelsSchema = z.object({
  name: z.string(),
  world: vec3,
  pixels: pixelsPerView,
});

export const wireResponseSchema = z.object({
  schema_version: z.literal(WIRE_SCHEMA_VERSION),
  object_positions: z.array(objectPixelsSchema),
  step: z.string().min(1),
  keypoint: z.object({
    world: vec3,
    pixels: pixelsPerView,
  }),
});
export type WireResponse = z.infer<typeof wireResponseSchema>;

export const viewRefSchema = z.union([
  z.object({ view_id: z.string(), path: z.string(), sha256: z.string() }),
  z.object({ view_id: z.string(), png_base64: z.string() }),
]);
export type ViewRef = z.infer<typeof viewRefSchema>;

export const round1QueryWireSchema = z.object({
  schema_version: z.literal(WIRE_SCHEMA_VERSION),
  round: z.literal(1),
  task: z.string().min(1),
  prev_step: z.string(),
});
export type Round1QueryWire = z.infer<typeof round1QueryWireSchema>;

export const round2QueryWireSchema = z.object({
  schema_version: z.literal(WIRE_SCHEMA_VERSION),
  round: z.literal(2),
  views: z.array(viewRefSchema).length(3),
  subtask_plan: z.array(z.string()).min(1),
  prev_step: z.string(),
});
export type Round2QueryWire = z.infer<typeof round2QueryWireSchema>;

/** View pose as serialized by the geometry layer's JSON sidecars. */
export const posePoseSchema = z.object({
  view_id: z.string(),
  resolution: z.number().int(),
  bounds: z.object({ lo: vec3, hi: vec3 }),
  u_axis: vec3,
  v_axis: vec3,
  view_dir: vec3,
});
export type PoseJson = z.infer<typeof posePoseSchema>;

export const viewSidecarSchema = z.object({
  kind: z.literal("canonical_view"),
  pose: posePoseSchema,
});

export const sampleSidecarSchema = z.object({
  kind: z.literal("training_sample"),
  task: z.string(),
  gripper_open: z.boolean(),
  prev_step: z.string(),
  subtask_plan: z.array(z.string()).min(1),
  step: z.string(),
  object_positions: z.array(objectPixelsSchema),
  action: z.object({
    position: vec3,
    quaternion: z.tuple([z.number(), z.number(), z.number(), z.number()]),
    gripper_open: z.boolean(),
  }),
  obs_index: z.number().int(),
  target_keyframe: z.number().int(),
  poses: z.array(posePoseSchema).length(3),
  fine_poses: z.array(posePoseSchema).length(3).nullable().optional(),
});
export type SampleSidecar = z.infer<typeof sampleSidecarSchema>;

export const manifestSchema = z.object({
  schema_version: z.literal(1),
  m: z.number().int(),
  mode: z.string(),
  resolution: z.number().int(),
  bounds: z.object({ lo: vec3, hi: vec3 }),
  tasks: z.record(
    z.string(),
    z.object({ trajectories: z.array(z.string()), sample_count: z.number().int() }),
  ),
  samples: z.array(
    z.object({
      path: z.string(),
      task: z.string(),
      trajectory: z.string(),
      obs_index: z.number().int(),
      target_keyframe: z.number().int(),
    }),
  ),
  plans: z.array(
    z.object({
      task: z.string(),
      trajectory: z.string(),
      subtasks: z.array(z.array(z.string()).min(1)).min(1),
    }),
  ),
  object_records: z.array(
    z.object({
      views: z.record(z.string(), z.string()),
      objects: z.array(objectPixelsSchema),
    }),
  ),
  total_samples: z.number().int(),
}).passthrough();
export type Manifest = z.infer<typeof manifestSchema>;

/** Recorded fine-tuning hyperparameters for the planner branch. */
export const PLANNER_FINETUNE_HYPERPARAMETERS = {
  lora_rank: 8,
  lora_alpha: 32,
  learning_rate: 3e-4,
} as const;
