export { ChunkFormatError, loadView, readChunks, sha256File } from "./chunk.js";
export type { LoadedView, Tensor } from "./chunk.js";
export {
  callRound1,
  callRound2,
  endpointFromEnv,
  groundResponse,
  TransportError,
} from "./client.js";
export type { EndpointConfig, FetchLike, Round2Result } from "./client.js";
export {
  CompletionParseError,
  formatRound1Completion,
  formatRound2Completion,
  parseRound1Completion,
  parseRound2Completion,
  renderRound1Prompt,
  renderRound2Prompt,
  ROUND1_TEMPLATE,
  ROUND2_TEMPLATE,
} from "./grammar.js";
export { exportFinetune, ExportDataError, planToRecord, sampleToRecord } from "./export.js";
export type { FinetuneRecord, Message } from "./export.js";
export { fuseKeypoint, pixelToWorld, worldToPixel } from "./pixelworld.js";
export type { Vec3 } from "./pixelworld.js";
export {
  PLANNER_FINETUNE_HYPERPARAMETERS,
  WIRE_SCHEMA_VERSION,
  manifestSchema,
  round1QueryWireSchema,
  round2QueryWireSchema,
  wireResponseSchema,
} from "./schema.js";
export type { Manifest, Round1QueryWire, Round2QueryWire, WireResponse } from "./schema.js";
