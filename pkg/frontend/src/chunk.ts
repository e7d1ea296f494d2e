/**
 * Reader for the chunked binary container written by the Python side.
 *
 * Layout: magic "C2FC", uint32 version, uint32 record count; per record a
 * uint16 name length + utf-8 name, a dtype code (0 = float32, 1 = float64,
 * 2 = uint8), uint8 ndim, uint32 dims, then row-major little-endian data.
 */

import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";

import { PoseJson, viewSidecarSchema } from "./schema.js";

export class ChunkFormatError extends Error {}

export type Tensor = {
  dims: number[];
  data: Float32Array | Float64Array | Uint8Array;
};

const MAGIC = "C2FC";

export function readChunks(path: string): Map<string, Tensor> {
  const buf = readFileSync(path);
  if (buf.length < 12 || buf.toString("latin1", 0, 4) !== MAGIC) {
    throw new ChunkFormatError(`${path}: bad magic`);
  }
  const version = buf.readUInt32LE(4);
  if (version !== 1) {
    throw new ChunkFormatError(`${path}: unsupported version ${version}`);
  }
  const count = buf.readUInt32LE(8);
  const out = new Map<string, Tensor>();
  let off = 12;
  for (let i = 0; i < count; i++) {
    const nameLen = buf.readUInt16LE(off);
    off += 2;
    const name = buf.toString("utf8", off, off + nameLen);
    off += nameLen;
    const dtype = buf.readUInt8(off);
    const ndim = buf.readUInt8(off + 1);
    off += 2;
    const dims: number[] = [];
    for (let d = 0; d < ndim; d++) {
      dims.push(buf.readUInt32LE(off));
      off += 4;
    }
    const n = dims.reduce((a, b) => a * b, 1);
    let data: Tensor["data"];
    // copy out of the file buffer so alignment is guaranteed
    if (dtype === 0) {
      data = new Float32Array(n);
      for (let j = 0; j < n; j++) data[j] = buf.readFloatLE(off + 4 * j);
      off += 4 * n;
    } else if (dtype === 1) {
      data = new Float64Array(n);
      for (let j = 0; j < n; j++) data[j] = buf.readDoubleLE(off + 8 * j);
      off += 8 * n;
    } else if (dtype === 2) {
      data = new Uint8Array(buf.subarray(off, off + n));
      off += n;
    } else {
      throw new ChunkFormatError(`${path}: unknown dtype code ${dtype}`);
    }
    out.set(name, { dims, data });
  }
  return out;
}

export function sha256File(path: string): string {
  return createHash("sha256").update(readFileSync(path)).digest("hex");
}

/** A canonical view loaded from a content-addressed chunk file. */
export type LoadedView = {
  pose: PoseJson;
  resolution: number;
  worldXyz: Float64Array | Float32Array; // (R, R, 3) row-major
  occupancy: Uint8Array; // (R, R)
};

export function loadView(path: string): LoadedView {
  const sidecar = viewSidecarSchema.parse(
    JSON.parse(readFileSync(path + ".json", "utf8")),
  );
  const chunks = readChunks(path);
  const world = chunks.get("world_xyz");
  const occ = chunks.get("occupancy");
  if (!world || !occ) {
    throw new ChunkFormatError(`${path}: missing world_xyz/occupancy channels`);
  }
  const resolution = sidecar.pose.resolution;
  return {
    pose: sidecar.pose,
    resolution,
    worldXyz: world.data as Float64Array | Float32Array,
    occupancy: occ.data as Uint8Array,
  };
}
