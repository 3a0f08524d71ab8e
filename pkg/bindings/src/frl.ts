/** Reading and writing `.frl` latent files.
 *
 * Layout (little-endian): 8-byte magic `FRERESL1`; T, H, W, d as uint32;
 * fps as float32; then T*H*W*d float32 values in row-major
 * [t][row][col][dim] order. Caller arrays are copied into this layout;
 * no math happens on this side of the boundary.
 */

import { IoError, ShapeError, ValidationError } from "./errors";

export const FRL_MAGIC = "FRERESL1";
export const FRL_HEADER_BYTES = 28;

export interface LatentShape {
  frames: number;
  rows: number;
  cols: number;
  dim: number;
  /** Frames per second; 0 means unknown. */
  fps?: number;
}

export type NestedLatents = number[][][][];

function checkDims(shape: LatentShape): void {
  const { frames, rows, cols, dim } = shape;
  for (const [name, v] of Object.entries({ frames, rows, cols, dim })) {
    if (!Number.isInteger(v) || v < 1) {
      throw new ShapeError(`${name} must be a positive integer, got ${v}`);
    }
  }
}

/** Flatten a rank-4 nested array, verifying it is rectangular. */
export function flattenNested(data: NestedLatents): { shape: LatentShape; values: Float32Array } {
  if (!Array.isArray(data) || data.length === 0) {
    throw new ShapeError("expected a non-empty [t][row][col][dim] array");
  }
  const t = data.length;
  const first = data[0];
  if (!Array.isArray(first) || !Array.isArray(first[0]) || !Array.isArray(first[0][0])) {
    throw new ShapeError("expected rank-4 nesting [t][row][col][dim]");
  }
  const rows = first.length;
  const cols = first[0].length;
  const dim = first[0][0].length;
  const out = new Float32Array(t * rows * cols * dim);
  let i = 0;
  for (let f = 0; f < t; f++) {
    const frame = data[f];
    if (!Array.isArray(frame) || frame.length !== rows) {
      throw new ShapeError(`frame ${f} has ${Array.isArray(frame) ? frame.length : "no"} rows, expected ${rows}`);
    }
    for (let r = 0; r < rows; r++) {
      const row = frame[r];
      if (!Array.isArray(row) || row.length !== cols) {
        throw new ShapeError(`frame ${f} row ${r} has wrong length`);
      }
      for (let c = 0; c < cols; c++) {
        const cell = row[c];
        if (!Array.isArray(cell) || cell.length !== dim) {
          throw new ShapeError(`frame ${f} token (${r}, ${c}) has wrong width`);
        }
        for (let d = 0; d < dim; d++) {
          const v = cell[d];
          if (typeof v !== "number") {
            throw new ShapeError(`non-numeric value at [${f}][${r}][${c}][${d}]`);
          }
          out[i++] = v;
        }
      }
    }
  }
  return { shape: { frames: t, rows, cols, dim }, values: out };
}

/** Serialize latents into an `.frl` buffer. */
export function encodeLatents(values: Float32Array, shape: LatentShape): Buffer {
  checkDims(shape);
  const { frames, rows, cols, dim } = shape;
  const count = frames * rows * cols * dim;
  if (values.length !== count) {
    throw new ShapeError(
      `array length ${values.length} does not match ${frames}x${rows}x${cols}x${dim} = ${count}`
    );
  }
  const buf = Buffer.alloc(FRL_HEADER_BYTES + 4 * count);
  buf.write(FRL_MAGIC, 0, "ascii");
  buf.writeUInt32LE(frames, 8);
  buf.writeUInt32LE(rows, 12);
  buf.writeUInt32LE(cols, 16);
  buf.writeUInt32LE(dim, 20);
  buf.writeFloatLE(shape.fps ?? 0, 24);
  for (let i = 0; i < count; i++) {
    buf.writeFloatLE(values[i], FRL_HEADER_BYTES + 4 * i);
  }
  return buf;
}

/** Parse an `.frl` buffer back into its shape and float payload. */
export function decodeLatents(buf: Buffer): { shape: LatentShape; values: Float32Array } {
  if (buf.length < FRL_HEADER_BYTES) {
    throw new IoError(`buffer of ${buf.length} bytes is smaller than the 28-byte header`);
  }
  if (buf.toString("ascii", 0, 8) !== FRL_MAGIC) {
    throw new ValidationError(`bad magic ${JSON.stringify(buf.toString("ascii", 0, 8))}`);
  }
  const shape: LatentShape = {
    frames: buf.readUInt32LE(8),
    rows: buf.readUInt32LE(12),
    cols: buf.readUInt32LE(16),
    dim: buf.readUInt32LE(20),
    fps: buf.readFloatLE(24),
  };
  checkDims(shape);
  const count = shape.frames * shape.rows * shape.cols * shape.dim;
  if (buf.length < FRL_HEADER_BYTES + 4 * count) {
    throw new IoError(`buffer truncated: ${buf.length} bytes, header declares ${FRL_HEADER_BYTES + 4 * count}`);
  }
  const values = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    values[i] = buf.readFloatLE(FRL_HEADER_BYTES + 4 * i);
  }
  return { shape, values };
}
