/**
 * Minimal PNG decoder for the server's frames: 8-bit RGB (color type 2),
 * non-interlaced, zlib-compressed — exactly what the battle server emits.
 * Uses node's built-in zlib; no external dependencies.
 */

import * as zlib from "node:zlib";

export interface DecodedImage {
  width: number;
  height: number;
  /** Row-major RGB, 3 bytes per pixel. */
  pixels: Uint8Array;
}

const PNG_SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
const BYTES_PER_PIXEL = 3;

export function decodePng(data: Buffer): DecodedImage {
  if (data.length < 8 || !data.subarray(0, 8).equals(PNG_SIGNATURE)) {
    throw new Error("not a PNG: bad signature");
  }

  let width = 0;
  let height = 0;
  const idatParts: Buffer[] = [];
  let offset = 8;
  while (offset + 8 <= data.length) {
    const length = data.readUInt32BE(offset);
    const type = data.toString("ascii", offset + 4, offset + 8);
    const body = data.subarray(offset + 8, offset + 8 + length);
    if (type === "IHDR") {
      width = body.readUInt32BE(0);
      height = body.readUInt32BE(4);
      const bitDepth = body[8];
      const colorType = body[9];
      const interlace = body[12];
      if (bitDepth !== 8 || colorType !== 2 || interlace !== 0) {
        throw new Error(
          `unsupported PNG layout: depth=${bitDepth} color=${colorType} interlace=${interlace}`,
        );
      }
    } else if (type === "IDAT") {
      idatParts.push(body);
    } else if (type === "IEND") {
      break;
    }
    offset += 12 + length; // length + type + body + crc
  }
  if (width === 0 || height === 0 || idatParts.length === 0) {
    throw new Error("truncated PNG: missing IHDR or IDAT");
  }

  const raw = zlib.inflateSync(Buffer.concat(idatParts));
  return { width, height, pixels: unfilter(raw, width, height) };
}

/** Reverse the per-scanline PNG filters (types 0-4). */
function unfilter(raw: Buffer, width: number, height: number): Uint8Array {
  const stride = width * BYTES_PER_PIXEL;
  if (raw.length < height * (stride + 1)) {
    throw new Error("truncated PNG: not enough scanline data");
  }
  const out = new Uint8Array(height * stride);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (stride + 1)];
    const lineStart = y * (stride + 1) + 1;
    const outStart = y * stride;
    const prevStart = (y - 1) * stride;
    for (let x = 0; x < stride; x++) {
      const value = raw[lineStart + x];
      const left = x >= BYTES_PER_PIXEL ? out[outStart + x - BYTES_PER_PIXEL] : 0;
      const up = y > 0 ? out[prevStart + x] : 0;
      const upLeft = y > 0 && x >= BYTES_PER_PIXEL ? out[prevStart + x - BYTES_PER_PIXEL] : 0;
      let reconstructed: number;
      switch (filter) {
        case 0: reconstructed = value; break;
        case 1: reconstructed = value + left; break;
        case 2: reconstructed = value + up; break;
        case 3: reconstructed = value + Math.floor((left + up) / 2); break;
        case 4: reconstructed = value + paeth(left, up, upLeft); break;
        default: throw new Error(`unknown PNG filter ${filter} on row ${y}`);
      }
      out[outStart + x] = reconstructed & 0xff;
    }
  }
  return out;
}

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}
