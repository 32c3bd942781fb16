// Quantized-checkpoint parser and forward pass.
//
// Binary layout (little-endian), shared with the trainer: header {magic
// "FGQNT001", u32 version, 7 x u32 config, f32 dropout}, then one record
// per tensor in declaration order: kind u8, then either a raw f32 payload
// or {u32 rows, u32 cols, f32 scales[rows], int8 q[rows*cols]} for the
// quantized linear weights (stored one output channel per row).
//
// Arithmetic: activations are quantized per row (scale = max|row|/127,
// round half away from zero), products accumulate exactly as integers
// (well inside the 2^53 window), and everything else runs in float64.

import type { ModelConfig } from "./types.js";

export interface QuantTensor {
  q: Int8Array;
  scale: Float32Array;
  rows: number;
  cols: number;
}

export interface QuantModel {
  config: ModelConfig;
  quant: Map<string, QuantTensor>;
  f32: Map<string, Float32Array>;
}

const MAGIC = "FGQNT001";
const LN_EPS = 1e-12;
const GELU_C0 = 0.7978845608028654;
const GELU_C1 = 0.044715;

function tensorOrder(cfg: ModelConfig): Array<[string, number[]]> {
  const d = cfg.dModel;
  const f = cfg.dFf;
  const entries: Array<[string, number[]]> = [
    ["tok_emb", [cfg.vocabSize, d]],
    ["pos_emb", [cfg.maxLen, d]],
  ];
  for (let i = 0; i < cfg.nLayers; i++) {
    const p = `layers.${i}.`;
    entries.push(
      [p + "wq", [d, d]], [p + "wk", [d, d]], [p + "wv", [d, d]],
      [p + "wo", [d, d]], [p + "ln1_g", [d]], [p + "ln1_b", [d]],
      [p + "w1", [d, f]], [p + "b1", [f]], [p + "w2", [f, d]],
      [p + "b2", [d]], [p + "ln2_g", [d]], [p + "ln2_b", [d]],
    );
  }
  entries.push(["wc", [d, cfg.nClasses]], ["bc", [cfg.nClasses]]);
  return entries;
}

export function parseQuantModel(buf: ArrayBuffer): QuantModel {
  const view = new DataView(buf);
  const magic = new TextDecoder("ascii").decode(new Uint8Array(buf, 0, 8));
  if (magic !== MAGIC) {
    throw new Error(`bad checkpoint magic ${JSON.stringify(magic)}`);
  }
  const version = view.getUint32(8, true);
  if (version !== 1) throw new Error(`unsupported checkpoint version ${version}`);
  const u32 = (i: number) => view.getUint32(12 + 4 * i, true);
  const config: ModelConfig = {
    nLayers: u32(0), dModel: u32(1), nHeads: u32(2), dFf: u32(3),
    vocabSize: u32(4), maxLen: u32(5), nClasses: u32(6),
    dropoutRate: view.getFloat32(40, true),
  };
  let offset = 44;
  const quant = new Map<string, QuantTensor>();
  const f32 = new Map<string, Float32Array>();
  for (const [name, shape] of tensorOrder(config)) {
    const kind = view.getUint8(offset);
    offset += 1;
    if (kind === 1) {
      const rows = view.getUint32(offset, true);
      const cols = view.getUint32(offset + 4, true);
      offset += 8;
      const expected = [shape[1], shape[0]];
      if (rows !== expected[0] || cols !== expected[1]) {
        throw new Error(`tensor ${name}: shape ${rows}x${cols}, expected ${expected}`);
      }
      const scale = new Float32Array(buf.slice(offset, offset + 4 * rows));
      offset += 4 * rows;
      const q = new Int8Array(buf.slice(offset, offset + rows * cols));
      offset += rows * cols;
      quant.set(name, { q, scale, rows, cols });
    } else if (kind === 0) {
      const count = shape.reduce((a, b) => a * b, 1);
      f32.set(name, new Float32Array(buf.slice(offset, offset + 4 * count)));
      offset += 4 * count;
    } else {
      throw new Error(`tensor ${name}: unknown kind ${kind}`);
    }
  }
  if (offset !== buf.byteLength) {
    throw new Error(`trailing bytes: read ${offset} of ${buf.byteLength}`);
  }
  return { config, quant, f32 };
}

// x is (m, k) row-major float64; returns x @ W^T as (m, rows) where the
// quantized weight holds one output channel per row.
function qmatmul(x: Float64Array, m: number, k: number, qt: QuantTensor): Float64Array {
  if (qt.cols !== k) throw new Error(`inner dims differ: ${k} vs ${qt.cols}`);
  const n = qt.rows;
  const qa = new Int32Array(m * k);
  const sa = new Float64Array(m);
  for (let i = 0; i < m; i++) {
    let amax = 0;
    for (let j = 0; j < k; j++) {
      const v = Math.abs(x[i * k + j]);
      if (v > amax) amax = v;
    }
    // fround mirrors the trainer's float32 scale so the integer grids match
    let scale = Math.fround(amax / 127.0);
    if (scale === 0) scale = 1.0;
    sa[i] = scale;
    for (let j = 0; j < k; j++) {
      const r = Math.fround(x[i * k + j] / scale);
      let q = Math.sign(r) * Math.floor(Math.abs(r) + 0.5);
      if (q > 127) q = 127;
      else if (q < -127) q = -127;
      qa[i * k + j] = q;
    }
  }
  const out = new Float64Array(m * n);
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < n; j++) {
      let acc = 0;
      for (let p = 0; p < k; p++) {
        acc += qa[i * k + p] * qt.q[j * k + p];
      }
      out[i * n + j] = acc * sa[i] * qt.scale[j];
    }
  }
  return out;
}

function layernorm(x: Float64Array, m: number, d: number,
                   g: Float32Array, b: Float32Array): Float64Array {
  const out = new Float64Array(m * d);
  for (let i = 0; i < m; i++) {
    let mean = 0;
    for (let j = 0; j < d; j++) mean += x[i * d + j];
    mean /= d;
    let variance = 0;
    for (let j = 0; j < d; j++) {
      const c = x[i * d + j] - mean;
      variance += c * c;
    }
    variance /= d;
    const inv = 1.0 / Math.sqrt(variance + LN_EPS);
    for (let j = 0; j < d; j++) {
      out[i * d + j] = g[j] * (x[i * d + j] - mean) * inv + b[j];
    }
  }
  return out;
}

function gelu(x: Float64Array): Float64Array {
  const out = new Float64Array(x.length);
  for (let i = 0; i < x.length; i++) {
    const v = x[i];
    out[i] = 0.5 * v * (1 + Math.tanh(GELU_C0 * (v + GELU_C1 * v * v * v)));
  }
  return out;
}

export function qforward(model: QuantModel, ids: Int32Array, mask: Int32Array): [number, number] {
  const cfg = model.config;
  const t = ids.length;
  const d = cfg.dModel;
  const heads = cfg.nHeads;
  const dh = d / heads;
  if (t > cfg.maxLen) throw new Error(`sequence length ${t} exceeds ${cfg.maxLen}`);

  const tokEmb = model.f32.get("tok_emb")!;
  const posEmb = model.f32.get("pos_emb")!;
  let x: Float64Array = new Float64Array(t * d);
  for (let i = 0; i < t; i++) {
    const id = ids[i];
    if (id < 0 || id >= cfg.vocabSize) throw new Error(`token id ${id} out of range`);
    for (let j = 0; j < d; j++) {
      x[i * d + j] = tokEmb[id * d + j] + posEmb[i * d + j];
    }
  }

  const scale = 1.0 / Math.sqrt(dh);
  for (let layer = 0; layer < cfg.nLayers; layer++) {
    const p = `layers.${layer}.`;
    const q = qmatmul(x, t, d, model.quant.get(p + "wq")!);
    const k = qmatmul(x, t, d, model.quant.get(p + "wk")!);
    const v = qmatmul(x, t, d, model.quant.get(p + "wv")!);

    const attnOut = new Float64Array(t * d);
    const scores = new Float64Array(t);
    for (let h = 0; h < heads; h++) {
      const base = h * dh;
      for (let i = 0; i < t; i++) {
        let maxScore = -Infinity;
        for (let j = 0; j < t; j++) {
          if (mask[j] === 0) {
            scores[j] = -Infinity;
            continue;
          }
          let dot = 0;
          for (let c = 0; c < dh; c++) {
            dot += q[i * d + base + c] * k[j * d + base + c];
          }
          scores[j] = dot * scale;
          if (scores[j] > maxScore) maxScore = scores[j];
        }
        let denom = 0;
        for (let j = 0; j < t; j++) {
          scores[j] = mask[j] === 0 ? 0 : Math.exp(scores[j] - maxScore);
          denom += scores[j];
        }
        for (let j = 0; j < t; j++) {
          const w = scores[j] / denom;
          if (w === 0) continue;
          for (let c = 0; c < dh; c++) {
            attnOut[i * d + base + c] += w * v[j * d + base + c];
          }
        }
      }
    }

    const a = qmatmul(attnOut, t, d, model.quant.get(p + "wo")!);
    const r1 = new Float64Array(t * d);
    for (let i = 0; i < r1.length; i++) r1[i] = x[i] + a[i];
    const n1 = layernorm(r1, t, d, model.f32.get(p + "ln1_g")!, model.f32.get(p + "ln1_b")!);

    const u = qmatmul(n1, t, d, model.quant.get(p + "w1")!);
    const b1 = model.f32.get(p + "b1")!;
    for (let i = 0; i < t; i++) {
      for (let j = 0; j < cfg.dFf; j++) u[i * cfg.dFf + j] += b1[j];
    }
    const ff = qmatmul(gelu(u), t, cfg.dFf, model.quant.get(p + "w2")!);
    const b2 = model.f32.get(p + "b2")!;
    const r2 = new Float64Array(t * d);
    for (let i = 0; i < t; i++) {
      for (let j = 0; j < d; j++) {
        r2[i * d + j] = n1[i * d + j] + ff[i * d + j] + b2[j];
      }
    }
    x = layernorm(r2, t, d, model.f32.get(p + "ln2_g")!, model.f32.get(p + "ln2_b")!);
  }

  const pooled = x.slice(0, d);
  const logits = qmatmul(pooled, 1, d, model.quant.get("wc")!);
  const bc = model.f32.get("bc")!;
  return [logits[0] + bc[0], logits[1] + bc[1]];
}

export function predictProba(logits: [number, number]): number {
  const m = Math.max(logits[0], logits[1]);
  const e0 = Math.exp(logits[0] - m);
  const e1 = Math.exp(logits[1] - m);
  return e1 / (e0 + e1);
}
