"""Post-training INT8 dynamic quantization and the quantized forward path.

Linear weights (attention projections, feed-forward, classifier head) are
quantized symmetrically per output row: scale_r = max(|w_r|)/127, zero
point pinned at 0.  Embeddings, layernorm parameters, and biases stay
float32.  At inference each quantized matmul dynamically quantizes its
activation matrix per row, accumulates in int32, and rescales to float32
by scale_activation * scale_weight; everything else runs in float32.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from feedguard import kernels
from feedguard.encoder import (ModelConfig, ModelParams, _gelu, _layernorm,
                               _merge_heads, _split_heads, init_params)
from feedguard.errors import CheckpointError, DataError

# leaf names of the weight matrices covered by quantization
_COVERED_LEAVES = {"wq", "wk", "wv", "wo", "w1", "w2", "wc"}


@dataclass(frozen=True)
class QuantTensor:
    """int8 matrix with one positive scale per row; zero_point is 0."""

    q: np.ndarray       # int8, (rows, cols)
    scale: np.ndarray   # float32, (rows,)

    @property
    def shape(self):
        return self.q.shape


def quantize_tensor(w: np.ndarray, *, backend: Optional[str] = None) -> QuantTensor:
    """Symmetric per-row INT8 quantization of a float matrix.

    scale_r = max(|row|)/127 (1.0 for all-zero rows); values round half
    away from zero and clamp to [-127, 127], so every element round-trips
    within scale_r / 2.
    """
    w = np.asarray(w)
    if w.ndim != 2:
        raise DataError(f"quantize_tensor expects a matrix, got shape {w.shape}")
    if not np.isfinite(w).all():
        raise DataError("quantize_tensor requires finite input")
    q, scale = kernels.quantize_rows(w.astype(np.float32), backend=backend)
    return QuantTensor(q=q, scale=scale)


def dequantize(qt: QuantTensor) -> np.ndarray:
    """q * scale, row-wise; float32."""
    return qt.q.astype(np.float32) * qt.scale[:, None]


@dataclass(frozen=True)
class SizeReport:
    """Byte accounting for the covered weights and both checkpoint files."""

    covered_f32_bytes: int
    covered_int8_bytes: int
    covered_scale_bytes: int
    float_file_bytes: int
    quant_file_bytes: int

    @property
    def covered_ratio(self) -> float:
        """f32 weight payload vs int8 weight payload (scales reported
        separately as covered_scale_bytes)."""
        return self.covered_f32_bytes / self.covered_int8_bytes

    @property
    def covered_ratio_with_scales(self) -> float:
        return self.covered_f32_bytes / (self.covered_int8_bytes + self.covered_scale_bytes)

    @property
    def file_ratio(self) -> float:
        return self.float_file_bytes / self.quant_file_bytes

    def as_dict(self) -> dict:
        return {
            "covered_f32_bytes": self.covered_f32_bytes,
            "covered_int8_bytes": self.covered_int8_bytes,
            "covered_scale_bytes": self.covered_scale_bytes,
            "covered_ratio": self.covered_ratio,
            "covered_ratio_with_scales": self.covered_ratio_with_scales,
            "float_file_bytes": self.float_file_bytes,
            "quant_file_bytes": self.quant_file_bytes,
            "file_ratio": self.file_ratio,
        }


@dataclass
class QuantModel:
    config: ModelConfig
    quant: dict[str, QuantTensor]   # name -> (out_features, in_features) rows
    f32: dict[str, np.ndarray]
    report: SizeReport


# checkpoint layout shared with the float format: magic, version, config
QCKPT_MAGIC = b"FGQNT001"
QCKPT_VERSION = 1
_HEADER = struct.Struct("<8sI7If")
_KIND_F32 = 0
_KIND_INT8_ROWS = 1


def _is_covered(name: str) -> bool:
    return name.rsplit(".", 1)[-1] in _COVERED_LEAVES


def _quant_file_bytes(config: ModelConfig, quant: dict, f32: dict) -> int:
    total = _HEADER.size
    for qt in quant.values():
        rows, cols = qt.shape
        total += 1 + 8 + 4 * rows + rows * cols
    for arr in f32.values():
        total += 1 + 4 * arr.size
    return total


def _float_file_bytes(params: ModelParams) -> int:
    return _HEADER.size + sum(4 * arr.size for _, arr in params.named_arrays())


def quantize_model(params: ModelParams, *, backend: Optional[str] = None) -> QuantModel:
    """Quantize every covered weight matrix of a trained model.

    Weights are stored transposed, one output channel per row, so the
    quantized matmul can run row-against-row.  Deterministic: identical
    inputs give byte-identical serialized models.
    """
    quant: dict[str, QuantTensor] = {}
    f32: dict[str, np.ndarray] = {}
    for name, arr in params.named_arrays():
        if _is_covered(name):
            quant[name] = quantize_tensor(np.ascontiguousarray(arr.T), backend=backend)
        else:
            f32[name] = arr.astype(np.float32)
    report = SizeReport(
        covered_f32_bytes=sum(4 * qt.q.size for qt in quant.values()),
        covered_int8_bytes=sum(qt.q.size for qt in quant.values()),
        covered_scale_bytes=sum(4 * qt.scale.size for qt in quant.values()),
        float_file_bytes=_float_file_bytes(params),
        quant_file_bytes=_quant_file_bytes(params.config, quant, f32),
    )
    return QuantModel(config=params.config, quant=quant, f32=f32, report=report)


# ---------------------------------------------------------------------------
# quantized forward


def _qmatmul(x: np.ndarray, qt: QuantTensor, *, backend: Optional[str] = None) -> np.ndarray:
    """x (.., in) @ dequantized weight -> (.., out), via dynamic activation
    quantization and exact int32 accumulation."""
    lead = x.shape[:-1]
    x2 = np.ascontiguousarray(x.reshape(-1, x.shape[-1]), dtype=np.float32)
    qa, sa = kernels.quantize_rows(x2, backend=backend)
    acc = kernels.int8_matmul(qa, qt.q, backend=backend)
    out = acc.astype(np.float32) * sa[:, None] * qt.scale[None, :]
    return out.reshape(*lead, qt.shape[0])


def qforward(qmodel: QuantModel, ids: np.ndarray, mask: np.ndarray, *,
             backend: Optional[str] = None) -> np.ndarray:
    """Quantized-inference logits; same contract as encoder.forward in
    eval mode (dropout off)."""
    cfg = qmodel.config
    if ids.ndim != 2 or mask.shape != ids.shape:
        raise DataError(f"ids/mask shape mismatch: {ids.shape} vs {mask.shape}")
    b, t = ids.shape
    if t > cfg.max_len:
        raise DataError(f"sequence length {t} exceeds max_len {cfg.max_len}")

    mask = mask.astype(np.float32)
    x = qmodel.f32["tok_emb"][ids] + qmodel.f32["pos_emb"][:t][None, :, :]
    scale = np.float32(1.0 / np.sqrt(cfg.d_model // cfg.n_heads))
    neg_inf = np.float32(-np.inf)

    for li in range(cfg.n_layers):
        pre = f"layers.{li}."
        qh = _split_heads(_qmatmul(x, qmodel.quant[pre + "wq"], backend=backend), cfg.n_heads)
        kh = _split_heads(_qmatmul(x, qmodel.quant[pre + "wk"], backend=backend), cfg.n_heads)
        vh = _split_heads(_qmatmul(x, qmodel.quant[pre + "wv"], backend=backend), cfg.n_heads)
        scores = (qh @ kh.transpose(0, 1, 3, 2)) * scale
        scores = np.where(mask[:, None, None, :] > 0, scores, neg_inf)
        scores -= scores.max(axis=-1, keepdims=True)
        probs = np.exp(scores)
        probs /= probs.sum(axis=-1, keepdims=True)
        attn = _merge_heads(probs @ vh)
        a = _qmatmul(attn, qmodel.quant[pre + "wo"], backend=backend)
        r1 = x + a
        n1, _ = _layernorm(r1, qmodel.f32[pre + "ln1_g"], qmodel.f32[pre + "ln1_b"])
        u = _qmatmul(n1, qmodel.quant[pre + "w1"], backend=backend) + qmodel.f32[pre + "b1"]
        ff = _qmatmul(_gelu(u), qmodel.quant[pre + "w2"], backend=backend) + qmodel.f32[pre + "b2"]
        r2 = n1 + ff
        x, _ = _layernorm(r2, qmodel.f32[pre + "ln2_g"], qmodel.f32[pre + "ln2_b"])

    pooled = x[:, 0, :]
    logits = _qmatmul(pooled, qmodel.quant["wc"], backend=backend) + qmodel.f32["bc"]
    return logits


def qpredict_probs(qmodel: QuantModel, ids: np.ndarray, mask: np.ndarray,
                   batch_size: int = 256, *, backend: Optional[str] = None) -> np.ndarray:
    from feedguard.encoder import predict_proba
    out = []
    for i in range(0, ids.shape[0], batch_size):
        logits = qforward(qmodel, ids[i:i + batch_size], mask[i:i + batch_size],
                          backend=backend)
        out.append(np.atleast_1d(predict_proba(logits)))
    return np.concatenate(out)


# ---------------------------------------------------------------------------
# serialization


def save_quant_model(path: str | Path, qmodel: QuantModel) -> None:
    """Header (magic, version, config) then per-tensor records in
    declaration order: kind tag, then either raw f32 payload or
    {rows, cols, f32 scales, int8 payload}."""
    cfg = qmodel.config
    template = init_params(cfg, seed=0)
    with open(path, "wb") as f:
        f.write(_HEADER.pack(QCKPT_MAGIC, QCKPT_VERSION, cfg.n_layers, cfg.d_model,
                             cfg.n_heads, cfg.d_ff, cfg.vocab_size, cfg.max_len,
                             cfg.n_classes, cfg.dropout_rate))
        for name, _ in template.named_arrays():
            if name in qmodel.quant:
                qt = qmodel.quant[name]
                rows, cols = qt.shape
                f.write(struct.pack("<BII", _KIND_INT8_ROWS, rows, cols))
                f.write(np.ascontiguousarray(qt.scale, dtype="<f4").tobytes())
                f.write(np.ascontiguousarray(qt.q, dtype=np.int8).tobytes())
            else:
                f.write(struct.pack("<B", _KIND_F32))
                f.write(np.ascontiguousarray(qmodel.f32[name], dtype="<f4").tobytes())


def load_quant_model(path: str | Path) -> QuantModel:
    with open(path, "rb") as f:
        head = f.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise CheckpointError(f"{path}: truncated header")
        magic, version, nl, dm, nh, dff, vs, ml, nc, dr = _HEADER.unpack(head)
        if magic != QCKPT_MAGIC:
            raise CheckpointError(f"{path}: bad magic {magic!r} (expected {QCKPT_MAGIC!r})")
        if version != QCKPT_VERSION:
            raise CheckpointError(f"{path}: unsupported version {version}")
        cfg = ModelConfig(n_layers=nl, d_model=dm, n_heads=nh, d_ff=dff,
                          vocab_size=vs, max_len=ml, n_classes=nc,
                          dropout_rate=round(float(dr), 6))
        template = init_params(cfg, seed=0)
        quant: dict[str, QuantTensor] = {}
        f32: dict[str, np.ndarray] = {}
        for name, arr in template.named_arrays():
            kind_raw = f.read(1)
            if len(kind_raw) != 1:
                raise CheckpointError(f"{path}: truncated at tensor {name}")
            kind = kind_raw[0]
            if kind == _KIND_INT8_ROWS:
                rows, cols = struct.unpack("<II", f.read(8))
                expected = tuple(reversed(arr.shape))
                if (rows, cols) != expected:
                    raise CheckpointError(
                        f"{path}: tensor {name} has shape {(rows, cols)}, expected {expected}")
                scale = np.frombuffer(f.read(4 * rows), dtype="<f4").copy()
                q = np.frombuffer(f.read(rows * cols), dtype=np.int8).reshape(rows, cols).copy()
                if scale.size != rows or q.size != rows * cols:
                    raise CheckpointError(f"{path}: truncated tensor {name}")
                quant[name] = QuantTensor(q=q, scale=scale)
            elif kind == _KIND_F32:
                raw = f.read(arr.size * 4)
                if len(raw) != arr.size * 4:
                    raise CheckpointError(f"{path}: truncated tensor {name}")
                f32[name] = np.frombuffer(raw, dtype="<f4").reshape(arr.shape).copy()
            else:
                raise CheckpointError(f"{path}: unknown tensor kind {kind} for {name}")
        if f.read(1):
            raise CheckpointError(f"{path}: trailing bytes after last tensor")

    report = SizeReport(
        covered_f32_bytes=sum(4 * qt.q.size for qt in quant.values()),
        covered_int8_bytes=sum(qt.q.size for qt in quant.values()),
        covered_scale_bytes=sum(4 * qt.scale.size for qt in quant.values()),
        float_file_bytes=_float_file_bytes(template),
        quant_file_bytes=_quant_file_bytes(cfg, quant, f32),
    )
    return QuantModel(config=cfg, quant=quant, f32=f32, report=report)
