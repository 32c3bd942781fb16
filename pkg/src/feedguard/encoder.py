"""Compact transformer encoder with a binary head and analytic gradients.

Architecture: learned token + positional embeddings, then n_layers of
{multi-head self-attention with key padding mask, residual + layernorm,
GELU feed-forward, residual + layernorm}; the hidden state at the [CLS]
position feeds a 2-class linear head.  forward() caches every intermediate
so backward() can produce exact gradients for all parameters plus the
embedding-output gradient needed for adversarial perturbation.

Everything is plain numpy.  Parameters default to float32; float64 is
supported end-to-end (gradient checking runs there so the finite-difference
oracle is itself trustworthy).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from feedguard.errors import CheckpointError, DataError

LN_EPS = 1e-12  # BERT-family layernorm epsilon; keeps var(xhat) within 1e-4 of 1
# tanh-approximation GELU constants
_GELU_C0 = 0.7978845608028654  # sqrt(2/pi)
_GELU_C1 = 0.044715


@dataclass(frozen=True)
class ModelConfig:
    n_layers: int = 2
    d_model: int = 64
    n_heads: int = 2
    d_ff: int = 128
    vocab_size: int = 2000
    max_len: int = 64
    n_classes: int = 2
    dropout_rate: float = 0.1

    def __post_init__(self):
        if self.d_model % self.n_heads != 0:
            raise DataError(f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")
        if self.n_classes != 2:
            raise DataError("this head is strictly binary (n_classes must be 2)")
        if min(self.n_layers, self.d_model, self.d_ff, self.vocab_size) < 1 or self.max_len < 2:
            raise DataError("model dimensions must be positive (max_len >= 2)")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise DataError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")


@dataclass
class LayerParams:
    wq: np.ndarray
    wk: np.ndarray
    wv: np.ndarray
    wo: np.ndarray
    ln1_g: np.ndarray
    ln1_b: np.ndarray
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    ln2_g: np.ndarray
    ln2_b: np.ndarray


_LAYER_FIELDS = tuple(f.name for f in fields(LayerParams))


@dataclass
class ModelParams:
    config: ModelConfig
    tok_emb: np.ndarray
    pos_emb: np.ndarray
    layers: list[LayerParams]
    wc: np.ndarray
    bc: np.ndarray

    def named_arrays(self):
        """(name, array) pairs in declaration order; arrays are live views."""
        yield "tok_emb", self.tok_emb
        yield "pos_emb", self.pos_emb
        for i, layer in enumerate(self.layers):
            for name in _LAYER_FIELDS:
                yield f"layers.{i}.{name}", getattr(layer, name)
        yield "wc", self.wc
        yield "bc", self.bc

    @property
    def dtype(self):
        return self.tok_emb.dtype

    def copy(self) -> "ModelParams":
        return ModelParams(
            config=self.config,
            tok_emb=self.tok_emb.copy(),
            pos_emb=self.pos_emb.copy(),
            layers=[LayerParams(**{n: getattr(l, n).copy() for n in _LAYER_FIELDS})
                    for l in self.layers],
            wc=self.wc.copy(), bc=self.bc.copy(),
        )

    def zeros_like(self) -> "ModelParams":
        out = self.copy()
        for _, arr in out.named_arrays():
            arr[...] = 0
        return out

    def add_(self, other: "ModelParams", scale: float = 1.0) -> "ModelParams":
        for (_, a), (_, b) in zip(self.named_arrays(), other.named_arrays()):
            a += scale * b
        return self

    def astype(self, dtype) -> "ModelParams":
        out = self.copy()
        return ModelParams(
            config=out.config,
            tok_emb=out.tok_emb.astype(dtype),
            pos_emb=out.pos_emb.astype(dtype),
            layers=[LayerParams(**{n: getattr(l, n).astype(dtype) for n in _LAYER_FIELDS})
                    for l in out.layers],
            wc=out.wc.astype(dtype), bc=out.bc.astype(dtype),
        )


def _trunc_normal(rng: np.random.Generator, shape, std: float, dtype) -> np.ndarray:
    x = rng.standard_normal(shape) * std
    for _ in range(16):
        bad = np.abs(x) > 2 * std
        if not bad.any():
            break
        x[bad] = rng.standard_normal(int(bad.sum())) * std
    return np.clip(x, -2 * std, 2 * std).astype(dtype)


def init_params(config: ModelConfig, seed: int = 0, dtype=np.float32,
                init_std: float = 0.02) -> ModelParams:
    """Truncated-normal matrices, zero biases, unit layernorm gains."""
    rng = np.random.default_rng(seed)
    d, f = config.d_model, config.d_ff

    def tn(*shape):
        return _trunc_normal(rng, shape, init_std, dtype)

    def zeros(*shape):
        return np.zeros(shape, dtype=dtype)

    layers = []
    for _ in range(config.n_layers):
        layers.append(LayerParams(
            wq=tn(d, d), wk=tn(d, d), wv=tn(d, d), wo=tn(d, d),
            ln1_g=np.ones(d, dtype=dtype), ln1_b=zeros(d),
            w1=tn(d, f), b1=zeros(f), w2=tn(f, d), b2=zeros(d),
            ln2_g=np.ones(d, dtype=dtype), ln2_b=zeros(d),
        ))
    return ModelParams(
        config=config,
        tok_emb=tn(config.vocab_size, d),
        pos_emb=tn(config.max_len, d),
        layers=layers,
        wc=tn(d, config.n_classes), bc=zeros(config.n_classes),
    )


# ---------------------------------------------------------------------------
# forward


def _layernorm(x: np.ndarray, g: np.ndarray, b: np.ndarray):
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + np.asarray(LN_EPS, dtype=x.dtype))
    xhat = (x - mu) * inv
    return g * xhat + b, {"xhat": xhat, "inv": inv}


def _layernorm_backward(dy: np.ndarray, cache: dict, g: np.ndarray):
    xhat, inv = cache["xhat"], cache["inv"]
    dg = (dy * xhat).sum(axis=tuple(range(dy.ndim - 1)))
    db = dy.sum(axis=tuple(range(dy.ndim - 1)))
    dxhat = dy * g
    m1 = dxhat.mean(axis=-1, keepdims=True)
    m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
    dx = inv * (dxhat - m1 - xhat * m2)
    return dx, dg, db


def _gelu(x: np.ndarray) -> np.ndarray:
    c0 = np.asarray(_GELU_C0, dtype=x.dtype)
    c1 = np.asarray(_GELU_C1, dtype=x.dtype)
    return 0.5 * x * (1.0 + np.tanh(c0 * (x + c1 * x ** 3)))


def _gelu_grad(x: np.ndarray) -> np.ndarray:
    c0 = np.asarray(_GELU_C0, dtype=x.dtype)
    c1 = np.asarray(_GELU_C1, dtype=x.dtype)
    t = np.tanh(c0 * (x + c1 * x ** 3))
    return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t ** 2) * c0 * (1.0 + 3.0 * c1 * x ** 2)


def _split_heads(x: np.ndarray, n_heads: int) -> np.ndarray:
    b, t, d = x.shape
    return x.reshape(b, t, n_heads, d // n_heads).transpose(0, 2, 1, 3)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    b, h, t, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * dh)


def _dropout(x: np.ndarray, rate: float, train: bool, rng):
    if not train or rate <= 0.0:
        return x, None
    if rng is None:
        raise DataError("train-mode forward with dropout needs an rng")
    keep = (rng.random(x.shape) >= rate).astype(x.dtype) / np.asarray(1.0 - rate, dtype=x.dtype)
    return x * keep, keep


def forward(params: ModelParams, ids: np.ndarray, mask: np.ndarray, *,
            train_mode: bool = False, rng: Optional[np.random.Generator] = None,
            emb_offset: Optional[np.ndarray] = None):
    """Run the encoder; returns (logits (B, 2), cache for backward).

    `mask` is the (B, T) attention mask (1 on real tokens, 0 on padding);
    masked key positions receive exactly zero attention.  `emb_offset` is
    added to the summed token+positional embeddings (adversarial passes).
    Dropout fires only in train_mode, driven by `rng`.

    Pure given params and inputs, so eval-mode calls may run concurrently;
    a cache belongs to its own forward call and must not be shared.
    """
    cfg = params.config
    dtype = params.dtype
    if ids.ndim != 2 or mask.shape != ids.shape:
        raise DataError(f"ids/mask shape mismatch: {ids.shape} vs {mask.shape}")
    b, t = ids.shape
    if b < 1:
        raise DataError("batch must be non-empty")
    if t > cfg.max_len:
        raise DataError(f"sequence length {t} exceeds max_len {cfg.max_len}")
    if ids.min() < 0 or ids.max() >= cfg.vocab_size:
        raise DataError("token id out of vocabulary range")

    mask = mask.astype(dtype)
    emb = params.tok_emb[ids] + params.pos_emb[:t][None, :, :]
    if emb_offset is not None:
        emb = emb + emb_offset.astype(dtype)
    cache = {"ids": ids, "mask": mask, "emb": emb, "layers": []}

    scale = np.asarray(1.0 / np.sqrt(cfg.d_model // cfg.n_heads), dtype=dtype)
    neg_inf = np.asarray(-np.inf, dtype=dtype)
    rate = cfg.dropout_rate
    x = emb
    for layer in params.layers:
        lc = {"x_in": x}
        qh = _split_heads(x @ layer.wq, cfg.n_heads)
        kh = _split_heads(x @ layer.wk, cfg.n_heads)
        vh = _split_heads(x @ layer.wv, cfg.n_heads)
        scores = (qh @ kh.transpose(0, 1, 3, 2)) * scale
        scores = np.where(mask[:, None, None, :] > 0, scores, neg_inf)
        # every row has at least one live key ([CLS]) so the max is finite
        scores -= scores.max(axis=-1, keepdims=True)
        probs = np.exp(scores)
        probs /= probs.sum(axis=-1, keepdims=True)
        probs_kept, keep_p = _dropout(probs, rate, train_mode, rng)
        o_heads = probs_kept @ vh
        attn = _merge_heads(o_heads)
        a = attn @ layer.wo
        a_kept, keep_a = _dropout(a, rate, train_mode, rng)
        r1 = x + a_kept
        n1, ln1c = _layernorm(r1, layer.ln1_g, layer.ln1_b)
        u = n1 @ layer.w1 + layer.b1
        gact = _gelu(u)
        ff = gact @ layer.w2 + layer.b2
        ff_kept, keep_f = _dropout(ff, rate, train_mode, rng)
        r2 = n1 + ff_kept
        x, ln2c = _layernorm(r2, layer.ln2_g, layer.ln2_b)
        lc.update(qh=qh, kh=kh, vh=vh, probs=probs, probs_kept=probs_kept,
                  keep_p=keep_p, attn=attn, keep_a=keep_a, ln1=ln1c, n1=n1,
                  u=u, gact=gact, keep_f=keep_f, ln2=ln2c, scale=scale)
        cache["layers"].append(lc)

    pooled = x[:, 0, :]
    logits = pooled @ params.wc + params.bc
    cache["pooled"] = pooled
    # non-finite logits are not raised here: the trainer detects divergence
    # at the loss level (a full epoch without a finite loss aborts the run)
    return logits, cache


def predict_proba(logits: np.ndarray) -> np.ndarray:
    """Class-1 probability via max-subtracted softmax; accepts (B, 2) or (2,)."""
    z = np.asarray(logits, dtype=np.float64)
    single = z.ndim == 1
    if single:
        z = z[None, :]
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    p1 = e[:, 1] / e.sum(axis=1)
    return float(p1[0]) if single else p1


# ---------------------------------------------------------------------------
# backward


def _flat_matmul_grads(x: np.ndarray, dy: np.ndarray):
    """For y = x @ w: returns (dw, dx_contribution_needs w) helper pieces."""
    d_in = x.shape[-1]
    d_out = dy.shape[-1]
    return x.reshape(-1, d_in).T @ dy.reshape(-1, d_out)


def backward(params: ModelParams, cache: dict, dlogits: np.ndarray):
    """Exact gradients for every parameter plus the embedding-output grad.

    Returns (grads: ModelParams-shaped container, demb: (B, T, d) gradient
    of the loss w.r.t. the summed token+positional embeddings).  Requires
    the cache produced by the matching forward call.
    """
    if "pooled" not in cache:
        raise DataError("backward requires the cache from a forward pass")
    cfg = params.config
    dtype = params.dtype
    dlogits = dlogits.astype(dtype)
    grads = params.zeros_like()

    pooled = cache["pooled"]
    grads.wc[...] = pooled.T @ dlogits
    grads.bc[...] = dlogits.sum(axis=0)

    ids = cache["ids"]
    b, t = ids.shape
    dx = np.zeros((b, t, cfg.d_model), dtype=dtype)
    dx[:, 0, :] = dlogits @ params.wc.T

    for li in range(cfg.n_layers - 1, -1, -1):
        layer = params.layers[li]
        glayer = grads.layers[li]
        lc = cache["layers"][li]
        x_in = lc["x_in"]

        dr2, dg2, db2 = _layernorm_backward(dx, lc["ln2"], layer.ln2_g)
        glayer.ln2_g[...] = dg2
        glayer.ln2_b[...] = db2
        dn1 = dr2.copy()
        dff = dr2 if lc["keep_f"] is None else dr2 * lc["keep_f"]

        glayer.w2[...] = _flat_matmul_grads(lc["gact"], dff)
        glayer.b2[...] = dff.sum(axis=(0, 1))
        dg_act = dff @ layer.w2.T
        du = dg_act * _gelu_grad(lc["u"])
        glayer.w1[...] = _flat_matmul_grads(lc["n1"], du)
        glayer.b1[...] = du.sum(axis=(0, 1))
        dn1 += du @ layer.w1.T

        dr1, dg1, db1 = _layernorm_backward(dn1, lc["ln1"], layer.ln1_g)
        glayer.ln1_g[...] = dg1
        glayer.ln1_b[...] = db1
        dx = dr1.copy()
        da = dr1 if lc["keep_a"] is None else dr1 * lc["keep_a"]

        glayer.wo[...] = _flat_matmul_grads(lc["attn"], da)
        do_heads = _split_heads(da @ layer.wo.T, cfg.n_heads)
        dprobs_kept = do_heads @ lc["vh"].transpose(0, 1, 3, 2)
        dvh = lc["probs_kept"].transpose(0, 1, 3, 2) @ do_heads
        dprobs = dprobs_kept if lc["keep_p"] is None else dprobs_kept * lc["keep_p"]
        probs = lc["probs"]
        dscores = probs * (dprobs - (dprobs * probs).sum(axis=-1, keepdims=True))
        dqh = (dscores @ lc["kh"]) * lc["scale"]
        dkh = (dscores.transpose(0, 1, 3, 2) @ lc["qh"]) * lc["scale"]

        dq = _merge_heads(dqh)
        dk = _merge_heads(dkh)
        dv = _merge_heads(dvh)
        glayer.wq[...] = _flat_matmul_grads(x_in, dq)
        glayer.wk[...] = _flat_matmul_grads(x_in, dk)
        glayer.wv[...] = _flat_matmul_grads(x_in, dv)
        dx += dq @ layer.wq.T + dk @ layer.wk.T + dv @ layer.wv.T

    demb = dx
    d = cfg.d_model
    np.add.at(grads.tok_emb, ids.reshape(-1), demb.reshape(-1, d))
    grads.pos_emb[:t] = demb.sum(axis=0)
    return grads, demb


# ---------------------------------------------------------------------------
# checkpoint serialization: little-endian header + f32 tensors in
# declaration order

CKPT_MAGIC = b"FGENC001"
CKPT_VERSION = 1
_HEADER = struct.Struct("<8sI7If")


def save_checkpoint(path: str | Path, params: ModelParams) -> None:
    """Write magic, version, config, then every tensor as raw f32 bytes."""
    cfg = params.config
    with open(path, "wb") as f:
        f.write(_HEADER.pack(CKPT_MAGIC, CKPT_VERSION, cfg.n_layers, cfg.d_model,
                             cfg.n_heads, cfg.d_ff, cfg.vocab_size, cfg.max_len,
                             cfg.n_classes, cfg.dropout_rate))
        for _, arr in params.named_arrays():
            f.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_checkpoint_config(path: str | Path) -> ModelConfig:
    with open(path, "rb") as f:
        head = f.read(_HEADER.size)
    if len(head) < _HEADER.size:
        raise CheckpointError(f"{path}: truncated header")
    magic, version, nl, dm, nh, dff, vs, ml, nc, dr = _HEADER.unpack(head)
    if magic != CKPT_MAGIC:
        raise CheckpointError(f"{path}: bad magic {magic!r} (expected {CKPT_MAGIC!r})")
    if version != CKPT_VERSION:
        raise CheckpointError(f"{path}: unsupported version {version}")
    return ModelConfig(n_layers=nl, d_model=dm, n_heads=nh, d_ff=dff,
                       vocab_size=vs, max_len=ml, n_classes=nc,
                       dropout_rate=round(float(dr), 6))


def load_checkpoint(path: str | Path) -> ModelParams:
    cfg = read_checkpoint_config(path)
    params = init_params(cfg, seed=0, dtype=np.float32)
    with open(path, "rb") as f:
        f.seek(_HEADER.size)
        for name, arr in params.named_arrays():
            raw = f.read(arr.size * 4)
            if len(raw) != arr.size * 4:
                raise CheckpointError(f"{path}: truncated tensor {name}")
            arr[...] = np.frombuffer(raw, dtype="<f4").reshape(arr.shape)
        if f.read(1):
            raise CheckpointError(f"{path}: trailing bytes after last tensor")
    return params
