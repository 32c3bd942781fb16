"""Staged curriculum trainer.

Three canonical stages: a balanced warm-up with the lowest layers frozen,
a single-epoch pass over the skewed claims corpus with class-weighted BCE,
then a full fine-tune on the heterogeneous mix with focal loss and
embedding-level adversarial augmentation.  AdamW with linear warmup into a
constant learning rate, gradient accumulation, per-epoch dev evaluation,
early stopping with best-checkpoint reload, and a final decision-threshold
sweep on the dev split.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from feedguard.corpus import CleanRecord
from feedguard.encoder import (ModelConfig, ModelParams, _LAYER_FIELDS, backward,
                               forward, predict_proba)
from feedguard.errors import DataError, TrainingDiverged
from feedguard.metrics import auroc, confusion, accuracy as cm_accuracy, macro_f1
from feedguard.tokenizer import Vocab, batch_arrays, encode

PROB_EPS = 1e-7
LOSSES = ("weighted_bce", "focal")


# ---------------------------------------------------------------------------
# losses (each returns mean batch loss and d loss / d logits)


def _clamp(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    clamped = np.clip(p, PROB_EPS, 1.0 - PROB_EPS)
    inside = ((p > PROB_EPS) & (p < 1.0 - PROB_EPS)).astype(np.float64)
    return clamped, inside


def focal_loss(p, y, alpha: float = 0.25, gamma: float = 2.0):
    """Mean of -alpha * (1 - p_t)^gamma * log(p_t) with p_t the true-class
    probability; p is the class-1 probability, clamped to [eps, 1-eps].

    Returns (loss, dlogits) where dlogits is the (B, 2) gradient through
    the binary softmax (zero where the clamp saturates).
    """
    p = np.atleast_1d(np.asarray(p, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    pc, inside = _clamp(p)
    pt = np.where(y == 1, pc, 1.0 - pc)
    one_minus = 1.0 - pt
    losses = -alpha * one_minus ** gamma * np.log(pt)
    loss = float(losses.mean())

    # dL/dp_t, then p_t -> p (sign flips for y = 0), then p -> logits
    dl_dpt = alpha * gamma * one_minus ** (gamma - 1.0) * np.log(pt) \
        - alpha * one_minus ** gamma / pt
    dl_dp = np.where(y == 1, dl_dpt, -dl_dpt) * inside
    dz1 = dl_dp * pc * (1.0 - pc) / p.size
    dlogits = np.stack([-dz1, dz1], axis=1)
    return loss, dlogits


def weighted_bce(p, y, w0: float = 1.0, w1: float = 1.0):
    """Mean of -w_y * [y log p + (1-y) log(1-p)]; same return contract as
    focal_loss.  With w0 = w1 = 1 this is plain binary cross-entropy."""
    if w0 <= 0 or w1 <= 0:
        raise DataError("class weights must be positive")
    p = np.atleast_1d(np.asarray(p, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    pc, inside = _clamp(p)
    losses = np.where(y == 1, -w1 * np.log(pc), -w0 * np.log(1.0 - pc))
    loss = float(losses.mean())
    # dL/dz1 collapses to -w1(1-p) for positives and w0 p for negatives
    dz1 = np.where(y == 1, -w1 * (1.0 - pc), w0 * pc) * inside / p.size
    dlogits = np.stack([-dz1, dz1], axis=1)
    return loss, dlogits


def default_class_weights(y: np.ndarray) -> tuple[float, float]:
    """Weights inversely proportional to class frequency, normalized to
    sum to 2 so balanced data reduces to plain BCE."""
    f1 = float(np.asarray(y).mean())
    if f1 in (0.0, 1.0):
        raise DataError("stage data contains a single class; cannot weight")
    w0, w1 = 1.0 / (1.0 - f1), 1.0 / f1
    scale = 2.0 / (w0 + w1)
    return w0 * scale, w1 * scale


# ---------------------------------------------------------------------------
# adversarial perturbation (gradient direction on the embedding outputs)


def fgm_offset(embedding_grad: np.ndarray, epsilon: float = 1.0) -> np.ndarray:
    """r = eps * g / (||g||_2 + 1e-12), normalized per example over (T, d)."""
    flat = embedding_grad.reshape(embedding_grad.shape[0], -1).astype(np.float64)
    norms = np.linalg.norm(flat, axis=1) + 1e-12
    r = epsilon * embedding_grad / norms.reshape(-1, *([1] * (embedding_grad.ndim - 1)))
    return r.astype(embedding_grad.dtype)


def fgm_perturb(embedding_outputs: np.ndarray, embedding_grad: np.ndarray,
                epsilon: float = 1.0) -> np.ndarray:
    """Embedding outputs shifted one normalized gradient step uphill."""
    return embedding_outputs + fgm_offset(embedding_grad, epsilon)


# ---------------------------------------------------------------------------
# optimizer


@dataclass
class OptState:
    m: ModelParams
    v: ModelParams
    t: int = 0
    skipped: int = 0

    @classmethod
    def fresh(cls, params: ModelParams) -> "OptState":
        return cls(m=params.zeros_like(), v=params.zeros_like())


def frozen_param_names(config: ModelConfig, freeze_lowest_layers: int) -> frozenset[str]:
    """Freezing k >= 1 pins the embeddings plus encoder layers 0..k-1."""
    if freeze_lowest_layers <= 0:
        return frozenset()
    if freeze_lowest_layers >= config.n_layers + 1:
        raise DataError(f"freeze_lowest_layers {freeze_lowest_layers} must be "
                        f"< n_layers + 1 = {config.n_layers + 1}")
    names = {"tok_emb", "pos_emb"}
    for i in range(min(freeze_lowest_layers, config.n_layers)):
        names.update(f"layers.{i}.{f}" for f in _LAYER_FIELDS)
    return frozenset(names)


def adamw_step(params: ModelParams, grads: ModelParams, state: OptState,
               lr_t: float, beta1: float = 0.9, beta2: float = 0.999,
               eps: float = 1e-8, weight_decay: float = 0.01,
               freeze: frozenset[str] = frozenset()) -> bool:
    """One AdamW step with decoupled weight decay and bias correction.

    Non-finite gradients skip the whole step (recorded in state.skipped).
    Frozen parameters are left untouched, moments included.  Returns True
    if the step was applied.
    """
    for name, g in grads.named_arrays():
        if name not in freeze and not np.isfinite(g).all():
            state.skipped += 1
            return False
    state.t += 1
    bc1 = 1.0 - beta1 ** state.t
    bc2 = 1.0 - beta2 ** state.t
    for (name, p), (_, g), (_, m), (_, v) in zip(
            params.named_arrays(), grads.named_arrays(),
            state.m.named_arrays(), state.v.named_arrays()):
        if name in freeze:
            continue
        m[...] = beta1 * m + (1.0 - beta1) * g
        v[...] = beta2 * v + (1.0 - beta2) * g * g
        m_hat = m / bc1
        v_hat = v / bc2
        p -= lr_t * (m_hat / (np.sqrt(v_hat) + eps) + weight_decay * p)
    return True


def lr_schedule(step: int, total_steps: int, base_lr: float = 2e-5,
                warmup_frac: float = 0.06) -> float:
    """Linear ramp 0 -> base_lr over the first ceil(warmup_frac * total)
    steps, constant base_lr afterwards."""
    if not 0 <= step <= total_steps:
        raise DataError(f"step {step} outside [0, {total_steps}]")
    warmup = math.ceil(warmup_frac * total_steps)
    if warmup <= 0 or step >= warmup:
        return base_lr
    return base_lr * step / warmup


# ---------------------------------------------------------------------------
# curriculum plan


@dataclass
class StageSpec:
    name: str
    split: str
    epochs: int
    loss: str
    fgm_enabled: bool = False
    freeze_lowest_layers: int = 0
    class_weights: Optional[tuple[float, float]] = None
    balance: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise DataError(f"stage {self.name}: epochs must be >= 1")
        if self.loss not in LOSSES:
            raise DataError(f"stage {self.name}: unknown loss {self.loss!r}")


@dataclass
class CurriculumPlan:
    stages: list[StageSpec]
    lr: float = 2e-5
    warmup_frac: float = 0.06
    weight_decay: float = 0.01
    batch_size: int = 32
    accumulation: int = 2
    patience: int = 2
    seed: int = 42
    focal_alpha: float = 0.25
    focal_gamma: float = 2.0
    fgm_epsilon: float = 1.0
    early_stop: bool = True

    def __post_init__(self):
        if self.lr <= 0:
            raise DataError("lr must be positive")
        if not self.stages:
            raise DataError("plan needs at least one stage")


def paper_plan(stage0_epochs: int = 3, stage2_epochs: int = 5, **kwargs) -> CurriculumPlan:
    """The canonical three-stage schedule."""
    stages = [
        StageSpec(name="Stage0", split="Stage0", epochs=stage0_epochs,
                  loss="weighted_bce", class_weights=(1.0, 1.0),
                  freeze_lowest_layers=1, balance=True),
        StageSpec(name="Stage1", split="Stage1", epochs=1, loss="weighted_bce"),
        StageSpec(name="Stage2", split="Stage2", epochs=stage2_epochs,
                  loss="focal", fgm_enabled=True),
    ]
    return CurriculumPlan(stages=stages, **kwargs)


@dataclass
class EpochRecord:
    epoch: int
    stage: str
    train_loss: float
    dev_macro_f1: float
    dev_accuracy: float
    dev_auroc: float
    lr: float

    def as_dict(self) -> dict:
        return {"epoch": self.epoch, "stage": self.stage,
                "train_loss": self.train_loss, "dev_macro_f1": self.dev_macro_f1,
                "dev_accuracy": self.dev_accuracy, "dev_auroc": self.dev_auroc,
                "lr": self.lr}


@dataclass
class TrainHistory:
    seed: int
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = -1
    best_dev_macro_f1: float = -1.0
    skipped_steps: int = 0

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for rec in self.epochs:
                f.write(json.dumps(rec.as_dict()) + "\n")


# ---------------------------------------------------------------------------
# trainer


def encode_records(records: Sequence[CleanRecord], vocab: Vocab, max_len: int):
    seqs = [encode(vocab, r.text, max_len) for r in records]
    ids, mask = batch_arrays(seqs)
    y = np.array([r.y for r in records], dtype=np.int64)
    return ids, mask, y


def predict_probs(params: ModelParams, ids: np.ndarray, mask: np.ndarray,
                  batch_size: int = 256) -> np.ndarray:
    """Eval-mode class-1 probabilities, computed in chunks."""
    out = []
    for i in range(0, ids.shape[0], batch_size):
        logits, _ = forward(params, ids[i:i + batch_size], mask[i:i + batch_size])
        out.append(np.atleast_1d(predict_proba(logits)))
    return np.concatenate(out)


def _balance_records(records: Sequence[CleanRecord],
                     rng: np.random.Generator) -> list[CleanRecord]:
    pos = [r for r in records if r.y == 1]
    neg = [r for r in records if r.y == 0]
    if not pos or not neg:
        raise DataError("balancing requires both classes present")
    if len(pos) == len(neg):
        return list(records)
    major, minor = (pos, neg) if len(pos) > len(neg) else (neg, pos)
    keep = rng.choice(len(major), size=len(minor), replace=False)
    keep_ids = {major[i].id for i in keep}
    keep_ids.update(r.id for r in minor)
    return [r for r in records if r.id in keep_ids]


def _stage_loss_fn(stage: StageSpec, plan: CurriculumPlan,
                   y: np.ndarray) -> Callable:
    if stage.loss == "focal":
        return lambda p, yy: focal_loss(p, yy, plan.focal_alpha, plan.focal_gamma)
    w0, w1 = stage.class_weights or default_class_weights(y)
    return lambda p, yy: weighted_bce(p, yy, w0, w1)


def _micro_step(params, ids, mask, y, loss_fn, fgm_enabled, fgm_epsilon, rng):
    """Forward/backward on one micro-batch; adds the adversarial pass when
    enabled.  Returns (summed loss, grads)."""
    logits, cache = forward(params, ids, mask, train_mode=True, rng=rng)
    probs = np.atleast_1d(predict_proba(logits))
    loss, dlogits = loss_fn(probs, y)
    grads, demb = backward(params, cache, dlogits)
    if fgm_enabled:
        offset = fgm_offset(demb, fgm_epsilon)
        logits2, cache2 = forward(params, ids, mask, train_mode=True, rng=rng,
                                  emb_offset=offset)
        probs2 = np.atleast_1d(predict_proba(logits2))
        loss2, dlogits2 = loss_fn(probs2, y)
        grads2, _ = backward(params, cache2, dlogits2)
        grads.add_(grads2)
        loss = loss + loss2
    return loss, grads


def run_curriculum(plan: CurriculumPlan, splits: dict[str, list[CleanRecord]],
                   config: ModelConfig, params: ModelParams, vocab: Vocab):
    """Train through every stage; returns (best params, history).

    The optimizer state and learning-rate schedule reset at each stage
    boundary.  Early stopping (patience consecutive non-improving dev
    evaluations) ends a stage; the stage's best checkpoint seeds the next
    stage, and the best checkpoint across all epochs is returned.
    """
    rng = np.random.default_rng(plan.seed)
    dev = splits.get("Dev") or []
    if not dev:
        raise DataError("Dev split is empty; per-epoch evaluation impossible")
    dev_ids, dev_mask, dev_y = encode_records(dev, vocab, config.max_len)

    history = TrainHistory(seed=plan.seed)
    best_params = params.copy()
    global_epoch = 0

    for stage in plan.stages:
        records = splits.get(stage.split) or []
        if not records:
            raise DataError(f"stage {stage.name}: split {stage.split!r} is empty")
        if stage.balance:
            records = _balance_records(records, rng)
        ids, mask, y = encode_records(records, vocab, config.max_len)
        n = ids.shape[0]
        loss_fn = _stage_loss_fn(stage, plan, y)
        freeze = frozen_param_names(config, stage.freeze_lowest_layers)
        opt = OptState.fresh(params)
        group = plan.batch_size * plan.accumulation
        steps_per_epoch = math.ceil(n / group)
        total_steps = steps_per_epoch * stage.epochs

        stage_best = params.copy()
        stage_best_f1 = -1.0
        stagnant = 0
        step_idx = 0
        for _ in range(stage.epochs):
            perm = rng.permutation(n)
            epoch_losses = []
            for start in range(0, n, group):
                chunk = perm[start:start + group]
                grad_total = params.zeros_like()
                loss_sum = 0.0
                for ms in range(0, len(chunk), plan.batch_size):
                    sel = chunk[ms:ms + plan.batch_size]
                    loss, grads = _micro_step(
                        params, ids[sel], mask[sel], y[sel], loss_fn,
                        stage.fgm_enabled, plan.fgm_epsilon, rng)
                    grad_total.add_(grads, scale=float(len(sel)))
                    loss_sum += loss * len(sel)
                for _, arr in grad_total.named_arrays():
                    arr /= len(chunk)
                lr_t = lr_schedule(step_idx, total_steps, plan.lr, plan.warmup_frac)
                adamw_step(params, grad_total, opt, lr_t,
                           weight_decay=plan.weight_decay, freeze=freeze)
                step_idx += 1
                epoch_losses.append(loss_sum / len(chunk))

            finite = [x for x in epoch_losses if math.isfinite(x)]
            if not finite:
                history.skipped_steps = opt.skipped
                raise TrainingDiverged(
                    f"stage {stage.name}: no finite loss for a full epoch",
                    history=history)
            train_loss = float(np.mean(finite))

            dev_probs = predict_probs(params, dev_ids, dev_mask)
            dev_f1 = macro_f1(dev_probs, dev_y, 0.5)
            cm = confusion(dev_probs, dev_y, 0.5)
            record = EpochRecord(epoch=global_epoch, stage=stage.name,
                                 train_loss=train_loss, dev_macro_f1=dev_f1,
                                 dev_accuracy=cm_accuracy(cm),
                                 dev_auroc=auroc(dev_probs, dev_y),
                                 lr=lr_schedule(min(step_idx, total_steps),
                                                total_steps, plan.lr,
                                                plan.warmup_frac))
            history.epochs.append(record)
            global_epoch += 1

            if dev_f1 > stage_best_f1:
                stage_best_f1 = dev_f1
                stage_best = params.copy()
                stagnant = 0
            else:
                stagnant += 1
            if dev_f1 > history.best_dev_macro_f1:
                history.best_dev_macro_f1 = dev_f1
                history.best_epoch = record.epoch
                best_params = params.copy()
            if plan.early_stop and stagnant >= plan.patience:
                break

        history.skipped_steps += opt.skipped
        params = stage_best.copy()

    return best_params, history


# ---------------------------------------------------------------------------
# decision-threshold calibration


DEFAULT_TAU_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))


@dataclass(frozen=True)
class ThresholdCalibration:
    tau: float
    dev_macro_f1: float


def calibrate_threshold(dev_probs, dev_labels,
                        grid: Sequence[float] = DEFAULT_TAU_GRID) -> ThresholdCalibration:
    """tau = argmax over the grid of dev macro-F1; ties break toward the
    value nearest 0.5 (then the smaller tau).  Frozen afterwards for Test."""
    labels = np.asarray(dev_labels)
    if len(set(labels.tolist())) < 2:
        raise DataError("calibration requires both classes in dev labels")
    best = None
    for tau in grid:
        score = macro_f1(dev_probs, dev_labels, tau)
        key = (score, -abs(tau - 0.5), -tau)
        if best is None or key > best[0]:
            best = (key, tau, score)
    return ThresholdCalibration(tau=best[1], dev_macro_f1=best[2])
