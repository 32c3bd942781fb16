"""Run configuration: one JSON file drives every CLI subcommand.

Schema (all sections optional unless noted; unknown fields are rejected so
typos surface immediately):

    {
      "seed": 7,                       # master seed (init, sampling, dropout)
      "paths": {
        "corpora": {"ISOT": "corpora/ISOT.tsv", ...},   # required by prepare
        "out_dir": "runs/desk"                          # required
      },
      "model":  {"n_layers": 2, "d_model": 64, "n_heads": 2, "d_ff": 128,
                 "vocab_size": 2000, "max_len": 64, "dropout_rate": 0.1},
      "splits": {"seed": 42, "stage2_size": 600, "min_tokens": 10,
                 "stage2_mix": {"FNN": 0.5, "TruthSeeker": 0.3, "PHEME": 0.2}},
      "train":  {"lr": 2e-5, "warmup_frac": 0.06, "weight_decay": 0.01,
                 "batch_size": 32, "accumulation": 2, "patience": 2,
                 "focal_alpha": 0.25, "focal_gamma": 2.0, "fgm_epsilon": 1.0,
                 "stages": [{"name": "Stage0", "split": "Stage0", "epochs": 3,
                             "loss": "weighted_bce", "freeze_lowest_layers": 1,
                             "balance": true, "class_weights": [1.0, 1.0]},
                            ...]},
      "quantize": true,
      "tau_override": null
    }

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from feedguard.corpus import CORPUS_SOURCES, DEFAULT_STAGE2_MIX
from feedguard.encoder import ModelConfig
from feedguard.errors import ConfigError
from feedguard.train import CurriculumPlan, StageSpec, paper_plan


def _take(section: dict, context: str, spec: dict[str, tuple]) -> dict:
    """Pull typed fields out of a dict section, rejecting unknown keys."""
    unknown = set(section) - set(spec)
    if unknown:
        raise ConfigError(f"{context}.{sorted(unknown)[0]}", "unknown field")
    out = {}
    for key, (types, default) in spec.items():
        if key not in section:
            out[key] = default
            continue
        value = section[key]
        type_tuple = types if isinstance(types, tuple) else (types,)
        if types is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if isinstance(value, bool) and bool not in type_tuple:
            raise ConfigError(f"{context}.{key}", "expected a non-boolean value")
        if not isinstance(value, type_tuple):
            expected = "/".join(getattr(t, "__name__", str(t)) for t in type_tuple)
            raise ConfigError(f"{context}.{key}",
                              f"expected {expected}, got {type(value).__name__}")
        out[key] = value
    return out


@dataclass
class RunConfig:
    seed: int
    out_dir: Path
    corpora: dict[str, Path] = field(default_factory=dict)
    model: ModelConfig = field(default_factory=ModelConfig)
    plan: CurriculumPlan = None
    split_seed: int = 42
    stage2_mix: dict = field(default_factory=lambda: dict(DEFAULT_STAGE2_MIX))
    stage2_size: Optional[int] = 600
    min_tokens: int = 10
    quantize: bool = True
    tau_override: Optional[float] = None
    raw: dict = field(default_factory=dict)


def _parse_stage(entry: Any, idx: int) -> StageSpec:
    if not isinstance(entry, dict):
        raise ConfigError(f"train.stages[{idx}]", "each stage must be an object")
    fields_spec = {
        "name": (str, f"stage{idx}"),
        "split": (str, None),
        "epochs": (int, 1),
        "loss": (str, "weighted_bce"),
        "fgm_enabled": (bool, False),
        "freeze_lowest_layers": (int, 0),
        "balance": (bool, False),
        "class_weights": (list, None),
    }
    vals = _take(entry, f"train.stages[{idx}]", fields_spec)
    if vals["split"] is None:
        raise ConfigError(f"train.stages[{idx}].split", "required")
    weights = vals.pop("class_weights")
    if weights is not None:
        if len(weights) != 2 or not all(isinstance(w, (int, float)) for w in weights):
            raise ConfigError(f"train.stages[{idx}].class_weights",
                              "expected two numbers")
        weights = (float(weights[0]), float(weights[1]))
    return StageSpec(class_weights=weights, **vals)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "top level must be an object")
    base = path.parent

    top = _take(raw, "<root>", {
        "seed": (int, 7), "paths": (dict, {}), "model": (dict, {}),
        "splits": (dict, {}), "train": (dict, {}), "quantize": (bool, True),
        "tau_override": ((int, float, type(None)), None),
    })

    paths = _take(top["paths"], "paths", {
        "corpora": (dict, {}), "out_dir": (str, None),
    })
    if paths["out_dir"] is None:
        raise ConfigError("paths.out_dir", "required")
    corpora = {}
    for source, p in paths["corpora"].items():
        if source not in CORPUS_SOURCES:
            raise ConfigError(f"paths.corpora.{source}", "unknown corpus source")
        if not isinstance(p, str):
            raise ConfigError(f"paths.corpora.{source}", "expected a path string")
        corpora[source] = (base / p).resolve()

    m = _take(top["model"], "model", {
        "n_layers": (int, 2), "d_model": (int, 64), "n_heads": (int, 2),
        "d_ff": (int, 128), "vocab_size": (int, 2000), "max_len": (int, 64),
        "dropout_rate": (float, 0.1),
    })
    model = ModelConfig(**m)

    s = _take(top["splits"], "splits", {
        "seed": (int, 42), "stage2_mix": (dict, dict(DEFAULT_STAGE2_MIX)),
        "stage2_size": ((int, type(None)), 600), "min_tokens": (int, 10),
    })
    for src, frac in s["stage2_mix"].items():
        if not isinstance(frac, (int, float)) or isinstance(frac, bool):
            raise ConfigError(f"splits.stage2_mix.{src}", "expected a number")

    t = _take(top["train"], "train", {
        "lr": (float, 2e-5), "warmup_frac": (float, 0.06),
        "weight_decay": (float, 0.01), "batch_size": (int, 32),
        "accumulation": (int, 2), "patience": (int, 2),
        "focal_alpha": (float, 0.25), "focal_gamma": (float, 2.0),
        "fgm_epsilon": (float, 1.0), "early_stop": (bool, True),
        "stages": (list, None),
    })
    stages_raw = t.pop("stages")
    if stages_raw is None:
        plan = paper_plan(seed=top["seed"], **t)
    else:
        stages = [_parse_stage(e, i) for i, e in enumerate(stages_raw)]
        plan = CurriculumPlan(stages=stages, seed=top["seed"], **t)

    tau = top["tau_override"]
    if tau is not None:
        tau = float(tau)
        if not 0.0 < tau < 1.0:
            raise ConfigError("tau_override", f"must be in (0, 1), got {tau}")

    return RunConfig(
        seed=top["seed"], out_dir=(base / paths["out_dir"]).resolve(),
        corpora=corpora, model=model, plan=plan, split_seed=s["seed"],
        stage2_mix={k: float(v) for k, v in s["stage2_mix"].items()},
        stage2_size=s["stage2_size"], min_tokens=s["min_tokens"],
        quantize=top["quantize"], tau_override=tau, raw=raw,
    )
