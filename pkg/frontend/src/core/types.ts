export type VerdictStatus =
  | "flagged"
  | "clean"
  | "skipped_language"
  | "skipped_short"
  | "suppressed_duplicate";

export interface Verdict {
  postId: string;
  status: VerdictStatus;
  p1: number | null;
  latencyMs: number;
}

export interface ModelConfig {
  nLayers: number;
  dModel: number;
  nHeads: number;
  dFf: number;
  vocabSize: number;
  maxLen: number;
  nClasses: number;
  dropoutRate: number;
}

export interface BundleManifest {
  format: string;
  version: number;
  model_file: string;
  vocab_file: string;
  tau: number;
  seed: number | null;
  model_config: {
    n_layers: number;
    d_model: number;
    n_heads: number;
    d_ff: number;
    vocab_size: number;
    max_len: number;
    n_classes: number;
    dropout_rate: number;
  };
  sha256: Record<string, string>;
}
