"""feedguard: fully on-device misinformation detection.

Corpus preparation, a compact trainable transformer classifier with a
three-stage curriculum (focal loss, gradient-sign adversarial augmentation,
INT8 post-training quantization), an evaluation suite, and a streaming
inference runtime with latency accounting.  The INT8 matmul core is a
compiled extension with a pure numpy fallback (see feedguard.kernels).
"""

__version__ = "0.1.0"
