"""Exact architecture and training-schedule arithmetic.

Parameter counting assumes the Llama-style decoder layout with grouped-query
attention, gated MLP, untied-or-tied embeddings, and no bias terms anywhere;
that is the only layout in the family whose total matches the reference
config exactly, so it is fixed here rather than configurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    d_model: int
    n_layers: int
    n_heads: int
    n_kv_groups: int
    d_intermediate: int
    context_length: int
    tie_embeddings: bool = False

    def validate(self) -> None:
        for name in ("vocab_size", "d_model", "n_layers", "n_heads", "n_kv_groups", "d_intermediate", "context_length"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.n_heads % self.n_kv_groups != 0:
            raise ConfigError("n_heads must be divisible by n_kv_groups")
        if self.d_model % self.n_heads != 0:
            raise ConfigError("d_model must be divisible by n_heads")


def param_count(cfg: ModelConfig) -> int:
    """Exact parameter total for the bias-free GQA decoder layout."""
    cfg.validate()
    d = cfg.d_model
    kv_width = d * cfg.n_kv_groups // cfg.n_heads
    attention = d * d + d * kv_width + d * kv_width + d * d  # Q, K, V, O
    mlp = d * cfg.d_intermediate * 3  # gate, up, down
    norms = 2 * d
    per_layer = attention + mlp + norms
    total = cfg.vocab_size * d  # token embedding
    total += cfg.n_layers * per_layer
    total += d  # final norm
    if not cfg.tie_embeddings:
        total += cfg.vocab_size * d  # output head
    return total


@dataclass(frozen=True)
class ScheduleConfig:
    max_lr: float
    min_lr: float
    warmup_steps: int
    total_steps: int

    def validate(self) -> None:
        if self.max_lr <= 0 or self.min_lr <= 0:
            raise ConfigError("learning rates must be positive")
        if self.min_lr > self.max_lr:
            raise ConfigError("min_lr must be <= max_lr")
        if not 0 <= self.warmup_steps <= self.total_steps:
            raise ConfigError("need 0 <= warmup_steps <= total_steps")


def lr_at(cfg: ScheduleConfig, step: int) -> float:
    """Linear warmup from 0 to max_lr, then cosine decay to min_lr."""
    cfg.validate()
    if not 0 <= step <= cfg.total_steps:
        raise ConfigError(f"step {step} outside [0, {cfg.total_steps}]")
    if step <= cfg.warmup_steps and cfg.warmup_steps > 0:
        return cfg.max_lr * step / cfg.warmup_steps
    decay_steps = cfg.total_steps - cfg.warmup_steps
    if decay_steps == 0:
        return cfg.max_lr
    progress = (step - cfg.warmup_steps) / decay_steps
    return cfg.min_lr + 0.5 * (cfg.max_lr - cfg.min_lr) * (1.0 + math.cos(math.pi * progress))


def schedule_table(cfg: ScheduleConfig) -> list[tuple[int, float]]:
    """(step, lr) for every step; handy for CSV dumps and plots."""
    return [(step, lr_at(cfg, step)) for step in range(cfg.total_steps + 1)]


def duration_estimate(total_tokens: int, gpus: int, tokens_per_gpu_s: float) -> float:
    """Wall-clock seconds to push total_tokens through the cluster."""
    if total_tokens < 0:
        raise ConfigError("total_tokens must be >= 0")
    if gpus <= 0 or tokens_per_gpu_s <= 0:
        raise ConfigError("gpus and tokens_per_gpu_s must be positive")
    return total_tokens / (gpus * tokens_per_gpu_s)


def format_duration(seconds: float) -> str:
    days, rem = divmod(int(seconds), 86400)
    hours, rem = divmod(rem, 3600)
    minutes, secs = divmod(rem, 60)
    if days:
        return f"{days}d {hours}h {minutes}m"
    if hours:
        return f"{hours}h {minutes}m {secs}s"
    return f"{minutes}m {secs}s"


def steps_for(tokens_per_epoch: int, epochs: int, batch_size_tokens: int) -> int:
    """Optimizer steps implied by corpus size, epochs, and token batch size."""
    if batch_size_tokens <= 0:
        raise ConfigError("batch_size_tokens must be positive")
    return math.ceil(tokens_per_epoch * epochs / batch_size_tokens)


@dataclass(frozen=True)
class TrainHyperparams:
    """Optimizer settings stored for reporting; training itself is out of scope."""

    beta1: float
    beta2: float
    batch_size_tokens: int
    weight_decay: float
    epochs: int
    grad_clip: float | None = None

    def validate(self) -> None:
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ConfigError("betas must be in (0, 1)")
        if self.batch_size_tokens <= 0 or self.weight_decay <= 0 or self.epochs <= 0:
            raise ConfigError("batch size, weight decay, and epochs must be positive")
        if self.grad_clip is not None and self.grad_clip <= 0:
            raise ConfigError("grad_clip must be positive when set")


# Reference settings for the 1.57B-parameter training recipe this toolkit
# supports: pre-training and the (stored-only) fine-tune stage.
PRETRAIN_HYPERPARAMS = TrainHyperparams(
    beta1=0.9, beta2=0.95, batch_size_tokens=2_097_152, weight_decay=0.1, epochs=2, grad_clip=1.0
)
PRETRAIN_SCHEDULE_REFERENCE = {"max_lr": 4.0e-4, "min_lr": 4.0e-5, "warmup_steps": 2000}
FINETUNE_HYPERPARAMS = TrainHyperparams(
    beta1=0.9, beta2=0.95, batch_size_tokens=1_048_512, weight_decay=0.1, epochs=5, grad_clip=None
)
FINETUNE_SCHEDULE_REFERENCE = {"peak_lr": 2.0e-5, "warmup_steps": 1126}
REFERENCE_THROUGHPUT = {"gpu": "A100", "tflops_per_gpu": 199.97, "tokens_per_gpu_s": 17_528, "utilization_pct": 99.61}
