"""Joint end-to-end optimization of the encoder and the reflectance decoder."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import engine as ng
from ..errors import ConfigError, NumericsError
from ..model.autoencoder import Autoencoder
from ..model.checkpoint import save_checkpoint
from ..model.renderer import RendererMlp, direction_channels
from ..store.dataset import BtfDataset
from .augment import AugmentationConfig, sample_training_pair
from .losses import LossReport, LossWeights, StylePyramid, default_pyramid, loss_terms

CSV_HEADER = ("step", "total", "l1_log", "style", "freq", "wall_ms")


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 20000
    batch_size: int = 4
    lr: float = 1e-3
    lr_end: float = 1e-4
    seed: int = 0
    checkpoint_every: int = 5000
    deterministic: bool = False

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.lr <= 0 or self.lr_end <= 0:
            raise ConfigError("learning rates must be positive")


@dataclass
class TrainResult:
    autoencoder: Autoencoder
    renderer: RendererMlp
    reports: list[LossReport] = field(default_factory=list)
    checkpoint_path: Path | None = None


def _check_finite(report: LossReport, step: int) -> None:
    for name in ("l1_log", "style", "freq", "total"):
        if not np.isfinite(getattr(report, name)):
            raise NumericsError(f"{name} loss became non-finite at step {step}")


def train(dataset: BtfDataset, config: TrainConfig = TrainConfig(),
          augment: AugmentationConfig = AugmentationConfig(),
          weights: LossWeights = LossWeights(), out_dir=None,
          autoencoder: Autoencoder | None = None,
          renderer: RendererMlp | None = None,
          pyramid: StylePyramid | None = None) -> TrainResult:
    """Optimize encoder + decoder on two-view pairs sampled from the dataset.

    Emits a per-step LossReport, writes a loss CSV and periodic checkpoints
    when out_dir is given, and aborts on the first non-finite loss.  With a
    fixed seed (and fixed thread count) the run is reproducible.
    """
    rng = np.random.default_rng(config.seed)
    if autoencoder is None:
        autoencoder = Autoencoder(rng)
    if renderer is None:
        renderer = RendererMlp(rng)
    pyramid = pyramid or default_pyramid()

    params = list(autoencoder.named_parameters().values())
    params += list(renderer.named_parameters().values())
    state = ng.AdamState(params, lr=config.lr)

    out_dir = Path(out_dir) if out_dir is not None else None
    csv_file = writer = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_file = open(out_dir / "loss.csv", "w", newline="")
        writer = csv.writer(csv_file)
        writer.writerow(CSV_HEADER)

    result = TrainResult(autoencoder, renderer)
    try:
        for step in range(config.steps):
            t0 = time.perf_counter()
            batch = [sample_training_pair(dataset, augment, rng)
                     for _ in range(config.batch_size)]
            crop = batch[0].input_view.shape[0]
            inputs = np.stack([p.input_view for p in batch]).transpose(0, 3, 1, 2)
            targets = np.stack([p.target_view for p in batch]).transpose(0, 3, 1, 2)
            dirs = np.concatenate([direction_channels(p.target_pair, 1, crop, crop)
                                   for p in batch])

            with ng.Tape() as tape:
                texture = autoencoder.forward(ng.Tensor(inputs))
                pred = renderer.forward(ng.concat([texture, ng.Tensor(dirs)], axis=1))
                total, report = loss_terms(pred, ng.Tensor(targets), weights, pyramid)
                _check_finite(report, step)
                ng.backward(total, tape)

            state.lr = ng.cosine_lr(step, config.steps, config.lr, config.lr_end)
            ng.adam_step(params, [p.grad for p in params], state)
            ng.zero_grads(params)
            result.reports.append(report)

            if writer is not None:
                wall_ms = 0.0 if config.deterministic \
                    else (time.perf_counter() - t0) * 1000.0
                writer.writerow([step, f"{report.total:.8g}", f"{report.l1_log:.8g}",
                                 f"{report.style:.8g}", f"{report.freq:.8g}",
                                 f"{wall_ms:.3f}"])
            if (out_dir is not None and config.checkpoint_every > 0
                    and (step + 1) % config.checkpoint_every == 0
                    and step + 1 < config.steps):
                save_checkpoint(out_dir / f"ckpt_{step + 1:06d}.nbck",
                                autoencoder, renderer, step=step + 1,
                                rng_state={"seed": config.seed})
    finally:
        if csv_file is not None:
            csv_file.close()

    if out_dir is not None:
        result.checkpoint_path = out_dir / "ckpt_final.nbck"
        save_checkpoint(result.checkpoint_path, autoencoder, renderer,
                        step=config.steps, rng_state={"seed": config.seed})
    return result
