"""Two-view pair sampling, augmentation, the three-term loss, and the train loop."""

from .augment import (
    AugmentationConfig,
    TrainingPair,
    crop_wrap,
    gaussian_blur_wrap,
    hue_rotation_matrix,
    resample_bilinear_wrap,
    resolve_crop_size,
    sample_training_pair,
    tonemap,
)
from .losses import (
    LossReport,
    LossWeights,
    StylePyramid,
    default_pyramid,
    gram_matrix,
    loss_focal_freq,
    loss_l1_log,
    loss_style,
    loss_terms,
    total_loss,
)
from .loop import CSV_HEADER, TrainConfig, TrainResult, train

__all__ = [
    "AugmentationConfig", "TrainingPair", "crop_wrap", "gaussian_blur_wrap",
    "hue_rotation_matrix", "resample_bilinear_wrap", "resolve_crop_size",
    "sample_training_pair", "tonemap",
    "LossReport", "LossWeights", "StylePyramid", "default_pyramid", "gram_matrix",
    "loss_focal_freq", "loss_l1_log", "loss_style", "loss_terms", "total_loss",
    "CSV_HEADER", "TrainConfig", "TrainResult", "train",
]
