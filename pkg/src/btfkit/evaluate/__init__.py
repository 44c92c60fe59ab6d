"""Quality metrics, full-BTF reports, the PCA baseline, latent visualization."""

from .latents import visualize_latents
from .metrics import psnr, ssim
from .pca import pca_baseline
from .report import MetricReport, evaluate_full, report_table

__all__ = [
    "MetricReport", "evaluate_full", "pca_baseline", "psnr", "report_table",
    "ssim", "visualize_latents",
]
