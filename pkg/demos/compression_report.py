"""Compression accounting: the neural bundle against a truncated-SVD baseline.

A BTF is a stack of images, one per direction pair, so its raw size grows
linearly with angular sampling while the neural representation stays one
latent texture plus a 3011-parameter decoder.  PCA on the slice matrix is
the classical low-rank baseline; its storage grows with rank and with the
number of slices.
"""

from pathlib import Path

from btfkit.evaluate import evaluate_full, pca_baseline, report_table
from btfkit.propagate import export_neural_btf, propagate
from btfkit.store import (pair_product, render_synthetic_btf,
                          sparse_directions_7, textured_maps)
from btfkit.training import TrainConfig, tonemap, train

out_dir = Path("demo_out/compression")
out_dir.mkdir(parents=True, exist_ok=True)

dirs = sparse_directions_7()
dataset = render_synthetic_btf(textured_maps(32, 32, seed=0),
                               pair_product(dirs, dirs))
result = train(dataset, TrainConfig(steps=800, deterministic=True))

report = evaluate_full(result, dataset, out_dir=out_dir)
print(report_table(report))

print("PCA baseline (rank, PSNR, bytes):")
for rank in (1, 2, 4, 8, 16):
    db, nbytes = pca_baseline(dataset, rank)
    print(f"  rank {rank:2d}: {db:6.2f} dB  {nbytes:8d} bytes")

# float16 texels halve the texture payload; weights stay float32
nbtx = out_dir / "material.nbtx"
export_neural_btf(propagate(result, tonemap(dataset.slices[0].pixels)), nbtx)
print(f"deployable bundle: {nbtx.stat().st_size} bytes on disk "
      f"vs {report.raw_bytes} bytes raw "
      f"({report.raw_bytes / nbtx.stat().st_size:.1f}x)")
print(f"full report in {out_dir / 'report.txt'}")
