"""Augmentation alignment, loss values vs frozen references, training loop."""

import csv

import numpy as np
import pytest

from btfkit import engine as ng
from btfkit.errors import ConfigError, NumericsError, ValidationError
from btfkit.model import RendererMlp, load_checkpoint
from btfkit.store import (
    Direction,
    DirectionPair,
    lambertian_maps,
    pair_product,
    render_synthetic_btf,
)
from btfkit.training import (
    AugmentationConfig,
    LossWeights,
    TrainConfig,
    crop_wrap,
    gram_matrix,
    hue_rotation_matrix,
    loss_focal_freq,
    loss_l1_log,
    loss_style,
    loss_terms,
    resample_bilinear_wrap,
    resolve_crop_size,
    sample_training_pair,
    tonemap,
    total_loss,
    train,
)
from util_loss_oracles import focal_freq_reference, gram_reference, l1_log_reference

IDENTITY_AUG = dict(scale_range=(1.0, 1.0), hue_range=(0.0, 0.0),
                    blur_range=(0.0, 0.0), noise_range=(0.0, 0.0))


def _dataset(h=16, w=16, n_dirs=2):
    dirs = [Direction(0.0, 0.0), Direction(45.0, 90.0), Direction(60.0, 200.0)]
    return render_synthetic_btf(lambertian_maps(h, w),
                                pair_product(dirs[:n_dirs], dirs[:n_dirs]))


def _single_pair_dataset(h=16, w=16):
    # one slice forces the input and target pair draws to agree
    pair = DirectionPair(Direction(30.0, 0.0), Direction(0.0, 0.0))
    return render_synthetic_btf(lambertian_maps(h, w), [pair])


# -- augmentation ----------------------------------------------------------------


def test_identity_pipeline_aligns_views():
    ds = _single_pair_dataset()
    cfg = AugmentationConfig(crop_size=16, **IDENTITY_AUG)
    pair = sample_training_pair(ds, cfg, np.random.default_rng(0))
    np.testing.assert_array_equal(pair.input_view, tonemap(pair.target_view))
    assert pair.target_pair == ds.pairs[0]


def test_geometric_alignment_survives_random_rescale():
    # photometric magnitudes zeroed, geometry still random
    ds = _single_pair_dataset(24, 24)
    cfg = AugmentationConfig(crop_size=16, scale_range=(0.7, 1.4),
                             hue_range=(0.0, 0.0), blur_range=(0.0, 0.0),
                             noise_range=(0.0, 0.0))
    for seed in range(5):
        pair = sample_training_pair(ds, cfg, np.random.default_rng(seed))
        np.testing.assert_array_equal(pair.input_view, tonemap(pair.target_view))


def test_sampling_is_deterministic():
    ds = _dataset()
    cfg = AugmentationConfig(crop_size=8)
    a = sample_training_pair(ds, cfg, np.random.default_rng(42))
    b = sample_training_pair(ds, cfg, np.random.default_rng(42))
    assert a.input_view.tobytes() == b.input_view.tobytes()
    assert a.target_view.tobytes() == b.target_view.tobytes()
    assert a.target_pair == b.target_pair


def test_full_hue_turn_matches_zero():
    ds = _dataset()
    base = dict(crop_size=8, blur_range=(0.0, 0.0), noise_range=(0.0, 0.0))
    a = sample_training_pair(ds, AugmentationConfig(hue_range=(0.0, 0.0), **base),
                             np.random.default_rng(3))
    b = sample_training_pair(ds, AugmentationConfig(hue_range=(360.0, 360.0), **base),
                             np.random.default_rng(3))
    np.testing.assert_allclose(a.input_view, b.input_view, atol=1e-5)


def test_hue_matrix_properties():
    for deg in (0.0, 77.0, 180.0, 301.5):
        r = hue_rotation_matrix(deg)
        np.testing.assert_allclose(r @ np.ones(3), np.ones(3), atol=1e-12)
        np.testing.assert_allclose(r.T @ r, np.eye(3), atol=1e-12)


def test_input_view_stays_in_unit_range():
    ds = _dataset()
    cfg = AugmentationConfig(crop_size=8)
    for seed in range(10):
        pair = sample_training_pair(ds, cfg, np.random.default_rng(seed))
        assert pair.input_view.min() >= 0.0
        assert pair.input_view.max() < 1.0


def test_crop_size_validation():
    with pytest.raises(ConfigError, match="stride"):
        AugmentationConfig(crop_size=12)
    with pytest.raises(ConfigError, match="scale_range"):
        AugmentationConfig(scale_range=(0.0, 1.0))
    ds = _dataset(16, 16)
    with pytest.raises(ConfigError, match="exceeds"):
        sample_training_pair(ds, AugmentationConfig(crop_size=24),
                             np.random.default_rng(0))


def test_crop_size_auto_rule():
    cfg = AugmentationConfig()
    assert resolve_crop_size(cfg, 32, 32) == 16   # int(32*0.7)=22 -> 16
    assert resolve_crop_size(cfg, 64, 64) == 40   # int(64*0.7)=44 -> 40
    assert resolve_crop_size(cfg, 200, 300) == 64
    with pytest.raises(ConfigError):
        resolve_crop_size(cfg, 8, 8)


def test_resample_scale_one_is_exact():
    img = np.random.default_rng(0).uniform(0, 4, (9, 7, 3)).astype(np.float32)
    np.testing.assert_array_equal(resample_bilinear_wrap(img, 1.0), img)


def test_resample_constant_stays_constant():
    img = np.full((8, 8, 3), 1.7, np.float32)
    for s in (0.7, 1.33):
        out = resample_bilinear_wrap(img, s)
        np.testing.assert_allclose(out, 1.7, rtol=1e-6)
        assert out.shape[0] == round(8 * s)


def test_crop_wrap_wraps_both_axes():
    img = np.arange(16, dtype=np.float32).reshape(4, 4, 1)
    out = crop_wrap(img, 3, 3, 2)
    np.testing.assert_array_equal(out[..., 0], [[15, 12], [3, 0]])


# -- losses ----------------------------------------------------------------------


def test_l1_log_zero_on_equal():
    x = np.random.default_rng(0).uniform(0, 5, (4, 4, 3)).astype(np.float32)
    assert float(loss_l1_log(x, x).data) == 0.0


def test_l1_log_single_pixel_unit_value():
    pred = np.full((1, 1, 1), np.e - 1.0, np.float32)
    target = np.zeros((1, 1, 1), np.float32)
    np.testing.assert_allclose(float(loss_l1_log(pred, target).data), 1.0, rtol=1e-6)


def test_l1_log_matches_scalar_loop():
    rng = np.random.default_rng(1)
    pred = rng.gamma(2.0, 2.0, (6, 7, 3)).astype(np.float32)
    target = rng.gamma(2.0, 2.0, (6, 7, 3)).astype(np.float32)
    got = float(loss_l1_log(pred, target).data)
    np.testing.assert_allclose(got, l1_log_reference(pred, target), rtol=1e-6)


def test_l1_log_clamps_negative_predictions():
    pred = np.full((2, 2, 3), -5.0, np.float32)   # below the -0.999 floor
    target = np.zeros((2, 2, 3), np.float32)
    got = float(loss_l1_log(pred, target).data)
    np.testing.assert_allclose(got, -np.log1p(-0.999), rtol=1e-5)


def test_gram_constant_channels():
    ones = ng.Tensor(np.ones((1, 1, 4, 2), np.float32))
    twos = ng.Tensor(np.full((1, 1, 4, 2), 2.0, np.float32))
    g1 = float(gram_matrix(ones).data[0, 0, 0])
    g2 = float(gram_matrix(twos).data[0, 0, 0])
    assert (g1, g2) == (1.0, 4.0)
    assert (g2 - g1) ** 2 == 9.0


def test_gram_matches_double_loop():
    f = np.random.default_rng(2).standard_normal((1, 5, 6, 4)).astype(np.float32)
    got = gram_matrix(ng.Tensor(f)).data[0]
    np.testing.assert_allclose(got, gram_reference(f[0]), atol=1e-5)


def test_style_zero_on_equal_and_positive_otherwise():
    rng = np.random.default_rng(3)
    a = rng.uniform(0, 1, (8, 8, 3)).astype(np.float32)
    b = rng.uniform(0, 1, (8, 8, 3)).astype(np.float32)
    assert float(loss_style(a, a).data) == 0.0
    assert float(loss_style(a, b).data) > 0.0


def test_focal_freq_zero_on_equal():
    x = np.random.default_rng(4).uniform(0, 2, (8, 8, 3)).astype(np.float32)
    assert float(loss_focal_freq(x, x).data) == 0.0


def test_focal_freq_dc_only_case():
    pred = np.ones((1, 1, 1), np.float32)
    target = np.zeros((1, 1, 1), np.float32)
    np.testing.assert_allclose(float(loss_focal_freq(pred, target).data), 1.0,
                               rtol=1e-6)


@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_focal_freq_matches_naive_dft(alpha):
    rng = np.random.default_rng(5)
    pred = rng.uniform(0, 2, (8, 8, 3)).astype(np.float32)
    target = rng.uniform(0, 2, (8, 8, 3)).astype(np.float32)
    got = float(loss_focal_freq(pred, target, alpha=alpha).data)
    want = focal_freq_reference(pred, target, alpha=alpha)
    np.testing.assert_allclose(got, want, rtol=1e-4)


def test_loss_weights_validation():
    with pytest.raises(ValidationError):
        LossWeights(0.0, 0.0, 0.0)
    with pytest.raises(ValidationError):
        LossWeights(l1=-1.0)


def test_total_loss_recombination():
    rng = np.random.default_rng(6)
    pred = rng.uniform(0, 2, (8, 8, 3)).astype(np.float32)
    target = rng.uniform(0, 2, (8, 8, 3)).astype(np.float32)
    w = LossWeights(1.0, 0.3, 0.2)
    r = total_loss(pred, target, w)
    assert abs(r.total - (1.0 * r.l1_log + 0.3 * r.style + 0.2 * r.freq)) < 1e-6
    assert r.l1_log >= 0 and r.style >= 0 and r.freq >= 0
    degenerate = total_loss(pred, target, LossWeights(2.0, 0.0, 0.0))
    np.testing.assert_allclose(degenerate.total, 2.0 * degenerate.l1_log, rtol=1e-6)
    equal = total_loss(target, target, w)
    assert (equal.total, equal.l1_log, equal.style, equal.freq) == (0, 0, 0, 0)


def test_total_loss_batch_order_invariant():
    rng = np.random.default_rng(7)
    pred = rng.uniform(0, 2, (3, 3, 8, 8)).astype(np.float32)
    target = rng.uniform(0, 2, (3, 3, 8, 8)).astype(np.float32)
    perm = [2, 0, 1]
    a = total_loss(ng.Tensor(pred), ng.Tensor(target))
    b = total_loss(ng.Tensor(pred[perm]), ng.Tensor(target[perm]))
    np.testing.assert_allclose(a.total, b.total, rtol=1e-5)


def test_losses_propagate_gradients():
    rng = np.random.default_rng(8)
    pred = ng.Tensor(rng.uniform(0, 2, (1, 3, 8, 8)).astype(np.float32),
                     requires_grad=True)
    target = ng.Tensor(rng.uniform(0, 2, (1, 3, 8, 8)).astype(np.float32))
    with ng.Tape() as tape:
        total, report = loss_terms(pred, target)
        ng.backward(total, tape)
    assert pred.grad is not None
    assert np.isfinite(pred.grad).all()
    assert np.abs(pred.grad).max() > 0
    assert report.total > 0


# -- training loop ---------------------------------------------------------------


def test_train_single_step_smoke(tmp_path):
    ds = _dataset(16, 16)
    cfg = TrainConfig(steps=1, batch_size=2, seed=0)
    res = train(ds, cfg, AugmentationConfig(crop_size=8), out_dir=tmp_path)
    assert len(res.reports) == 1
    assert np.isfinite(res.reports[0].total)
    assert (tmp_path / "ckpt_final.nbck").exists()
    _, _, meta = load_checkpoint(res.checkpoint_path)
    assert meta["step"] == 1
    rows = list(csv.reader(open(tmp_path / "loss.csv")))
    assert rows[0] == ["step", "total", "l1_log", "style", "freq", "wall_ms"]
    assert len(rows) == 2


def test_train_is_deterministic(tmp_path):
    ds = _dataset(16, 16)
    out = []
    for name in ("a", "b"):
        cfg = TrainConfig(steps=3, batch_size=2, seed=11, deterministic=True)
        res = train(ds, cfg, AugmentationConfig(crop_size=8),
                    out_dir=tmp_path / name)
        out.append(res)
    assert [r.total for r in out[0].reports] == [r.total for r in out[1].reports]
    assert (tmp_path / "a" / "ckpt_final.nbck").read_bytes() == \
           (tmp_path / "b" / "ckpt_final.nbck").read_bytes()
    assert (tmp_path / "a" / "loss.csv").read_bytes() == \
           (tmp_path / "b" / "loss.csv").read_bytes()


def test_deterministic_mode_zeroes_wall_time(tmp_path):
    ds = _dataset(16, 16)
    train(ds, TrainConfig(steps=2, batch_size=1, deterministic=True),
          AugmentationConfig(crop_size=8), out_dir=tmp_path)
    rows = list(csv.reader(open(tmp_path / "loss.csv")))[1:]
    assert all(row[-1] == "0.000" for row in rows)


def test_train_checkpoint_cadence(tmp_path):
    ds = _dataset(16, 16)
    cfg = TrainConfig(steps=4, batch_size=1, checkpoint_every=2)
    train(ds, cfg, AugmentationConfig(crop_size=8), out_dir=tmp_path)
    assert (tmp_path / "ckpt_000002.nbck").exists()
    assert not (tmp_path / "ckpt_000004.nbck").exists()  # final covers step 4
    assert (tmp_path / "ckpt_final.nbck").exists()


def test_train_aborts_on_nan_with_diagnostic():
    ds = _dataset(16, 16)
    rng = np.random.default_rng(0)
    renderer = RendererMlp(rng)
    renderer.out.weight.data[0, 0, 0, 0] = np.nan
    with pytest.raises(NumericsError, match=r"step 0"):
        train(ds, TrainConfig(steps=2, batch_size=1),
              AugmentationConfig(crop_size=8), renderer=renderer)


def test_train_loss_decreases_on_constant_target():
    ds = _dataset(8, 8, n_dirs=1)
    cfg = TrainConfig(steps=60, batch_size=2, seed=5)
    res = train(ds, cfg, AugmentationConfig(crop_size=8, scale_range=(1.0, 1.0)))
    first = np.mean([r.total for r in res.reports[:5]])
    last = np.mean([r.total for r in res.reports[-5:]])
    assert last < first


def test_train_config_validation():
    with pytest.raises(ConfigError):
        TrainConfig(steps=0)
    with pytest.raises(ConfigError):
        TrainConfig(batch_size=0)
