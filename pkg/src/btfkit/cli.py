"""Command-line pipeline: synthesize, train, propagate, render, evaluate.

One ``btfkit`` binary with subcommands.  Training settings come from a
key = value config file plus flag overrides (flags win); every command prints
its effective configuration on startup and writes a copy next to its outputs
so a run can be reproduced from the artifacts alone.

Exit codes: 0 ok, 2 usage or config error, 3 file-format error, 4 numeric
failure.  Failures print one machine-readable ``error: <Class>: <message>``
line on stderr.  NEUBTF_THREADS caps BLAS worker counts; --deterministic
forces single-threaded numerics so repeated runs produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np
from PIL import Image
from threadpoolctl import threadpool_limits

from .errors import (
    BtfkitError,
    ConfigError,
    DimensionError,
    DomainError,
    FormatError,
    NumericsError,
    PairLookupError,
    ValidationError,
)
from .evaluate import evaluate_full, pca_baseline, report_table, visualize_latents
from .model import (
    Autoencoder,
    AutoencoderConfig,
    RendererMlp,
    load_checkpoint,
    render_slice,
)
from .propagate import export_neural_btf, import_neural_btf, make_multires, propagate
from .store import (
    Direction,
    DirectionPair,
    hemisphere_grid,
    lambertian_maps,
    load_btf,
    load_guidance,
    pair_product,
    render_synthetic_btf,
    save_btf,
    save_image,
    sparse_directions_7,
    textured_maps,
)
from .training import AugmentationConfig, LossWeights, TrainConfig, tonemap, train

# Every run-config key with its default; the value's type drives coercion.
DEFAULTS: dict[str, object] = {
    "dataset": "",
    "out": "",
    "steps": 20000,
    "batch_size": 4,
    "lr": 1e-3,
    "lr_end": 1e-4,
    "seed": 0,
    "checkpoint_every": 5000,
    "deterministic": False,
    "crop_size": "auto",
    "stride": 8,
    "scale_min": 0.7,
    "scale_max": 1.4,
    "hue_min": 0.0,
    "hue_max": 360.0,
    "blur_min": 0.0,
    "blur_max": 1.5,
    "noise_min": 0.0,
    "noise_max": 0.02,
    "w_l1": 1.0,
    "w_style": 0.1,
    "w_freq": 0.1,
    "channels": 14,
    "widths": "16,32,64",
    "hidden": 32,
    "n_hidden": 3,
    "omega0": 30.0,
}

_MODEL_KEYS = ("channels", "widths", "hidden", "n_hidden", "omega0")


def _coerce(key: str, text: str, where: str = "") -> object:
    """Parse a config value using the type of its default."""
    default = DEFAULTS[key]
    prefix = f"{where}: " if where else ""
    if isinstance(default, bool):  # bool before int: bool is an int subclass
        low = text.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"{prefix}{key} expects a boolean, got {text!r}")
    if isinstance(default, int):
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"{prefix}{key} expects an integer, got {text!r}") from None
    if isinstance(default, float):
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"{prefix}{key} expects a number, got {text!r}") from None
    return text


def parse_config_file(path) -> dict[str, object]:
    """key = value lines; # starts a comment; unknown keys are rejected."""
    overrides: dict[str, object] = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = key.strip(), value.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        overrides[key] = _coerce(key, value, where=f"{path}:{lineno}")
    return overrides


def effective_config(args, mapped: tuple[str, ...]) -> dict[str, object]:
    """defaults, then the --config file, then flag overrides (flags win)."""
    cfg = dict(DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        cfg.update(parse_config_file(config_path))
    for key in mapped:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def config_echo(cfg: dict, command: str, args, mapped: tuple[str, ...]) -> str:
    """Full effective config as a reloadable config file; extra flags appear
    as comments so the file stays valid input for --config."""
    lines = [f"# btfkit {command} effective config"]
    lines += [f"{k} = {_fmt_value(v)}" for k, v in cfg.items()]
    for key, value in sorted(vars(args).items()):
        if key in ("func", "command") or key in mapped or value is None:
            continue
        lines.append(f"# arg.{key} = {_fmt_value(value)}")
    return "\n".join(lines) + "\n"


def _startup(args, mapped: tuple[str, ...], command: str) -> tuple[dict, str]:
    cfg = effective_config(args, mapped)
    echo = config_echo(cfg, command, args, mapped)
    print(echo, end="")
    return cfg, echo


def _write_echo(echo: str, out_path: Path, is_dir: bool) -> None:
    """Drop the effective config next to the outputs it produced."""
    target = out_path / "effective_config.txt" if is_dir else Path(f"{out_path}.config.txt")
    target.write_text(echo)


def _crop_size(cfg: dict) -> int | None:
    value = cfg["crop_size"]
    if isinstance(value, str):
        if value.lower() == "auto":
            return None
        try:
            return int(value)
        except ValueError:
            raise ConfigError(
                f"crop_size expects 'auto' or an integer, got {value!r}") from None
    return int(value)


def _widths(cfg: dict) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(cfg["widths"]).split(","))
    except ValueError:
        raise ConfigError(f"widths expects comma-separated integers, "
                          f"got {cfg['widths']!r}") from None


def _build_models(cfg: dict):
    """Fresh models for non-default dims; None keeps the library defaults so
    the CLI path stays byte-compatible with direct train() calls."""
    if all(cfg[k] == DEFAULTS[k] for k in _MODEL_KEYS):
        return None, None
    rng = np.random.default_rng(int(cfg["seed"]))
    ac = AutoencoderConfig(widths=_widths(cfg), depth=int(cfg["channels"]))
    autoencoder = Autoencoder(rng, ac)
    renderer = RendererMlp(rng, depth=int(cfg["channels"]), hidden=int(cfg["hidden"]),
                           n_hidden=int(cfg["n_hidden"]), omega0=float(cfg["omega0"]))
    return autoencoder, renderer


def _parse_direction(text: str, flag: str) -> Direction:
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) != 2:
            raise ValueError(f"expected two values, got {len(parts)}")
        return Direction(float(parts[0]), float(parts[1]))
    except (ValueError, BtfkitError) as e:
        raise ConfigError(f"{flag} expects 'theta,phi' with theta in [0,90) "
                          f"and phi in [0,360), got {text!r} ({e})") from None


def _parse_ranks(text: str) -> list[int]:
    try:
        ranks = [int(part) for part in text.split(",")]
    except ValueError:
        raise ConfigError(f"--pca-ranks expects comma-separated integers, "
                          f"got {text!r}") from None
    if not ranks or any(r < 1 for r in ranks):
        raise ConfigError(f"--pca-ranks must all be >= 1, got {text!r}")
    return ranks


# ---------------------------------------------------------------------------
# subcommands

_SYNTH_MAPPED = ("seed", "deterministic")


def cmd_synth(args) -> int:
    cfg, echo = _startup(args, _SYNTH_MAPPED, "synth")
    seed = int(cfg["seed"])
    if args.size < 1:
        raise ConfigError(f"--size must be >= 1, got {args.size}")
    if args.preset == "lambertian":
        maps = lambertian_maps(args.size, args.size)
    else:
        maps = textured_maps(args.size, args.size, seed=seed)
    if args.angles == "grid":
        # top-down camera against the default 24-direction light grid
        pairs = pair_product([Direction(0.0, 0.0)], hemisphere_grid())
    else:
        dirs = sparse_directions_7()
        pairs = pair_product(dirs, dirs)
    if args.intensity <= 0.0:
        raise ConfigError(f"--intensity must be positive, got {args.intensity}")
    dataset = render_synthetic_btf(maps, pairs, texel_size=args.texel_size,
                                   intensity=args.intensity)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    save_btf(dataset, out, float16=not args.float32)
    _write_echo(echo, out, is_dir=False)
    print(f"wrote {out}: {len(dataset.pairs)} pairs of "
          f"{dataset.height}x{dataset.width} texels")
    return 0


_TRAIN_MAPPED = ("dataset", "out", "steps", "seed", "checkpoint_every", "deterministic")


def cmd_train(args) -> int:
    cfg, echo = _startup(args, _TRAIN_MAPPED, "train")
    if not cfg["dataset"]:
        raise ConfigError("train needs a dataset: pass --dataset or set dataset=")
    if not cfg["out"]:
        raise ConfigError("train needs an output dir: pass --out or set out=")
    dataset = load_btf(cfg["dataset"])
    out_dir = Path(str(cfg["out"]))
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_echo(echo, out_dir, is_dir=True)
    train_config = TrainConfig(
        steps=int(cfg["steps"]), batch_size=int(cfg["batch_size"]),
        lr=float(cfg["lr"]), lr_end=float(cfg["lr_end"]), seed=int(cfg["seed"]),
        checkpoint_every=int(cfg["checkpoint_every"]),
        deterministic=bool(cfg["deterministic"]))
    augment = AugmentationConfig(
        crop_size=_crop_size(cfg), stride=int(cfg["stride"]),
        scale_range=(float(cfg["scale_min"]), float(cfg["scale_max"])),
        hue_range=(float(cfg["hue_min"]), float(cfg["hue_max"])),
        blur_range=(float(cfg["blur_min"]), float(cfg["blur_max"])),
        noise_range=(float(cfg["noise_min"]), float(cfg["noise_max"])))
    weights = LossWeights(l1=float(cfg["w_l1"]), style=float(cfg["w_style"]),
                          freq=float(cfg["w_freq"]))
    autoencoder, renderer = _build_models(cfg)
    result = train(dataset, train_config, augment, weights, out_dir=out_dir,
                   autoencoder=autoencoder, renderer=renderer)
    final = result.reports[-1]
    print(f"finished {train_config.steps} steps: total {final.total:.6g} "
          f"(l1_log {final.l1_log:.6g}, style {final.style:.6g}, "
          f"freq {final.freq:.6g})")
    print(f"checkpoint: {result.checkpoint_path}")
    return 0


_PROPAGATE_MAPPED = ("seed", "deterministic")


def cmd_propagate(args) -> int:
    cfg, echo = _startup(args, _PROPAGATE_MAPPED, "propagate")
    del cfg
    autoencoder, renderer, _ = load_checkpoint(args.ckpt)
    guidance = load_guidance(args.guidance)
    if args.scale == 1.0:
        bundle = propagate((autoencoder, renderer), guidance,
                           texel_size=args.texel_size)
    else:
        bundle = make_multires((autoencoder, renderer), guidance, args.scale)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    export_neural_btf(bundle, out, float16=not args.float32)
    _write_echo(echo, out, is_dir=False)
    tex = bundle.texture
    print(f"wrote {out}: {tex.height}x{tex.width}x{tex.depth} texture, "
          f"texel size {bundle.texel_size:g}")
    return 0


_RENDER_MAPPED = ("seed", "deterministic")


def cmd_render(args) -> int:
    cfg, echo = _startup(args, _RENDER_MAPPED, "render")
    del cfg
    bundle = import_neural_btf(args.nbtx)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_echo(echo, out_dir, is_dir=True)

    jobs: list[tuple[str, DirectionPair]] = []
    if args.sweep is not None:
        if args.sweep < 1:
            raise ConfigError(f"--sweep must be >= 1, got {args.sweep}")
        cam = _parse_direction(args.cam, "--cam") if args.cam else Direction(0.0, 0.0)
        base = _parse_direction(args.light, "--light") if args.light else Direction(45.0, 0.0)
        for k in range(args.sweep):
            phi = (base.phi + 360.0 * k / args.sweep) % 360.0
            jobs.append((f"sweep_{k:03d}",
                         DirectionPair(cam, Direction(base.theta, phi))))
    else:
        if not args.cam or not args.light:
            raise ConfigError("render needs --cam and --light, or --sweep N")
        cam = _parse_direction(args.cam, "--cam")
        light = _parse_direction(args.light, "--light")
        name = (f"slice_cam{cam.theta:g}-{cam.phi:g}"
                f"_light{light.theta:g}-{light.phi:g}")
        jobs.append((name, DirectionPair(cam, light)))

    for name, pair in jobs:
        pixels = render_slice(bundle.renderer, bundle.texture, pair).pixels
        if args.format in ("png", "both"):
            save_image(tonemap(pixels), out_dir / f"{name}.png")
        if args.format in ("pfm", "both"):
            save_image(pixels, out_dir / f"{name}.pfm")
    print(f"wrote {len(jobs)} slice(s) to {out_dir}")
    return 0


_EVAL_MAPPED = ("seed", "deterministic")


def cmd_eval(args) -> int:
    cfg, echo = _startup(args, _EVAL_MAPPED, "eval")
    del cfg
    autoencoder, renderer, _ = load_checkpoint(args.ckpt)
    dataset = load_btf(args.btf)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_echo(echo, out_dir, is_dir=True)
    guidance = load_guidance(args.guidance).pixels if args.guidance else None
    report = evaluate_full((autoencoder, renderer), dataset, guidance=guidance,
                           out_dir=out_dir)
    print(report_table(report))
    ranks = _parse_ranks(args.pca_ranks)
    with open(out_dir / "pca.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(("rank", "psnr_db", "bytes"))
        for rank in ranks:
            db, nbytes = pca_baseline(dataset, rank)
            writer.writerow((rank, f"{db:.8g}", nbytes))
            print(f"pca rank {rank}: {db:.2f} dB, {nbytes} bytes")
    return 0


_LATENTS_MAPPED = ("seed", "deterministic")


def cmd_latents(args) -> int:
    cfg, echo = _startup(args, _LATENTS_MAPPED, "latents")
    del cfg
    bundle = import_neural_btf(args.nbtx)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_echo(echo, out_dir, is_dir=True)
    channels = visualize_latents(bundle.texture)
    for i, channel in enumerate(channels):
        # already a display mapping in (0,1): write the bytes directly
        gray = np.round(channel * 255.0).astype(np.uint8)
        rgb = np.repeat(gray[:, :, None], 3, axis=2)
        Image.fromarray(rgb, mode="RGB").save(out_dir / f"channel_{i:02d}.png")
    print(f"wrote {len(channels)} channel images to {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="btfkit",
        description="conditioned neural BTFs: synthesize, train, propagate, "
                    "render, evaluate")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        sp.add_argument("--deterministic", action="store_true", default=None,
                        help="single-threaded numerics, byte-stable outputs")
        sp.add_argument("--config", default=None,
                        help="key = value config file (flags win)")

    sp = sub.add_parser("synth", help="render a synthetic SVBRDF into an NBTF dataset")
    sp.add_argument("--preset", choices=("lambertian", "ggx-textured"), required=True)
    sp.add_argument("--size", type=int, default=32, help="texels per side")
    sp.add_argument("--angles", choices=("grid", "sparse7"), default="grid",
                    help="grid: top-down camera x 24 grid lights (24 pairs); "
                         "sparse7: 7x7 camera/light product (49 pairs)")
    sp.add_argument("--out", required=True, help="output .nbtf path")
    sp.add_argument("--texel-size", type=float, default=1.0, help="mm per texel")
    sp.add_argument("--intensity", type=float, default=WHITE_EXPOSURE,
                    help="light exposure factor; the default pi renders a white "
                         "diffuse texel at normal incidence as 1.0")
    sp.add_argument("--float32", action="store_true",
                    help="float32 payload (default float16)")
    common(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("train", help="fit autoencoder + renderer to an NBTF dataset")
    sp.add_argument("--dataset", default=None, help="input .nbtf path")
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("--checkpoint-every", dest="checkpoint_every", type=int,
                    default=None)
    common(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("propagate",
                        help="encode a guidance image into a deployable NBTX bundle")
    sp.add_argument("--ckpt", required=True, help="trained .nbck checkpoint")
    sp.add_argument("--guidance", required=True, help="guidance .png or .pfm")
    sp.add_argument("--scale", type=float, default=1.0,
                    help="relative output resolution; 1.0 keeps guidance size")
    sp.add_argument("--out", required=True, help="output .nbtx path")
    sp.add_argument("--texel-size", type=float, default=1.0, help="mm per texel")
    sp.add_argument("--float32", action="store_true",
                    help="float32 texture payload (default float16)")
    common(sp)
    sp.set_defaults(func=cmd_propagate)

    sp = sub.add_parser("render", help="render BTF slices from an NBTX bundle")
    sp.add_argument("--nbtx", required=True)
    sp.add_argument("--cam", default=None, help="camera 'theta,phi' in degrees")
    sp.add_argument("--light", default=None, help="light 'theta,phi' in degrees")
    sp.add_argument("--sweep", type=int, default=None,
                    help="N-frame light turntable instead of a single pair")
    sp.add_argument("--format", choices=("png", "pfm", "both"), default="png",
                    help="png is tone mapped, pfm is linear HDR")
    sp.add_argument("--out", required=True, help="output directory")
    common(sp)
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("eval", help="score a checkpoint against a BTF dataset")
    sp.add_argument("--ckpt", required=True, help="trained .nbck checkpoint")
    sp.add_argument("--btf", required=True, help="reference .nbtf dataset")
    sp.add_argument("--guidance", default=None,
                    help="guidance image (default: tone-mapped first slice)")
    sp.add_argument("--pca-ranks", dest="pca_ranks", default="1,2,4,8",
                    help="comma-separated PCA baseline ranks")
    sp.add_argument("--out", required=True, help="output directory")
    common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("latents", help="write latent channels as grayscale PNGs")
    sp.add_argument("--nbtx", required=True)
    sp.add_argument("--out", required=True, help="output directory")
    common(sp)
    sp.set_defaults(func=cmd_latents)

    return parser


_EXIT_CODES: tuple[tuple[type, int], ...] = (
    (ConfigError, 2),
    (DimensionError, 2),
    (FormatError, 3),
    (ValidationError, 3),
    (PairLookupError, 3),
    (NumericsError, 4),
    (DomainError, 4),
)


def _exit_code(err: BtfkitError) -> int:
    for cls, code in _EXIT_CODES:
        if isinstance(err, cls):
            return code
    return 2


def _thread_limit(args) -> int | None:
    if getattr(args, "deterministic", None):
        return 1
    raw = os.environ.get("NEUBTF_THREADS", "").strip()
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"NEUBTF_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"NEUBTF_THREADS must be >= 1, got {n}")
    return n


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with threadpool_limits(limits=_thread_limit(args)):
            return args.func(args)
    except BtfkitError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return _exit_code(err)
    except OSError as err:
        # bad paths from the command line read as usage problems
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
