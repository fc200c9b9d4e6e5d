"""Command-line entry point: synth, inspect, train, eval, sweep.

Tables go to stdout as CSV; files (datasets, checkpoints, figures) go to
the directory given by --out. Exit status is 0 on success, 2 for
parameter-domain errors and 1 for any other failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..cnn import checkpoint
from ..cnn.network import evaluate, predict
from ..cnn.optim import TrainConfig
from ..errors import ParameterError
from ..synth import synthesize, GestureParams
from .dataset import build_dataset, load_dataset, save_dataset, tf_maps
from .experiment import CLASS_NAMES, network_for, run_experiment, sweep, sweep_csv
from .export import export_heatmap
from .metrics import confusion_csv, confusion_matrix

log = logging.getLogger("radargest")


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def dims(text: str) -> tuple[int, int]:
    try:
        rows, cols = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROWSxCOLS, got {text!r}") from None
    return rows, cols


def seed_list(text: str) -> list[int]:
    """'5' means seeds 0..4; '3,7,11' lists them explicitly."""
    try:
        parts = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a count or comma-separated seeds, got {text!r}") from None
    if len(parts) == 1 and "," not in text:
        return list(range(parts[0]))
    return parts


def add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--profile", choices=["desk", "paper"], default="desk")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--weight-decay", type=float, default=0.0005)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--init", choices=["gaussian", "uniform"], default="uniform")
    p.add_argument("--seed", type=int, default=0)


def train_config(args) -> TrainConfig:
    cfg = TrainConfig(
        lr0=args.lr,
        momentum=args.momentum,
        weight_decay=args.weight_decay,
        max_epochs=args.epochs,
        batch_size=args.batch,
        seed=args.seed,
        init_scheme=args.init,
    )
    cfg.validate()
    return cfg


def cmd_synth(args) -> None:
    ds = build_dataset(
        args.per_class,
        args.distances,
        args.scales,
        args.snr_db,
        args.tf,
        args.dims,
        args.seed,
        classes=args.classes.split(",") if args.classes else None,
        train_fraction=args.train_fraction,
        range_scaled_snr=not args.fixed_snr,
    )
    save_dataset(ds, args.out)
    print("key,value")
    print(f"samples,{len(ds)}")
    print(f"train,{len(ds.train_index)}")
    print(f"test,{len(ds.test_index)}")
    print(f"shape,{'x'.join(str(v) for v in ds.input_shape)}")
    print(f"out,{args.out}")


def cmd_inspect(args) -> None:
    from .plots import heatmap_plot

    ds = load_dataset(args.data)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print("index,label,receiver,file")
    for i in args.index:
        if not 0 <= i < len(ds):
            raise ParameterError(f"sample index {i} out of range 0..{len(ds) - 1}")
        meta = ds.meta[i]
        # regenerate the full-resolution maps from the stored seeds
        sig = synthesize(
            GestureParams.from_dict(meta["params"]), snr_db=meta["snr_db"], noise_seed=meta["noise_seed"]
        )
        maps = tf_maps(sig, ds.config.tf_method, ds.features)
        label = CLASS_NAMES[ds.labels[i]]
        for k, m in enumerate(maps, start=1):
            path = export_heatmap(m, out / f"sample{i:05d}_rx{k}.{args.format}")
            print(f"{i},{label},{k},{path}")
        png = out / f"sample{i:05d}.png"
        heatmap_plot(maps, png, [f"{label} RX{k}" for k in (1, 2)])
        print(f"{i},{label},both,{png}")


def cmd_train(args) -> None:
    ds = load_dataset(args.data)
    res = run_experiment(ds, args.profile, train_config(args), args.out)
    sys.stdout.write(res.metrics.to_csv())
    print(f"# best_epoch={res.metrics.best_epoch} stop={res.metrics.stop_reason} "
          f"test_accuracy={res.metrics.final_accuracy:.4f}")
    if res.metrics.single_class_validation:
        print("# warning: validation split holds a single class")


def cmd_eval(args) -> None:
    ds = load_dataset(args.data)
    state, extra = checkpoint.load(args.checkpoint)
    expected = network_for(ds, extra.get("profile", "desk")) if "profile" in extra else None
    if expected is not None and expected.to_dict() != state.spec.to_dict():
        raise ParameterError("checkpoint network does not fit this dataset")
    norm = extra.get("normalization") or ds.normalization
    index = {"test": ds.test_index, "train": ds.train_index, "all": np.arange(len(ds))}[args.split]
    x = (ds.x[index].astype(float) - norm["mean"]) / norm["std"]
    y = ds.labels[index]
    loss, acc = evaluate(state, x, y)
    pred, _ = predict(state, x)
    cm = confusion_matrix(y, pred, state.spec.n_classes)
    sys.stdout.write(confusion_csv(cm, CLASS_NAMES))
    print(f"# split={args.split} samples={len(y)} loss={loss:.6f} accuracy={acc:.4f}")
    if args.out:
        from .plots import confusion_plot

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        confusion_plot(cm, CLASS_NAMES, out / "confusion.png")


def cmd_sweep(args) -> None:
    from .plots import sweep_plot

    cfg = train_config(args)
    rows = sweep(
        args.axis,
        args.values,
        args.fixed,
        args.seeds,
        per_class=args.per_class,
        snr_db=args.snr_db,
        tf_method=args.tf,
        input_dims=args.dims,
        profile=args.profile,
        config=cfg,
    )
    text = sweep_csv(rows)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"sweep_{args.axis}.csv").write_text(text)
        sweep_plot(rows, args.axis, out / f"sweep_{args.axis}.png")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radargest", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="build a synthetic dataset")
    p.add_argument("--classes", default=None, help="comma-separated gesture names (default: all four)")
    p.add_argument("--per-class", type=int, default=25)
    p.add_argument("--distances", type=float_list, default=[0.2])
    p.add_argument("--scales", type=float_list, default=[0.2])
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--fixed-snr", action="store_true", help="same SNR at every distance")
    p.add_argument("--tf", choices=["stft", "cwt"], default="stft")
    p.add_argument("--dims", type=dims, default=(64, 64))
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("inspect", help="export heatmaps of chosen samples")
    p.add_argument("--data", required=True)
    p.add_argument("--index", type=int, nargs="+", default=[0])
    p.add_argument("--format", choices=["pgm", "csv"], default="pgm")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("train", help="train a network on a dataset")
    p.add_argument("--data", required=True)
    add_train_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", choices=["test", "train", "all"], default="test")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="distance or scale sweep over seeds")
    p.add_argument("--axis", choices=["distance", "scale"], required=True)
    p.add_argument("--values", type=float_list, required=True)
    p.add_argument("--fixed", type=float, default=0.2, help="scale for a distance sweep, distance for a scale sweep")
    p.add_argument("--seeds", type=seed_list, default=list(range(5)))
    p.add_argument("--per-class", type=int, default=50)
    p.add_argument("--snr-db", type=float, default=30.0)
    p.add_argument("--tf", choices=["stft", "cwt"], default="stft")
    p.add_argument("--dims", type=dims, default=(64, 64))
    add_train_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0
