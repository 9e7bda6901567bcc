"""
Command-line front end of the mix-and-match toolkit.

    mixmatch gen-data                      write D1/D2/D3 dataset files
    mixmatch train [--train_<field> ...]   train the graph on D1 and D2, save checkpoints
    mixmatch eval --experiment zero_pair   train/evaluate an experiment and write its report
    mixmatch compose --path D S            translate D3 with saved checkpoints
    mixmatch sweep-alpha                   fused (RGB, depth) -> S mIoU over alpha, CSV + SVG
    mixmatch gradcheck                     gradient fidelity table
    mixmatch plot curve.csv                render a sweep CSV to SVG
"""

import argparse
import ast
import logging
import sys
from dataclasses import fields, is_dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Type, Union

import numpy as np

from evaluation.config import (CHECKPOINT_DIR, DATASET_FILES, DEFAULT_OUT_DIR, EXPERIMENTS, GRADCHECK_FILE,
                               PLOT_FILE, PREDICTIONS_FILE, SWEEP_FILE, TRAIN_REPORT_FILE)
from evaluation.experiments import ExperimentData, run_experiment
from evaluation.gradsuite import run_grad_suite
from evaluation.plot import emit_plot
from evaluation.settings import RunConfig, apply_seed, check_run_config, load_run_config
from evaluation.sweep import alpha_sweep, save_sweep
from scenes import make_eval_triplets, make_splits, load_dataset, save_dataset
from tensorcore import ConfigError, MixMatchError
from translation import TrainConfig, build_mixmatch_graph, compose_cascade, load_graph, save_graph, train
from translation.config import RGB, DEPTH, SEGMENTATION

logger = logging.getLogger("mixmatch")

MODALITY_FIELDS = {RGB: "rgb", DEPTH: "depth", SEGMENTATION: "seg"}


def add_dataclass_to_group(parser: argparse.ArgumentParser, config_class: Type, group_name: str, prefix: str = ""):
    """
    One flag per scalar field of config_class. Flags default to "not given" so
    that only the fields passed on the command line override the config file.
    """
    group = parser.add_argument_group(group_name)
    for field in fields(config_class):
        arg_name = f"--{prefix}{field.name}"
        arg_type = field.type
        if hasattr(arg_type, '__origin__') and arg_type.__origin__ is Union:
            arg_type = next(t for t in arg_type.__args__ if t is not type(None))
        if is_dataclass(arg_type) or not field.init:
            continue

        if isinstance(arg_type, type) and issubclass(arg_type, Enum):
            group.add_argument(arg_name, type=str, choices=[e.name for e in arg_type], default=argparse.SUPPRESS)
        elif arg_type == bool:
            group.add_argument(arg_name, type=str, choices=["true", "false"], default=argparse.SUPPRESS)
        elif arg_type in [int, float, str]:
            group.add_argument(arg_name, type=arg_type, default=argparse.SUPPRESS)
        else:
            group.add_argument(arg_name, type=ast.literal_eval, default=argparse.SUPPRESS)


def parse_args_to_dataclass(args: argparse.Namespace, config_class: Type, prefix: str = "", base=None):
    """Instance of config_class from base (or the defaults) with the flags that were given applied."""
    base = config_class() if base is None else base
    hints = {f.name: f.type for f in fields(config_class)}
    kwargs = {}
    for name, field_type in hints.items():
        arg_name = f"{prefix}{name}"
        if not hasattr(args, arg_name):
            continue
        val = getattr(args, arg_name)
        if field_type == bool:
            val = str(val).lower() == "true"
        current = getattr(base, name)
        if isinstance(current, Enum):
            val = current.__class__[val]
        kwargs[name] = val
    return replace(base, **kwargs)


def _out_dir(args) -> Path:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def load_or_generate(cfg: RunConfig, out_dir: Path) -> ExperimentData:
    """D1/D2/D3 from the dataset files in out_dir when all exist, otherwise freshly generated."""
    paths = [out_dir / DATASET_FILES[k] for k in ("D1", "D2", "D3")]
    if all(p.exists() for p in paths):
        d1, d2, d3 = (load_dataset(p) for p in paths)
        if d1.spec != cfg.split:
            logger.warning("dataset files in %s were generated with %s, config asks for %s", out_dir, d1.spec,
                           cfg.split)
        return ExperimentData(d1, d2, d3, make_eval_triplets(d3.spec))
    return ExperimentData.generate(cfg)


def cmd_gen_data(cfg: RunConfig, args) -> int:
    out_dir = _out_dir(args)
    for split in make_splits(cfg.split):
        save_dataset(split, out_dir / DATASET_FILES[split.name])
    return 0


def cmd_train(cfg: RunConfig, args) -> int:
    train_cfg = parse_args_to_dataclass(args, TrainConfig, prefix="train_", base=cfg.train)
    cfg = replace(cfg, train=train_cfg)
    check_run_config(cfg)
    out_dir = _out_dir(args)
    data = load_or_generate(cfg, out_dir)
    graph = build_mixmatch_graph(cfg.arch, cfg.split.num_classes, train_cfg.side_info_mode, train_cfg.seed,
                                 autoencoders=train_cfg.autoencoders)
    report = train(graph, data.d1, data.d2, train_cfg)
    save_graph(graph, out_dir / CHECKPOINT_DIR)
    report.save_csv(out_dir / TRAIN_REPORT_FILE)
    logger.info("saved checkpoints to %s", out_dir / CHECKPOINT_DIR)
    return 0


def cmd_eval(cfg: RunConfig, args) -> int:
    out_dir = _out_dir(args)
    report = run_experiment(args.experiment, cfg, load_or_generate(cfg, out_dir), out_dir / args.experiment)
    for entry in report.medians:
        scores = ", ".join(f"{k} {v:.4f}" for k, v in entry.items() if k not in ("variant", "translation"))
        print(f"{entry['variant']:>8s}  {entry['translation']:<9s} {scores}")
    return 0


def _checkpoint_dir(args) -> Path:
    return Path(args.checkpoint) if args.checkpoint else Path(args.out_dir) / CHECKPOINT_DIR


def cmd_compose(cfg: RunConfig, args) -> int:
    graph = load_graph(_checkpoint_dir(args))
    translator = compose_cascade(graph, args.path)
    source = load_dataset(args.input) if args.input else make_eval_triplets(cfg.split)
    field = MODALITY_FIELDS.get(args.path[0])
    if field not in source.FIELDS:
        raise ConfigError(f"input split {source.name} has no '{field}' field for source modality {args.path[0]}")
    pred = translator.predict(getattr(source, field))
    output = Path(args.output) if args.output else _out_dir(args) / PREDICTIONS_FILE
    np.savez_compressed(output, pred=pred, seeds=source.seeds, path=np.array(args.path))
    logger.info("wrote %s predictions for %d scenes to %s", "->".join(args.path), len(source), output)
    return 0


def cmd_sweep_alpha(cfg: RunConfig, args) -> int:
    out_dir = _out_dir(args)
    graph = load_graph(_checkpoint_dir(args))
    curve = alpha_sweep(graph, make_eval_triplets(cfg.split), cfg.alphas)
    save_sweep(curve, out_dir / SWEEP_FILE)
    emit_plot(out_dir / SWEEP_FILE, out_dir / PLOT_FILE)
    return 0


def cmd_gradcheck(cfg: RunConfig, args) -> int:
    table = run_grad_suite(seed=cfg.train.seed)
    print(table.to_string(index=False, formatters={"max_rel_error": "{:.3e}".format}))
    table.to_csv(_out_dir(args) / GRADCHECK_FILE, index=False)
    failed = table[~table["passed"]]
    if len(failed):
        logger.error("gradient check failed for %s", list(failed["case"]))
        return 1
    return 0


def cmd_plot(cfg: RunConfig, args) -> int:
    output = Path(args.output) if args.output else Path(args.curve_csv).with_suffix(".svg")
    emit_plot(args.curve_csv, output)
    logger.info("wrote %s", output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    description = "Train and evaluate mix-and-match translation networks on synthetic RGB/depth/segmentation scenes."
    parser = argparse.ArgumentParser(prog="mixmatch", description=description)
    parser.add_argument("--config", default=None, help="YAML run configuration (default: built-in desk settings)")
    parser.add_argument("--seed", type=int, default=None, help="training seed, replaces the configured seed list")
    parser.add_argument("--out-dir", dest="out_dir", default=DEFAULT_OUT_DIR,
                        help=f"directory for datasets, checkpoints and reports (default {DEFAULT_OUT_DIR})")
    parser.add_argument("--log-level", dest="log_level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("gen-data", help="generate the D1/D2/D3 dataset files").set_defaults(handler=cmd_gen_data)

    train_parser = sub.add_parser("train", help="train the translation graph")
    add_dataclass_to_group(train_parser, TrainConfig, "Training Settings", prefix="train_")
    train_parser.set_defaults(handler=cmd_train)

    eval_parser = sub.add_parser("eval", help="run an experiment and write its report")
    eval_parser.add_argument("--experiment", choices=list(EXPERIMENTS), default="zero_pair")
    eval_parser.set_defaults(handler=cmd_eval)

    compose_parser = sub.add_parser("compose", help="translate scenes with saved checkpoints")
    compose_parser.add_argument("--path", nargs="+", required=True, choices=list(MODALITY_FIELDS),
                                help="modalities to pass through, e.g. D S or D R S")
    compose_parser.add_argument("--checkpoint", default=None, help="checkpoint directory (default OUT_DIR/checkpoints)")
    compose_parser.add_argument("--input", default=None, help="dataset file to translate (default: D3 triplets)")
    compose_parser.add_argument("-o", "--output", default=None, help="output .npz (default OUT_DIR/predictions.npz)")
    compose_parser.set_defaults(handler=cmd_compose)

    sweep_parser = sub.add_parser("sweep-alpha", help="fused (RGB, depth) -> S mIoU over the fusion weight")
    sweep_parser.add_argument("--checkpoint", default=None, help="checkpoint directory (default OUT_DIR/checkpoints)")
    sweep_parser.set_defaults(handler=cmd_sweep_alpha)

    gradcheck_parser = sub.add_parser("gradcheck", help="gradient fidelity table, saved under --out-dir")
    gradcheck_parser.set_defaults(handler=cmd_gradcheck)

    plot_parser = sub.add_parser("plot", help="render an alpha sweep CSV to SVG")
    plot_parser.add_argument("curve_csv")
    plot_parser.add_argument("-o", "--output", default=None, help="SVG file (default: CSV name with .svg)")
    plot_parser.set_defaults(handler=cmd_plot)
    return parser


def main():
    args = build_parser().parse_args()
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        cfg = apply_seed(load_run_config(args.config), args.seed)
        code = args.handler(cfg, args)
    except MixMatchError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        sys.exit(exc.exit_code)
    sys.exit(code)


if __name__ == "__main__":
    main()
