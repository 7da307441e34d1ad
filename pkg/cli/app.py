"""
Command-line entry point: ``python -m cli <command> [options]``.

Commands: train, eval, augment-preview, export-centers, sweep. Each accepts
``--config`` (TOML run config), ``--profile``, ``--seed`` and ``--out``; sweep
needs a config with a ``[sweep]`` table.
"""
import argparse
import logging
from pathlib import Path
from typing import List, Optional

from pipeline.dao.run_dao import CONFIG_FILE, RunDAO
from pipeline.models.model import RunConfig
from pipeline.service.centers import cmd_export_centers
from pipeline.service.evaluation import cmd_eval
from pipeline.service.preview import cmd_augment_preview
from pipeline.service.run_config import load_run_config
from pipeline.service.sweep import cmd_sweep
from pipeline.service.trainer import cmd_train
from utils import config as settings
from utils.exceptions import ConfigError, PupsError

logger = logging.getLogger(__name__)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML run config")
    parser.add_argument("--profile", help="profile defaults (toy or full)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pups", description="Point-level panoptic segmentation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train a network on synthetic scenes")
    _common(train)

    ev = sub.add_parser("eval", help="evaluate a checkpoint or a pair of .label files")
    _common(ev)
    ev.add_argument("--checkpoint")
    ev.add_argument("--pred-labels")
    ev.add_argument("--gt-labels")
    ev.add_argument("--scans", help="directory of .bin/.label pairs")
    ev.add_argument("--split", default="val", choices=["train", "val"])
    ev.add_argument("--scenes", type=int, help="number of generated scenes")
    ev.add_argument("--min-points", type=int, default=1)

    preview = sub.add_parser("augment-preview", help="export CutMix-augmented scenes")
    _common(preview)
    preview.add_argument("--n", type=int, default=10)
    preview.add_argument("--db-scenes", type=int, default=100)

    centers = sub.add_parser("export-centers", help="per-classifier prediction centres as CSV")
    _common(centers)
    centers.add_argument("--checkpoint")
    centers.add_argument("--scenes", type=int, default=200)
    centers.add_argument("--class", dest="class_name", required=True)
    centers.add_argument("--window", type=float, default=100.0)

    sweep = sub.add_parser("sweep", help="train once per value of one config key and tabulate val PQ")
    _common(sweep)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """An explicit --config wins; otherwise eval-style commands reuse the config stored beside the checkpoint."""
    checkpoint = getattr(args, "checkpoint", None)
    if args.config is None and args.profile is None and checkpoint is not None:
        stored = Path(checkpoint).parent / CONFIG_FILE
        if stored.exists():
            cfg = RunDAO.read_config(stored)
            updates = {}
            if args.seed is not None:
                updates["seed"] = args.seed
            if args.out is not None:
                updates["out_dir"] = args.out
            logger.info(f"Using run config stored at {stored}")
            return cfg.model_copy(update=updates)
    return load_run_config(args.config, profile=args.profile, seed=args.seed, out_dir=args.out)


def run(args: argparse.Namespace) -> None:
    if args.command == "sweep":
        if args.config is None:
            raise ConfigError("sweep needs --config with a [sweep] table")
        frame, path = cmd_sweep(args.config, profile=args.profile, seed=args.seed, out_dir=args.out)
        print(frame.to_string(index=False))
        print(f"-> {path}")
        return
    cfg = resolve_config(args)
    if args.command == "train":
        result = cmd_train(cfg)
        print(f"checkpoint: {result.checkpoint}")
        print(f"metrics: {result.metrics}")
    elif args.command == "eval":
        report, path = cmd_eval(
            cfg,
            checkpoint=args.checkpoint,
            pred_labels=args.pred_labels,
            gt_labels=args.gt_labels,
            scans=args.scans,
            split=args.split,
            scenes=args.scenes,
            min_points=args.min_points,
        )
        print(f"PQ {100 * report.pq:.1f}  SQ {100 * report.sq:.1f}  RQ {100 * report.rq:.1f}  -> {path}")
    elif args.command == "augment-preview":
        summary, path = cmd_augment_preview(cfg, args.n, args.db_scenes)
        print(f"placed {summary.placed}/{summary.requested}, context violations {summary.context_violations} -> {path}")
    elif args.command == "export-centers":
        paths = cmd_export_centers(cfg, args.class_name, args.scenes, args.checkpoint, args.window)
        print(f"{len(paths)} files -> {paths[0].parent if paths else cfg.out_dir}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        run(args)
    except (PupsError, FileNotFoundError) as exc:
        logger.error(f"{args.command} failed: {exc}")
        return 1
    return 0
