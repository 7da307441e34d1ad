import logging
from pathlib import Path
from typing import Tuple

import numpy as np

from cutmix.models.model import MixSummary
from cutmix.service.instance_db import build_db
from cutmix.service.mixer import CutMixer
from scenes.dao.kitti_dao import KittiDAO
from ..models.model import RunConfig
from .data import make_scenes, run_context, split_seed

logger = logging.getLogger(__name__)

SUMMARY_FILE = "mix_summary.txt"


def format_summary(summary: MixSummary, mode: str) -> str:
    lines = [
        f"mode: {mode}",
        f"requested: {summary.requested}",
        f"placed: {summary.placed}",
        f"skipped: {summary.skipped}",
        f"context_violations: {summary.context_violations}",
        f"removed_points: {summary.removed_points}",
        f"removed_groups: {summary.removed_groups}",
    ]
    lines += [f"placed_class_{cls}: {n}" for cls, n in sorted(summary.placed_by_class.items())]
    return "\n".join(lines) + "\n"


def cmd_augment_preview(cfg: RunConfig, n: int, db_scenes: int = 100) -> Tuple[MixSummary, Path]:
    """Mix ``n`` fresh scenes with instances cut from ``db_scenes`` training scenes and export them as .bin/.label pairs."""
    taxonomy, scene_cfg = run_context(cfg)
    out = Path(cfg.out_dir) / "preview"
    out.mkdir(parents=True, exist_ok=True)
    policy = cfg.cutmix.policy()

    summary = MixSummary()
    if n > 0:
        corpus = make_scenes(cfg, "train", db_scenes, context=(taxonomy, scene_cfg))
        mixer = CutMixer(build_db(corpus, taxonomy), policy, taxonomy)
        rng = np.random.default_rng(split_seed(cfg, "preview") + 1)
        for index, scene in enumerate(make_scenes(cfg, "preview", n, context=(taxonomy, scene_cfg))):
            pc, gt, part = mixer.mix(scene, rng)
            KittiDAO.write_scan(out, f"{index:06d}", pc, gt, taxonomy)
            summary = summary.merge(part)

    path = out / SUMMARY_FILE
    path.write_text(format_summary(summary, policy.mode.value), encoding="utf-8")
    logger.info(
        f"Preview: {summary.placed} placed, {summary.skipped} skipped, "
        f"{summary.context_violations} context violations"
    )
    return summary, path
