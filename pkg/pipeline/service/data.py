"""Scene corpora of a run. Each split draws from its own seed range, so splits never share a scene."""
import logging
from typing import List, Optional, Tuple

from scenes.dao.config_dao import load_scene_config, load_taxonomy
from scenes.models.model import ClassTaxonomy, GroundTruth, PointCloud, SceneConfig
from scenes.service.generator import generate_scenes
from ..models.model import RunConfig

logger = logging.getLogger(__name__)

Scene = Tuple[PointCloud, GroundTruth]

SPLIT_OFFSETS = {"train": 0, "val": 500_000, "preview": 900_000}
SEEDS_PER_RUN = 1_000_000


def split_seed(cfg: RunConfig, split: str) -> int:
    if split not in SPLIT_OFFSETS:
        raise KeyError(f"unknown split '{split}', expected one of {sorted(SPLIT_OFFSETS)}")
    return cfg.seed * SEEDS_PER_RUN + SPLIT_OFFSETS[split]


def run_context(cfg: RunConfig) -> Tuple[ClassTaxonomy, SceneConfig]:
    taxonomy = load_taxonomy(cfg.taxonomy)
    scene_cfg = load_scene_config(cfg.data.scene_config, seed=cfg.seed)
    return taxonomy, scene_cfg


def make_scenes(
    cfg: RunConfig,
    split: str,
    count: Optional[int] = None,
    context: Optional[Tuple[ClassTaxonomy, SceneConfig]] = None,
) -> List[Scene]:
    taxonomy, scene_cfg = context or run_context(cfg)
    if count is None:
        count = cfg.data.train_scenes if split == "train" else cfg.data.val_scenes
    return generate_scenes(scene_cfg, taxonomy, count, seed=split_seed(cfg, split))
