from typing import Tuple

import numpy as np
import pytest

from pipeline.service.run_config import load_run_config
from scenes.models.model import ClassTaxonomy, GroundTruth, PointCloud, SceneConfig
from scenes.service.generator import toy_scene_config
from scenes.service.taxonomies import semantic_kitti_taxonomy, toy_taxonomy


@pytest.fixture
def taxonomy() -> ClassTaxonomy:
    return toy_taxonomy()


@pytest.fixture
def kitti_taxonomy() -> ClassTaxonomy:
    return semantic_kitti_taxonomy()


@pytest.fixture
def scene_cfg() -> SceneConfig:
    return toy_scene_config(seed=7)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_cfg(tmp_path):
    """A run small enough for a unit test: a handful of scenes, narrow network."""

    def make(**overrides):
        cfg = load_run_config(profile="toy", seed=overrides.pop("seed", 3), out_dir=str(tmp_path / "run"))
        update = {
            "model": cfg.model.model_copy(update={"channels": 8, "hidden": 8, "classifiers": 14, "stages": 2, "heads": 2, "neighbors": 4}),
            "optim": cfg.optim.model_copy(update={"epochs": 1, "batch_size": 2}),
            "data": cfg.data.model_copy(update={"train_scenes": 4, "val_scenes": 2}),
        }
        for section, values in overrides.items():
            update[section] = getattr(cfg, section).model_copy(update=values)
        return cfg.model_copy(update=update)

    return make


def flat_road_scene(step: float = 0.5, half_x: float = 20.0, half_y: float = 10.0) -> Tuple[PointCloud, GroundTruth]:
    """A single road group on a level grid at z = 0."""
    xs = np.arange(-half_x, half_x + 1e-9, step)
    ys = np.arange(-half_y, half_y + 1e-9, step)
    gx, gy = np.meshgrid(xs, ys)
    points = np.column_stack([gx.ravel(), gy.ravel(), np.zeros(gx.size), np.full(gx.size, 0.1)])
    gt = GroundTruth.from_group_labels(np.zeros(gx.size, dtype=np.int64), np.array([4]))
    return PointCloud(points=points), gt
