from .generator import SceneGenerator, generate_scene, generate_scenes, toy_scene_config
from .taxonomies import get_taxonomy, nuscenes_taxonomy, semantic_kitti_taxonomy, toy_taxonomy
from .transforms import random_global_transform

__all__ = [
    "SceneGenerator",
    "generate_scene",
    "generate_scenes",
    "toy_scene_config",
    "get_taxonomy",
    "toy_taxonomy",
    "semantic_kitti_taxonomy",
    "nuscenes_taxonomy",
    "random_global_transform",
]
