"""
Built-in class taxonomies.

``toy`` drives the synthetic benchmark. ``semantic_kitti`` and ``nuscenes``
carry the raw label learning maps so real label files can be scored; nuScenes
lidarseg indices are expected repacked into the .label layout.
"""
from typing import Dict, List

from ..models.model import ClassTaxonomy


def toy_taxonomy() -> ClassTaxonomy:
    return ClassTaxonomy(
        name="toy",
        class_names={1: "car", 2: "person", 3: "bicycle", 4: "road", 5: "sidewalk"},
        thing_classes=[1, 2, 3],
        stuff_classes=[4, 5],
        context_table={1: [4], 2: [5], 3: [4, 5]},
    )


_KITTI_NAMES = {
    1: "car", 2: "bicycle", 3: "motorcycle", 4: "truck", 5: "other-vehicle",
    6: "person", 7: "bicyclist", 8: "motorcyclist", 9: "road", 10: "parking",
    11: "sidewalk", 12: "other-ground", 13: "building", 14: "fence",
    15: "vegetation", 16: "trunk", 17: "terrain", 18: "pole", 19: "traffic-sign",
}

_KITTI_LEARNING_MAP = {
    0: 0, 1: 0, 10: 1, 11: 2, 13: 5, 15: 3, 16: 5, 18: 4, 20: 5, 30: 6, 31: 7,
    32: 8, 40: 9, 44: 10, 48: 11, 49: 12, 50: 13, 51: 14, 52: 0, 60: 9, 70: 15,
    71: 16, 72: 17, 80: 18, 81: 19, 99: 0, 252: 1, 253: 7, 254: 6, 255: 8,
    256: 5, 257: 5, 258: 4, 259: 5,
}

_KITTI_CONTEXT: Dict[int, List[int]] = {
    1: [9, 10],
    2: [9, 11, 10],
    3: [9, 10, 11],
    4: [9, 10],
    5: [9, 10],
    6: [11, 9, 17],
    7: [9, 11],
    8: [9],
}


def semantic_kitti_taxonomy() -> ClassTaxonomy:
    return ClassTaxonomy(
        name="semantic_kitti",
        class_names=dict(_KITTI_NAMES),
        thing_classes=list(range(1, 9)),
        stuff_classes=list(range(9, 20)),
        context_table={k: list(v) for k, v in _KITTI_CONTEXT.items()},
        label_map=dict(_KITTI_LEARNING_MAP),
    )


_NUSCENES_NAMES = {
    1: "barrier", 2: "bicycle", 3: "bus", 4: "car", 5: "construction_vehicle",
    6: "motorcycle", 7: "pedestrian", 8: "traffic_cone", 9: "trailer", 10: "truck",
    11: "driveable_surface", 12: "other_flat", 13: "sidewalk", 14: "terrain",
    15: "manmade", 16: "vegetation",
}

# lidarseg index -> class; 0 for the indices the 16-class benchmark ignores
_NUSCENES_LEARNING_MAP = {
    0: 0, 1: 0, 2: 7, 3: 7, 4: 7, 5: 0, 6: 7, 7: 0, 8: 0, 9: 1, 10: 0, 11: 0,
    12: 8, 13: 0, 14: 2, 15: 3, 16: 3, 17: 4, 18: 5, 19: 0, 20: 0, 21: 6, 22: 9,
    23: 10, 24: 11, 25: 12, 26: 13, 27: 14, 28: 15, 29: 0, 30: 16, 31: 0,
}

_NUSCENES_CONTEXT: Dict[int, List[int]] = {
    1: [11, 12, 13, 14],
    2: [13, 11],
    3: [11],
    4: [11, 12],
    5: [11, 14, 12],
    6: [11, 13],
    7: [13, 11, 14],
    8: [11, 13],
    9: [11, 12],
    10: [11, 12],
}


def nuscenes_taxonomy() -> ClassTaxonomy:
    return ClassTaxonomy(
        name="nuscenes",
        class_names=dict(_NUSCENES_NAMES),
        thing_classes=list(range(1, 11)),
        stuff_classes=list(range(11, 17)),
        context_table={k: list(v) for k, v in _NUSCENES_CONTEXT.items()},
        label_map=dict(_NUSCENES_LEARNING_MAP),
    )


PRESETS = {
    "toy": toy_taxonomy,
    "semantic_kitti": semantic_kitti_taxonomy,
    "nuscenes": nuscenes_taxonomy,
}


def get_taxonomy(name: str) -> ClassTaxonomy:
    if name not in PRESETS:
        raise KeyError(f"unknown taxonomy preset '{name}', expected one of {sorted(PRESETS)}")
    return PRESETS[name]()
