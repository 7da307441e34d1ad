"""
SemanticKITTI file codecs.

``.bin``: little-endian float32 quadruples (x, y, z, intensity).
``.label``: one little-endian uint32 per point; lower 16 bits semantic label,
upper 16 bits instance ID (0 for stuff and void points).
"""
import logging
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from utils.exceptions import LabelEncodingError, LabelFormatError
from ..models.model import ClassTaxonomy, GroundTruth, PointCloud

logger = logging.getLogger(__name__)

_FIELD_MAX = 0xFFFF


def encode_kitti_labels(
    gt: GroundTruth,
    semantic_map: Dict[int, int],
    taxonomy: ClassTaxonomy,
) -> bytes:
    """
    Pack a ground truth into .label bytes.

    Thing groups receive instance IDs 1, 2, ... in group order; groups of the
    taxonomy's stuff classes carry instance 0.
    """
    raw = np.zeros(gt.K, dtype=np.uint64)
    instance_id = 0
    for j, cls in enumerate(gt.classes.tolist()):
        if cls not in semantic_map:
            raise LabelEncodingError(f"class {cls} has no entry in the semantic map")
        semantic = int(semantic_map[cls])
        if not 0 <= semantic <= _FIELD_MAX:
            raise LabelEncodingError(f"semantic label {semantic} does not fit in 16 bits")
        is_stuff = taxonomy.is_stuff(cls)
        instance = 0
        if not is_stuff:
            instance_id += 1
            instance = instance_id
        if instance > _FIELD_MAX:
            raise LabelEncodingError(f"instance ID {instance} does not fit in 16 bits")
        raw[gt.masks[j]] = (instance << 16) | semantic
    return raw.astype("<u4").tobytes()


def decode_kitti_labels(
    blob: bytes,
    K: int,
    taxonomy: Optional[ClassTaxonomy] = None,
) -> GroundTruth:
    """
    Rebuild groups keyed by (class, instance).

    Raw semantic IDs pass through ``taxonomy.label_map`` when it is set; class 0
    (and raw IDs missing from the map) mark void points. Stuff classes form a
    single group whatever their instance field holds.
    """
    if len(blob) != 4 * K:
        raise LabelFormatError(f"label payload has {len(blob)} bytes, expected {4 * K} for K={K}")
    raw = np.frombuffer(blob, dtype="<u4").astype(np.int64)
    semantic = raw & _FIELD_MAX
    instance = raw >> 16

    if taxonomy is not None and taxonomy.label_map:
        lookup = taxonomy.label_map
        unknown = sorted(set(np.unique(semantic).tolist()) - set(lookup))
        if unknown:
            logger.warning(f"Raw labels {unknown} are not in the learning map; treating them as void")
        semantic = np.array([lookup.get(s, 0) for s in semantic.tolist()], dtype=np.int64)
    elif taxonomy is not None:
        unknown = sorted(set(np.unique(semantic).tolist()) - set(taxonomy.class_names) - {0})
        if unknown:
            raise LabelFormatError(f"labels {unknown} are not classes of taxonomy '{taxonomy.name}'")

    if taxonomy is not None:
        stuff = np.isin(semantic, taxonomy.stuff_classes)
        instance = np.where(stuff, 0, instance)

    valid = semantic > 0
    keys, inverse = np.unique((semantic[valid] << 16) | instance[valid], return_inverse=True)
    labels = np.full(K, -1, dtype=np.int64)
    labels[valid] = inverse.reshape(-1)
    return GroundTruth.from_group_labels(labels, keys >> 16)


def encode_points(pc: PointCloud) -> bytes:
    return pc.points.astype("<f4").tobytes()


def decode_points(blob: bytes) -> PointCloud:
    if len(blob) % 16:
        raise LabelFormatError(f"point payload of {len(blob)} bytes is not a multiple of 16")
    points = np.frombuffer(blob, dtype="<f4").reshape(-1, 4).astype(np.float64)
    points[:, 3] = np.clip(points[:, 3], 0.0, 1.0)
    return PointCloud(points=points)


class KittiDAO:
    """Reads and writes .bin/.label pairs on disk."""

    @staticmethod
    def write_scan(
        directory: Union[str, Path],
        stem: str,
        pc: PointCloud,
        gt: GroundTruth,
        taxonomy: ClassTaxonomy,
    ) -> Tuple[Path, Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        bin_path = directory / f"{stem}.bin"
        label_path = directory / f"{stem}.label"
        bin_path.write_bytes(encode_points(pc))
        label_path.write_bytes(encode_kitti_labels(gt, taxonomy.semantic_map(), taxonomy))
        return bin_path, label_path

    @staticmethod
    def read_points(path: Union[str, Path]) -> PointCloud:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Point file not found: {path}")
        return decode_points(path.read_bytes())

    @staticmethod
    def read_labels(path: Union[str, Path], taxonomy: Optional[ClassTaxonomy] = None) -> GroundTruth:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Label file not found: {path}")
        blob = path.read_bytes()
        if len(blob) % 4:
            raise LabelFormatError(f"{path} holds {len(blob)} bytes, not a whole number of labels")
        return decode_kitti_labels(blob, len(blob) // 4, taxonomy)
