"""Cutting thing instances out of labelled scenes."""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from scenes.models.model import ClassTaxonomy, GroundTruth, PointCloud
from utils.config import workers as default_workers
from ..models.model import InstanceDB, InstanceEntry

logger = logging.getLogger(__name__)


def extract_instances(
    pc: PointCloud,
    gt: GroundTruth,
    taxonomy: ClassTaxonomy,
    scene_id: int = 0,
) -> List[InstanceEntry]:
    entries: List[InstanceEntry] = []
    for j in gt.thing_indices(taxonomy):
        points = pc.points[gt.masks[j]].copy()
        centroid = points[:, :3].mean(axis=0)
        points[:, :3] -= centroid
        entries.append(
            InstanceEntry(
                points=points,
                class_id=int(gt.classes[j]),
                centroid=centroid.tolist(),
                ground_offset=float(centroid[2] - pc.points[gt.masks[j], 2].min()),
                scene_id=scene_id,
            )
        )
    return entries


def build_db(
    scenes: Sequence[Tuple[PointCloud, GroundTruth]],
    taxonomy: ClassTaxonomy,
    workers: Optional[int] = None,
) -> InstanceDB:
    """Every thing group of every scene, re-centred on its centroid; scene IDs are corpus positions."""
    if not scenes:
        raise ValueError("instance database needs a nonempty corpus")
    with ThreadPoolExecutor(max_workers=workers or default_workers) as pool:
        parts = list(
            pool.map(lambda item: extract_instances(item[1][0], item[1][1], taxonomy, item[0]), enumerate(scenes))
        )
    db = InstanceDB(entries=[entry for part in parts for entry in part])
    if not len(db):
        logger.warning(f"No thing instances in {len(scenes)} scenes; the instance database is empty")
    else:
        logger.info(f"Instance database holds {len(db)} entries {db.counts()}")
    return db
