import json
import logging
from pathlib import Path
from typing import Union

from scenes.dao.kitti_dao import KittiDAO, encode_points
from scenes.models.model import PointCloud
from ..models.model import InstanceDB, InstanceEntry

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


class InstanceDBDAO:
    """
    An instance database on disk: one ``.bin`` point file per entry (local
    coordinates, float32) plus ``manifest.json`` holding class, centroid,
    ground offset and source scene of each entry.
    """

    @staticmethod
    def save(db: InstanceDB, directory: Union[str, Path]) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        manifest = []
        for index, entry in enumerate(db.entries):
            name = f"{index:06d}.bin"
            (directory / name).write_bytes(encode_points(PointCloud(points=entry.points)))
            manifest.append({
                "file": name,
                "class_id": entry.class_id,
                "centroid": entry.centroid,
                "ground_offset": entry.ground_offset,
                "scene_id": entry.scene_id,
            })
        path = directory / MANIFEST
        path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        logger.info(f"Saved {len(db)} instances to {directory}")
        return path

    @staticmethod
    def load(directory: Union[str, Path]) -> InstanceDB:
        directory = Path(directory)
        path = directory / MANIFEST
        if not path.exists():
            raise FileNotFoundError(f"Instance manifest not found: {path}")
        entries = []
        for item in json.loads(path.read_text(encoding="utf-8")):
            pc = KittiDAO.read_points(directory / item["file"])
            entries.append(
                InstanceEntry(
                    points=pc.points,
                    class_id=item["class_id"],
                    centroid=item["centroid"],
                    ground_offset=item["ground_offset"],
                    scene_id=item["scene_id"],
                )
            )
        return InstanceDB(entries=entries)
