"""
Per-classifier prediction centres in bird's-eye view.

For every classifier, the planar centroid of each group it predicts with the
requested class, collected over many scenes and written as one CSV per
classifier (``classifier_id,x,y,scene_id``).
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from scenes.models.model import ClassTaxonomy
from utils.exceptions import ConfigError
from ..models.model import RunConfig
from .data import Scene, make_scenes, run_context
from .evaluation import load_network
from .network import PupsNetwork

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["classifier_id", "x", "y", "scene_id"]


def collect_centers(
    network: PupsNetwork,
    scenes: Sequence[Scene],
    class_id: int,
    window: float = 100.0,
) -> Dict[int, List[Tuple[int, float, float, int]]]:
    """Centroids inside the square window of side ``window`` metres centred on the origin."""
    half = window / 2.0
    rows: Dict[int, List[Tuple[int, float, float, int]]] = {i: [] for i in range(network.bank.N)}
    for scene_id, (pc, _) in enumerate(scenes):
        pred = network.predict(pc)
        for i in pred.active_groups:
            if pred.class_of_group[i] != class_id:
                continue
            x, y = pc.xyz[pred.group_of_point == i, :2].mean(axis=0)
            if abs(x) <= half and abs(y) <= half:
                rows[i].append((i, float(x), float(y), scene_id))
    return rows


def write_centers(rows: Dict[int, List[Tuple[int, float, float, int]]], directory: Union[str, Path]) -> List[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, items in sorted(rows.items()):
        path = directory / f"classifier_{i:03d}.csv"
        pd.DataFrame(items, columns=CSV_COLUMNS).to_csv(path, index=False)
        paths.append(path)
    return paths


def resolve_class(taxonomy: ClassTaxonomy, name_or_id: str) -> int:
    if str(name_or_id).isdigit() and int(name_or_id) in taxonomy.class_names:
        return int(name_or_id)
    try:
        return taxonomy.class_id(str(name_or_id))
    except KeyError as exc:
        raise ConfigError(f"class '{name_or_id}' is not in taxonomy '{taxonomy.name}'") from exc


def cmd_export_centers(
    cfg: RunConfig,
    class_name: str,
    n_scenes: int,
    checkpoint: Optional[Union[str, Path]] = None,
    window: float = 100.0,
) -> List[Path]:
    taxonomy, scene_cfg = run_context(cfg)
    class_id = resolve_class(taxonomy, class_name)
    out = Path(cfg.out_dir)
    network = load_network(cfg, checkpoint or out / "checkpoint.bin", taxonomy)
    scenes = make_scenes(cfg, "val", n_scenes, context=(taxonomy, scene_cfg))
    rows = collect_centers(network, scenes, class_id, window)
    paths = write_centers(rows, out / "centers" / taxonomy.class_names[class_id])
    logger.info(
        f"Exported {sum(len(v) for v in rows.values())} centres of class "
        f"'{taxonomy.class_names[class_id]}' over {len(scenes)} scenes"
    )
    return paths
