"""Scoring a trained network, or a pair of .label files, and writing the reports."""
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from panoptic.dao.report_dao import ReportDAO
from panoptic.models.model import PQReport
from panoptic.service.evaluator import accumulate, evaluate_kitti_files, score_prediction
from scenes.dao.kitti_dao import KittiDAO
from scenes.models.model import ClassTaxonomy
from utils.config import workers as default_workers
from ..dao.run_dao import RunDAO
from ..models.model import RunConfig
from .data import Scene, make_scenes, run_context
from .network import PupsNetwork

logger = logging.getLogger(__name__)


def evaluate_network(
    network: PupsNetwork,
    scenes: Sequence[Scene],
    taxonomy: ClassTaxonomy,
    min_points: int = 1,
    workers: Optional[int] = None,
) -> PQReport:
    """Predict every scene on a thread pool (shared read-only parameters) and reduce in scene order."""

    def score(scene: Scene):
        pc, gt = scene
        return score_prediction(network.predict(pc), gt, taxonomy, min_points)

    with ThreadPoolExecutor(max_workers=workers or default_workers) as pool:
        parts = list(pool.map(score, scenes))
    return accumulate(parts, taxonomy.T).report(taxonomy)


def read_scans(directory: Union[str, Path], taxonomy: ClassTaxonomy) -> List[Scene]:
    """Every ``<stem>.bin`` with a matching ``<stem>.label`` in the directory, in name order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Scan directory not found: {directory}")
    scenes: List[Scene] = []
    for bin_path in sorted(directory.glob("*.bin")):
        label_path = bin_path.with_suffix(".label")
        if not label_path.exists():
            logger.warning(f"Skipping {bin_path.name}: no matching .label file")
            continue
        scenes.append((KittiDAO.read_points(bin_path), KittiDAO.read_labels(label_path, taxonomy)))
    return scenes


def load_network(cfg: RunConfig, checkpoint: Union[str, Path], taxonomy: ClassTaxonomy) -> PupsNetwork:
    network = PupsNetwork(cfg.model, taxonomy, seed=cfg.seed)
    RunDAO.load_checkpoint(network, checkpoint)
    return network


def cmd_eval(
    cfg: RunConfig,
    checkpoint: Optional[Union[str, Path]] = None,
    pred_labels: Optional[Union[str, Path]] = None,
    gt_labels: Optional[Union[str, Path]] = None,
    scans: Optional[Union[str, Path]] = None,
    split: str = "val",
    scenes: Optional[int] = None,
    min_points: int = 1,
) -> Tuple[PQReport, Path]:
    """
    Either score ``pred_labels`` against ``gt_labels`` directly, or run the
    checkpointed network over a scan directory or a generated split.
    """
    taxonomy, scene_cfg = run_context(cfg)
    out = Path(cfg.out_dir)

    if pred_labels is not None or gt_labels is not None:
        if pred_labels is None or gt_labels is None:
            raise ValueError("file evaluation needs both --pred-labels and --gt-labels")
        report = evaluate_kitti_files(pred_labels, gt_labels, taxonomy, min_points)
        return report, ReportDAO.write(report, out, "report")

    if checkpoint is None:
        checkpoint = out / "checkpoint.bin"
    network = load_network(cfg, checkpoint, taxonomy)
    if scans is not None:
        data = read_scans(scans, taxonomy)
        stem = "report_scans"
    else:
        data = make_scenes(cfg, split, scenes, context=(taxonomy, scene_cfg))
        stem = f"report_{split}"
    logger.info(f"Evaluating {checkpoint} on {len(data)} scenes")
    report = evaluate_network(network, data, taxonomy, min_points)
    return report, ReportDAO.write(report, out, stem)
