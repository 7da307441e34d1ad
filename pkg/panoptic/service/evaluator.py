"""
Panoptic quality.

A predicted and a ground-truth segment match when they share a class and
their IoU exceeds 0.5; at that threshold a segment can match at most once.
Per class:

    PQ = Σ IoU(TP) / (|TP| + |FP|/2 + |FN|/2) = SQ · RQ

Points whose ground truth is void are left out of every count. Counts from
several scenes add up in a ``PQAccumulator`` before the ratios are taken.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from scenes.dao.kitti_dao import KittiDAO
from scenes.models.model import ClassTaxonomy, GroundTruth
from utils.config import workers as default_workers
from utils.exceptions import ContractError, DimensionError, LabelFormatError
from ..models.model import ClassQuality, PanopticPrediction, PQReport
from .inference import prediction_segments

logger = logging.getLogger(__name__)

MATCH_IOU = 0.5


class PQAccumulator:
    """Per-class TP/FP/FN counts, IoU sums and semantic intersections/unions, indexed by class ID."""

    def __init__(self, n_classes: int):
        size = n_classes + 1
        self.n_classes = n_classes
        self.tp = np.zeros(size, dtype=np.int64)
        self.fp = np.zeros(size, dtype=np.int64)
        self.fn = np.zeros(size, dtype=np.int64)
        self.iou_sum = np.zeros(size, dtype=np.float64)
        self.sem_inter = np.zeros(size, dtype=np.int64)
        self.sem_union = np.zeros(size, dtype=np.int64)
        self.scenes = 0

    def merge(self, other: "PQAccumulator") -> "PQAccumulator":
        if other.n_classes != self.n_classes:
            raise DimensionError(f"cannot merge accumulators over {self.n_classes} and {other.n_classes} classes")
        out = PQAccumulator(self.n_classes)
        for field in ("tp", "fp", "fn", "iou_sum", "sem_inter", "sem_union"):
            setattr(out, field, getattr(self, field) + getattr(other, field))
        out.scenes = self.scenes + other.scenes
        return out

    def report(self, taxonomy: ClassTaxonomy) -> PQReport:
        per_class = {}
        for c in range(1, self.n_classes + 1):
            tp, fp, fn = int(self.tp[c]), int(self.fp[c]), int(self.fn[c])
            denominator = tp + 0.5 * fp + 0.5 * fn
            sq = float(self.iou_sum[c] / tp) if tp else 0.0
            rq = tp / denominator if denominator else 0.0
            union = int(self.sem_union[c])
            per_class[c] = ClassQuality(
                name=taxonomy.class_names[c],
                is_thing=taxonomy.is_thing(c),
                tp=tp,
                fp=fp,
                fn=fn,
                iou_sum=float(self.iou_sum[c]),
                pq=sq * rq,
                sq=sq,
                rq=rq,
                semantic_iou=int(self.sem_inter[c]) / union if union else 0.0,
                present=tp + fp + fn > 0,
            )

        def mean(values: List[float]) -> float:
            return float(np.mean(values)) if values else 0.0

        present = [q for q in per_class.values() if q.present]
        things = [q for q in present if q.is_thing]
        stuff = [q for q in present if not q.is_thing]
        return PQReport(
            pq=mean([q.pq for q in present]),
            sq=mean([q.sq for q in present]),
            rq=mean([q.rq for q in present]),
            pq_dagger=mean([q.pq if q.is_thing else q.semantic_iou for q in present]),
            pq_things=mean([q.pq for q in things]),
            sq_things=mean([q.sq for q in things]),
            rq_things=mean([q.rq for q in things]),
            pq_stuff=mean([q.pq for q in stuff]),
            sq_stuff=mean([q.sq for q in stuff]),
            rq_stuff=mean([q.rq for q in stuff]),
            scenes=self.scenes,
            taxonomy=taxonomy.name,
            per_class=per_class,
        )


def score_segments(
    pred_labels: np.ndarray,
    pred_classes: np.ndarray,
    gt: GroundTruth,
    taxonomy: ClassTaxonomy,
    min_points: int = 1,
) -> PQAccumulator:
    """
    Count one scene. ``pred_labels`` holds a segment index per point (-1 for
    none) and ``pred_classes`` the class of each segment. Unmatched segments
    smaller than ``min_points`` are not counted as errors.
    """
    pred_labels = np.asarray(pred_labels, dtype=np.int64).reshape(-1)
    pred_classes = np.asarray(pred_classes, dtype=np.int64).reshape(-1)
    if pred_labels.shape[0] != gt.K:
        raise DimensionError(f"prediction covers {pred_labels.shape[0]} points, ground truth {gt.K}")
    T = taxonomy.T
    if pred_classes.size and (pred_classes.min() < 1 or pred_classes.max() > T):
        raise ContractError(f"predicted classes must lie in 1..{T}")

    acc = PQAccumulator(T)
    acc.scenes = 1
    valid = ~gt.void
    p = pred_labels[valid]
    g = gt.group_of_point()[valid]
    n_pred = pred_classes.shape[0]
    pred_sizes = np.bincount(p[p >= 0], minlength=n_pred)
    gt_sizes = np.bincount(g, minlength=gt.M)

    matched_pred = np.zeros(n_pred, dtype=bool)
    matched_gt = np.zeros(gt.M, dtype=bool)
    both = p >= 0
    if both.any():
        keys, inter = np.unique(np.stack([p[both], g[both]]), axis=1, return_counts=True)
        for (ps, gs), overlap in zip(keys.T.tolist(), inter.tolist()):
            cls = int(gt.classes[gs])
            if pred_classes[ps] != cls:
                continue
            iou = overlap / (pred_sizes[ps] + gt_sizes[gs] - overlap)
            if iou <= MATCH_IOU:
                continue
            if matched_pred[ps] or matched_gt[gs]:
                raise ContractError(f"segment matched twice at IoU {iou:.3f}")
            matched_pred[ps] = matched_gt[gs] = True
            acc.tp[cls] += 1
            acc.iou_sum[cls] += iou

    for gs in np.flatnonzero(~matched_gt & (gt_sizes >= min_points)):
        acc.fn[gt.classes[gs]] += 1
    for ps in np.flatnonzero(~matched_pred & (pred_sizes >= min_points)):
        acc.fp[pred_classes[ps]] += 1

    pred_sem = np.where(p >= 0, pred_classes[np.maximum(p, 0)] if n_pred else 0, 0)
    gt_sem = gt.classes[g] if gt.M else np.zeros(0, dtype=np.int64)
    agree = pred_sem == gt_sem
    inter_counts = np.bincount(gt_sem[agree], minlength=T + 1)
    acc.sem_inter += inter_counts[: T + 1]
    acc.sem_union += (
        np.bincount(pred_sem, minlength=T + 1)[: T + 1]
        + np.bincount(gt_sem, minlength=T + 1)[: T + 1]
        - inter_counts[: T + 1]
    )
    # class 0 marks "no prediction" and is never scored
    acc.sem_inter[0] = acc.sem_union[0] = 0
    return acc


def score_prediction(
    pred: PanopticPrediction,
    gt: GroundTruth,
    taxonomy: ClassTaxonomy,
    min_points: int = 1,
) -> PQAccumulator:
    labels, classes = prediction_segments(pred, taxonomy)
    return score_segments(labels, classes, gt, taxonomy, min_points)


def pq_evaluate(
    pred: PanopticPrediction,
    gt: GroundTruth,
    taxonomy: ClassTaxonomy,
    min_points: int = 1,
) -> PQReport:
    if pred.K != gt.K:
        raise DimensionError(f"prediction covers {pred.K} points, ground truth {gt.K}")
    return score_prediction(pred, gt, taxonomy, min_points).report(taxonomy)


def accumulate(parts: Iterable[PQAccumulator], n_classes: int) -> PQAccumulator:
    total = PQAccumulator(n_classes)
    for part in parts:
        total = total.merge(part)
    return total


def evaluate_many(
    scenes: Sequence[Tuple[PanopticPrediction, GroundTruth]],
    taxonomy: ClassTaxonomy,
    min_points: int = 1,
    workers: Optional[int] = None,
) -> PQReport:
    """Score scenes on a thread pool and reduce the counts in scene order."""
    with ThreadPoolExecutor(max_workers=workers or default_workers) as pool:
        parts = list(pool.map(lambda item: score_prediction(item[0], item[1], taxonomy, min_points), scenes))
    return accumulate(parts, taxonomy.T).report(taxonomy)


def score_kitti_files(
    pred_labels: Union[str, Path],
    gt_labels: Union[str, Path],
    taxonomy: ClassTaxonomy,
    min_points: int = 1,
) -> PQAccumulator:
    pred = KittiDAO.read_labels(pred_labels, taxonomy)
    gt = KittiDAO.read_labels(gt_labels, taxonomy)
    if pred.K != gt.K:
        raise LabelFormatError(f"{pred_labels} holds {pred.K} labels but {gt_labels} holds {gt.K}")
    return score_segments(pred.group_of_point(), pred.classes, gt, taxonomy, min_points)


def evaluate_kitti_files(
    pred_labels: Union[str, Path],
    gt_labels: Union[str, Path],
    taxonomy: ClassTaxonomy,
    min_points: int = 1,
) -> PQReport:
    logger.info(f"Scoring {pred_labels} against {gt_labels}")
    return score_kitti_files(pred_labels, gt_labels, taxonomy, min_points).report(taxonomy)
