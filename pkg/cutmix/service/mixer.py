"""
Instance paste augmentation.

Context mode snaps each pasted instance onto the nearest scene point whose
class may lie beneath it (car on road, person on sidewalk), so the
instance's lowest point rests at that point's height. Random mode drops the
instance at the drawn planar position at its original height. Scene points
within ``removal_radius`` of a pasted point are removed so the groups stay
exclusive.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from scenes.models.model import ClassTaxonomy, GroundTruth, PointCloud
from ..models.model import InstanceDB, InstanceEntry, MixPolicy, MixSummary, PlacementMode

logger = logging.getLogger(__name__)

Scene = Tuple[PointCloud, GroundTruth]


def _yaw(local: np.ndarray, angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    out = local.copy()
    out[:, 0] = c * local[:, 0] - s * local[:, 1]
    out[:, 1] = s * local[:, 0] + c * local[:, 1]
    return out


class CutMixer:
    """Pastes database instances into scenes under one policy."""

    def __init__(self, db: InstanceDB, policy: MixPolicy, taxonomy: ClassTaxonomy):
        self.db = db
        self.policy = policy
        self.taxonomy = taxonomy
        self.index = db.by_class
        unknown = [c for c in policy.samples_per_class if not taxonomy.is_thing(c)]
        if unknown:
            raise ValueError(f"sample counts given for non-thing classes {unknown}")

    def mix(self, scene: Scene, rng: np.random.Generator) -> Tuple[PointCloud, GroundTruth, MixSummary]:
        pc, gt = scene
        requested = sum(self.policy.samples_per_class.values())
        if not len(self.db) or requested == 0:
            return pc, gt, MixSummary(requested=requested, skipped=requested)

        canvas = _Canvas(pc, gt)
        placed = skipped = violations = removed_points = 0
        by_class = {}

        for cls, count in sorted(self.policy.samples_per_class.items()):
            for _ in range(count):
                ids = self.index.get(cls)
                if not ids:
                    skipped += 1
                    continue
                entry = self.db.entries[int(rng.choice(ids))]
                outcome = self._place(canvas, entry, rng)
                if outcome is None:
                    skipped += 1
                    continue
                removed, violated = outcome
                placed += 1
                removed_points += removed
                violations += int(violated)
                by_class[cls] = by_class.get(cls, 0) + 1

        if skipped:
            logger.warning(f"Skipped {skipped} of {requested} instance placements")
        mixed_pc, mixed_gt, removed_groups = canvas.finish()
        summary = MixSummary(
            requested=requested,
            placed=placed,
            skipped=skipped,
            context_violations=violations,
            removed_points=removed_points,
            removed_groups=removed_groups,
            placed_by_class=by_class,
        )
        return mixed_pc, mixed_gt, summary

    # ==================== Placement ====================

    def _place(self, canvas: "_Canvas", entry: InstanceEntry, rng: np.random.Generator) -> Optional[Tuple[int, bool]]:
        """Try up to ``max_attempts`` positions; returns (points removed, context violated) or None."""
        policy = self.policy
        contexts = self.taxonomy.context_table.get(entry.class_id, [])
        for _attempt in range(policy.max_attempts):
            sem = canvas.semantics()
            local = entry.points[:, :3]
            if policy.random_yaw:
                local = _yaw(local, float(rng.uniform(-np.pi, np.pi)))
            candidate = rng.uniform(canvas.lo, canvas.hi)

            if policy.mode == PlacementMode.CONTEXT:
                compatible = np.flatnonzero(np.isin(sem, contexts))
                if compatible.size == 0:
                    return None
                _, k = cKDTree(canvas.points[compatible, :2]).query(candidate)
                anchor = canvas.points[compatible[int(k)]]
                centre = np.array([anchor[0], anchor[1], anchor[2] + entry.ground_offset])
            else:
                centre = np.array([candidate[0], candidate[1], entry.centroid[2]])
            xyz = local + centre

            things = np.isin(sem, self.taxonomy.thing_classes)
            if things.any() and policy.min_separation > 0:
                gap, _ = cKDTree(canvas.points[things, :2]).query(xyz[:, :2])
                if gap.min() < policy.min_separation:
                    continue

            dist, _ = cKDTree(xyz).query(canvas.points[:, :3], distance_upper_bound=policy.removal_radius)
            remove = dist <= policy.removal_radius
            violated = not self._supported(canvas, xyz, sem, ~remove, contexts)
            if violated and policy.mode == PlacementMode.CONTEXT:
                continue

            canvas.paste(np.column_stack([xyz, entry.points[:, 3]]), entry.class_id, remove)
            return int(remove.sum()), violated
        return None

    def _supported(
        self,
        canvas: "_Canvas",
        xyz: np.ndarray,
        sem: np.ndarray,
        kept: np.ndarray,
        contexts: Sequence[int],
    ) -> bool:
        """Whether the lowest pasted point has a compatible context point as its nearest planar neighbour."""
        rest = np.flatnonzero(kept)
        if rest.size == 0:
            return False
        support = xyz[int(np.argmin(xyz[:, 2]))]
        dist, k = cKDTree(canvas.points[rest, :2]).query(support[:2])
        return bool(sem[rest[int(k)]] in contexts and dist <= self.policy.snap_radius)


class _Canvas:
    """Working copy of one scene while instances are pasted into it."""

    def __init__(self, pc: PointCloud, gt: GroundTruth):
        self.points = pc.points.copy()
        self.labels = gt.group_of_point()
        self.classes: List[int] = [int(c) for c in gt.classes]
        self.lo = self.points[:, :2].min(axis=0)
        self.hi = self.points[:, :2].max(axis=0)

    def semantics(self) -> np.ndarray:
        classes = np.array(self.classes, dtype=np.int64)
        return np.where(self.labels >= 0, classes[np.maximum(self.labels, 0)], 0)

    def paste(self, points: np.ndarray, class_id: int, remove: np.ndarray) -> None:
        group = len(self.classes)
        self.classes.append(class_id)
        self.points = np.concatenate([self.points[~remove], points], axis=0)
        self.labels = np.concatenate([self.labels[~remove], np.full(len(points), group, dtype=np.int64)])

    def finish(self) -> Tuple[PointCloud, GroundTruth, int]:
        labels = self.labels
        alive = np.unique(labels[labels >= 0])
        remap = np.full(len(self.classes), -1, dtype=np.int64)
        remap[alive] = np.arange(alive.shape[0])
        new_labels = np.where(labels >= 0, remap[np.maximum(labels, 0)], -1)
        classes = np.array(self.classes, dtype=np.int64)[alive]
        removed_groups = len(self.classes) - alive.shape[0]
        if removed_groups:
            logger.info(f"{removed_groups} groups lost all their points to pasted instances")
        return (
            PointCloud(points=self.points),
            GroundTruth.from_group_labels(new_labels, classes),
            removed_groups,
        )


def mix(
    scene: Scene,
    db: InstanceDB,
    policy: MixPolicy,
    taxonomy: ClassTaxonomy,
    rng: np.random.Generator,
) -> Tuple[PointCloud, GroundTruth, MixSummary]:
    return CutMixer(db, policy, taxonomy).mix(scene, rng)
