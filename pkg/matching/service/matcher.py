"""
Bipartite supervision of decoder stages.

Stuff ground truths go to their fixed reserved classifier (the last T_stuff
slots, in sorted stuff-class order). Thing ground truths are matched to the
remaining classifiers by minimum total cost, where the cost of a pair is the
training loss it would receive:

    alpha·dice + beta·focal + gamma·bce

A matched classifier pays that loss; an unmatched one only pays the focal
term pushing every class score to zero.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from autodiff import Tensor
from decoder.models.model import StageOutput
from scenes.models.model import ClassTaxonomy, GroundTruth
from utils.exceptions import CapacityError, DimensionError
from ..models.model import Assignment, LossWeights
from .hungarian import solve_assignment
from .losses import dice_loss, focal_terms, mask_bce_loss, pairwise_bce, pairwise_dice, pairwise_focal

logger = logging.getLogger(__name__)


def reserved_slots(taxonomy: ClassTaxonomy, n_classifiers: int) -> Dict[int, int]:
    """Stuff class → its fixed classifier index."""
    stuff = taxonomy.stuff_slots
    first = n_classifiers - len(stuff)
    return {cls: first + offset for offset, cls in enumerate(stuff)}


def _visible(stage: StageOutput, gt: GroundTruth) -> np.ndarray:
    if stage.K != gt.K:
        raise DimensionError(f"stage scores cover {stage.K} points but the ground truth has {gt.K}")
    return ~gt.void


def build_cost_matrix(
    stage: StageOutput,
    gt: GroundTruth,
    taxonomy: ClassTaxonomy,
    w: LossWeights,
) -> np.ndarray:
    """Match cost between thing ground truths (rows) and non-reserved classifiers (columns)."""
    keep = _visible(stage, gt)
    n_free = stage.N - len(taxonomy.stuff_classes)
    things = gt.thing_indices(taxonomy)
    if len(things) > n_free:
        raise CapacityError(f"{len(things)} thing instances exceed the {n_free} unreserved classifiers")

    logits = stage.grouping_logits.values[:n_free][:, keep]
    probs = stage.grouping_scores.values[:n_free][:, keep]
    masks = gt.masks[things][:, keep].astype(np.float64)
    classes = gt.classes[things]
    cost = w.alpha * pairwise_dice(probs, masks)
    cost = cost + w.beta * pairwise_focal(
        stage.semantic_logits.values[:n_free], classes, w.focal_alpha, w.focal_gamma
    )
    cost = cost + w.gamma * pairwise_bce(logits, masks)
    return cost


def assign(
    stage: StageOutput,
    gt: GroundTruth,
    taxonomy: ClassTaxonomy,
    w: LossWeights,
) -> Assignment:
    slots = reserved_slots(taxonomy, stage.N)
    pairs: List[Tuple[int, int]] = []
    for j in gt.stuff_indices(taxonomy):
        pairs.append((j, slots[int(gt.classes[j])]))

    things = gt.thing_indices(taxonomy)
    if things:
        cost = build_cost_matrix(stage, gt, taxonomy, w)
        for row, col in solve_assignment(cost):
            pairs.append((things[row], col))
    return Assignment.from_pairs(pairs, stage.N)


def stage_loss(
    stage: StageOutput,
    gt: GroundTruth,
    taxonomy: ClassTaxonomy,
    w: LossWeights,
    assignment: Optional[Assignment] = None,
) -> Tuple[Tensor, Assignment]:
    """Loss of one stage and the assignment it was computed under."""
    keep = _visible(stage, gt)
    if assignment is None:
        assignment = assign(stage, gt, taxonomy, w)

    targets = np.zeros((stage.N, stage.T))
    for j, i in assignment.pairs:
        targets[i, int(gt.classes[j]) - 1] = 1.0
    loss = focal_terms(stage.semantic_logits, targets, w.focal_alpha, w.focal_gamma).sum() * w.beta

    if assignment.pairs:
        gts = [j for j, _ in assignment.pairs]
        rows = [i for _, i in assignment.pairs]
        cols = np.flatnonzero(keep)
        index = (np.array(rows)[:, None], cols[None, :])
        masks = gt.masks[gts][:, keep].astype(np.float64)
        dice = dice_loss(stage.grouping_scores[index], masks).sum()
        bce = mask_bce_loss(stage.grouping_logits[index], masks).sum()
        loss = loss + dice * w.alpha + bce * w.gamma
    return loss, assignment


def supervise(
    stages: Sequence[StageOutput],
    gt: GroundTruth,
    taxonomy: ClassTaxonomy,
    w: LossWeights,
    assignments: Optional[Sequence[Assignment]] = None,
) -> Tuple[Tensor, List[Tensor], List[Assignment]]:
    """
    Deep supervision: every stage is matched on its own and the total is the
    mean of the stage losses. Passing ``assignments`` holds the match fixed.
    """
    if not stages:
        raise DimensionError("supervision needs at least one stage")
    if assignments is not None and len(assignments) != len(stages):
        raise DimensionError(f"{len(assignments)} assignments for {len(stages)} stages")
    losses: List[Tensor] = []
    used: List[Assignment] = []
    for s, stage in enumerate(stages):
        loss, assignment = stage_loss(stage, gt, taxonomy, w, None if assignments is None else assignments[s])
        losses.append(loss)
        used.append(assignment)
    total = losses[0]
    for loss in losses[1:]:
        total = total + loss
    return total * (1.0 / len(losses)), losses, used


def total_loss(
    stages: Sequence[StageOutput],
    gt: GroundTruth,
    taxonomy: ClassTaxonomy,
    w: LossWeights,
    assignments: Optional[Sequence[Assignment]] = None,
) -> Tensor:
    return supervise(stages, gt, taxonomy, w, assignments)[0]
