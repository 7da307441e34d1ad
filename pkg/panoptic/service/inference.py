"""Panoptic output from the last decoder stage: per-point argmax over classifiers, per-classifier argmax over classes."""
import logging
from typing import Tuple

import numpy as np

from decoder.models.model import StageOutput
from scenes.models.model import ClassTaxonomy
from ..models.model import PanopticPrediction

logger = logging.getLogger(__name__)


def infer(last_stage: StageOutput, taxonomy: ClassTaxonomy) -> PanopticPrediction:
    """
    Each point goes to the classifier with the highest grouping score (lowest
    index on ties), each classifier takes its highest-scoring class, and the
    reserved stuff slots keep their fixed stuff class.

    The argmax runs on the scores, not the logits: two logits that saturate to
    the same score are a tie and go to the lower index.
    """
    N = last_stage.N
    classes = np.argmax(last_stage.semantic_scores.values, axis=1).astype(np.int64) + 1
    stuff = taxonomy.stuff_slots
    first = N - len(stuff)
    for offset, cls in enumerate(stuff):
        classes[first + offset] = cls

    winners = np.argmax(last_stage.grouping_scores.values, axis=0).astype(np.int64)
    active = sorted(set(winners.tolist()))
    return PanopticPrediction(
        group_of_point=winners,
        class_of_group=classes,
        group_confidence=last_stage.semantic_scores.values.max(axis=1),
        active_groups=active,
    )


def prediction_segments(pred: PanopticPrediction, taxonomy: ClassTaxonomy) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-point segment labels and per-segment classes for scoring.

    Empty classifiers are dropped; every group predicting a stuff class is
    merged into one segment per stuff class, thing groups stay separate.
    """
    segment_of_group = np.full(pred.N, -1, dtype=np.int64)
    classes = []
    stuff_segment = {}
    for i in pred.active_groups:
        cls = int(pred.class_of_group[i])
        if taxonomy.is_stuff(cls):
            if cls not in stuff_segment:
                stuff_segment[cls] = len(classes)
                classes.append(cls)
            segment_of_group[i] = stuff_segment[cls]
        else:
            segment_of_group[i] = len(classes)
            classes.append(cls)
    return segment_of_group[pred.group_of_point], np.array(classes, dtype=np.int64)
