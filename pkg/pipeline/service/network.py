"""The full segmentation network: point encoder, classifier bank and refinement stages."""
import logging
from typing import Iterator, List, Optional, Tuple

import numpy as np

from autodiff import Module, Tensor, no_grad
from decoder.models.model import ClassifierBank, RefineStageParams, StageOutput
from decoder.service.decoder import decode
from encoder.models.model import EncoderParams
from encoder.service.encoder import encode
from panoptic.models.model import PanopticPrediction
from panoptic.service.inference import infer
from scenes.models.model import ClassTaxonomy, PointCloud
from ..models.model import ModelSection

logger = logging.getLogger(__name__)


class PupsNetwork(Module):
    """Parameters are named ``encoder.*``, ``bank.*`` and ``stage{s}.*`` (s from 1)."""

    def __init__(self, model: ModelSection, taxonomy: ClassTaxonomy, seed: int = 0):
        rng = np.random.default_rng(seed)
        self.taxonomy = taxonomy
        self.refine = model.refine
        self.encoder = EncoderParams(model.channels, model.hidden, model.neighbors, rng)
        self.bank = ClassifierBank(model.classifiers, model.channels, taxonomy.T, len(taxonomy.stuff_classes), rng)
        self.stages = [RefineStageParams(model.channels, model.heads, rng) for _ in range(model.stages)]

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor]]:
        yield from self.encoder.named_parameters(f"{prefix}encoder.")
        yield from self.bank.named_parameters(f"{prefix}bank.")
        for s, stage in enumerate(self.stages, start=1):
            yield from stage.named_parameters(f"{prefix}stage{s}.")

    def forward(self, pc: PointCloud, initial: Optional[List[StageOutput]] = None) -> List[StageOutput]:
        return decode(encode(pc, self.encoder), self.bank, self.stages, self.refine, initial)

    def predict(self, pc: PointCloud) -> PanopticPrediction:
        with no_grad():
            return infer(self.forward(pc)[-1], self.taxonomy)
