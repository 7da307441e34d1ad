"""
Training loop.

One optimizer step per batch: every scene of the batch is augmented,
decoded and supervised on a single tape, the batch loss is the mean of the
scene losses, and gradients flow back once. Scenes are processed in batch
order so the accumulated gradient does not depend on scheduling.
"""
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel

from autodiff import AdamW, StepLR, clip_grad_norm, tape
from cutmix.models.model import InstanceDB
from cutmix.service.instance_db import build_db
from cutmix.service.mixer import CutMixer
from matching.service.matcher import supervise
from panoptic.models.model import PQReport
from scenes.service.transforms import random_global_transform
from utils.exceptions import ContractError, TrainingDivergedError
from ..dao.run_dao import RunDAO
from ..models.model import RunConfig
from .data import Scene, make_scenes, run_context, split_seed
from .evaluation import evaluate_network
from .network import PupsNetwork

logger = logging.getLogger(__name__)


class TrainResult(BaseModel):
    checkpoint: str
    metrics: str
    epochs: int
    val_report: Optional[PQReport] = None


class Trainer:

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.taxonomy, self.scene_cfg = run_context(cfg)
        self.network = PupsNetwork(cfg.model, self.taxonomy, seed=cfg.seed)
        self.optimizer = AdamW(self.network.parameters(), lr=cfg.optim.lr, weight_decay=cfg.optim.weight_decay)
        self.scheduler = StepLR(self.optimizer, cfg.optim.lr_milestone, cfg.optim.lr_decay)
        self.dao = RunDAO(cfg.out_dir)
        self.rng = np.random.default_rng(split_seed(cfg, "train") + 1)
        self.mixer: Optional[CutMixer] = None

    # ==================== Data ====================

    def prepare(self) -> None:
        cfg = self.cfg
        context = (self.taxonomy, self.scene_cfg)
        self.train_scenes = make_scenes(cfg, "train", context=context) if cfg.optim.epochs else []
        self.val_scenes = make_scenes(cfg, "val", context=context) if cfg.optim.epochs else []
        if cfg.cutmix.enabled and self.train_scenes:
            db: InstanceDB = build_db(self.train_scenes, self.taxonomy)
            self.mixer = CutMixer(db, cfg.cutmix.policy(), self.taxonomy)
        logger.info(
            f"Prepared {len(self.train_scenes)} train / {len(self.val_scenes)} val scenes "
            f"(cutmix {'on, ' + cfg.cutmix.mode.value if self.mixer else 'off'})"
        )

    def augment(self, scene: Scene) -> Scene:
        pc, gt = scene
        if self.mixer is not None:
            pc, gt, _ = self.mixer.mix((pc, gt), self.rng)
        aug = self.cfg.augment
        pc = random_global_transform(pc, self.rng, aug.flip, aug.rotate, aug.scale, tuple(aug.scale_range))
        return pc, gt

    # ==================== Optimisation ====================

    def train_step(self, batch: List[Scene], epoch: int, step: int, scene_ids: List[int]) -> Dict[str, object]:
        S = self.cfg.model.stages
        stage_sums = np.zeros(S)
        self.optimizer.zero_grad()
        with tape():
            try:
                total = None
                for pc, gt in batch:
                    loss, per_stage, _ = supervise(self.network.forward(pc), gt, self.taxonomy, self.cfg.loss)
                    total = loss if total is None else total + loss
                    stage_sums += [s.item() for s in per_stage]
                total = total * (1.0 / len(batch))
            except ContractError as exc:
                self._diverged(epoch, step, scene_ids, stage_sums / len(batch), str(exc))
            value = total.item()
            if not math.isfinite(value):
                self._diverged(epoch, step, scene_ids, stage_sums / len(batch), "loss is not finite")
            total.backward()

        grad_norm = clip_grad_norm(self.optimizer.params, self.cfg.optim.grad_clip)
        self.optimizer.step()
        return {
            "epoch": epoch,
            "step": step,
            "lr": self.optimizer.lr,
            "loss": value,
            "stage_losses": (stage_sums / len(batch)).tolist(),
            "grad_norm": grad_norm,
        }

    def _diverged(self, epoch: int, step: int, scene_ids: List[int], stage_losses: np.ndarray, reason: str) -> None:
        self.dao.write_divergence({
            "epoch": epoch,
            "step": step,
            "scene_ids": scene_ids,
            "stage_losses": [float(v) if math.isfinite(v) else str(v) for v in stage_losses.tolist()],
            "reason": reason,
        })
        raise TrainingDivergedError(f"training diverged at epoch {epoch} step {step}: {reason}")

    def fit(self) -> TrainResult:
        cfg = self.cfg
        self.dao.write_config(cfg)
        self.dao.reset_metrics()
        self.prepare()

        report: Optional[PQReport] = None
        n = len(self.train_scenes)
        bs = cfg.optim.batch_size
        for epoch in range(cfg.optim.epochs):
            lr = self.scheduler.set_epoch(epoch)
            order = self.rng.permutation(n)
            losses = []
            for step, start in enumerate(range(0, n, bs)):
                ids = [int(i) for i in order[start:start + bs]]
                batch = [self.augment(self.train_scenes[i]) for i in ids]
                record = self.train_step(batch, epoch, step, ids)
                losses.append(record["loss"])
                self.dao.append_metrics(record)

            report = evaluate_network(self.network, self.val_scenes, self.taxonomy) if self.val_scenes else None
            val_pq = report.pq if report else None
            self.dao.append_metrics({
                "epoch": epoch,
                "lr": lr,
                "train_loss": float(np.mean(losses)) if losses else None,
                "val_pq": val_pq,
                "val_pq_dagger": report.pq_dagger if report else None,
            })
            self.dao.save_checkpoint(self.network, epoch)
            logger.info(
                f"Epoch {epoch + 1}/{cfg.optim.epochs}: loss {np.mean(losses) if losses else float('nan'):.4f}, "
                f"val PQ {100.0 * val_pq if val_pq is not None else float('nan'):.1f}"
            )

        checkpoint = self.dao.save_checkpoint(self.network)
        return TrainResult(
            checkpoint=str(checkpoint),
            metrics=str(self.dao.metrics_path),
            epochs=cfg.optim.epochs,
            val_report=report,
        )


def cmd_train(cfg: RunConfig) -> TrainResult:
    logger.info(f"Training into {Path(cfg.out_dir).resolve()}")
    return Trainer(cfg).fit()
