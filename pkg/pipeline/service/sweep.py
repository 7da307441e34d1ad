"""
One-parameter ablations.

A sweep document is a run config with a ``[sweep]`` table naming one key
and its values; every value gets its own training run and validation score,
collected into ``sweep.csv`` beside the run directories.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import pandas as pd

from ..models.model import RunConfig
from .data import make_scenes
from .evaluation import evaluate_network
from .run_config import load_sweep
from .trainer import Trainer

logger = logging.getLogger(__name__)

SWEEP_FILE = "sweep.csv"
SCORE_COLUMNS = ["pq", "sq", "rq", "pq_dagger", "pq_things", "pq_stuff"]


def run_one(cfg: RunConfig) -> Dict[str, object]:
    trainer = Trainer(cfg)
    result = trainer.fit()
    report = result.val_report
    if report is None:
        # nothing was trained, score the initial parameters
        scenes = make_scenes(cfg, "val", context=(trainer.taxonomy, trainer.scene_cfg))
        report = evaluate_network(trainer.network, scenes, trainer.taxonomy)
    row: Dict[str, object] = {name: getattr(report, name) for name in SCORE_COLUMNS}
    row["checkpoint"] = result.checkpoint
    return row


def cmd_sweep(
    path: Union[str, Path],
    profile: Optional[str] = None,
    seed: Optional[int] = None,
    out_dir: Optional[str] = None,
) -> Tuple[pd.DataFrame, Path]:
    sweep, configs = load_sweep(path, profile, seed, out_dir)
    rows: List[Dict[str, object]] = []
    for value, cfg in zip(sweep.values, configs):
        logger.info(f"Sweep run {sweep.key}={value} -> {cfg.out_dir}")
        rows.append({sweep.key: value, **run_one(cfg)})

    frame = pd.DataFrame(rows, columns=[sweep.key, *SCORE_COLUMNS, "checkpoint"])
    target = Path(configs[0].out_dir).parent / SWEEP_FILE
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(target, index=False)
    best = frame.loc[frame["pq"].idxmax()]
    logger.info(f"Sweep done: best PQ {100 * best['pq']:.1f} at {sweep.key}={best[sweep.key]}, table at {target}")
    return frame, target
