import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from autodiff.dao.checkpoint_dao import CheckpointDAO
from autodiff.layers import Module
from ..models.model import RunConfig

logger = logging.getLogger(__name__)

METRICS_FILE = "metrics.jsonl"
CHECKPOINT_FILE = "checkpoint.bin"
CONFIG_FILE = "config.json"
DIVERGENCE_FILE = "divergence.json"


class RunDAO:
    """Files of one run directory: resolved config, append-only metrics log, checkpoints, divergence dump."""

    def __init__(self, out_dir: Union[str, Path]):
        self.root = Path(out_dir)
        self.root.mkdir(parents=True, exist_ok=True)

    @property
    def metrics_path(self) -> Path:
        return self.root / METRICS_FILE

    @property
    def checkpoint_path(self) -> Path:
        return self.root / CHECKPOINT_FILE

    # ========== Config ==========

    def write_config(self, cfg: RunConfig) -> Path:
        path = self.root / CONFIG_FILE
        path.write_text(cfg.model_dump_json(indent=2), encoding="utf-8")
        return path

    @staticmethod
    def read_config(path: Union[str, Path]) -> RunConfig:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Run config not found: {path}")
        return RunConfig.model_validate_json(path.read_text(encoding="utf-8"))

    # ========== Metrics ==========

    def reset_metrics(self) -> None:
        self.metrics_path.write_text("", encoding="utf-8")

    def append_metrics(self, record: Dict[str, Any]) -> None:
        with self.metrics_path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")

    @staticmethod
    def read_metrics(path: Union[str, Path]) -> List[Dict[str, Any]]:
        path = Path(path)
        if not path.exists():
            return []
        lines = path.read_text(encoding="utf-8").splitlines()
        return [json.loads(line) for line in lines if line.strip()]

    # ========== Checkpoints ==========

    def save_checkpoint(self, network: Module, epoch: Optional[int] = None) -> Path:
        state = network.state_dict()
        if epoch is not None:
            CheckpointDAO.save(self.root / "checkpoints" / f"epoch_{epoch:03d}.bin", state)
        return CheckpointDAO.save(self.checkpoint_path, state)

    @staticmethod
    def load_checkpoint(network: Module, path: Union[str, Path]) -> None:
        network.load_state_dict(CheckpointDAO.load(path))
        logger.info(f"Loaded checkpoint {path}")

    def write_divergence(self, info: Dict[str, Any]) -> Path:
        path = self.root / DIVERGENCE_FILE
        path.write_text(json.dumps(info, indent=2, sort_keys=True), encoding="utf-8")
        logger.error(f"Non-finite loss; diagnostics written to {path}")
        return path
