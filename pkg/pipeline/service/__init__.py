from .run_config import load_run_config
from .network import PupsNetwork
from .trainer import Trainer, cmd_train
from .evaluation import cmd_eval, evaluate_network
from .preview import cmd_augment_preview
from .centers import cmd_export_centers
from .sweep import cmd_sweep

__all__ = [
    "load_run_config",
    "PupsNetwork",
    "Trainer",
    "cmd_train",
    "cmd_eval",
    "evaluate_network",
    "cmd_augment_preview",
    "cmd_export_centers",
    "cmd_sweep",
]
