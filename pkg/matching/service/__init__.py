from .losses import dice_loss, mask_bce_loss, focal_loss
from .hungarian import hungarian_match, solve_assignment
from .matcher import build_cost_matrix, assign, stage_loss, supervise, total_loss

__all__ = [
    "dice_loss",
    "mask_bce_loss",
    "focal_loss",
    "hungarian_match",
    "solve_assignment",
    "build_cost_matrix",
    "assign",
    "stage_loss",
    "supervise",
    "total_loss",
]
