"""Global scene augmentations: flips along x and y, rotation about z, uniform scaling."""
import logging
from typing import Tuple

import numpy as np

from ..models.model import PointCloud

logger = logging.getLogger(__name__)


def flip(pc: PointCloud, flip_x: bool, flip_y: bool) -> PointCloud:
    points = pc.points.copy()
    if flip_x:
        points[:, 0] = -points[:, 0]
    if flip_y:
        points[:, 1] = -points[:, 1]
    return PointCloud(points=points)


def rotate_z(pc: PointCloud, angle: float) -> PointCloud:
    c, s = np.cos(angle), np.sin(angle)
    points = pc.points.copy()
    x, y = points[:, 0].copy(), points[:, 1].copy()
    points[:, 0] = c * x - s * y
    points[:, 1] = s * x + c * y
    return PointCloud(points=points)


def scale(pc: PointCloud, factor: float) -> PointCloud:
    points = pc.points.copy()
    points[:, :3] *= factor
    return PointCloud(points=points)


def random_global_transform(
    pc: PointCloud,
    rng: np.random.Generator,
    do_flip: bool = True,
    do_rotate: bool = True,
    do_scale: bool = True,
    scale_range: Tuple[float, float] = (0.95, 1.05),
) -> PointCloud:
    """Apply the enabled transforms with freshly drawn parameters; labels are unaffected."""
    if do_flip:
        pc = flip(pc, bool(rng.random() < 0.5), bool(rng.random() < 0.5))
    if do_rotate:
        pc = rotate_z(pc, float(rng.uniform(-np.pi, np.pi)))
    if do_scale:
        pc = scale(pc, float(rng.uniform(*scale_range)))
    return pc
