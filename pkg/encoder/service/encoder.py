"""Per-point feature extractor: MLP over (x, y, z, intensity) plus one kNN mean-aggregation block."""
import logging

import numpy as np
from scipy.spatial import cKDTree

from autodiff import Tensor
from autodiff import functional as F
from scenes.models.model import PointCloud
from ..models.model import EncoderParams

logger = logging.getLogger(__name__)


def normalize_points(pc: PointCloud) -> np.ndarray:
    """Centre xyz on the scene mean and divide by the largest point radius; intensity is kept."""
    xyz = pc.xyz - pc.xyz.mean(axis=0)
    radius = float(np.sqrt((xyz * xyz).sum(axis=1)).max())
    if radius > 0:
        xyz = xyz / radius
    return np.column_stack([xyz, pc.intensity])


def neighbour_indices(xyz: np.ndarray, k: int) -> np.ndarray:
    """
    Indices of each point's closed k-neighbourhood, shape (K, k+1): the point
    itself first, then its k nearest others. Ties are resolved by index so
    coincident points see identical neighbourhoods.
    """
    K = xyz.shape[0]
    if k == 0 or K == 1:
        return np.arange(K)[:, None]
    tree = cKDTree(xyz)
    _, idx = tree.query(xyz, k=k + 1)
    idx = np.asarray(idx).reshape(K, k + 1)
    # the query may return a coincident twin before the point itself
    own = np.arange(K)
    for row in np.flatnonzero(idx[:, 0] != own):
        others = [j for j in idx[row].tolist() if j != row][:k]
        idx[row] = [row] + others
    return idx


def encode(pc: PointCloud, params: EncoderParams) -> Tensor:
    """Features F of shape (K, C); differentiable with respect to every encoder parameter."""
    k = params.neighbors
    if k >= pc.K:
        logger.warning(f"Neighbour count {k} >= point count {pc.K}; clamping to {pc.K - 1}")
        k = pc.K - 1

    x = Tensor(normalize_points(pc))
    hidden = F.relu(params.input(x))
    point_feat = F.relu(params.lift(hidden))

    idx = neighbour_indices(pc.xyz, k)
    gathered = point_feat[idx]
    context = gathered.mean(axis=1)
    return params.merge(F.concat([point_feat, context], axis=1))
