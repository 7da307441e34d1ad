"""Minimum-cost rectangular assignment by shortest augmenting paths with dual potentials."""
import logging
from typing import List, Tuple

import numpy as np

from utils.exceptions import CapacityError, ContractError
from ..models.model import Assignment

logger = logging.getLogger(__name__)


def solve_assignment(cost: np.ndarray) -> List[Tuple[int, int]]:
    """
    Assign every row of an M×N cost matrix (M ≤ N) to a distinct column with
    minimum total cost. Returns (row, column) pairs sorted by row.

    Rows are inserted one at a time; columns are scanned in ascending order and
    only a strictly smaller reduced cost replaces the incumbent, so among equal
    candidates the lowest column index is kept.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ContractError(f"cost matrix must be 2-D, got shape {cost.shape}")
    n_rows, n_cols = cost.shape
    if n_rows > n_cols:
        raise CapacityError(f"{n_rows} rows cannot be assigned to {n_cols} columns")
    if not np.all(np.isfinite(cost)):
        raise ContractError("cost matrix holds non-finite entries")
    if n_rows == 0:
        return []

    # 1-based potentials; index 0 is the virtual source column
    u = np.zeros(n_rows + 1)
    v = np.zeros(n_cols + 1)
    owner = np.zeros(n_cols + 1, dtype=np.int64)
    way = np.zeros(n_cols + 1, dtype=np.int64)

    for row in range(1, n_rows + 1):
        owner[0] = row
        j0 = 0
        minv = np.full(n_cols + 1, np.inf)
        used = np.zeros(n_cols + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = owner[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, n_cols + 1):
                if used[j]:
                    continue
                reduced = cost[i0 - 1, j - 1] - u[i0] - v[j]
                if reduced < minv[j]:
                    minv[j] = reduced
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n_cols + 1):
                if used[j]:
                    u[owner[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1

    pairs = [(int(owner[j]) - 1, j - 1) for j in range(1, n_cols + 1) if owner[j]]
    return sorted(pairs)


def hungarian_match(cost: np.ndarray) -> Assignment:
    """Match ground-truth rows to classifier columns; unassigned columns are unmatched."""
    cost = np.asarray(cost, dtype=np.float64)
    pairs = solve_assignment(cost)
    return Assignment.from_pairs(pairs, cost.shape[1] if cost.ndim == 2 else 0)


def assignment_cost(cost: np.ndarray, assignment: Assignment) -> float:
    return float(sum(cost[j, i] for j, i in assignment.pairs))
