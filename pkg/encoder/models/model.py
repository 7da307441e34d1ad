from typing import Optional

import numpy as np

from autodiff import Linear, Module


# ========== Encoder Parameters ==========

class EncoderParams(Module):
    """
    Shared per-point MLP (4 → hidden → C) followed by one neighbourhood block
    that concatenates each point's feature with the mean over its k nearest
    neighbours and projects 2C back to C.
    """

    def __init__(
        self,
        channels: int,
        hidden: int,
        neighbors: int = 16,
        rng: Optional[np.random.Generator] = None,
    ):
        if channels < 1 or hidden < 1:
            raise ValueError(f"encoder widths must be positive, got hidden={hidden} channels={channels}")
        if neighbors < 0:
            raise ValueError(f"neighbour count must be nonnegative, got {neighbors}")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.channels = channels
        self.hidden = hidden
        self.neighbors = neighbors
        self.input = Linear(4, hidden, rng)
        self.lift = Linear(hidden, channels, rng)
        self.merge = Linear(2 * channels, channels, rng)
