from .encoder import encode, normalize_points, neighbour_indices

__all__ = ["encode", "normalize_points", "neighbour_indices"]
