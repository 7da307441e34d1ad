from .model import InstanceDB, InstanceEntry, MixPolicy, MixSummary, PlacementMode

__all__ = ["InstanceDB", "InstanceEntry", "MixPolicy", "MixSummary", "PlacementMode"]
