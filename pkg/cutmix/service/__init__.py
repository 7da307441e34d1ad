from .instance_db import build_db, extract_instances
from .mixer import CutMixer, mix

__all__ = ["build_db", "extract_instances", "CutMixer", "mix"]
