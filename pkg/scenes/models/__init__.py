from .model import (
    ClassTaxonomy,
    PointCloud,
    GroundTruth,
    ClassGeometry,
    StuffBand,
    StuffLayout,
    SceneConfig,
)

__all__ = [
    "ClassTaxonomy",
    "PointCloud",
    "GroundTruth",
    "ClassGeometry",
    "StuffBand",
    "StuffLayout",
    "SceneConfig",
]
