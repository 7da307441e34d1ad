"""
Synthetic scene generation.

Pipeline: stuff layout → instance placement on context regions → point sampling
→ shuffle. Stuff bands and instance footprints are shapely geometries in the
x-y plane; every random draw comes from one seeded generator, so a seed
reproduces a scene byte for byte.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

import numpy as np
from shapely.affinity import rotate, translate
from shapely.geometry import Polygon, box
from shapely.geometry.base import BaseGeometry
from shapely.ops import unary_union

from utils.config import workers as default_workers
from utils.exceptions import SceneGenerationError
from ..models.model import (
    ClassGeometry,
    ClassTaxonomy,
    GroundTruth,
    PointCloud,
    SceneConfig,
    StuffBand,
    StuffLayout,
)

logger = logging.getLogger(__name__)

Scene = Tuple[PointCloud, GroundTruth]


def toy_scene_config(seed: int = 0) -> SceneConfig:
    """Road flanked by two sidewalks; cars, people and (rare) bicycles."""
    return SceneConfig(
        seed=seed,
        class_weights={1: 0.6, 2: 0.3, 3: 0.1},
        geometry={
            1: ClassGeometry(length=4.2, width=1.8, height=1.5, points_min=30, points_max=50, intensity=0.7),
            2: ClassGeometry(length=0.6, width=0.6, height=1.7, points_min=10, points_max=18, intensity=0.4),
            3: ClassGeometry(length=1.8, width=0.6, height=1.1, points_min=14, points_max=22, intensity=0.55),
        },
        layout=StuffLayout(
            extent_x=40.0,
            bands=[
                StuffBand(class_id=5, y_min=-8.0, y_max=-4.0, height=0.15, intensity=0.3),
                StuffBand(class_id=4, y_min=-4.0, y_max=4.0, height=0.0, intensity=0.1),
                StuffBand(class_id=5, y_min=4.0, y_max=8.0, height=0.15, intensity=0.3),
            ],
        ),
    )


class StuffRegions:
    """Union of band rectangles per stuff class."""

    def __init__(self, layout: StuffLayout):
        half = layout.extent_x / 2.0
        self.layout = layout
        self.band_shapes: List[Tuple[StuffBand, Polygon]] = [
            (band, box(-half, band.y_min, half, band.y_max)) for band in layout.bands
        ]
        by_class: Dict[int, List[Polygon]] = {}
        for band, shape in self.band_shapes:
            by_class.setdefault(band.class_id, []).append(shape)
        self.regions: Dict[int, BaseGeometry] = {c: unary_union(shapes) for c, shapes in by_class.items()}

    def region_for(self, classes: List[int]) -> Optional[BaseGeometry]:
        shapes = [self.regions[c] for c in classes if c in self.regions]
        return unary_union(shapes) if shapes else None

    def ground_height(self, footprint: BaseGeometry) -> float:
        heights = [band.height for band, shape in self.band_shapes if shape.intersects(footprint)]
        return max(heights) if heights else 0.0

    def band_of(self, y: np.ndarray) -> np.ndarray:
        """Index into ``band_shapes`` for each y coordinate (last matching band wins)."""
        out = np.full(y.shape, -1, dtype=np.int64)
        for index, (band, _) in enumerate(self.band_shapes):
            out[(y >= band.y_min) & (y <= band.y_max)] = index
        return out


def footprint_polygon(geom: ClassGeometry, cx: float, cy: float, yaw: float) -> Polygon:
    local = box(-geom.length / 2.0, -geom.width / 2.0, geom.length / 2.0, geom.width / 2.0)
    return translate(rotate(local, yaw, origin=(0, 0), use_radians=True), cx, cy)


class SceneGenerator:
    """Samples scenes for one (config, taxonomy) pair."""

    def __init__(self, cfg: SceneConfig, taxonomy: ClassTaxonomy):
        self.cfg = cfg
        self.taxonomy = taxonomy
        self.regions = StuffRegions(cfg.layout)
        for band in cfg.layout.bands:
            if not taxonomy.is_stuff(band.class_id):
                raise SceneGenerationError(f"band class {band.class_id} is not a stuff class")
        self.thing_classes = [c for c in sorted(taxonomy.thing_classes) if c in cfg.geometry]
        weights = np.array([cfg.class_weights.get(c, 1.0) for c in self.thing_classes], dtype=np.float64)
        self.class_probs = weights / weights.sum() if weights.sum() > 0 else None

    def generate(self, seed: Optional[int] = None) -> Scene:
        rng = np.random.default_rng(self.cfg.seed if seed is None else seed)
        cfg = self.cfg

        n_points = int(rng.integers(cfg.points_min, cfg.points_max + 1))
        n_instances = int(rng.integers(cfg.instances_min, cfg.instances_max + 1))
        if n_instances and self.class_probs is None:
            raise SceneGenerationError("instances requested but no thing class has geometry and weight")

        placed = self._place_instances(rng, n_instances)
        chunks: List[np.ndarray] = []
        group_classes: List[int] = []
        for cls, geom, cx, cy, yaw, base in placed:
            count = int(rng.integers(geom.points_min, geom.points_max + 1))
            chunks.append(self._instance_points(rng, geom, cx, cy, yaw, base, count))
            group_classes.append(cls)

        n_stuff = n_points - sum(len(c) for c in chunks)
        if n_stuff < cfg.min_stuff_points:
            raise SceneGenerationError(
                f"only {n_stuff} points left for stuff after placing {len(placed)} instances"
            )
        stuff_points, stuff_classes = self._stuff_points(rng, n_stuff)

        labels: List[np.ndarray] = []
        for index, chunk in enumerate(chunks):
            labels.append(np.full(len(chunk), index, dtype=np.int64))
        present = sorted(set(stuff_classes.tolist()))
        for offset, cls in enumerate(present):
            group_classes.append(cls)
        stuff_group = {cls: len(chunks) + offset for offset, cls in enumerate(present)}
        labels.append(np.array([stuff_group[c] for c in stuff_classes.tolist()], dtype=np.int64))
        chunks.append(stuff_points)

        points = np.concatenate(chunks, axis=0)
        point_labels = np.concatenate(labels)
        order = rng.permutation(points.shape[0])
        pc = PointCloud(points=points[order])
        gt = GroundTruth.from_group_labels(point_labels[order], np.array(group_classes, dtype=np.int64))
        gt.check_taxonomy(self.taxonomy)
        return pc, gt

    # ==================== Placement ====================

    def _place_instances(self, rng: np.random.Generator, count: int) -> List[tuple]:
        placed: List[tuple] = []
        footprints: List[Polygon] = []
        for _ in range(count):
            cls = int(rng.choice(self.thing_classes, p=self.class_probs))
            geom = self.cfg.geometry[cls]
            region = self.regions.region_for(self.taxonomy.context_table.get(cls, []))
            if region is None or region.is_empty:
                raise SceneGenerationError(f"no context region for class {cls}")
            minx, miny, maxx, maxy = region.bounds
            for _attempt in range(self.cfg.max_retries):
                cx = float(rng.uniform(minx, maxx))
                cy = float(rng.uniform(miny, maxy))
                yaw = float(rng.uniform(-np.pi, np.pi))
                footprint = footprint_polygon(geom, cx, cy, yaw)
                if not region.contains(footprint):
                    continue
                if any(footprint.distance(other) < self.cfg.min_gap for other in footprints):
                    continue
                footprints.append(footprint)
                placed.append((cls, geom, cx, cy, yaw, self.regions.ground_height(footprint)))
                break
            else:
                raise SceneGenerationError(
                    f"could not place a {self.taxonomy.class_names[cls]} after {self.cfg.max_retries} attempts"
                )
        return placed

    @staticmethod
    def _instance_points(
        rng: np.random.Generator,
        geom: ClassGeometry,
        cx: float,
        cy: float,
        yaw: float,
        base: float,
        count: int,
    ) -> np.ndarray:
        local = np.column_stack([
            rng.uniform(-geom.length / 2.0, geom.length / 2.0, count),
            rng.uniform(-geom.width / 2.0, geom.width / 2.0, count),
            rng.uniform(0.0, geom.height, count),
        ])
        c, s = np.cos(yaw), np.sin(yaw)
        x = c * local[:, 0] - s * local[:, 1] + cx
        y = s * local[:, 0] + c * local[:, 1] + cy
        z = local[:, 2] + base
        intensity = np.clip(rng.normal(geom.intensity, 0.05, count), 0.0, 1.0)
        return np.column_stack([x, y, z, intensity])

    def _stuff_points(self, rng: np.random.Generator, count: int) -> Tuple[np.ndarray, np.ndarray]:
        layout = self.cfg.layout
        half = layout.extent_x / 2.0
        y_lo = min(b.y_min for b in layout.bands)
        y_hi = max(b.y_max for b in layout.bands)
        x = rng.uniform(-half, half, count)
        y = rng.uniform(y_lo, y_hi, count)
        band_index = self.regions.band_of(y)
        if np.any(band_index < 0):
            raise SceneGenerationError("stuff bands leave gaps across the sampled y range")
        bands = [self.regions.band_shapes[i][0] for i in band_index.tolist()]
        heights = np.array([b.height for b in bands])
        z = heights + rng.normal(0.0, layout.height_noise, count)
        intensity = np.clip(rng.normal([b.intensity for b in bands], 0.05), 0.0, 1.0)
        classes = np.array([b.class_id for b in bands], dtype=np.int64)
        return np.column_stack([x, y, z, intensity]), classes


def generate_scene(cfg: SceneConfig, taxonomy: ClassTaxonomy) -> Scene:
    return SceneGenerator(cfg, taxonomy).generate()


def generate_scenes(
    cfg: SceneConfig,
    taxonomy: ClassTaxonomy,
    count: int,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[Scene]:
    """Generate ``count`` scenes with seeds ``seed, seed+1, ...`` in a thread pool."""
    if count <= 0:
        return []
    base = cfg.seed if seed is None else seed
    generator = SceneGenerator(cfg, taxonomy)
    logger.info(f"Generating {count} scenes from seed {base}")
    with ThreadPoolExecutor(max_workers=workers or default_workers) as pool:
        return list(pool.map(generator.generate, [base + i for i in range(count)]))
