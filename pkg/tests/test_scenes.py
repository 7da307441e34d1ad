import numpy as np
import pytest

from scenes.dao.config_dao import load_scene_config, load_taxonomy
from scenes.dao.kitti_dao import KittiDAO, decode_kitti_labels, encode_kitti_labels
from scenes.models.model import ClassTaxonomy, GroundTruth, PointCloud
from scenes.service.generator import SceneGenerator, generate_scenes
from scenes.service.transforms import flip, random_global_transform, rotate_z
from utils.exceptions import ConfigError, LabelEncodingError, LabelFormatError


# ==================== Generator ====================

def test_masks_partition_every_point(scene_cfg, taxonomy):
    for pc, gt in generate_scenes(scene_cfg, taxonomy, 20, seed=11, workers=2):
        assert pc.K == gt.K == 512
        assert np.array_equal(gt.masks.sum(axis=0), np.ones(gt.K))
        gt.check_taxonomy(taxonomy)


def test_same_seed_same_scene(scene_cfg, taxonomy):
    gen = SceneGenerator(scene_cfg, taxonomy)
    (pc1, gt1), (pc2, gt2) = gen.generate(5), gen.generate(5)
    assert pc1.equals(pc2)
    assert np.array_equal(gt1.masks, gt2.masks) and np.array_equal(gt1.classes, gt2.classes)
    assert not gen.generate(6)[0].equals(pc1)


def test_zero_instances_gives_stuff_only(scene_cfg, taxonomy):
    cfg = scene_cfg.model_copy(update={"instances_min": 0, "instances_max": 0})
    pc, gt = SceneGenerator(cfg, taxonomy).generate(0)
    assert gt.thing_indices(taxonomy) == []
    assert set(gt.classes.tolist()) <= set(taxonomy.stuff_classes)
    assert np.array_equal(gt.masks.sum(axis=0), np.ones(pc.K))


def test_five_cars_stand_on_the_road(scene_cfg, taxonomy):
    cfg = scene_cfg.model_copy(update={"instances_min": 5, "instances_max": 5, "class_weights": {1: 1.0, 2: 0.0, 3: 0.0}})
    pc, gt = SceneGenerator(cfg, taxonomy).generate(3)
    things = gt.thing_indices(taxonomy)
    assert len(things) == 5
    assert all(gt.classes[j] == 1 for j in things)
    for j in things:
        car = pc.xyz[gt.masks[j]]
        assert np.all(np.abs(car[:, 1]) <= 4.0 + 1e-9)
        assert car[:, 2].min() >= -1e-9


def test_scene_config_file_overrides(tmp_path):
    path = tmp_path / "scene.toml"
    path.write_text("instances_max = 2\nmin_gap = 2.0\n", encoding="utf-8")
    cfg = load_scene_config(path, seed=4)
    assert cfg.instances_max == 2 and cfg.min_gap == 2.0 and cfg.seed == 4
    path.write_text("bogus_key = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_scene_config(path)


def test_taxonomy_presets_and_files(tmp_path):
    assert load_taxonomy("toy").T == 5
    kitti = load_taxonomy("semantic_kitti")
    assert kitti.T == 19 and len(kitti.thing_classes) == 8
    path = tmp_path / "two.toml"
    path.write_text(
        'thing_classes = [1]\nstuff_classes = [2]\n[class_names]\n1 = "box"\n2 = "floor"\n',
        encoding="utf-8",
    )
    custom = load_taxonomy(path)
    assert custom.name == "two" and custom.class_id("floor") == 2


def test_nuscenes_preset():
    nuscenes = load_taxonomy("nuscenes")
    assert nuscenes.T == 16
    assert len(nuscenes.thing_classes) == 10 and len(nuscenes.stuff_classes) == 6
    assert nuscenes.semantic_map()[nuscenes.class_id("pedestrian")] == 2

    # one adult and one child pedestrian, a car, drivable surface, an ignored ego-vehicle point
    raw = np.array([(1 << 16) | 2, (2 << 16) | 3, (3 << 16) | 17, 24, 31], dtype="<u4")
    gt = decode_kitti_labels(raw.tobytes(), 5, nuscenes)
    assert gt.semantic_of_point().tolist() == [7, 7, 4, 11, 0]
    assert sorted(gt.classes.tolist()) == [4, 7, 7, 11]


# ==================== Transforms ====================

def test_transforms_keep_distances(rng):
    pc = PointCloud(points=np.column_stack([rng.normal(size=(30, 3)), rng.uniform(size=30)]))
    moved = rotate_z(flip(pc, True, False), 0.7)
    d0 = np.linalg.norm(pc.xyz[0] - pc.xyz[1:], axis=1)
    d1 = np.linalg.norm(moved.xyz[0] - moved.xyz[1:], axis=1)
    assert np.allclose(d0, d1)
    assert np.array_equal(moved.intensity, pc.intensity)
    scaled = random_global_transform(pc, rng, do_flip=False, do_rotate=False, scale_range=(2.0, 2.0))
    assert np.allclose(scaled.xyz, 2.0 * pc.xyz)


# ==================== SemanticKITTI codec ====================

def test_bit_packing_examples(kitti_taxonomy):
    labels = np.array([0, 0, 1])
    gt = GroundTruth.from_group_labels(labels, np.array([1, 9]))
    raw = np.frombuffer(encode_kitti_labels(gt, kitti_taxonomy.semantic_map(), kitti_taxonomy), dtype="<u4")
    assert raw.tolist() == [0x0001000A, 0x0001000A, 0x00000028]


def test_decode_applies_learning_map(kitti_taxonomy):
    raw = np.array([0x0001000A, (3 << 16) | 252, 0x28, 60, 0, 52], dtype="<u4")
    gt = decode_kitti_labels(raw.tobytes(), 6, kitti_taxonomy)
    assert gt.semantic_of_point().tolist() == [1, 1, 9, 9, 0, 0]
    assert gt.void.tolist() == [False, False, False, False, True, True]
    # two car instances, one merged road group
    assert sorted(gt.classes.tolist()) == [1, 1, 9]


def test_random_labels_round_trip_bit_exact(rng):
    groups = 300
    semantic = np.sort(rng.integers(1, 1 << 16, groups))
    instance = np.arange(1, groups + 1)
    keys = (instance << 16) | semantic
    labels = rng.permutation(np.concatenate([np.arange(groups), rng.integers(0, groups, 10_000 - groups)]))
    raw = keys[labels].astype("<u4")

    gt = decode_kitti_labels(raw.tobytes(), raw.size)
    assert np.array_equal(gt.semantic_of_point(), raw & 0xFFFF)
    identity = {int(c): int(c) for c in gt.classes}
    every_class = range(1, 1 << 16)
    all_things = ClassTaxonomy(
        name="wide", class_names={c: f"c{c}" for c in every_class}, thing_classes=list(every_class), stuff_classes=[]
    )
    assert encode_kitti_labels(gt, identity, all_things) == raw.tobytes()


def test_stuff_only_scene_carries_no_instances(kitti_taxonomy):
    road = kitti_taxonomy.class_id("road")
    gt = GroundTruth.from_group_labels(np.zeros(5, dtype=np.int64), np.array([road]))
    semantic_map = kitti_taxonomy.semantic_map()
    raw = np.frombuffer(encode_kitti_labels(gt, semantic_map, kitti_taxonomy), dtype="<u4")
    assert raw.tolist() == [semantic_map[road]] * 5
    assert raw.tolist() == [0x28] * 5
    with pytest.raises(TypeError):
        encode_kitti_labels(gt, semantic_map)


def test_scene_round_trip_through_files(tmp_path, scene_cfg, taxonomy):
    pc, gt = SceneGenerator(scene_cfg, taxonomy).generate(2)
    bin_path, label_path = KittiDAO.write_scan(tmp_path, "000000", pc, gt, taxonomy)
    back = KittiDAO.read_labels(label_path, taxonomy)
    assert back.same_partition(gt)
    points = KittiDAO.read_points(bin_path)
    assert np.allclose(points.points, pc.points, atol=1e-5)


def test_codec_errors(taxonomy):
    gt = GroundTruth.from_group_labels(np.zeros(3, dtype=np.int64), np.array([1]))
    with pytest.raises(LabelEncodingError):
        encode_kitti_labels(gt, {1: 1 << 16}, taxonomy)
    with pytest.raises(LabelFormatError):
        decode_kitti_labels(b"\x00" * 7, 2)
    with pytest.raises(LabelFormatError):
        decode_kitti_labels(np.array([77], dtype="<u4").tobytes(), 1, taxonomy)
