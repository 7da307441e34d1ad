import struct

import numpy as np
import pytest

from autodiff import Linear
from autodiff.dao.checkpoint_dao import CheckpointDAO
from utils.exceptions import CheckpointFormatError, DimensionError


def test_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    state = {"a.weight": rng.normal(size=(3, 4)), "a.bias": rng.normal(size=4), "scalar": np.array(2.5)}
    path = CheckpointDAO.save(tmp_path / "ck.bin", state)
    loaded = CheckpointDAO.load(path)
    assert list(loaded) == list(state)
    for name, values in state.items():
        assert loaded[name].shape == values.shape
        assert np.array_equal(loaded[name], values)


def test_header_layout():
    blob = CheckpointDAO.to_bytes({"w": np.zeros(2)})
    assert blob[:4] == b"PUPS"
    assert struct.unpack_from("<H", blob, 4)[0] == 1


def test_bad_magic_and_version():
    with pytest.raises(CheckpointFormatError):
        CheckpointDAO.from_bytes(b"NOPE" + b"\x00" * 8)
    blob = bytearray(CheckpointDAO.to_bytes({"w": np.zeros(2)}))
    blob[4:6] = struct.pack("<H", 99)
    with pytest.raises(CheckpointFormatError, match="version"):
        CheckpointDAO.from_bytes(bytes(blob))


def test_truncated_record():
    blob = CheckpointDAO.to_bytes({"w": np.zeros(8)})
    with pytest.raises(CheckpointFormatError):
        CheckpointDAO.from_bytes(blob[:-3])


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        CheckpointDAO.load(tmp_path / "absent.bin")


def test_load_state_dict_checks_shapes():
    rng = np.random.default_rng(1)
    layer = Linear(3, 2, rng)
    state = layer.state_dict()
    state["weight"] = np.zeros((2, 3))
    with pytest.raises(DimensionError, match="weight"):
        layer.load_state_dict(state)
    with pytest.raises(DimensionError, match="missing"):
        layer.load_state_dict({"weight": np.zeros((3, 2))})
