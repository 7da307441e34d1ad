"""
Binary parameter checkpoints.

Layout: b"PUPS", format version (u16), then one record per parameter until
end of file: name length (u32), UTF-8 name, rank (u32), dims (u64 each),
little-endian float64 values in row-major order.
"""
import logging
import struct
from pathlib import Path
from typing import Dict, Union

import numpy as np

from utils.config import checkpoint_magic, checkpoint_version
from utils.exceptions import CheckpointFormatError

logger = logging.getLogger(__name__)


class CheckpointDAO:

    @staticmethod
    def to_bytes(state: Dict[str, np.ndarray]) -> bytes:
        chunks = [checkpoint_magic, struct.pack("<H", checkpoint_version)]
        for name, values in state.items():
            encoded = name.encode("utf-8")
            arr = np.ascontiguousarray(values, dtype="<f8")
            chunks.append(struct.pack("<I", len(encoded)))
            chunks.append(encoded)
            chunks.append(struct.pack("<I", arr.ndim))
            chunks.append(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            chunks.append(arr.tobytes(order="C"))
        return b"".join(chunks)

    @staticmethod
    def from_bytes(blob: bytes) -> Dict[str, np.ndarray]:
        if blob[:4] != checkpoint_magic:
            raise CheckpointFormatError("not a checkpoint file (bad magic bytes)")
        if len(blob) < 6:
            raise CheckpointFormatError("checkpoint header truncated")
        (version,) = struct.unpack_from("<H", blob, 4)
        if version != checkpoint_version:
            raise CheckpointFormatError(f"unsupported checkpoint version {version}")

        state: Dict[str, np.ndarray] = {}
        offset = 6
        try:
            while offset < len(blob):
                (name_len,) = struct.unpack_from("<I", blob, offset)
                offset += 4
                name = blob[offset:offset + name_len].decode("utf-8")
                offset += name_len
                (rank,) = struct.unpack_from("<I", blob, offset)
                offset += 4
                dims = struct.unpack_from(f"<{rank}Q", blob, offset)
                offset += 8 * rank
                count = int(np.prod(dims)) if rank else 1
                nbytes = 8 * count
                if offset + nbytes > len(blob):
                    raise CheckpointFormatError(f"record '{name}' truncated")
                values = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
                state[name] = values.reshape(dims).astype(np.float64)
                offset += nbytes
        except (struct.error, UnicodeDecodeError) as exc:
            raise CheckpointFormatError(f"corrupt checkpoint record at byte {offset}: {exc}") from exc
        return state

    @staticmethod
    def save(path: Union[str, Path], state: Dict[str, np.ndarray]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(CheckpointDAO.to_bytes(state))
        logger.info(f"Saved checkpoint with {len(state)} parameters to {path}")
        return path

    @staticmethod
    def load(path: Union[str, Path]) -> Dict[str, np.ndarray]:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Checkpoint not found: {path}")
        state = CheckpointDAO.from_bytes(path.read_bytes())
        logger.info(f"Loaded checkpoint with {len(state)} parameters from {path}")
        return state
