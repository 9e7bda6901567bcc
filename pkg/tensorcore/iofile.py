"""
Checkpoint container: named arrays in one little-endian binary file.

Layout:
    magic      4 bytes  b"MMCK"
    version    uint16
    count      uint32
    count times:
        name_len  uint16, name (UTF-8)
        dtype     uint8   (0 float32, 1 float64, 2 int64, 3 int8, 4 uint8)
        ndim      uint8, dims ndim x uint32
        values    little-endian, C order
"""
import struct
from pathlib import Path
from typing import Dict, Union

import numpy as np
from numpy.typing import NDArray

from .config import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from .errors import DatasetFormatError

DTYPE_TAGS = {0: np.dtype("<f4"), 1: np.dtype("<f8"), 2: np.dtype("<i8"), 3: np.dtype("i1"), 4: np.dtype("u1")}
TAG_OF_DTYPE = {dtype.newbyteorder("="): tag for tag, dtype in DTYPE_TAGS.items()}


def _tag(array: NDArray) -> int:
    try:
        return TAG_OF_DTYPE[array.dtype.newbyteorder("=")]
    except KeyError:
        raise DatasetFormatError(f"unsupported dtype {array.dtype} in checkpoint") from None


def encode_arrays(arrays: Dict[str, NDArray]) -> bytes:
    chunks = [CHECKPOINT_MAGIC, struct.pack("<HI", CHECKPOINT_VERSION, len(arrays))]
    for name, array in arrays.items():
        array = np.asarray(array)
        tag = _tag(array)
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded)) + encoded)
        chunks.append(struct.pack(f"<BB{array.ndim}I", tag, array.ndim, *array.shape))
        chunks.append(np.ascontiguousarray(array, dtype=DTYPE_TAGS[tag]).tobytes())
    return b"".join(chunks)


def decode_arrays(blob: bytes) -> Dict[str, NDArray]:
    if blob[:4] != CHECKPOINT_MAGIC:
        raise DatasetFormatError("not a checkpoint file (bad magic)")
    try:
        version, count = struct.unpack_from("<HI", blob, 4)
        if version != CHECKPOINT_VERSION:
            raise DatasetFormatError(f"checkpoint version {version} is not supported (expected {CHECKPOINT_VERSION})")
        offset = 10
        arrays = {}
        for _ in range(count):
            (name_len,) = struct.unpack_from("<H", blob, offset)
            offset += 2
            name = blob[offset:offset + name_len].decode("utf-8")
            offset += name_len
            tag, ndim = struct.unpack_from("<BB", blob, offset)
            offset += 2
            shape = struct.unpack_from(f"<{ndim}I", blob, offset)
            offset += 4 * ndim
            dtype = DTYPE_TAGS[tag]
            nbytes = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
            if offset + nbytes > len(blob):
                raise DatasetFormatError(f"checkpoint truncated inside array '{name}'")
            arrays[name] = np.frombuffer(blob, dtype=dtype, count=nbytes // dtype.itemsize,
                                         offset=offset).reshape(shape).astype(dtype.newbyteorder("="))
            offset += nbytes
    except (struct.error, KeyError, UnicodeDecodeError) as exc:
        raise DatasetFormatError(f"corrupt checkpoint: {exc}") from exc
    return arrays


def save_arrays(path: Union[str, Path], arrays: Dict[str, NDArray]) -> None:
    Path(path).write_bytes(encode_arrays(arrays))


def load_arrays(path: Union[str, Path]) -> Dict[str, NDArray]:
    return decode_arrays(Path(path).read_bytes())
