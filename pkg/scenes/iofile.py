"""
Dataset files.

Layout (little-endian):
    magic        4 bytes  b"MMDS"
    version      uint16
    header_len   uint32, header (UTF-8 JSON: split name, kind, fields, SplitSpec)
    count        uint32
    count times:
        seed     uint64
        length   uint32, zlib-compressed field arrays in header order
                 (rgb/depth float32, seg uint8, C order)
"""
import json
import logging
import struct
import zlib
from dataclasses import asdict
from pathlib import Path
from typing import Union

import numpy as np

from tensorcore import DatasetFormatError

from .config import DATASET_MAGIC, DATASET_VERSION
from .datatypes import FIELD_DTYPES, SPLIT_KINDS, Split, SplitSpec

logger = logging.getLogger(__name__)


def _field_shape(field: str, spec: SplitSpec):
    height, width = spec.resolution
    return {"rgb": (3, height, width), "depth": (1, height, width), "seg": (height, width)}[field]


def encode_split(split: Split) -> bytes:
    header = json.dumps({"split": split.name, "kind": split.KIND, "fields": list(split.FIELDS),
                         "spec": asdict(split.spec)}, sort_keys=True).encode("utf-8")
    chunks = [DATASET_MAGIC, struct.pack("<HI", DATASET_VERSION, len(header)), header,
              struct.pack("<I", len(split))]
    arrays = split.arrays()
    for k, seed in enumerate(split.seeds):
        payload = b"".join(np.ascontiguousarray(arrays[f][k], dtype=FIELD_DTYPES[f]).tobytes() for f in split.FIELDS)
        compressed = zlib.compress(payload, 6)
        try:
            chunks.append(struct.pack("<QI", int(seed), len(compressed)))
        except (struct.error, OverflowError) as exc:
            raise DatasetFormatError(f"scene seed {seed} cannot be stored: {exc}") from exc
        chunks.append(compressed)
    return b"".join(chunks)


def decode_split(blob: bytes) -> Split:
    if blob[:4] != DATASET_MAGIC:
        raise DatasetFormatError("not a dataset file (bad magic)")
    try:
        version, header_len = struct.unpack_from("<HI", blob, 4)
        if version != DATASET_VERSION:
            raise DatasetFormatError(f"dataset version {version} is not supported (expected {DATASET_VERSION})")
        offset = 10
        header = json.loads(blob[offset:offset + header_len].decode("utf-8"))
        offset += header_len
        spec_fields = dict(header["spec"])
        spec_fields["resolution"] = tuple(spec_fields["resolution"])
        spec = SplitSpec(**spec_fields)
        cls = SPLIT_KINDS[header["kind"]]
        (count,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        seeds = np.empty(count, dtype=np.int64)
        arrays = {f: np.empty((count,) + _field_shape(f, spec), dtype=FIELD_DTYPES[f].newbyteorder("="))
                  for f in cls.FIELDS}
        for k in range(count):
            seed, length = struct.unpack_from("<QI", blob, offset)
            offset += 12
            if offset + length > len(blob):
                raise DatasetFormatError(f"dataset truncated inside record {k}")
            payload = zlib.decompress(blob[offset:offset + length])
            offset += length
            seeds[k] = seed
            start = 0
            for f in cls.FIELDS:
                n = int(np.prod(_field_shape(f, spec))) * FIELD_DTYPES[f].itemsize
                if start + n > len(payload):
                    raise DatasetFormatError(f"record {k} is too short for field '{f}'")
                arrays[f][k] = np.frombuffer(payload, dtype=FIELD_DTYPES[f], count=n // FIELD_DTYPES[f].itemsize,
                                             offset=start).reshape(_field_shape(f, spec))
                start += n
    except (struct.error, KeyError, TypeError, ValueError, zlib.error) as exc:
        if isinstance(exc, DatasetFormatError):
            raise
        raise DatasetFormatError(f"corrupt dataset file: {exc}") from exc
    return cls(header["split"], spec, seeds, **arrays)


def save_dataset(split: Split, path: Union[str, Path]) -> None:
    Path(path).write_bytes(encode_split(split))
    logger.info("wrote %s (%d scenes) to %s", split.name, len(split), path)


def load_dataset(path: Union[str, Path]) -> Split:
    return decode_split(Path(path).read_bytes())
