import numpy as np
import pytest

from scenes import SplitSpec, load_dataset, make_splits, save_dataset
from scenes.iofile import decode_split, encode_split
from tensorcore import DatasetFormatError, load_arrays, save_arrays
from tensorcore.iofile import decode_arrays, encode_arrays


class TestCheckpointFile:
    def test_roundtrip_keeps_dtype_and_values(self, tmp_path):
        arrays = {"enc_R.stage0.conv0.w": np.arange(24, dtype=np.float32).reshape(2, 3, 2, 2),
                  "steps": np.array([3], dtype=np.int64),
                  "argmax": np.array([[0, 3], [1, 2]], dtype=np.int8),
                  "labels": np.array([7, 1], dtype=np.uint8),
                  "scalar": np.array(2.5)}
        path = tmp_path / "net.ckpt"
        save_arrays(path, arrays)
        loaded = load_arrays(path)
        assert list(loaded) == list(arrays)
        for name, array in arrays.items():
            assert loaded[name].dtype == array.dtype
            np.testing.assert_array_equal(loaded[name], array)

    def test_magic(self):
        assert encode_arrays({}).startswith(b"MMCK")

    def test_bad_magic(self):
        with pytest.raises(DatasetFormatError, match="magic"):
            decode_arrays(b"NOPE" + bytes(10))

    def test_bad_version(self):
        blob = bytearray(encode_arrays({"a": np.zeros(2, dtype=np.float32)}))
        blob[4] = 9
        with pytest.raises(DatasetFormatError, match="version"):
            decode_arrays(bytes(blob))

    def test_truncated(self):
        blob = encode_arrays({"a": np.zeros((4, 4), dtype=np.float32)})
        with pytest.raises(DatasetFormatError):
            decode_arrays(blob[:-5])

    def test_unsupported_dtype(self):
        with pytest.raises(DatasetFormatError, match="dtype"):
            encode_arrays({"c": np.zeros(2, dtype=np.complex64)})


class TestDatasetFile:
    def test_roundtrip(self, tmp_path, tiny_splits):
        for split in tiny_splits:
            path = tmp_path / f"{split.name}.mmds"
            save_dataset(split, path)
            loaded = load_dataset(path)
            assert type(loaded) is type(split)
            assert loaded.name == split.name
            assert loaded.spec == split.spec
            np.testing.assert_array_equal(loaded.seeds, split.seeds)
            for field in split.FIELDS:
                np.testing.assert_array_equal(getattr(loaded, field), getattr(split, field))

    def test_d3_file_has_no_rgb(self, tmp_path, tiny_splits):
        d3 = tiny_splits[2]
        save_dataset(d3, tmp_path / "d3.mmds")
        assert not hasattr(load_dataset(tmp_path / "d3.mmds"), "rgb")

    def test_header(self, tiny_splits):
        assert encode_split(tiny_splits[0]).startswith(b"MMDS")

    def test_bad_magic(self):
        with pytest.raises(DatasetFormatError, match="magic"):
            decode_split(b"MMCK" + bytes(20))

    def test_truncated(self, tiny_splits):
        blob = encode_split(tiny_splits[0])
        with pytest.raises(DatasetFormatError):
            decode_split(blob[:-10])

    def test_bad_version(self, tiny_splits):
        blob = bytearray(encode_split(tiny_splits[1]))
        blob[4] = 9
        with pytest.raises(DatasetFormatError, match="version"):
            decode_split(bytes(blob))

    def test_large_split_seed_roundtrip(self, tmp_path):
        # scene seeds reach 5_000_000_000, past the uint32 range
        spec = SplitSpec(n_d1=2, n_d2=2, n_d3=2, seed=5000, num_classes=4, resolution=(16, 16))
        for split in make_splits(spec):
            assert split.seeds.max() > 2 ** 32
            path = tmp_path / f"{split.name}.mmds"
            save_dataset(split, path)
            loaded = load_dataset(path)
            np.testing.assert_array_equal(loaded.seeds, split.seeds)
            for field in split.FIELDS:
                np.testing.assert_array_equal(getattr(loaded, field), getattr(split, field))

    def test_negative_seed_is_a_format_error(self, tiny_splits):
        d1 = tiny_splits[0]
        d1.seeds[0] = -1
        with pytest.raises(DatasetFormatError, match="seed"):
            encode_split(d1)
