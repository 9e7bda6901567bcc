import numpy as np
import pytest

from networks import ArchConfig, SideInfoMode
from scenes import SplitSpec, make_splits
from translation import DepthBatch, SegBatch, TrainConfig, build_mixmatch_graph

TINY_CLASSES = 4


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-length acceptance runs")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-length training runs, skipped unless --runslow is given")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def tiny_arch():
    return ArchConfig(stages=[(1, 4), (1, 8)], input_resolution=(16, 16), discriminator_channels=(4, 8))


@pytest.fixture
def tiny_spec():
    return SplitSpec(n_d1=12, n_d2=12, n_d3=4, seed=0, num_classes=TINY_CLASSES, resolution=(16, 16))


@pytest.fixture
def tiny_splits(tiny_spec):
    return make_splits(tiny_spec)


@pytest.fixture
def tiny_graph(tiny_arch):
    return build_mixmatch_graph(tiny_arch, TINY_CLASSES, SideInfoMode.pooling_indices, seed=0)


@pytest.fixture
def tiny_train_config():
    return TrainConfig(iters_phase1=2, iters_phase2=2, batch_size=2, log_interval=2, val_size=4)


@pytest.fixture
def tiny_batches(tiny_splits):
    d1, d2, _ = tiny_splits
    return (SegBatch(rgb=d1.rgb[:2], seg=d1.seg[:2]), DepthBatch(rgb=d2.rgb[:2], depth=d2.depth[:2]))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
