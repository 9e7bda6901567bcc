from tensorcore import ConfigError

from .config import MIN_RESOLUTION, MAX_NUM_CLASSES
from .datatypes import SplitSpec


def check_split_spec(spec: SplitSpec):
    for name in ("n_d1", "n_d2", "n_d3"):
        if getattr(spec, name) < 1:
            raise ConfigError(f'{name} must be positive')
    height, width = spec.resolution
    if height < MIN_RESOLUTION or width < MIN_RESOLUTION:
        raise ConfigError(f'Resolution {height}x{width} is below {MIN_RESOLUTION}x{MIN_RESOLUTION}')
    if not 2 <= spec.num_classes <= MAX_NUM_CLASSES:
        raise ConfigError(f'num_classes must lie between 2 and {MAX_NUM_CLASSES}')
    if spec.min_primitives < 0 or spec.max_primitives < spec.min_primitives:
        raise ConfigError('Primitive count range is invalid')
    if spec.seed < 0:
        raise ConfigError('Seed must be non-negative')
