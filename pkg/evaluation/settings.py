"""
Run configuration: one YAML file mirroring the dataclass field names.

    arch: desk
    split: {n_d1: 400, n_d2: 400, n_d3: 100, seed: 0, num_classes: 8}
    train: {iters_phase1: 3000, iters_phase2: 3000, side_info_mode: pooling_indices}
    # or train: full, or train: {preset: full, log_interval: 1000}
    fusion: {alpha: 0.2, index_source: rgb}
    seeds: [0, 1, 2]

Enum values are given by member name. Unknown keys are rejected.
"""
import dataclasses
import typing
from dataclasses import dataclass, field, fields, is_dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from networks import ArchConfig
from networks.check_config import check_arch
from scenes import SplitSpec
from scenes.check_config import check_split_spec
from tensorcore import ConfigError
from translation import FusionSpec, TrainConfig
from translation.check_config import check_fusion, check_train_config

from .config import SWEEP_ALPHAS


@dataclass
class RunConfig:
    arch: ArchConfig = field(default_factory=lambda: ArchConfig.preset("desk"))
    split: SplitSpec = field(default_factory=SplitSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    fusion: FusionSpec = field(default_factory=FusionSpec)
    seeds: List[int] = field(default_factory=lambda: [0])
    alphas: List[float] = field(default_factory=lambda: list(SWEEP_ALPHAS))


def _convert(value: Any, hint: Any, where: str) -> Any:
    origin = typing.get_origin(hint)
    if origin is Union:
        options = [a for a in typing.get_args(hint) if a is not type(None)]
        return None if value is None else _convert(value, options[0], where)
    if isinstance(hint, type) and issubclass(hint, Enum):
        if isinstance(value, hint):
            return value
        try:
            return hint[value]
        except KeyError:
            raise ConfigError(f"{where}: '{value}' is not one of {[e.name for e in hint]}") from None
    if is_dataclass(hint):
        if not isinstance(value, dict):
            raise ConfigError(f"{where} must be a mapping")
        return build_dataclass(hint, value, where)
    if origin in (tuple, Tuple):
        args = typing.get_args(hint)
        if args and args[-1] is Ellipsis:
            return tuple(_convert(v, args[0], where) for v in value)
        return tuple(_convert(v, a, where) for v, a in zip(value, args)) if args else tuple(value)
    if origin in (list, List):
        (arg,) = typing.get_args(hint) or (Any,)
        return [_convert(v, arg, where) for v in value]
    if hint is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if hint in (int, float, str, bool) and not isinstance(value, hint):
        raise ConfigError(f"{where}: expected {hint.__name__}, got {value!r}")
    return value


def build_dataclass(cls, values: Dict[str, Any], where: str, base=None):
    """Instantiate cls from a mapping, starting from base (or the defaults) for missing keys."""
    hints = typing.get_type_hints(cls)
    known = {f.name for f in fields(cls) if f.init}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    converted = {k: _convert(v, hints[k], f"{where}.{k}") for k, v in values.items()}
    if base is None:
        try:
            return cls(**converted)
        except TypeError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    return replace(base, **converted)


def _arch_from(value: Union[str, Dict[str, Any]]) -> ArchConfig:
    if isinstance(value, str):
        try:
            return ArchConfig.preset(value)
        except KeyError:
            raise ConfigError(f"arch: unknown preset '{value}'") from None
    if not isinstance(value, dict):
        raise ConfigError("arch must be a preset name or a mapping")
    values = dict(value)
    base = ArchConfig.preset(values.pop("preset", "custom"))
    return build_dataclass(ArchConfig, values, "arch", base)


TRAIN_PRESETS = {"desk": TrainConfig, "full": TrainConfig.full}


def _train_from(value: Union[str, Dict[str, Any], None]) -> TrainConfig:
    """A schedule preset name, or a mapping with an optional preset key and field overrides."""
    if isinstance(value, str):
        value = {"preset": value}
    if value is not None and not isinstance(value, dict):
        raise ConfigError("train must be a preset name or a mapping")
    values = dict(value or {})
    preset = values.pop("preset", "desk")
    if preset not in TRAIN_PRESETS:
        raise ConfigError(f"train: unknown preset '{preset}'")
    return build_dataclass(TrainConfig, values, "train", TRAIN_PRESETS[preset]())


def run_config_from_dict(values: Optional[Dict[str, Any]]) -> RunConfig:
    values = dict(values or {})
    unknown = sorted(set(values) - {f.name for f in fields(RunConfig)})
    if unknown:
        raise ConfigError(f"unknown top-level keys {unknown}")
    cfg = RunConfig()
    if "arch" in values:
        cfg.arch = _arch_from(values["arch"])
    if "train" in values:
        cfg.train = _train_from(values["train"])
    for name, cls in (("split", SplitSpec), ("fusion", FusionSpec)):
        if name in values:
            setattr(cfg, name, build_dataclass(cls, values[name] or {}, name))
    if "seeds" in values:
        cfg.seeds = [int(s) for s in values["seeds"]]
    if "alphas" in values:
        cfg.alphas = [float(a) for a in values["alphas"]]
    check_run_config(cfg)
    return cfg


def load_run_config(path: Union[str, Path, None]) -> RunConfig:
    if path is None:
        return run_config_from_dict({})
    try:
        with open(path) as f:
            values = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    if values is not None and not isinstance(values, dict):
        raise ConfigError(f"config file {path} must hold a mapping")
    return run_config_from_dict(values)


def apply_seed(cfg: RunConfig, seed: Optional[int]) -> RunConfig:
    """--seed replaces the training seed list; the data seed stays as configured."""
    if seed is None:
        return cfg
    return dataclasses.replace(cfg, seeds=[seed], train=replace(cfg.train, seed=seed))


def check_run_config(cfg: RunConfig):
    check_arch(cfg.arch)
    check_split_spec(cfg.split)
    check_train_config(cfg.train)
    check_fusion(cfg.fusion)
    if tuple(cfg.arch.input_resolution) != tuple(cfg.split.resolution):
        raise ConfigError(f"arch input resolution {cfg.arch.input_resolution} differs from scene resolution "
                          f"{cfg.split.resolution}")
    if not cfg.seeds:
        raise ConfigError("at least one seed is required")
    if any(not 0.0 <= a <= 1.0 for a in cfg.alphas):
        raise ConfigError("alphas must lie in [0, 1]")
