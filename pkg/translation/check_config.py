import math

from tensorcore import ConfigError

from .datatypes import FusionSpec, LossWeights, TrainConfig


def check_weights(weights: LossWeights, what: str):
    for name, value in vars(weights).items():
        if not math.isfinite(value) or value < 0:
            raise ConfigError(f'{what}.{name} must be finite and non-negative')


def check_train_config(cfg: TrainConfig):
    if cfg.iters_phase1 < 0 or cfg.iters_phase2 < 0:
        raise ConfigError('Iteration counts must be non-negative')
    if cfg.batch_size < 1:
        raise ConfigError('Batch size must be at least 1')
    if not cfg.lr > 0:
        raise ConfigError('Learning rate must be positive')
    if not (0 <= cfg.beta1 < 1 and 0 <= cfg.beta2 < 1):
        raise ConfigError('Adam betas must lie in [0, 1)')
    if cfg.noise_sigma < 0:
        raise ConfigError('Noise sigma must be non-negative')
    if cfg.log_interval < 1:
        raise ConfigError('Logging interval must be at least 1')
    if cfg.val_size < 0:
        raise ConfigError('Validation size must be non-negative')
    check_weights(cfg.weights_phase1, 'weights_phase1')
    check_weights(cfg.weights_phase2, 'weights_phase2')


def check_fusion(fusion: FusionSpec):
    if not 0.0 <= fusion.alpha <= 1.0:
        raise ConfigError('Fusion alpha must lie in [0, 1]')
