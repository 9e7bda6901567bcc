class MixMatchError(Exception):
    """Base class for all errors raised by the mix-and-match toolkit."""
    exit_code = 1


class ConfigError(MixMatchError, ValueError):
    exit_code = 2


class DimensionError(MixMatchError, ValueError):
    """Shape or axis mismatch; the message names the offending axes."""
    exit_code = 3


class ParameterError(MixMatchError, ValueError):
    exit_code = 4


class ContractError(MixMatchError, ValueError):
    exit_code = 5


class CompositionError(MixMatchError, ValueError):
    exit_code = 6


class ProtocolError(MixMatchError, ValueError):
    """A training pair that would break the zero-pair protocol."""
    exit_code = 7


class DatasetFormatError(MixMatchError, ValueError):
    exit_code = 8


class TrainingDivergedError(MixMatchError, RuntimeError):
    exit_code = 9

    def __init__(self, term: str, iteration: int):
        super().__init__(f"Loss term '{term}' became NaN/Inf at iteration {iteration}")
        self.term = term
        self.iteration = iteration
