# -*- coding: utf-8 -*-
""" Exceptions and exception logger module """

import sys
import traceback

from typing import Any, Optional


class FluidRuinError(RuntimeError):
    """
    Base class for every domain error. CLI maps it to exit status 1
    """


class ModelError(FluidRuinError):
    """
    Model document cannot be turned into a ModelSpec
    """


class ModelSyntaxError(ModelError):
    """
    Model document is not valid JSON
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f'{message} (line {line}, column {column})')
        self.line = line
        self.column = column


class ModelSchemaError(ModelError):
    """
    Missing, unexpected or mistyped field
    """

    def __init__(self, message: str, field: str):
        super().__init__(f'{field}: {message}')
        self.field = field


class ModelDimensionError(ModelError):
    """
    Matrix or vector does not match its declared state ordering
    """


class GammaTooSmallError(FluidRuinError):
    """
    Observation rate does not strictly dominate the generator diagonals
    """

    def __init__(self, gamma: float, minimal: float, where: str = 'model'):
        super().__init__(f'gamma={gamma:g} is too small for {where}: it must be > {minimal:g}')
        self.gamma = gamma
        self.minimal = minimal


class IndexRangeError(FluidRuinError):
    """
    Bridge length, switch step or split index out of range
    """


class TruncationError(FluidRuinError):
    """
    Step truncation n_max does not cover the requested grid
    """


class NumericalError(FluidRuinError):
    """
    NaN or infinity produced by the recursion
    """


class SamplingError(FluidRuinError):
    """
    Invalid sample set for an estimator
    """


class ConfigurationError(FluidRuinError):
    """
    Inconsistent run configuration
    """


def log_exception(logger, exc: Any, description: str = '', level: Optional[str] = 'error') -> None:
    """
    Log exception, including traceback

    :param logger:
    :param exc:
    :param description:
    :param level:
    :return:
    """
    exc_type, exc_value, exc_tb = sys.exc_info()
    getattr(logger, level or 'error')('%s %s %s', description, exc,
                                      ''.join(traceback.format_exception(exc_type, exc_value, exc_tb)))
