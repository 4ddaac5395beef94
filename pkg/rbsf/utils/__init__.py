# -*- coding: utf-8 -*-
""" Utilities module """

from .exc import (
    log_exception,
    ConfigurationError,
    FluidRuinError,
    GammaTooSmallError,
    IndexRangeError,
    ModelDimensionError,
    ModelError,
    ModelSchemaError,
    ModelSyntaxError,
    NumericalError,
    SamplingError,
    TruncationError,
)
from .memcache import Memcache
from .seeds import mix_seed
from .pool import named_pool
