# -*- coding: utf-8 -*-
""" Model module """

from .model import (
    coordinate_gamma_zero,
    coordinate_to_dict,
    gamma_zero,
    mean_drift,
    parse_model,
    partition_signs,
    renormalize,
    serialize_model,
    stationary_vector,
    validate,
    CoordinateModel,
    ModelSpec,
    SignPartition,
    ValidationIssue,
    ValidationReport,
    TOLERANCE,
)
