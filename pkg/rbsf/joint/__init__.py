# -*- coding: utf-8 -*-
""" Joint law module """

from .joint_law import (
    joint_cdf,
    step_floor,
    step_pmf_table,
    JointLawRequest,
    JointLawResult,
    StepPmfTable,
    CSV_HEADER,
)
