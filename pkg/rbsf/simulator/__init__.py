# -*- coding: utf-8 -*-
""" Simulator module """

from .paths import (
    sample_exact_path,
    simulate_paths,
    spawn_streams,
    CoordinatePath,
    PathSample,
    Trajectory,
)
from .pasting import paste, sample_pasting, sup_distance, PastingSample, PoissonGrid
from .empirical import (
    compare_with_recursion,
    empirical_joint_cdf,
    Comparison,
    EmpiricalJointCdf,
    COMPARE_HEADER,
)
from .oracle import bridge_frequencies, BridgeFrequencies
from .runner import default_horizon, sample_many, sample_row, SAMPLE_HEADER
from .convergence import (
    convergence_report,
    overshoot_statistics,
    summarize,
    ConvergenceBudget,
    ConvergenceRow,
    OvershootStatistics,
    CONVERGENCE_HEADER,
)
