# -*- coding: utf-8 -*-
""" Bridge recursion module """

from .recursion import (
    canonical_switch_index,
    level_density,
    psi_matrix,
    psi_table,
    q_matrix,
    ruin_step_pmf,
    LevelDensity,
    PsiMatrix,
    QTable,
)
