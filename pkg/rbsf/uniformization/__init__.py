# -*- coding: utf-8 -*-
""" Uniformization module """

from .kernel import build_kernel, indicator_blocks, BlockTriple, IndicatorBlocks, UniformizedKernel, MINUS, PLUS
