# -*- coding: utf-8 -*-
""" Seed splitting module """

MASK64 = 0xFFFFFFFFFFFFFFFF


def mix_seed(root: int, index: int) -> int:
    """
    mix_seed - per-sample seed: splitmix64 finaliser applied to root XOR index.
    Depends only on (root, index), so results do not depend on worker count or order

    :param root:
    :param index:
    :return:
    """
    value = ((root & MASK64) ^ (index & MASK64)) & MASK64
    value = (value + 0x9E3779B97F4A7C15) & MASK64
    value = ((value ^ (value >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    value = ((value ^ (value >> 27)) * 0x94D049BB133111EB) & MASK64
    return value ^ (value >> 31)
