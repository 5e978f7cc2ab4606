"""Shared integer rounding rule.

Encoder and decoder must produce bit-identical integers everywhere a real
value is rounded, so the rule lives in one place: round half away from zero.
"""

import numpy as np


def round_half_away(x):
    """Round to the nearest integer, halves away from zero.

    Works elementwise on arrays; returns the same floating dtype as the
    input (use ``.astype(...)`` at the call site for an integer result).
    """
    x = np.asarray(x)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)
