"""
Numeric helpers for RTT feedback
"""
from typing import Sequence, Tuple

import numpy as np


def least_squares_slope(samples: Sequence[Tuple[float, float]]) -> float:
    """
    Least-squares slope of (time, value) pairs

    Args:
        samples: Ordered (time, value) pairs

    Returns:
        Slope in value units per time unit; 0.0 for fewer than two distinct times
    """
    if len(samples) < 2:
        return 0.0
    data = np.asarray(samples, dtype=float)
    times = data[:, 0]
    values = data[:, 1]
    if np.ptp(values) == 0.0:
        return 0.0
    centered = times - times.mean()
    denom = float(np.dot(centered, centered))
    if denom <= 0.0:
        return 0.0
    return float(np.dot(centered, values - values.mean()) / denom)


def population_stddev(samples: Sequence[Tuple[float, float]]) -> float:
    """Population standard deviation of the values of (time, value) pairs"""
    if len(samples) < 2:
        return 0.0
    values = np.asarray([value for _, value in samples], dtype=float)
    if np.ptp(values) == 0.0:
        return 0.0
    return float(values.std())
