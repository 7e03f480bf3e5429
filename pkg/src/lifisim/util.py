"""Small numeric helpers shared across the simulator."""

import numpy as np
from scipy.special import erfc

LOG2 = np.log(2.0)


def db_to_linear(x_db):
    """Convert a power ratio from dB to linear scale."""
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    """Convert a linear power ratio to dB."""
    return 10.0 * np.log10(x)


def qfunc(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x).

    Evaluated through the complementary error function in double
    precision; accurate far into the tail (Q(40) ~ 1e-350 underflows
    cleanly to 0).
    """
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def wilson_interval(n_errors, n_trials, z=1.96):
    """Wilson score confidence interval for a binomial proportion.

    Args:
        n_errors: observed error count.
        n_trials: number of trials (> 0).
        z: normal quantile, 1.96 for a 95% interval.

    Returns:
        (low, high) bounds on the error probability.
    """
    if n_trials <= 0:
        raise ValueError("n_trials must be positive")
    p = n_errors / n_trials
    denom = 1.0 + z * z / n_trials
    center = (p + z * z / (2 * n_trials)) / denom
    half = (z / denom) * np.sqrt(p * (1 - p) / n_trials + z * z / (4 * n_trials ** 2))
    # rounding must not push the sample proportion outside its interval
    return min(max(center - half, 0.0), p), max(min(center + half, 1.0), p)
