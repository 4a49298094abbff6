"""Averaging acceleration for slowly convergent oscillatory series

Both the coefficient tails (sums of (-1)^n n^-g or cos(eta n) n^-g) and the
oscillatory potential tails (integrals of sin r / r^b split into half periods)
reduce to the same problem: a sequence of partial sums that oscillates around
its limit with a slowly decaying envelope. Repeatedly averaging neighbours that
sit half a period apart cancels the oscillation level by level.
"""

import math

import numpy as np

from .errors import NoConvergenceError

MAX_LEVELS = 400
HEAD_BLOCKS = 64  # exact head terms per unit stride before acceleration starts


def stride_for(eta: float) -> int:
    """Pairing stride closest to half of the period 2*pi/eta"""
    eta_fold = min(eta % (2 * math.pi), 2 * math.pi - eta % (2 * math.pi))
    if eta_fold <= 0:
        raise ValueError(f"frequency {eta} has no oscillation to pair")
    return max(1, int(round(math.pi / eta_fold)))


def accelerate(partials: np.ndarray, stride: int = 1, tol: float = 1e-15,
               max_levels: int = MAX_LEVELS) -> tuple:
    """
    Limit of an oscillating sequence of partial sums.

    Args:
        partials: S_0, S_1, ... (S_0 is usually the empty sum)
        stride: distance between averaged neighbours, about half a period
        tol: absolute target for the change between two consecutive levels
        max_levels: averaging levels allowed before giving up

    Returns:
        (limit, error_estimate, levels_used)
    """
    level = np.asarray(partials, dtype=np.float64)
    previous = level[0]
    hits = 0
    for depth in range(1, max_levels + 1):
        if level.size <= stride:
            break
        level = 0.5 * (level[:-stride] + level[stride:])
        estimate = level[0]
        error = abs(estimate - previous)
        floor = max(tol, 8 * np.finfo(float).eps * abs(estimate))
        if error <= floor:
            hits += 1
            # two quiet levels in a row, a single small step can be a coincidence
            if hits == 2:
                return float(estimate), float(error), depth
        else:
            hits = 0
        previous = estimate

    raise NoConvergenceError(
        f"averaging did not settle to {tol:.1e} within {max_levels} levels "
        f"(stride {stride}, {len(partials)} partial sums)"
    )


def partial_sums(terms: np.ndarray) -> np.ndarray:
    """S_0 = 0 followed by the running sums of terms"""
    out = np.empty(terms.size + 1, dtype=np.float64)
    out[0] = 0.0
    np.cumsum(terms, out=out[1:])
    return out


def exact_sum(terms: np.ndarray) -> float:
    """Correctly rounded sum of a finite block"""
    return math.fsum(np.asarray(terms, dtype=np.float64).tolist())
