"""Discrete Hardy inequality, its optimal potential and the 1/4 sharpness trial forms"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import List, Sequence, Tuple

import numpy as np

from .errors import InvalidParametersError
from .jacobi import dirichlet_energy, truncate
from .sequences import CoefficientSequence

log = logging.getLogger(__name__)

WEIGHTS = ("quarter", "refined", "exact")
DEFAULT_ELLS = (10, 50, 200)
DEFAULT_LOG_WIDTHS = (3.0, 4.0, 5.0, 6.0)  # log L


def hardy_potential(n):
    """
    (1 + 1/n)^(1/2) + (1 - 1/n)^(1/2) - 2, evaluated without cancellation.

    With u_0(n) = sqrt(n) this satisfies J_0 u_0 = (2 + b) u_0 at every site.
    """
    n = np.asarray(n, dtype=np.float64)
    if np.any(n < 1):
        raise InvalidParametersError("hardy_potential is defined for n >= 1")
    p = np.sqrt(1.0 + 1.0 / n)
    q = np.sqrt(1.0 - 1.0 / n)
    value = -2.0 / (n * n * (p + q) * (p + 1.0) * (q + 1.0))
    return float(value) if value.ndim == 0 else value


def refined_hardy_weight(n):
    """1/(4n^2) + 5/(64n^4), still below |hardy_potential(n)| at every n"""
    n = np.asarray(n, dtype=np.float64)
    value = 0.25 / n ** 2 + 5.0 / (64.0 * n ** 4)
    return float(value) if value.ndim == 0 else value


def hardy_weight(kind: str, sites: np.ndarray) -> np.ndarray:
    if kind == "quarter":
        return 0.25 / sites ** 2
    if kind == "refined":
        return refined_hardy_weight(sites)
    if kind == "exact":
        return np.abs(hardy_potential(sites))
    raise InvalidParametersError(f"unknown Hardy weight '{kind}', expected one of {WEIGHTS}")


def hardy_check(u, weight: str = "quarter") -> Tuple[float, float]:
    """
    (sum w_n u_n^2, <u, (2 - J_0) u>) for u on sites 1..N.

    The right side is u_1^2 + sum (u_{n+1} - u_n)^2 with u vanishing past N.
    """
    u = np.asarray(u, dtype=np.float64)
    sites = np.arange(1, u.size + 1, dtype=np.float64)
    lhs = float(np.dot(hardy_weight(weight, sites), u * u))
    return lhs, dirichlet_energy(u)


@dataclass
class TrialVector:
    """u_n = sqrt(ell) phi(n / ell), phi(x) = x^(1/2) sin(pi log x / log L) on [1, L]"""
    ell: int
    L: float
    values: np.ndarray  # sites 1..len(values)

    @property
    def support(self) -> Tuple[int, int]:
        nonzero = np.flatnonzero(self.values)
        return int(nonzero[0]) + 1, int(nonzero[-1]) + 1


def trial_vector(ell: int, L: float) -> TrialVector:
    if ell < 1 or not L > 1:
        raise InvalidParametersError(f"trial vector needs ell >= 1 and L > 1, got ell={ell}, L={L}")
    last = int(math.floor(L * ell))
    sites = np.arange(1, last + 1, dtype=np.float64)
    x = sites / ell
    values = np.zeros(last)
    inside = x >= 1.0
    xs = x[inside]
    values[inside] = math.sqrt(ell) * np.sqrt(xs) * np.sin(math.pi * np.log(xs) / math.log(L))
    return TrialVector(ell=ell, L=L, values=values)


def near_optimizer(N: int) -> TrialVector:
    """sqrt(n) sin(pi log n / log N) on 1..N; its Hardy ratio tends to 1 like 1 + 4pi^2/(log N)^2"""
    if N < 3:
        raise InvalidParametersError(f"near optimizer needs N >= 3, got {N}")
    return trial_vector(1, float(N))


def sharpness_form(gamma_a: float, gamma_b: float, ell: int, L: float) -> float:
    """<u, (2 - J) u> for a_n = 1 + gamma_a/n^2, b_n = gamma_b/n^2 and the trial vector u(ell, L)"""
    if gamma_a < 0 or gamma_b < 0:
        raise InvalidParametersError(f"gamma_a, gamma_b must be >= 0, got {gamma_a}, {gamma_b}")
    u = trial_vector(ell, L).values
    padded = np.append(u, 0.0)
    J = truncate(CoefficientSequence(kind="inverse-square", alpha=gamma_a, beta=gamma_b), padded.size)
    return 2.0 * float(np.dot(padded, padded)) - J.quadratic_form(padded)


def sharpness_predictor(gamma: float, L: float) -> float:
    """Continuum value of the trial form per unit scale for criterion gamma = 2 gamma_a + gamma_b"""
    s = math.log(L)
    return math.pi ** 2 / (2.0 * s) - (gamma - 0.25) * s / 2.0


@dataclass
class SharpnessSearch:
    gamma_a: float
    gamma_b: float
    values: List[Tuple[int, float, float]]  # (ell, L, form value), lexicographic in (ell, L)

    @property
    def minimum(self) -> Tuple[int, float, float]:
        return min(self.values, key=lambda item: item[2])

    @property
    def any_negative(self) -> bool:
        return self.minimum[2] < 0


def sharpness_search(gamma_a: float, gamma_b: float, ells: Sequence[int] = DEFAULT_ELLS,
                     Ls: Sequence[float] = None, threads: int = 1) -> SharpnessSearch:
    if Ls is None:
        Ls = [math.exp(s) for s in DEFAULT_LOG_WIDTHS]
    grid = list(product(ells, Ls))

    def evaluate(point):
        ell, L = point
        return ell, L, sharpness_form(gamma_a, gamma_b, ell, L)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(evaluate, grid))
    else:
        values = [evaluate(point) for point in grid]

    search = SharpnessSearch(gamma_a=gamma_a, gamma_b=gamma_b, values=values)
    ell, L, value = search.minimum
    log.info("[HARDY] gamma_a=%g gamma_b=%g min form %.6g at ell=%d log L=%.3g",
             gamma_a, gamma_b, value, ell, math.log(L))
    return search
