"""
Spectral density and Szegő integral of eventually free Jacobi matrices

Beyond the horizon H the coefficients are free, so the Jost solution is
u(k) = z^k there, with z = (E - i sqrt(4 - E^2))/2 = exp(-i theta) for
E = 2 cos(theta). Recursing it down to the origin gives

    m(E + i0) = -u(1)/u(0)
    density   = sin(theta) / (pi |u(0)|^2)     (the Wronskian is -sin(theta))

and the Szegő integrand log(sin(theta) / (pi density)) reduces to 2 log|u(0)|.
The sweep keeps log|u(0)| through explicit rescaling, so neither the density
nor the integrand underflow.
"""

import logging
import math
from dataclasses import dataclass, field, asdict
from typing import List, Sequence, Tuple

import numba
import numpy as np

from .errors import InvalidParametersError, ResonanceError
from .sequences import CoefficientSequence, coefficients

log = logging.getLogger(__name__)

RESCALE_AT = 1e100
RESONANCE_GUARD = 1e-300
MIN_NODES = 16
DIVERGENCE_STEP = 0.02   # minimal increase per doubling for "divergent"
SHRINK_FACTOR = 1.5      # increment shrink per doubling for "convergent"
DECAY_RATIO = 0.95       # slower steady shrink that still counts as "convergent"
NOISE_FLOOR = 1e-12      # increments below this are quadrature noise


@numba.njit(cache=True, nogil=True)
def _jost(a, b, theta):
    """u(0), u(1), log of the accumulated scale and the peak stored |u|"""
    horizon = b.size
    E = 2.0 * math.cos(theta)
    z = math.cos(theta) - 1j * math.sin(theta)
    upper = z * z   # u(H+2)
    current = z     # u(H+1)
    log_scale = 0.0
    peak = 1.0
    for k in range(horizon + 1, 0, -1):
        a_k = a[k - 1] if k <= horizon else 1.0
        b_k = b[k - 1] if k <= horizon else 0.0
        a_prev = a[k - 2] if k >= 2 else 1.0
        lower = ((E - b_k) * current - a_k * upper) / a_prev
        upper = current
        current = lower
        size = max(abs(current), abs(upper))
        if size > peak:
            peak = size
        if size > RESCALE_AT:
            current /= size
            upper /= size
            log_scale += math.log(size)
    return current, upper, log_scale, peak


@numba.njit(cache=True, nogil=True, parallel=True)
def _log_jost_sweep(a, b, thetas):
    """log|u(0)| per node (true scale) and a resonance flag per node"""
    count = thetas.size
    values = np.empty(count)
    resonant = np.zeros(count, dtype=np.bool_)
    for j in numba.prange(count):
        u0, u1, log_scale, _ = _jost(a, b, thetas[j])
        if abs(u0) < RESONANCE_GUARD * abs(u1):
            resonant[j] = True
            values[j] = 0.0
        else:
            values[j] = math.log(abs(u0)) + log_scale
    return values, resonant


@dataclass
class JostSolution:
    """Jost solution at the origin for one energy inside the band"""
    energy: float
    u0: complex
    u1: complex
    log_scale: float
    peak: float  # largest stored |u(k)| during the sweep


@dataclass
class SzegoEstimate:
    n: int
    quad_nodes: int
    z_value: float
    integrand_extrema: Tuple[float, float]
    edge_flag: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SzegoScan:
    estimates: List[SzegoEstimate]
    increments: List[float] = field(default_factory=list)
    verdict: str = "inconclusive"  # convergent | divergent | inconclusive


def _section(seq: CoefficientSequence, horizon: int):
    if horizon < 1:
        raise InvalidParametersError(f"horizon must be >= 1, got {horizon}")
    return coefficients(seq, horizon)


def _band_angle(E: float) -> float:
    if not -2.0 < E < 2.0:
        raise InvalidParametersError(f"energy {E} is not inside the band (-2, 2)")
    return math.acos(E / 2.0)


def jost_solution(seq: CoefficientSequence, horizon: int, E: float) -> JostSolution:
    a, b = _section(seq, horizon)
    u0, u1, log_scale, peak = _jost(a, b, _band_angle(E))
    if abs(u0) < RESONANCE_GUARD * abs(u1):
        raise ResonanceError(f"Jost solution vanishes at the origin for E={E:.17g} (horizon {horizon})")
    return JostSolution(energy=E, u0=complex(u0), u1=complex(u1), log_scale=log_scale, peak=peak)


def m_function(seq: CoefficientSequence, horizon: int, E: float) -> complex:
    """Boundary value m(E + i0) of the Borel transform of the spectral measure of delta_1"""
    jost = jost_solution(seq, horizon, E)
    return -jost.u1 / jost.u0


def ac_density(seq: CoefficientSequence, horizon: int, E: float) -> float:
    """Absolutely continuous density Im m(E + i0) / pi"""
    theta = _band_angle(E)
    jost = jost_solution(seq, horizon, E)
    log_w = (math.log(math.sin(theta)) - 2.0 * math.log(abs(jost.u0))
             - 2.0 * jost.log_scale - math.log(math.pi))
    return math.exp(log_w)


def _nodes(M: int, shift: float = 0.0) -> np.ndarray:
    guard = math.pi / (4 * M)
    thetas = (np.arange(M) + 0.5) * math.pi / M + shift
    return np.clip(thetas, guard, math.pi - guard)


def szego_integral(seq: CoefficientSequence, horizon: int, quad_nodes: int = 2048) -> SzegoEstimate:
    """
    Z = (1/2pi) int_0^pi log(sin(theta) / (pi w(2 cos theta))) d theta by the midpoint rule.

    Nodes sit at least pi/(4M) away from the band edges. A resonance at some
    node triggers one retry on nodes shifted by pi/(4M); a second resonance
    raises ResonanceError.
    """
    if quad_nodes < MIN_NODES:
        raise InvalidParametersError(f"at least {MIN_NODES} quadrature nodes are needed, got {quad_nodes}")
    a, b = _section(seq, horizon)
    M = int(quad_nodes)

    edge_flag = False
    log_u0, resonant = _log_jost_sweep(a, b, _nodes(M))
    if resonant.any():
        log.warning("[SZEGO] horizon=%d M=%d resonance at %d node(s), retrying on shifted nodes",
                    horizon, M, int(resonant.sum()))
        edge_flag = True
        log_u0, resonant = _log_jost_sweep(a, b, _nodes(M, math.pi / (4 * M)))
        if resonant.any():
            raise ResonanceError(
                f"density blows up at {int(resonant.sum())} node(s) for horizon {horizon}, M={M}; refine the grid"
            )

    integrand = 2.0 * log_u0
    finite = np.isfinite(integrand)
    if not finite.all():
        edge_flag = True
        if not finite.any():
            raise ResonanceError(f"no finite integrand value for horizon {horizon}, M={M}")
        integrand = np.clip(np.nan_to_num(integrand, nan=0.0), integrand[finite].min(), integrand[finite].max())

    z_value = float(np.sum(integrand)) / (2 * M)
    estimate = SzegoEstimate(n=horizon, quad_nodes=M, z_value=z_value,
                             integrand_extrema=(float(integrand.min()), float(integrand.max())),
                             edge_flag=edge_flag)
    log.info("[SZEGO] horizon=%d M=%d Z=%.10g", horizon, M, z_value)
    if edge_flag:
        log.warning("[SZEGO] horizon=%d integrand clipped near the band edges", horizon)
    return estimate


def scan_verdict(increments: Sequence[float], delta: float = DIVERGENCE_STEP,
                 shrink: float = SHRINK_FACTOR, floor: float = NOISE_FLOOR,
                 decay: float = DECAY_RATIO) -> str:
    """
    Verdict over the last three increments.

    Shrinking shapes are tested before growth, so a slowly converging Z whose
    increments still exceed delta is not called divergent.
    """
    if len(increments) < 3:
        return "inconclusive"
    last = list(increments[-3:])
    size = [abs(dz) for dz in last]
    if max(size) <= floor:
        return "convergent"
    if size[1] * shrink <= size[0] and size[2] * shrink <= size[1]:
        return "convergent"
    if size[1] <= decay * size[0] and size[2] <= decay * size[1]:
        return "convergent"
    if size[0] >= size[1] >= size[2] and size[0] < delta:
        return "convergent"
    if all(dz >= delta for dz in last):
        return "divergent"
    return "inconclusive"


def szego_scan(seq: CoefficientSequence, horizons: Sequence[int], quad_nodes: int = 2048,
               node_ratio: float = 1.0, delta: float = DIVERGENCE_STEP,
               shrink: float = SHRINK_FACTOR, floor: float = NOISE_FLOOR,
               decay: float = DECAY_RATIO) -> SzegoScan:
    """
    Z along growing horizons with a divergence verdict.

    Each horizon uses max(quad_nodes, node_ratio * horizon) nodes, so the
    midpoint rule resolves the oscillations the coefficients put into log|u(0)|.
    """
    horizons = [int(h) for h in horizons]
    if any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise InvalidParametersError(f"horizons must be ascending, got {horizons}")

    estimates = []
    for h in horizons:
        M = max(int(quad_nodes), int(math.ceil(node_ratio * h)))
        estimates.append(szego_integral(seq, h, M))

    increments = [b.z_value - a.z_value for a, b in zip(estimates, estimates[1:])]
    verdict = scan_verdict(increments, delta, shrink, floor, decay)
    if verdict == "inconclusive":
        log.warning("[SZEGO] scan over horizons %s is inconclusive", horizons)
    return SzegoScan(estimates=estimates, increments=increments, verdict=verdict)
