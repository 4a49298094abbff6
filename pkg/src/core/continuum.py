"""
Half-line Schrödinger zero counting and coupling-constant experiments

Potentials compile to a flat numeric description (one parameter row per term
plus a shared data buffer) that the numba kernels evaluate directly. The
Prüfer phase of the zero-energy solution of -u'' + lambda V u = 0, u(0) = 0,
obeys theta' = cos^2 theta - lambda V sin^2 theta; its value at r_max divided
by pi counts the zeros, which is the number of negative eigenvalues of the
problem on [0, r_max] with Dirichlet ends.
"""

import logging
import math
from dataclasses import dataclass, field, asdict, replace
from functools import cached_property
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numba
import numpy as np

from . import accel
from .errors import (
    InvalidParametersError,
    MonotonicityViolationError,
    StepUnderflowError,
)

log = logging.getLogger(__name__)

KINDS = ("sin-power", "sin-cutoff", "inverse-square", "x-gamma", "table",
         "power-law", "grid", "composite")
OSCILLATORY = ("sin-power", "sin-cutoff")
RAMP_MODES = ("inside", "outside")  # multiply by phi_R, or by 1 - phi_R

_CODES = {"sin-power": 0, "sin-cutoff": 1, "inverse-square": 2, "x-gamma": 3,
          "table": 4, "power-law": 5, "grid": 6}
_RAMP_CODES = {None: 0, "inside": 1, "outside": 2}
_ROW = 11  # code, amplitude, beta, alpha, gamma, cutoff, ramp_R, ramp_mode, power, data_start, data_len

OSCILLATORY_STEP = 0.25
TAIL_BOUND = 0.125
TAIL_DOUBLINGS = 60
GAUSS_ORDER = 16
CELL_CHUNK = 65536
GRID_SPACING = 0.25


# ----------------------------------------------------------------------------
# numba kernels
# ----------------------------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _smoothstep(s):
    if s <= 0.0:
        return 0.0
    if s >= 1.0:
        return 1.0
    return s * s * (3.0 - 2.0 * s)


@numba.njit(cache=True, nogil=True)
def _term_value(r, p, data):
    code = int(p[0])
    v = 0.0
    if code == 0:
        v = math.sin(r) / (1.0 + r) ** p[2]
    elif code == 1:
        x0 = p[5]
        if r > x0:
            v = _smoothstep(r - x0) * math.sin(r) / r ** p[3]
    elif code == 2:
        if r > p[5]:
            v = -p[4] / (r * r)
    elif code == 3:
        if r > p[5]:
            v = -0.25 / (r * r)
            if r > 2.0:
                lr = math.log(r)
                v -= p[4] / (r * r * lr * lr)
    elif code == 4:
        start = int(p[9])
        m = int(p[10])
        ends = data[start:start + m]
        i = np.searchsorted(ends, r, "right")
        if i < m:
            v = data[start + m + i]
    elif code == 5:
        v = (1.0 + r) ** (-p[2])
    elif code == 6:
        start = int(p[9])
        m = int(p[10])
        x = data[start:start + m]
        if x[0] <= r <= x[m - 1]:
            i = np.searchsorted(x, r, "right") - 1
            if i >= m - 1:
                i = m - 2
            h = x[i + 1] - x[i]
            t = (r - x[i]) / h
            y0 = data[start + m + i]
            y1 = data[start + m + i + 1]
            d0 = data[start + 2 * m + i]
            d1 = data[start + 2 * m + i + 1]
            omt = 1.0 - t
            v = ((1.0 + 2.0 * t) * omt * omt * y0 + t * omt * omt * h * d0
                 + t * t * (3.0 - 2.0 * t) * y1 + t * t * (t - 1.0) * h * d1)
            if p[8] != 1.0:
                v = v ** p[8]
    v *= p[1]
    mode = int(p[7])
    if mode == 1:
        v *= _smoothstep(r - p[6])
    elif mode == 2:
        v *= 1.0 - _smoothstep(r - p[6])
    return v


@numba.njit(cache=True, nogil=True)
def _value(r, params, data):
    total = 0.0
    for k in range(params.shape[0]):
        total += _term_value(r, params[k], data)
    return total


@numba.njit(cache=True, nogil=True)
def _values(rs, params, data):
    out = np.empty(rs.size)
    for j in range(rs.size):
        out[j] = _value(rs[j], params, data)
    return out


@numba.njit(cache=True, nogil=True)
def _phase_rate(r, theta, lam, params, data):
    c = math.cos(theta)
    s = math.sin(theta)
    return c * c - lam * _value(r, params, data) * s * s


@numba.njit(cache=True, nogil=True)
def _prufer(lam, r_max, rtol, params, data, breaks, step_limit):
    """Embedded Runge-Kutta-Fehlberg 4(5) on the Prüfer phase; returns (theta, r, steps, stalled)"""
    r = 0.0
    theta = 0.0
    h = 1e-3
    steps = 0
    nb = 0
    while r < r_max:
        cap = max(0.1, 0.05 * (1.0 + r))
        if cap > step_limit:
            cap = step_limit
        if h > cap:
            h = cap
        while nb < breaks.size and breaks[nb] <= r:
            nb += 1
        target = r_max
        if nb < breaks.size and breaks[nb] < target:
            target = breaks[nb]
        clipped = False
        step = h
        if r + step >= target:
            step = target - r
            clipped = True

        k1 = step * _phase_rate(r, theta, lam, params, data)
        k2 = step * _phase_rate(r + step / 4.0, theta + k1 / 4.0, lam, params, data)
        k3 = step * _phase_rate(r + 3.0 * step / 8.0, theta + 3.0 * k1 / 32.0 + 9.0 * k2 / 32.0,
                                lam, params, data)
        k4 = step * _phase_rate(r + 12.0 * step / 13.0,
                                theta + 1932.0 * k1 / 2197.0 - 7200.0 * k2 / 2197.0 + 7296.0 * k3 / 2197.0,
                                lam, params, data)
        k5 = step * _phase_rate(r + step,
                                theta + 439.0 * k1 / 216.0 - 8.0 * k2 + 3680.0 * k3 / 513.0 - 845.0 * k4 / 4104.0,
                                lam, params, data)
        k6 = step * _phase_rate(r + step / 2.0,
                                theta - 8.0 * k1 / 27.0 + 2.0 * k2 - 3544.0 * k3 / 2565.0
                                + 1859.0 * k4 / 4104.0 - 11.0 * k5 / 40.0,
                                lam, params, data)
        fourth = theta + 25.0 * k1 / 216.0 + 1408.0 * k3 / 2565.0 + 2197.0 * k4 / 4104.0 - k5 / 5.0
        fifth = (theta + 16.0 * k1 / 135.0 + 6656.0 * k3 / 12825.0 + 28561.0 * k4 / 56430.0
                 - 9.0 * k5 / 50.0 + 2.0 * k6 / 55.0)
        err = abs(fifth - fourth)
        tol = rtol * (1.0 + abs(theta))

        if err <= tol:
            theta = fourth
            r = target if clipped else r + step
            steps += 1

        if err == 0.0:
            factor = 4.0
        else:
            factor = 0.84 * (tol / err) ** 0.25
            factor = min(4.0, max(0.1, factor))
        if clipped and err <= tol:
            # clipped steps keep the natural step size
            factor = max(factor, 1.0)
        else:
            h = step
        h = h * factor
        if h < 1e-12 * (1.0 + r):
            return theta, r, steps, True
    return theta, r, steps, False


# ----------------------------------------------------------------------------
# potentials
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CompiledPotential:
    params: np.ndarray
    data: np.ndarray
    breaks: np.ndarray
    oscillatory: bool


@dataclass(frozen=True, eq=False)
class Potential1D:
    """
    Half-line potential V(r), r >= 0.

    - sin-power:      amplitude * sin r / (1 + r)^beta
    - sin-cutoff:     amplitude * s(r - cutoff) sin r / r^alpha, s a cubic smoothstep on [0, 1]
    - inverse-square: -amplitude * gamma / r^2 for r > cutoff
    - x-gamma:        -amplitude * (1/(4r^2) + gamma [r > 2] / (r^2 log^2 r)) for r > cutoff
    - table:          piecewise constant, value v on [previous r_end, r_end), 0 beyond
    - power-law:      amplitude * (1 + r)^-beta
    - grid:           amplitude * H(r)^power, H the cubic Hermite interpolant of samples
    - composite:      sum of parts

    ramp = (R, "inside") multiplies by phi_R, (R, "outside") by 1 - phi_R,
    phi_R the cubic smoothstep from 0 at R to 1 at R + 1.
    """
    kind: str = "sin-power"
    beta: float = 1.5
    alpha: float = 1.0
    gamma: float = 0.25
    cutoff: float = 1.0
    amplitude: float = 1.0
    table: Tuple[Tuple[float, float], ...] = ()
    table_path: Optional[str] = None
    ramp: Optional[Tuple[float, str]] = None
    parts: Tuple['Potential1D', ...] = ()
    samples: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None
    power: float = 1.0
    tail_coeff: float = 0.0  # grid kind: |H(r)| <= tail_coeff (1 + r)^-beta past the last sample

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParametersError(f"unknown potential kind '{self.kind}', expected one of {KINDS}")
        if self.kind in ("inverse-square", "x-gamma", "sin-cutoff") and not self.cutoff > 0:
            raise InvalidParametersError(f"{self.kind} needs a positive cutoff, got {self.cutoff}")
        if self.kind in ("sin-power", "power-law") and not self.beta > 0:
            raise InvalidParametersError(f"decay exponent beta must be > 0, got {self.beta}")
        if self.kind == "sin-cutoff" and not self.alpha > 0:
            raise InvalidParametersError(f"decay exponent alpha must be > 0, got {self.alpha}")
        if self.kind == "table":
            rows = tuple((float(r), float(v)) for r, v in self.table)
            ends = [r for r, _ in rows]
            if any(b <= a for a, b in zip(ends, ends[1:])) or (ends and ends[0] <= 0):
                raise InvalidParametersError("table r_end values must be positive and increasing")
            object.__setattr__(self, "table", rows)
        if self.kind == "grid" and (self.samples is None or len(self.samples[0]) < 2):
            raise InvalidParametersError("grid potential needs at least two samples")
        if self.kind == "composite" and not self.parts:
            raise InvalidParametersError("composite potential needs at least one part")
        if self.ramp is not None:
            R, mode = self.ramp
            if mode not in RAMP_MODES:
                raise InvalidParametersError(f"ramp mode must be one of {RAMP_MODES}, got '{mode}'")
            object.__setattr__(self, "ramp", (float(R), mode))

    # -- configuration ------------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind in ("grid", "composite") or self.ramp is not None:
            raise InvalidParametersError(f"derived {self.kind} potentials are not part of a config record")
        data = {k: getattr(self, k) for k in
                ("kind", "beta", "alpha", "gamma", "cutoff", "amplitude", "table_path")}
        data["table"] = [] if self.table_path else [list(row) for row in self.table]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'Potential1D':
        data = dict(data)
        rows = data.pop("table", None) or ()
        if data.get("table_path"):
            rows = load_potential_table(data["table_path"])
        fields_ = ("kind", "beta", "alpha", "gamma", "cutoff", "amplitude", "table_path")
        known = {k: v for k, v in data.items() if k in fields_}
        return cls(table=tuple(tuple(r) for r in rows), **known)

    # -- structure ----------------------------------------------------------

    @property
    def oscillatory(self) -> bool:
        if self.kind == "composite":
            return any(p.oscillatory for p in self.parts)
        return self.kind in OSCILLATORY or self.kind == "grid"

    def terms(self) -> List['Potential1D']:
        """Flat list of non-composite terms, each carrying its ramp"""
        if self.kind != "composite":
            return [self]
        flat = []
        for part in self.parts:
            for term in part.terms():
                if self.ramp is not None:
                    if term.ramp is not None:
                        raise InvalidParametersError("nested ramps are not supported")
                    term = replace(term, ramp=self.ramp)
                flat.append(term)
        return flat

    def breakpoints(self) -> List[float]:
        """Radii where V or its derivative jumps; integrators stop exactly there"""
        points = set()
        for term in self.terms():
            if term.kind == "sin-cutoff":
                points.update((term.cutoff, term.cutoff + 1.0))
            elif term.kind == "inverse-square":
                points.add(term.cutoff)
            elif term.kind == "x-gamma":
                points.update((term.cutoff, 2.0))
            elif term.kind == "table":
                points.update(r for r, _ in term.table)
            if term.ramp is not None:
                points.update((term.ramp[0], term.ramp[0] + 1.0))
        return sorted(p for p in points if p > 0)

    @cached_property
    def compiled(self) -> CompiledPotential:
        rows = []
        buffer = []
        offset = 0
        for term in self.terms():
            start, length = offset, 0
            if term.kind == "table":
                length = len(term.table)
                block = [r for r, _ in term.table] + [v for _, v in term.table]
                buffer.extend(block)
                offset += len(block)
            elif term.kind == "grid":
                nodes, values, slopes = (np.asarray(a, dtype=np.float64) for a in term.samples)
                length = nodes.size
                buffer.extend(np.concatenate([nodes, values, slopes]).tolist())
                offset += 3 * length
            R, mode = term.ramp if term.ramp is not None else (0.0, None)
            rows.append([_CODES[term.kind], term.amplitude, term.beta, term.alpha, term.gamma,
                         term.cutoff, R, _RAMP_CODES[mode], term.power, start, length])
        params = np.array(rows, dtype=np.float64).reshape(-1, _ROW)
        data = np.array(buffer if buffer else [0.0], dtype=np.float64)
        return CompiledPotential(params=params, data=data,
                                 breaks=np.array(self.breakpoints(), dtype=np.float64),
                                 oscillatory=self.oscillatory)

    # -- evaluation ---------------------------------------------------------

    def value(self, r):
        """V(r), vectorized"""
        rs = np.asarray(r, dtype=np.float64)
        c = self.compiled
        out = _values(np.ascontiguousarray(rs.ravel()), c.params, c.data).reshape(rs.shape)
        return float(out) if out.ndim == 0 else out

    def envelope(self, r):
        """Non-increasing majorant of sup_{s >= r} |V(s)|, vectorized"""
        rs = np.asarray(r, dtype=np.float64)
        total = np.zeros_like(rs)
        for term in self.terms():
            total = total + term._term_envelope(rs)
        return float(total) if total.ndim == 0 else total

    def _term_envelope(self, rs: np.ndarray) -> np.ndarray:
        amp = abs(self.amplitude)
        if self.ramp is not None:
            R, mode = self.ramp
            if mode == "inside":
                rs = np.maximum(rs, R)
        if self.kind in ("sin-power", "power-law"):
            env = amp * (1.0 + rs) ** (-self.beta)
        elif self.kind == "sin-cutoff":
            env = amp * np.maximum(rs, self.cutoff) ** (-self.alpha)
        elif self.kind == "inverse-square":
            env = amp * abs(self.gamma) / np.maximum(rs, self.cutoff) ** 2
        elif self.kind == "x-gamma":
            m = np.maximum(rs, self.cutoff)
            m2 = np.maximum(m, 2.0)
            env = amp * (0.25 / m ** 2 + abs(self.gamma) / (m2 ** 2 * np.log(m2) ** 2))
        elif self.kind == "table" and not self.table:
            env = np.zeros_like(rs)
        elif self.kind == "table":
            ends = np.array([r for r, _ in self.table])
            mags = np.abs([v for _, v in self.table])
            tail_max = np.maximum.accumulate(mags[::-1])[::-1]
            idx = np.searchsorted(ends, rs, side='right')
            env = np.where(idx < ends.size, tail_max[np.minimum(idx, max(ends.size - 1, 0))], 0.0) * amp
        else:  # grid
            nodes, values, _ = self.samples
            nodes = np.asarray(nodes)
            mags = np.abs(np.asarray(values)) ** self.power
            tail_max = np.maximum.accumulate(mags[::-1])[::-1]
            beyond = (self.tail_coeff * (1.0 + rs) ** (-self.beta)) ** self.power
            idx = np.minimum(np.searchsorted(nodes, rs, side='left'), nodes.size - 1)
            # Hermite overshoot between samples stays within a factor 2 at the default spacing
            env = amp * np.where(rs <= nodes[-1], np.maximum(2.0 * tail_max[idx], beyond), beyond)
        if self.ramp is not None and self.ramp[1] == "outside":
            env = np.where(rs >= self.ramp[0] + 1.0, 0.0, env)
        return env


def load_potential_table(path) -> Tuple[Tuple[float, float], ...]:
    """Read a two-column r_end,v CSV with a header row"""
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip().replace(" ", "").lower()
    if header != "r_end,v":
        raise InvalidParametersError(f"{path}: expected header 'r_end,v', found '{header}'")
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return tuple((float(r), float(v)) for r, v in rows)


def square_well(depth: float = 1.0, width: float = math.pi) -> Potential1D:
    """-depth on (0, width], zero beyond"""
    return Potential1D(kind="table", table=((width, -depth),))


# ----------------------------------------------------------------------------
# quadrature
# ----------------------------------------------------------------------------

def _gauss(order: int = GAUSS_ORDER):
    return np.polynomial.legendre.leggauss(order)


def integrate_cells(f, edges: np.ndarray, order: int = GAUSS_ORDER) -> float:
    """Composite Gauss-Legendre sum of f over consecutive cells [edges[i], edges[i+1]]"""
    x, w = _gauss(order)
    edges = np.asarray(edges, dtype=np.float64)
    chunks = []
    for start in range(0, edges.size - 1, CELL_CHUNK):
        lo = edges[start:start + CELL_CHUNK]
        hi = edges[start + 1:start + CELL_CHUNK + 1]
        lo = lo[:hi.size]
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        nodes = mid[:, None] + half[:, None] * x[None, :]
        chunks.append(float(np.sum(f(nodes.ravel()).reshape(nodes.shape) @ w * half)))
    return math.fsum(chunks)


def _cell_integrals(f, edges: np.ndarray, order: int = GAUSS_ORDER) -> np.ndarray:
    x, w = _gauss(order)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    return (f(nodes.ravel()).reshape(nodes.shape) @ w) * half


def quadrature_edges(V: Potential1D, r_max: float) -> np.ndarray:
    """Cell edges on [0, r_max]: breakpoints, a geometric grid, and half periods for oscillatory V"""
    pieces = [np.array([0.0, r_max]), np.linspace(0.0, min(r_max, 1.0), 9)]
    pieces.append(np.array([b for b in V.breakpoints() if b < r_max]))
    if r_max > 1.0:
        pieces.append(np.geomspace(1.0, r_max, int(math.ceil(math.log(r_max) / math.log(1.1))) + 1))
    if V.oscillatory:
        pieces.append(np.arange(0.0, r_max, math.pi / 2))
    edges = np.unique(np.concatenate(pieces))
    return edges[(edges >= 0) & (edges <= r_max)]


# ----------------------------------------------------------------------------
# Prüfer counting
# ----------------------------------------------------------------------------

@dataclass
class PruferResult:
    lam: float
    r_max: float
    zero_count: int
    final_theta: float
    tail_bound_ok: bool
    steps: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def tail_bound_ok(V: Potential1D, lam: float, r_max: float) -> bool:
    """lambda sup_{r > r_max} |V(r)| r^2 < 1/8, bounded on doubling shells through the envelope"""
    if lam == 0:
        return True
    shells = r_max * 2.0 ** np.arange(TAIL_DOUBLINGS + 1)
    bound = abs(lam) * np.max(V.envelope(shells[:-1]) * shells[1:] ** 2)
    return bool(bound < TAIL_BOUND)


def prufer_count(V: Potential1D, lam: float, r_max: float, rtol: float = 1e-8) -> PruferResult:
    """Zeros of the zero-energy solution on (0, r_max] from the Prüfer phase"""
    if not r_max > 0:
        raise InvalidParametersError(f"r_max must be > 0, got {r_max}")
    c = V.compiled
    step_limit = OSCILLATORY_STEP if c.oscillatory else math.inf
    theta, reached, steps, stalled = _prufer(float(lam), float(r_max), float(rtol),
                                             c.params, c.data, c.breaks, step_limit)
    if stalled:
        raise StepUnderflowError(
            f"Prüfer step underflow at r={reached:.6g} (lambda={lam}, kind={V.kind}, rtol={rtol})"
        )
    result = PruferResult(lam=lam, r_max=r_max, zero_count=int(math.floor(theta / math.pi)),
                          final_theta=float(theta), tail_bound_ok=tail_bound_ok(V, lam, r_max),
                          steps=int(steps))
    log.debug("[PRUFER] %s lambda=%g r_max=%.6g zeros=%d theta=%.10g steps=%d",
              V.kind, lam, r_max, result.zero_count, theta, steps)
    return result


@dataclass
class CouplingScan:
    results: List[PruferResult]
    slope: float


def coupling_radius(lam: float, exponent: float) -> float:
    return max(10.0, lam ** exponent) if lam > 0 else 10.0


def fit_slope(lambdas: Sequence[float], counts: Sequence[int]) -> float:
    """Least-squares slope of log N on log lambda over the upper half of the grid"""
    start = len(lambdas) // 2
    lam = np.asarray(lambdas[start:], dtype=np.float64)
    N = np.asarray(counts[start:], dtype=np.float64)
    if lam.size < 2 or np.any(N <= 0) or np.any(lam <= 0):
        return math.nan
    return float(np.polyfit(np.log(lam), np.log(N), 1)[0])


def coupling_scan(V: Potential1D, lambdas: Sequence[float], r_max_exponent: Optional[float] = None,
                  rtol: float = 1e-8, threads: int = 1) -> CouplingScan:
    """N(lambda V) over a coupling grid, radii max(10, lambda^exponent) with exponent 2/beta by default"""
    exponent = 2.0 / V.beta if r_max_exponent is None else r_max_exponent

    def run(lam):
        result = prufer_count(V, lam, coupling_radius(lam, exponent), rtol)
        log.info("[PRUFER] lambda=%g r_max=%.6g zeros=%d", lam, result.r_max, result.zero_count)
        return result

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, lambdas))
    else:
        results = [run(lam) for lam in lambdas]

    slope = fit_slope(list(lambdas), [r.zero_count for r in results])
    unbounded = sum(1 for r in results if not r.tail_bound_ok)
    if unbounded:
        log.warning("[PRUFER] tail bound not established for %d of %d couplings", unbounded, len(results))
    return CouplingScan(results=results, slope=slope)


# ----------------------------------------------------------------------------
# comparison bounds
# ----------------------------------------------------------------------------

def _check_monotone(V: Potential1D, r_max: float, samples: int = 4096):
    near = min(r_max, 10.0)
    grid = np.unique(np.concatenate([np.linspace(0.0, near, samples), np.geomspace(near, r_max, samples)]))
    values = V.value(grid)
    if np.any(values > 0) and np.any(values < 0):
        raise MonotonicityViolationError(f"{V.kind} potential changes sign on [0, {r_max:g}]")
    mags = np.abs(values)
    rises = np.flatnonzero(np.diff(mags) > 1e-12 * (1.0 + mags[:-1]))
    if rises.size:
        r = grid[rises[0] + 1]
        raise MonotonicityViolationError(f"|V| increases near r={r:.6g} for the {V.kind} potential")


def calogero_bound(V: Potential1D, r_max: float) -> float:
    """(2/pi) int_0^r_max |V|^(1/2); bounds the zero count of -|V| up to one"""
    _check_monotone(V, r_max)
    edges = quadrature_edges(V, r_max)
    return 2.0 / math.pi * integrate_cells(lambda r: np.sqrt(np.abs(V.value(r))), edges)


def bargmann_bound(V: Potential1D, r_max: float) -> float:
    """int_0^r_max r max(-V, 0)"""
    edges = quadrature_edges(V, r_max)
    return integrate_cells(lambda r: r * np.maximum(-V.value(r), 0.0), edges)


def weyl_constant(V: Potential1D, r_max: float) -> float:
    """(1/pi) int_0^r_max max(-V, 0)^(1/2), the limit of lambda^(-1/2) N(lambda V) when beta > 2"""
    edges = quadrature_edges(V, r_max)
    return integrate_cells(lambda r: np.sqrt(np.maximum(-V.value(r), 0.0)), edges) / math.pi


def weyl_ratios(V: Potential1D, scan: CouplingScan) -> List[float]:
    """
    N(lambda V) / (C_W sqrt(lambda)) per coupling, with C_W taken over the largest radius of the scan.

    For beta > 2 the ratios climb toward 1. The upper-half slope of a finite grid
    still sits above 1/2 there, since the correction to C_W sqrt(lambda) is of
    order lambda^(1/beta).
    """
    constant = weyl_constant(V, max(r.r_max for r in scan.results))
    if not constant > 0:
        return [math.nan] * len(scan.results)
    return [r.zero_count / (constant * math.sqrt(r.lam)) if r.lam > 0 else math.nan for r in scan.results]


def dirichlet_lower_bound(beta: float, lam: float) -> int:
    """Intervals [(2n + 3/2)pi +- pi/3], n >= 0, on which lambda / (2 ((2n+3) pi)^beta) > 9/4"""
    if lam <= 0:
        return 0
    reach = (2.0 * lam / 9.0) ** (1.0 / beta)  # (2n + 3) pi must stay below this
    return max(0, int(math.ceil((reach / math.pi - 3.0) / 2.0)))


# ----------------------------------------------------------------------------
# divergence-form split
# ----------------------------------------------------------------------------

def oscillatory_tail(V: Potential1D, x: float, tol: float = 1e-13) -> float:
    """int_x^inf V for a sin-type potential whose sign changes sit at multiples of pi"""
    first = math.ceil(x / math.pi) * math.pi
    head = 0.0
    if first > x:
        head = integrate_cells(V.value, np.array([x, first]))
    count = accel.HEAD_BLOCKS + accel.MAX_LEVELS + 1
    edges = first + math.pi * np.arange(count + 1)
    halves = _cell_integrals(V.value, edges)
    exact = accel.exact_sum(halves[:accel.HEAD_BLOCKS])
    limit, _, _ = accel.accelerate(accel.partial_sums(halves[accel.HEAD_BLOCKS:]), stride=1, tol=tol)
    return head + exact + limit


@dataclass
class DivergenceSplit:
    """
    V = V1 + W', with W'(r) = phi_R(r) V(r) and W(r) = -int_r^inf phi_R V.

    W is constant below R. The composite V1 + W' equals V pointwise.
    """
    potential: Potential1D
    R: float
    v1: Potential1D
    w_prime: Potential1D
    composite: Potential1D
    _grids: dict = field(default_factory=dict, repr=False)

    @property
    def decay(self) -> float:
        return self.potential.alpha if self.potential.kind == "sin-cutoff" else self.potential.beta

    def _w_nodes(self, r_end: float, spacing: float):
        key = (r_end, spacing)
        if key not in self._grids:
            end = max(r_end, self.R + 1.0)
            nodes = np.unique(np.concatenate([np.arange(0.0, end, spacing), [self.R, self.R + 1.0, end]]))
            cells = _cell_integrals(self.w_prime.value, nodes, order=8)
            top = -oscillatory_tail(self.potential, end)
            # W(x_i) = W(end) - int_{x_i}^{end} W'
            tail_cells = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
            self._grids[key] = (nodes, top - tail_cells)
        return self._grids[key]

    def w(self, r):
        """W_R(r), vectorized"""
        rs = np.atleast_1d(np.asarray(r, dtype=np.float64))
        nodes, values = self._w_nodes(self.R + 1.0, GRID_SPACING)
        out = np.empty(rs.size)
        for j, x in enumerate(rs):
            if x >= nodes[-1]:
                out[j] = -oscillatory_tail(self.potential, x)
                continue
            i = int(np.searchsorted(nodes, x, side='right'))
            out[j] = values[i] - integrate_cells(self.w_prime.value, np.array([x, nodes[i]]))
        return float(out[0]) if np.ndim(r) == 0 else out

    def w_potential(self, r_max: float, power: float = 1.0, amplitude: float = 1.0,
                    spacing: float = GRID_SPACING) -> Potential1D:
        """amplitude * W^power as a Hermite grid potential on [0, r_max]"""
        nodes, values = self._w_nodes(r_max, spacing)
        slopes = self.w_prime.value(nodes)
        # |int_r^inf sin(s) g(s) ds| <= 2 g(r) for decreasing g
        return Potential1D(kind="grid", samples=(nodes, values, slopes), power=power,
                           amplitude=amplitude, beta=self.decay,
                           tail_coeff=2.0 * abs(self.potential.amplitude) * 2.0 ** self.decay)

    def w_squared_potential(self, r_max: float) -> Potential1D:
        """-4 W^2 on [0, r_max]"""
        return self.w_potential(r_max, power=2.0, amplitude=-4.0)


def divergence_split(V: Potential1D, R: float) -> DivergenceSplit:
    if V.kind not in OSCILLATORY or V.ramp is not None:
        raise InvalidParametersError(f"divergence split needs a plain oscillatory potential, got {V.kind}")
    if not R >= 0:
        raise InvalidParametersError(f"ramp start R must be >= 0, got {R}")
    v1 = replace(V, ramp=(R, "outside"))
    w_prime = replace(V, ramp=(R, "inside"))
    composite = Potential1D(kind="composite", parts=(v1, w_prime))
    return DivergenceSplit(potential=V, R=float(R), v1=v1, w_prime=w_prime, composite=composite)


def cm_inequality_check(split: DivergenceSplit, lam: float, r_max: Optional[float] = None,
                        rtol: float = 1e-8) -> Tuple[int, int]:
    """
    (N(lambda W'), N(-4 lambda^2 W^2)) on [0, r_max]; the first never exceeds the second.

    r_max defaults to the coupling radius max(10, lambda^(2/decay)).
    """
    if r_max is None:
        r_max = coupling_radius(lam, 2.0 / split.decay)
    left = prufer_count(split.w_prime, lam, r_max, rtol).zero_count
    right = prufer_count(split.w_squared_potential(r_max), lam * lam, r_max, rtol).zero_count
    log.info("[PRUFER] CM check R=%g lambda=%g r_max=%g: %d <= %d", split.R, lam, r_max, left, right)
    return left, right
