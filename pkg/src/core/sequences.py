"""Coefficient families, summation-by-parts decomposition and hypothesis checks"""

import logging
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from scipy.special import polygamma

from . import accel
from .errors import InvalidParametersError

log = logging.getLogger(__name__)

KINDS = ("alternating", "cosine", "inverse-square", "table", "free")
COMPONENTS = ("a-part", "b-part")

GROWTH_RATIO = 1.05      # P(2H)/P(H) at or above this counts as growth
GROWTH_DOUBLINGS = 3     # doubling windows inspected by growth_verdict
CERTIFY_LIMIT = 10_000_000  # largest site checked when certifying a_n > 0


@dataclass(frozen=True)
class CoefficientSequence:
    """
    Rule for the Jacobi parameters (a_n, b_n), n >= 1.

    - alternating:    a_n = 1 + (-1)^n alpha n^-gamma,      b_n = (-1)^n beta n^-gamma
    - cosine:         a_n = 1 + cos(eta n) alpha n^-gamma,  b_n = cos(eta n) beta n^-gamma
    - inverse-square: a_n = 1 + alpha / n^2,                b_n = beta / n^2
    - table / free:   a_n = 1, b_n = 0

    Table rows (a_n, b_n) override the formula on sites 1..len(table); the
    sequence is free beyond both.
    """
    kind: str = "free"
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 1.0
    eta: float = math.pi
    table: Tuple[Tuple[float, float], ...] = ()
    table_path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParametersError(f"unknown family kind '{self.kind}', expected one of {KINDS}")
        if self.kind in ("alternating", "cosine") and not self.gamma > 0:
            raise InvalidParametersError(f"decay exponent gamma must be > 0, got {self.gamma}")
        if self.kind == "cosine" and not 0 < self.eta < 2 * math.pi:
            raise InvalidParametersError(f"phase eta must lie in (0, 2pi), got {self.eta}")
        rows = tuple((float(a), float(b)) for a, b in self.table)
        object.__setattr__(self, "table", rows)
        for n, (a, _) in enumerate(rows, start=1):
            if not a > 0:
                raise InvalidParametersError(f"table row {n} has a_n = {a} <= 0")
        self._certify_positive()

    def _certify_positive(self):
        """Reject parameters for which some formula site has a_n <= 0"""
        if self.alpha == 0 or self.kind in ("table", "free"):
            return
        exponent = 2.0 if self.kind == "inverse-square" else self.gamma
        # beyond this site |alpha| n^-exponent < 1, so a_n > 0 automatically
        last = int(math.floor(abs(self.alpha) ** (1.0 / exponent)))
        first = len(self.table) + 1
        if last < first:
            return
        if last > CERTIFY_LIMIT:
            raise InvalidParametersError(
                f"alpha={self.alpha}, gamma={exponent}: a_n > 0 cannot be certified up to site {last}"
            )
        sites = np.arange(first, last + 1, dtype=np.float64)
        a = 1.0 + _formula(self, "a-part", sites)
        bad = np.flatnonzero(a <= 0)
        if bad.size:
            n = int(sites[bad[0]])
            raise InvalidParametersError(
                f"{self.kind} family with alpha={self.alpha}, gamma={exponent} gives a_{n} = {a[bad[0]]:.6g} <= 0"
            )

    @property
    def table_length(self) -> int:
        return len(self.table)

    def amplitude(self, component: str) -> float:
        return self.alpha if component == "a-part" else self.beta

    def to_dict(self) -> dict:
        data = asdict(self)
        data["table"] = [list(row) for row in self.table]
        if self.table_path:
            # the file is the source of truth, keep the record small
            data["table"] = []
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'CoefficientSequence':
        data = dict(data)
        path = data.get("table_path")
        rows = data.pop("table", None) or ()
        if path:
            rows = load_table(path)
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(table=tuple(tuple(r) for r in rows), **known)


@dataclass
class SummabilityReport:
    """Partial sums through the horizon and their doubling-window verdicts"""
    horizon: int
    abs_c: float = 0.0
    abs_e: float = 0.0
    d_squared: float = 0.0
    f_squared: float = 0.0
    verdicts: dict = field(default_factory=dict)

    @property
    def summable_ok(self) -> bool:
        """All four series of the summability hypothesis look bounded"""
        return all(v == "bounded" for v in self.verdicts.values())

    def to_dict(self) -> dict:
        data = asdict(self)
        data["summable_ok"] = self.summable_ok
        return data


@dataclass
class Decomposition:
    """
    a = 1 + c + (d_{n+1} - d_n),  b = e + (f_{n+1} - f_n).

    Arrays hold sites 1..horizon+1 (index 0 is site 1).
    """
    c: np.ndarray
    d: np.ndarray
    e: np.ndarray
    f: np.ndarray
    sums: SummabilityReport

    @property
    def horizon(self) -> int:
        return self.sums.horizon

    def reconstruct(self) -> Tuple[np.ndarray, np.ndarray]:
        """(a, b) on sites 1..horizon rebuilt from the four sequences"""
        h = self.horizon
        a = 1.0 + self.c[:h] + (self.d[1:h + 1] - self.d[:h])
        b = self.e[:h] + (self.f[1:h + 1] - self.f[:h])
        return a, b


@dataclass
class HypothesisReport:
    """Outcome of check_hypotheses"""
    horizon: int
    log_a_min: float
    log_a_max: float
    log_a_final: float
    limsup_verdict: str       # bounded | diverging | inconclusive
    square_sum: float
    square_sum_verdict: str   # bounded | divergent | inconclusive
    summable_ok: bool
    prediction: str           # finite-Z | infinite-Z | undetermined

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ThresholdProfile:
    """Inverse-square threshold quantities estimated on the upper half of the horizon"""
    horizon: int
    gamma_a: float
    gamma_a_plus: float
    gamma_b: float
    liminf_a: float
    liminf_b: float
    prediction: str

    @property
    def criterion(self) -> float:
        return 2 * self.gamma_a + self.gamma_b

    @property
    def one_sided_criterion(self) -> float:
        return 2 * self.gamma_a_plus + self.gamma_b

    @property
    def classical_ok(self) -> bool:
        """The older quarter-strength sufficient condition"""
        return self.criterion < 1 / 16

    def to_dict(self) -> dict:
        data = asdict(self)
        data.update(criterion=self.criterion, one_sided_criterion=self.one_sided_criterion,
                    classical_ok=self.classical_ok)
        return data


def load_table(path) -> Tuple[Tuple[float, float], ...]:
    """Read a two-column a,b CSV (1-indexed rows, header line)"""
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip().replace(" ", "").lower()
    if header != "a,b":
        raise InvalidParametersError(f"{path}: expected header 'a,b', found '{header}'")
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if rows.shape[1] != 2:
        raise InvalidParametersError(f"{path}: expected two columns, found {rows.shape[1]}")
    if np.any(rows[:, 0] <= 0):
        raise InvalidParametersError(f"{path}: off-diagonal entries must be positive")
    return tuple((float(a), float(b)) for a, b in rows)


def _oscillation(seq: CoefficientSequence, sites: np.ndarray) -> np.ndarray:
    if seq.kind == "alternating" or seq.eta == math.pi:
        return np.where(sites % 2 == 0, 1.0, -1.0)
    return np.cos(seq.eta * sites)


def _formula(seq: CoefficientSequence, component: str, sites: np.ndarray) -> np.ndarray:
    """Perturbation (a_n - 1 or b_n) given by the family formula, ignoring the table"""
    amp = seq.amplitude(component)
    if amp == 0 or seq.kind in ("table", "free"):
        return np.zeros_like(sites, dtype=np.float64)
    if seq.kind == "inverse-square":
        return amp / (sites * sites)
    return amp * _oscillation(seq, sites) * sites ** (-seq.gamma)


def perturbation(seq: CoefficientSequence, component: str, sites: np.ndarray) -> np.ndarray:
    """a_n - 1 (a-part) or b_n (b-part) at the given sites, table rows first"""
    sites = np.asarray(sites, dtype=np.float64)
    values = _formula(seq, component, sites)
    if seq.table:
        column = 0 if component == "a-part" else 1
        rows = np.array(seq.table, dtype=np.float64)[:, column]
        if column == 0:
            rows = rows - 1.0
        idx = sites.astype(np.int64) - 1
        covered = idx < len(rows)
        values[covered] = rows[idx[covered]]
    return values


def coefficients(seq: CoefficientSequence, n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """(a_n, b_n) for n = 1..n_max as arrays"""
    sites = np.arange(1, n_max + 1, dtype=np.float64)
    a = 1.0 + perturbation(seq, "a-part", sites)
    b = perturbation(seq, "b-part", sites)
    if seq.table:
        # table a_n are stored exactly, not as 1 + (a_n - 1)
        k = min(len(seq.table), n_max)
        a[:k] = [row[0] for row in seq.table[:k]]
    return a, b


def evaluate(seq: CoefficientSequence, n: int) -> Tuple[float, float]:
    """(a_n, b_n) at a single site n >= 1"""
    if n < 1:
        raise InvalidParametersError(f"sites start at 1, got n={n}")
    if n <= len(seq.table):
        a, b = seq.table[n - 1]
        return a, b
    site = np.array([float(n)])
    return 1.0 + float(_formula(seq, "a-part", site)[0]), float(_formula(seq, "b-part", site)[0])


def tail_sum(seq: CoefficientSequence, component: str, n: int, tol: float = 1e-15) -> float:
    """
    -sum_{j >= n} of the chosen perturbation (a_n - 1 or b_n).

    Table sites and the first block of formula sites are summed exactly; the
    remaining oscillatory tail goes through accel.accelerate. Inverse-square
    tails are closed form through the trigamma function.
    """
    if component not in COMPONENTS:
        raise InvalidParametersError(f"component must be one of {COMPONENTS}, got '{component}'")
    if n < 1:
        raise InvalidParametersError(f"tail start must be >= 1, got {n}")

    total = 0.0
    start = n
    if seq.table and n <= len(seq.table):
        sites = np.arange(n, len(seq.table) + 1, dtype=np.float64)
        total += accel.exact_sum(perturbation(seq, component, sites))
        start = len(seq.table) + 1

    amp = seq.amplitude(component)
    if amp == 0 or seq.kind in ("table", "free"):
        return -total

    if seq.kind == "inverse-square":
        return -(total + amp * float(polygamma(1, start)))

    stride = accel.stride_for(seq.eta if seq.kind == "cosine" else math.pi)
    head = accel.HEAD_BLOCKS * stride
    sites = np.arange(start, start + head, dtype=np.float64)
    total += accel.exact_sum(_formula(seq, component, sites))

    tail_sites = np.arange(start + head, start + head + accel.MAX_LEVELS * stride + 1, dtype=np.float64)
    limit, _, _ = accel.accelerate(accel.partial_sums(_formula(seq, component, tail_sites)),
                                   stride=stride, tol=tol)
    return -(total + limit)


def growth_verdict(partial: np.ndarray) -> str:
    """
    Classify a nonnegative running sum as bounded or divergent.

    partial[k] is the sum of the first k+1 terms. The ratios P(2h)/P(h) over
    the last GROWTH_DOUBLINGS doublings decide: all below GROWTH_RATIO is
    bounded, all at or above it is divergent.
    """
    horizon = partial.size
    if horizon < 2 ** (GROWTH_DOUBLINGS + 1):
        return "inconclusive"
    if partial[-1] == 0:
        return "bounded"
    ratios = []
    for i in range(GROWTH_DOUBLINGS):
        upper = horizon >> i
        lower = upper >> 1
        low = partial[lower - 1]
        ratios.append(math.inf if low == 0 else partial[upper - 1] / low)
    if all(r >= GROWTH_RATIO for r in ratios):
        return "divergent"
    if all(r < GROWTH_RATIO for r in ratios):
        return "bounded"
    return "inconclusive"


def decompose(seq: CoefficientSequence, horizon: int, tol: float = 1e-15) -> Decomposition:
    """Summation-by-parts split with the full tails in (d, f)"""
    if horizon < 1:
        raise InvalidParametersError(f"horizon must be >= 1, got {horizon}")
    sites = np.arange(1, horizon + 1, dtype=np.float64)

    tails = {}
    for component in COMPONENTS:
        p = perturbation(seq, component, sites)
        anchor = tail_sum(seq, component, horizon + 1, tol)
        out = np.empty(horizon + 1)
        out[horizon] = anchor
        # x_n = x_{H+1} - sum_{j=n}^{H} p_j, accumulated from the top
        out[:horizon] = anchor - np.cumsum(p[::-1])[::-1]
        tails[component] = out

    d, f = tails["a-part"], tails["b-part"]
    c = np.zeros(horizon + 1)
    e = np.zeros(horizon + 1)

    sums = SummabilityReport(horizon=horizon)
    series = {
        "abs_c": np.cumsum(np.abs(c[:horizon])),
        "abs_e": np.cumsum(np.abs(e[:horizon])),
        "d_squared": np.cumsum(d[:horizon] ** 2),
        "f_squared": np.cumsum(f[:horizon] ** 2),
    }
    for name, partial in series.items():
        setattr(sums, name, float(partial[-1]))
        sums.verdicts[name] = growth_verdict(partial)

    log.debug("[DECOMPOSE] %s horizon=%d sum f^2=%.6g (%s) sum d^2=%.6g (%s)",
              seq.kind, horizon, sums.f_squared, sums.verdicts["f_squared"],
              sums.d_squared, sums.verdicts["d_squared"])
    return Decomposition(c=c, d=d, e=e, f=f, sums=sums)


def _limsup_verdict(values: np.ndarray) -> str:
    """Does the running quantity stay away from -infinity? Compares window maxima."""
    horizon = values.size
    if horizon < 8:
        return "inconclusive"
    if np.all(values == values[0]):
        return "bounded"
    maxima = []
    for i in range(3):
        upper = horizon >> i
        lower = upper >> 1
        maxima.append(float(np.max(values[lower:upper])))
    newest, middle, oldest = maxima
    slack = 1e-9 * (1.0 + abs(oldest))
    if newest >= oldest - slack:
        return "bounded"
    if newest < middle < oldest:
        return "diverging"
    return "inconclusive"


def check_hypotheses(seq: CoefficientSequence, horizon: int) -> HypothesisReport:
    """Running -sum log a_j, growth of sum (a_n-1)^2 + b_n^2 and the summability flag"""
    sites = np.arange(1, horizon + 1, dtype=np.float64)
    pa = perturbation(seq, "a-part", sites)
    pb = perturbation(seq, "b-part", sites)

    running = -np.cumsum(np.log1p(pa))
    limsup = _limsup_verdict(running)

    squares = np.cumsum(pa ** 2 + pb ** 2)
    growth = growth_verdict(squares)

    summable = decompose(seq, horizon).sums.summable_ok

    if summable:
        prediction = "finite-Z"
    elif limsup == "bounded" and growth == "divergent":
        prediction = "infinite-Z"
    else:
        prediction = "undetermined"

    log.info("[HYPOTHESES] %s horizon=%d limsup=%s squares=%s summable=%s -> %s",
             seq.kind, horizon, limsup, growth, summable, prediction)
    return HypothesisReport(
        horizon=horizon,
        log_a_min=float(running.min()),
        log_a_max=float(running.max()),
        log_a_final=float(running[-1]),
        limsup_verdict=limsup,
        square_sum=float(squares[-1]),
        square_sum_verdict=growth,
        summable_ok=summable,
        prediction=prediction,
    )


def threshold_profile(seq: CoefficientSequence, horizon: int) -> ThresholdProfile:
    """n^2-weighted limsup/liminf estimates deciding the 1/4 threshold"""
    if horizon < 4:
        raise InvalidParametersError(f"horizon must be >= 4, got {horizon}")
    sites = np.arange(horizon // 2, horizon + 1, dtype=np.float64)
    weight = sites * sites
    pa = weight * perturbation(seq, "a-part", sites)
    pb = weight * perturbation(seq, "b-part", sites)

    gamma_a = float(np.max(np.abs(pa)))
    gamma_a_plus = float(np.max(np.maximum(pa, 0.0)))
    gamma_b = float(np.max(np.abs(pb)))
    liminf_a = float(np.min(pa))
    liminf_b = float(np.min(pb))

    if 2 * gamma_a + gamma_b < 0.25 or 2 * gamma_a_plus + gamma_b < 0.25:
        prediction = "finite"
    elif liminf_a >= 0 and liminf_b >= 0 and 2 * liminf_a + liminf_b > 0.25:
        prediction = "infinite"
    else:
        prediction = "undetermined"

    return ThresholdProfile(horizon=horizon, gamma_a=gamma_a, gamma_a_plus=gamma_a_plus,
                            gamma_b=gamma_b, liminf_a=liminf_a, liminf_b=liminf_b,
                            prediction=prediction)


def finiteness_criteria(dec: Decomposition, horizon: Optional[int] = None) -> dict:
    """
    Estimate the two n^2-weighted limsup conditions for finitely many bound states.

    The first applies when a == 1, the second in general; both must stay below 1/8.
    Estimated as the maximum over the upper half of the horizon.
    """
    h = dec.horizon if horizon is None else min(horizon, dec.horizon)
    n = np.arange(max(2, h // 2), h + 1)
    i = n - 1  # array index of site n
    w = n.astype(np.float64) ** 2
    c, d, e, f = dec.c, dec.d, dec.e, dec.f

    diagonal_only = w * (np.abs(e[i]) + f[i] ** 2 + f[i + 1] ** 2)
    general = w * (np.abs(c[i]) + np.abs(c[i - 1])
                   + 24 * d[i - 1] ** 2 + 48 * d[i] ** 2 + 24 * d[i + 1] ** 2
                   + np.abs(e[i]) + 6 * f[i] ** 2 + 6 * f[i + 1] ** 2)
    first = float(np.max(diagonal_only))
    second = float(np.max(general))
    return {
        "diagonal_only": first,
        "diagonal_only_verdict": "finite" if first < 0.125 else "not-established",
        "general": second,
        "general_verdict": "finite" if second < 0.125 else "not-established",
    }
