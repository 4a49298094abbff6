"""Eigenvalue counts outside [-2, 2] by Sturm pivots, bisection and scans over section size"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Sequence

import numba
import numpy as np

from .errors import InvalidParametersError, SizeExceededError
from .jacobi import TruncatedJacobi, flip_sign, truncate
from .sequences import CoefficientSequence

log = logging.getLogger(__name__)

DEFAULT_ATOL = 1e-12
DEFAULT_EXPONENTS = (0.5, 1.0, 1.5)
ORACLE_LIMIT = 2000
PIVOT_GUARD = 64  # zero pivots become -PIVOT_GUARD * eps * ||J||
STABLE_SPAN = 100.0  # last three scan sizes must cover two decades


@numba.njit(cache=True, nogil=True)
def _positive_pivots(diag, offsq, t, floor):
    count = 0
    pivot = diag[0] - t
    if pivot == 0.0:
        pivot = -floor
    if pivot > 0.0:
        count += 1
    for k in range(1, diag.size):
        pivot = (diag[k] - t) - offsq[k - 1] / pivot
        if pivot == 0.0:
            pivot = -floor
        if pivot > 0.0:
            count += 1
    return count


@dataclass
class SpectrumReport:
    """Eigenvalues of a section outside [-2 - atol, 2 + atol] and their sums"""
    n: int
    above: List[float] = field(default_factory=list)
    below: List[float] = field(default_factory=list)
    lt_half: float = 0.0
    lt_alpha: Dict[float, float] = field(default_factory=dict)

    @property
    def count_above(self) -> int:
        return len(self.above)

    @property
    def count_below(self) -> int:
        return len(self.below)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["lt_alpha"] = {str(k): v for k, v in self.lt_alpha.items()}
        data.update(count_above=self.count_above, count_below=self.count_below)
        return data


@dataclass
class ScanRow:
    n: int
    count_above: int
    count_below: int
    lt_half: float

    @property
    def total(self) -> int:
        return self.count_above + self.count_below


@dataclass
class CountScan:
    rows: List[ScanRow]
    verdict: str  # stabilized | growing | inconclusive

    @property
    def totals(self) -> List[int]:
        return [row.total for row in self.rows]


def _floor(J: TruncatedJacobi) -> float:
    return PIVOT_GUARD * np.finfo(float).eps * max(J.norm_bound(), 1.0)


def count_above(J: TruncatedJacobi, t: float) -> int:
    """Number of eigenvalues strictly greater than t"""
    return int(_positive_pivots(J.diag, J.offdiag ** 2, float(t), _floor(J)))


def count_below(J: TruncatedJacobi, t: float) -> int:
    """Number of eigenvalues strictly below t"""
    return int(_positive_pivots(-J.diag, J.offdiag ** 2, -float(t), _floor(J)))


def _isolate_above(J: TruncatedJacobi, lower: float, atol: float) -> List[float]:
    """Eigenvalues in (lower, ||J||] located by bisecting the count function to width atol"""
    diag, offsq, floor = J.diag, J.offdiag ** 2, _floor(J)
    upper = max(J.norm_bound(), lower) + atol
    found = []
    stack = [(lower, upper, int(_positive_pivots(diag, offsq, lower, floor)), 0)]
    while stack:
        lo, hi, c_lo, c_hi = stack.pop()
        inside = c_lo - c_hi
        if inside <= 0:
            continue
        if hi - lo <= atol:
            found.extend([0.5 * (lo + hi)] * inside)
            continue
        mid = 0.5 * (lo + hi)
        c_mid = int(_positive_pivots(diag, offsq, mid, floor))
        stack.append((lo, mid, c_lo, c_mid))
        stack.append((mid, hi, c_mid, c_hi))
    return sorted(found)


def eigs_outside(J: TruncatedJacobi, atol: float = DEFAULT_ATOL,
                 exponents: Sequence[float] = DEFAULT_EXPONENTS) -> SpectrumReport:
    """All eigenvalues E with |E| > 2 + atol, each to width atol, plus eigenvalue sums"""
    if not atol > 0:
        raise InvalidParametersError(f"atol must be > 0, got {atol}")
    above = _isolate_above(J, 2.0 + atol, atol)
    below = sorted(-E for E in _isolate_above(flip_sign(J), 2.0 + atol, atol))

    outside = np.abs(np.array(above + below, dtype=np.float64))
    report = SpectrumReport(n=J.n, above=above, below=below)
    report.lt_half = math.fsum(np.sqrt(outside ** 2 - 4.0).tolist())
    report.lt_alpha = {float(p): math.fsum(((outside - 2.0) ** p).tolist()) for p in exponents}
    return report


def dense_oracle(J: TruncatedJacobi) -> np.ndarray:
    """All eigenvalues, ascending, by dense symmetric diagonalization"""
    if J.n > ORACLE_LIMIT:
        raise SizeExceededError(f"dense oracle is limited to n <= {ORACLE_LIMIT}, got n={J.n}")
    return np.linalg.eigvalsh(J.to_dense())


def scan_verdict(sizes: Sequence[int], totals: Sequence[int]) -> str:
    if len(totals) < 3:
        return "inconclusive"
    if totals[-1] == totals[-2] == totals[-3] and sizes[-1] >= STABLE_SPAN * sizes[-3]:
        return "stabilized"
    steady = all(b >= a for a, b in zip(totals, totals[1:]))
    if steady and totals[-1] > totals[-3]:
        return "growing"
    return "inconclusive"


def _scan_point(seq: CoefficientSequence, n: int) -> ScanRow:
    J = truncate(seq, n)
    report = eigs_outside(J)
    row = ScanRow(n=n, count_above=count_above(J, 2.0), count_below=count_below(J, -2.0),
                  lt_half=report.lt_half)
    log.info("[SPECTRUM] n=%d above=%d below=%d lt_half=%.6g", n, row.count_above, row.count_below, row.lt_half)
    return row


def count_scan(seq: CoefficientSequence, sizes: Sequence[int], threads: int = 1) -> CountScan:
    """Counts outside [-2, 2] per section size, with a stabilization verdict"""
    sizes = [int(n) for n in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidParametersError(f"scan sizes must be ascending, got {sizes}")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda n: _scan_point(seq, n), sizes))
    else:
        rows = [_scan_point(seq, n) for n in sizes]

    verdict = scan_verdict(sizes, [row.total for row in rows])
    if verdict == "inconclusive":
        log.warning("[SPECTRUM] scan over n=%s is inconclusive: totals %s", sizes, [row.total for row in rows])
    return CountScan(rows=rows, verdict=verdict)
